#include "dbarlab/forms.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "dbarlab/domain.hpp"

namespace dbarlab {

int mask_q(IndexMask m) { return std::popcount(unsigned(m)); }

std::vector<IndexMask> multiindex_list(int q) {
  std::vector<IndexMask> out;
  // lex order on tuples; for n=2 this coincides with numeric mask order
  for (IndexMask m = 0; m < (1 << kDim); ++m)
    if (mask_q(m) == q) out.push_back(m);
  return out;
}

int insert_sign(int l, IndexMask J) {
  if (J & (1u << l)) return 0;
  int below = std::popcount(unsigned(J) & ((1u << l) - 1));
  return below % 2 == 0 ? 1 : -1;
}

int merge_sign(IndexMask A, IndexMask B) {
  if (A & B) return 0;
  int inv = 0;
  for (int b = 0; b < kDim; ++b)
    if (B & (1u << b)) inv += std::popcount(unsigned(A) >> (b + 1));
  return inv % 2 == 0 ? 1 : -1;
}

std::vector<int> mask_indices(IndexMask m) {
  std::vector<int> v;
  for (int j = 0; j < kDim; ++j)
    if (m & (1u << j)) v.push_back(j);
  return v;
}

double PointForm::norm_sq() const {
  double s = 0.0;
  for (const auto& c : comp) s += std::norm(c);
  return s;
}

cplx inner(const PointForm& f, const PointForm& g) {
  cplx s = 0.0;
  for (int m = 0; m < 4; ++m) s += f.comp[m] * std::conj(g.comp[m]);
  return s;
}

void PolyForm::set(IndexMask J, Poly p) {
  if (mask_q(J) != q_)
    throw std::invalid_argument("PolyForm::set: index length != q");
  if (p.empty())
    comps_.erase(J);
  else
    comps_[J] = std::move(p);
}

const Poly& PolyForm::at(IndexMask J) const {
  static const Poly kZero;
  auto it = comps_.find(J);
  return it == comps_.end() ? kZero : it->second;
}

bool PolyForm::empty() const {
  for (const auto& [J, p] : comps_) {
    (void)J;
    if (!p.empty()) return false;
  }
  return true;
}

int PolyForm::degree() const {
  int d = 0;
  for (const auto& [J, p] : comps_) {
    (void)J;
    d = std::max(d, p.degree());
  }
  return d;
}

PolyForm& PolyForm::operator+=(const PolyForm& o) {
  if (o.q_ != q_) throw std::invalid_argument("PolyForm +=: degree mismatch");
  for (const auto& [J, p] : o.comps_) {
    Poly s = at(J);
    s += p;
    set(J, std::move(s));
  }
  return *this;
}

PolyForm& PolyForm::operator*=(cplx s) {
  for (auto& [J, p] : comps_) {
    (void)J;
    p *= s;
  }
  return *this;
}

PointForm PolyForm::eval(const Pt& z) const {
  PointForm v;
  v.q = q_;
  for (const auto& [J, p] : comps_) v.comp[J] = p.eval(z);
  return v;
}

PolyForm dbar(const PolyForm& f) {
  if (f.q() >= kDim)
    throw std::invalid_argument("dbar: form already has top degree");
  PolyForm out(f.q() + 1);
  for (const auto& [J, p] : f.components()) {
    for (int l = 0; l < kDim; ++l) {
      int s = insert_sign(l, J);
      if (s == 0) continue;
      Poly d = p.dzbar(l);
      if (d.empty()) continue;
      IndexMask L = J | IndexMask(1u << l);
      Poly acc = out.at(L);
      acc += d * cplx(double(s));
      out.set(L, std::move(acc));
    }
  }
  return out;
}

PolyForm theta(const PolyForm& f) {
  if (f.q() < 1) throw std::invalid_argument("theta: q must be >= 1");
  PolyForm out(f.q() - 1);
  for (const auto& [J, p] : f.components()) {
    for (int j : mask_indices(J)) {
      IndexMask K = J & ~IndexMask(1u << j);
      int s = insert_sign(j, K);  // sign of f_{jK} = s * f_J
      Poly d = p.dz(j);
      if (d.empty()) continue;
      Poly acc = out.at(K);
      acc += d * cplx(-double(s));
      out.set(K, std::move(acc));
    }
  }
  return out;
}

PolyForm contract(const PolyForm& f, const std::array<Poly, kDim>& c) {
  if (f.q() < 1) throw std::invalid_argument("contract: q must be >= 1");
  PolyForm out(f.q() - 1);
  for (const auto& [J, p] : f.components()) {
    for (int j : mask_indices(J)) {
      IndexMask K = J & ~IndexMask(1u << j);
      int s = insert_sign(j, K);
      if (c[j].empty()) continue;
      Poly acc = out.at(K);
      acc += (c[j] * p) * cplx(double(s));
      out.set(K, std::move(acc));
    }
  }
  return out;
}

PolyForm contract_normal(const Domain& d, const PolyForm& f) {
  return contract(f, d.drho());
}

PointForm contract_point(const PointForm& f, const std::array<cplx, kDim>& c) {
  PointForm out;
  out.q = f.q - 1;
  for (IndexMask J : multiindex_list(f.q)) {
    cplx v = f.comp[J];
    if (v == cplx(0.0)) continue;
    for (int j : mask_indices(J)) {
      IndexMask K = J & ~IndexMask(1u << j);
      int s = insert_sign(j, K);
      out.comp[K] += double(s) * c[j] * v;
    }
  }
  return out;
}

PointForm wedge_point(const PointForm& a, const PointForm& b) {
  PointForm out;
  out.q = a.q + b.q;
  for (IndexMask A : multiindex_list(a.q))
    for (IndexMask B : multiindex_list(b.q)) {
      int s = merge_sign(A, B);
      if (s == 0) continue;
      out.comp[A | B] += double(s) * a.comp[A] * b.comp[B];
    }
  return out;
}

SplitResult split_normal_tangential(const Domain& d, const PolyForm& f,
                                    const Pt& z) {
  if (f.q() < 1)
    throw std::invalid_argument("split: q must be >= 1");
  std::array<cplx, kDim> dz;  // drho/dz_j at z
  for (int j = 0; j < kDim; ++j) dz[j] = d.drho()[j].eval(z);
  double g2 = 0.0;
  for (int j = 0; j < kDim; ++j) g2 += std::norm(dz[j]);
  double grad = 2.0 * std::sqrt(g2);  // |grad rho|
  if (grad < 1e-8)
    throw std::runtime_error(
        "split: |grad rho| < 1e-8 at the split point (non-smooth boundary?)");
  // unit-length dbar rho covector: components conj(drho/dz_j)/|dbar rho|
  PointForm nu;
  nu.q = 1;
  double len = std::sqrt(g2);
  for (int j = 0; j < kDim; ++j) nu.comp[1u << j] = std::conj(dz[j]) / len;
  std::array<cplx, kDim> nu_dual;  // (dbar rho)^* coefficients, unit scaled
  for (int j = 0; j < kDim; ++j) nu_dual[j] = dz[j] / len;

  PointForm fv = f.eval(z);
  PointForm fN = contract_point(fv, nu_dual);
  PointForm fnu = wedge_point(fN, nu);
  SplitResult r;
  r.normal = fnu;
  r.tangential.q = fv.q;
  for (int m = 0; m < 4; ++m) r.tangential.comp[m] = fv.comp[m] - fnu.comp[m];
  return r;
}

double hessian_action_point(const std::array<std::array<cplx, kDim>, kDim>& H,
                            const PointForm& f) {
  cplx s = 0.0;
  for (IndexMask K : multiindex_list(f.q - 1)) {
    for (int j = 0; j < kDim; ++j) {
      if (K & (1u << j)) continue;
      int sj = insert_sign(j, K);
      cplx fjK = double(sj) * f.comp[K | IndexMask(1u << j)];
      for (int k = 0; k < kDim; ++k) {
        if (K & (1u << k)) continue;
        int sk = insert_sign(k, K);
        cplx fkK = double(sk) * f.comp[K | IndexMask(1u << k)];
        s += H[j][k] * fjK * std::conj(fkK);
      }
    }
  }
  return s.real();
}

double hessian_action(const ScalarField& b, const PolyForm& f, const Pt& z) {
  if (f.q() < 1) throw std::invalid_argument("hessian_action: q must be >= 1");
  std::array<std::array<cplx, kDim>, kDim> H;
  for (int j = 0; j < kDim; ++j)
    for (int k = 0; k < kDim; ++k) H[j][k] = b.hessian(j, k).eval(z);
  return hessian_action_point(H, f.eval(z));
}

}  // namespace dbarlab

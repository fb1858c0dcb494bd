#include "dbarlab/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dbarlab/parallel.hpp"

namespace dbarlab {

Poly BasisDescriptor::coeff(std::size_t i) const {
  Poly p = Poly::monomial(elems[i].mono);
  if (trace_weight) p = p * *trace_weight;
  return p;
}

PolyForm BasisDescriptor::element(std::size_t i) const {
  return PolyForm::component(q, elems[i].J, coeff(i));
}

int BasisDescriptor::max_coeff_degree() const {
  return N + (trace_weight ? trace_weight->degree() : 0);
}

BasisDescriptor build_basis(int n, int q, int N) {
  if (n != kDim) throw std::invalid_argument("build_basis: n must be 2");
  if (q < 1 || q > n)
    throw std::invalid_argument("build_basis: q must be in 1..n");
  if (N < 0) throw std::invalid_argument("build_basis: N must be >= 0");
  BasisDescriptor b;
  b.n = n;
  b.q = q;
  b.N = N;
  auto js = multiindex_list(q);
  for (int deg = 0; deg <= N; ++deg)
    for (int a1 = deg; a1 >= 0; --a1)
      for (int a2 = deg - a1; a2 >= 0; --a2)
        for (int b1 = deg - a1 - a2; b1 >= 0; --b1) {
          int b2 = deg - a1 - a2 - b1;
          Mono m{std::uint8_t(a1), std::uint8_t(a2), std::uint8_t(b1),
                 std::uint8_t(b2)};
          for (IndexMask J : js) b.elems.push_back({m, J});
        }
  return b;
}

BasisDescriptor build_dirichlet_basis(const DomainPtr& d, int N) {
  BasisDescriptor b = build_basis(kDim, kDim, N);
  Poly w;
  if (d->kind() == DomainKind::Polydisc) {
    double r1 = d->polydisc_r1(), r2 = d->polydisc_r2();
    Poly f1 = Poly(r1 * r1) - Poly::monomial(1, 0, 1, 0);
    Poly f2 = Poly(r2 * r2) - Poly::monomial(0, 1, 0, 1);
    w = f1 * f2;
  } else {
    w = d->rho() * cplx(-1.0);
  }
  b.trace_weight = std::move(w);
  return b;
}

CMatrix GalerkinSystem::A() const {
  if (!has_boundary || sigma == 0.0) return E;
  return E.plus_scaled(B, sigma);
}

double default_sigma(const Domain& d) { return 100.0 / d.diameter(); }

namespace {

struct SymbolicElement {
  PolyForm e, de, te;  // element, dbar, theta
};

MomentTable build_moments_with_threads(const QuadratureRule& r, int deg,
                                       int nthreads) {
  return nthreads == 1 ? interior_moments_serial(r, deg)
                       : interior_moments(r, deg);
}
BoundaryTables build_boundary_with_threads(const QuadratureRule& r, int deg,
                                           int nthreads) {
  return nthreads == 1 ? boundary_moments_serial(r, deg)
                       : boundary_moments(r, deg);
}

cplx form_pairing(const PolyForm& f, const PolyForm& g, const MomentTable& mu) {
  cplx s = 0.0;
  for (const auto& [J, p] : f.components()) {
    const Poly& q = g.at(J);
    if (q.empty()) continue;
    s += pairing(p, q, mu);
  }
  return s;
}

// ∮ <nu -| f, nu -| g> dS through the normal-weighted tables.
cplx boundary_pairing(const PolyForm& f, const PolyForm& g,
                      const BoundaryTables& T, int q) {
  cplx s = 0.0;
  for (IndexMask K : multiindex_list(q - 1)) {
    for (int l = 0; l < kDim; ++l) {
      if (K & (1u << l)) continue;
      int sl = insert_sign(l, K);
      const Poly& pf = f.at(K | IndexMask(1u << l));
      if (pf.empty()) continue;
      for (int lp = 0; lp < kDim; ++lp) {
        if (K & (1u << lp)) continue;
        int slp = insert_sign(lp, K);
        const Poly& pg = g.at(K | IndexMask(1u << lp));
        if (pg.empty()) continue;
        cplx val = 0.0;
        const MomentTable& mu = T.at(l, lp);
        for (const auto& [kf, cf] : pf.terms())
          for (const auto& [kg, cg] : pg.terms())
            val += cf * std::conj(cg) *
                   mu.at_pair(Mono::from_key(kf), Mono::from_key(kg));
        s += double(sl * slp) * val;
      }
    }
  }
  return s;
}

GalerkinSystem assemble_impl(const DomainPtr& d, const BasisDescriptor& basis,
                             const QuadratureRule& q_int,
                             const QuadratureRule* q_bdy, double sigma,
                             int nthreads) {
  if (sigma < 0.0) throw std::invalid_argument("assemble: sigma must be >= 0");
  const int n = int(basis.size());
  GalerkinSystem sys;
  sys.basis = basis;
  sys.domain = d;
  sys.sigma = sigma;
  sys.level_int = q_int.level;
  sys.has_boundary = q_bdy != nullptr;
  sys.level_bdy = q_bdy ? q_bdy->level : 0;
  if (!sys.has_boundary && sigma > 0.0 && !basis.trace_weight &&
      basis.q < kDim)
    throw std::invalid_argument(
        "assemble: boundary rule required for q < n with a positive penalty");

  std::vector<SymbolicElement> sym(n);
  for (int i = 0; i < n; ++i) {
    sym[i].e = basis.element(i);
    if (basis.q < kDim) sym[i].de = dbar(sym[i].e);
    sym[i].te = theta(sym[i].e);
  }
  int dmax = 0;
  for (const auto& s : sym) {
    dmax = std::max(dmax, s.e.degree());
    dmax = std::max(dmax, s.de.degree());
    dmax = std::max(dmax, s.te.degree());
  }
  MomentTable mu = build_moments_with_threads(q_int, 2 * dmax, nthreads);

  sys.M = CMatrix(n, n);
  sys.E = CMatrix(n, n);
  if (sys.has_boundary) sys.B = CMatrix(n, n);
  std::optional<BoundaryTables> bt;
  if (sys.has_boundary)
    bt = build_boundary_with_threads(*q_bdy, 2 * dmax, nthreads);

  // upper triangle, flattened; each entry written by exactly one thread
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(std::size_t(n) * (n + 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) pairs.emplace_back(i, j);

#pragma omp parallel for schedule(dynamic, 32) num_threads(nthreads)
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    auto [i, j] = pairs[k];
    // row i, column j: entries <op e_j, op e_i>
    sys.M.at(i, j) = form_pairing(sym[j].e, sym[i].e, mu);
    cplx e = 0.0;
    if (basis.q < kDim) e += form_pairing(sym[j].de, sym[i].de, mu);
    e += form_pairing(sym[j].te, sym[i].te, mu);
    sys.E.at(i, j) = e;
    if (sys.has_boundary)
      sys.B.at(i, j) = boundary_pairing(sym[j].e, sym[i].e, *bt, basis.q);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      sys.M.at(i, j) = std::conj(sys.M.at(j, i));
      sys.E.at(i, j) = std::conj(sys.E.at(j, i));
      if (sys.has_boundary) sys.B.at(i, j) = std::conj(sys.B.at(j, i));
    }

  // diagonals of Hermitian forms are real; drop rounding dust
  for (int i = 0; i < n; ++i) {
    sys.M.at(i, i) = sys.M.at(i, i).real();
    sys.E.at(i, i) = sys.E.at(i, i).real();
    if (sys.has_boundary) sys.B.at(i, i) = sys.B.at(i, i).real();
  }

  try {
    cholesky(sys.M);
  } catch (const std::exception&) {
    std::vector<double> ev;
    CMatrix V;
    jacobi_hermitian(sys.M, ev, V);
    std::ostringstream os;
    os << "assemble: mass matrix failed Cholesky (quadrature too coarse for "
          "the basis size); eigenvalue range ["
       << ev.front() << ", " << ev.back() << "], condition "
       << (ev.front() > 0 ? ev.back() / ev.front() : INFINITY);
    throw std::runtime_error(os.str());
  }
  return sys;
}

}  // namespace

GalerkinSystem assemble(const DomainPtr& d, const BasisDescriptor& basis,
                        const QuadratureRule& q_int,
                        const QuadratureRule* q_bdy, double sigma) {
  return assemble_impl(d, basis, q_int, q_bdy, sigma, thread_count());
}

GalerkinSystem assemble_serial(const DomainPtr& d, const BasisDescriptor& basis,
                               const QuadratureRule& q_int,
                               const QuadratureRule* q_bdy, double sigma) {
  return assemble_impl(d, basis, q_int, q_bdy, sigma, 1);
}

GalerkinSystem assemble_auto(const DomainPtr& d, const BasisDescriptor& basis,
                             double sigma, int level_override) {
  int lvl = level_override > 0 ? level_override
                               : auto_level(basis.max_coeff_degree());
  QuadratureRule qi = interior_quadrature(d, lvl);
  bool want_bdy = !basis.trace_weight && d->smooth_boundary();
  if (basis.q == kDim && !d->smooth_boundary()) want_bdy = false;
  if (want_bdy) {
    QuadratureRule qb = boundary_quadrature(d, lvl + 1);
    return assemble(d, basis, qi, &qb, sigma);
  }
  return assemble(d, basis, qi, nullptr, sigma);
}

LoadVector load_vector(const PolyForm& f, const BasisDescriptor& basis,
                       const QuadratureRule& q_int) {
  if (f.q() != basis.q)
    throw std::invalid_argument("load_vector: form degree != basis degree");
  LoadVector out;
  int deg = f.degree() + basis.max_coeff_degree();
  out.exactness_warning = deg > q_int.exactness_degree;
  MomentTable mu = interior_moments(q_int, deg);
  out.v.resize(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Poly& p = f.at(basis.elems[i].J);
    out.v[i] = p.empty() ? cplx(0.0) : pairing(p, basis.coeff(i), mu);
  }
  return out;
}

PolyForm reconstruct_form(const BasisDescriptor& basis,
                          const std::vector<cplx>& coeffs) {
  if (coeffs.size() != basis.size())
    throw std::invalid_argument("reconstruct_form: coefficient count mismatch");
  PolyForm f(basis.q);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (coeffs[i] == cplx(0.0)) continue;
    PolyForm e = basis.element(i);
    e *= coeffs[i];
    f += e;
  }
  return f;
}

}  // namespace dbarlab

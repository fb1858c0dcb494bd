#include "dbarlab/poly.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dbarlab {

namespace {
cplx ipow(cplx z, int k) {
  cplx r = 1.0;
  while (k-- > 0) r *= z;
  return r;
}
}  // namespace

cplx Mono::eval(const Pt& z) const {
  return ipow(z[0], a1) * ipow(z[1], a2) * ipow(std::conj(z[0]), b1) *
         ipow(std::conj(z[1]), b2);
}

Poly Poly::norm_sq() {
  Poly p;
  p.add_term(Mono{1, 0, 1, 0}, 1.0);
  p.add_term(Mono{0, 1, 0, 1}, 1.0);
  return p;
}

void Poly::add_term(Mono m, cplx c) {
  if (c == cplx(0.0)) return;
  auto [it, fresh] = terms_.emplace(m.key(), c);
  if (!fresh) {
    it->second += c;
    if (std::abs(it->second) == 0.0) terms_.erase(it);
  }
}

Poly& Poly::operator+=(const Poly& o) {
  for (const auto& [k, c] : o.terms_) add_term(Mono::from_key(k), c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  for (const auto& [k, c] : o.terms_) add_term(Mono::from_key(k), -c);
  return *this;
}

Poly& Poly::operator*=(cplx s) {
  if (s == cplx(0.0)) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, c] : terms_) c *= s;
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly r;
  for (const auto& [ka, ca] : a.terms_)
    for (const auto& [kb, cb] : b.terms_) {
      Mono ma = Mono::from_key(ka), mb = Mono::from_key(kb);
      Mono m{std::uint8_t(ma.a1 + mb.a1), std::uint8_t(ma.a2 + mb.a2),
             std::uint8_t(ma.b1 + mb.b1), std::uint8_t(ma.b2 + mb.b2)};
      r.add_term(m, ca * cb);
    }
  return r;
}

int Poly::degree() const {
  int d = 0;
  for (const auto& [k, c] : terms_) {
    (void)c;
    int dk = Mono::from_key(k).degree();
    if (dk > d) d = dk;
  }
  return d;
}

Poly Poly::conj() const {
  Poly r;
  for (const auto& [k, c] : terms_) {
    Mono m = Mono::from_key(k);
    r.add_term(Mono{m.b1, m.b2, m.a1, m.a2}, std::conj(c));
  }
  return r;
}

Poly Poly::dz(int j) const {
  Poly r;
  for (const auto& [k, c] : terms_) {
    Mono m = Mono::from_key(k);
    int e = m.a(j);
    if (e == 0) continue;
    Mono d = m;
    if (j == 0)
      d.a1--;
    else
      d.a2--;
    r.add_term(d, c * double(e));
  }
  return r;
}

Poly Poly::dzbar(int j) const {
  Poly r;
  for (const auto& [k, c] : terms_) {
    Mono m = Mono::from_key(k);
    int e = m.b(j);
    if (e == 0) continue;
    Mono d = m;
    if (j == 0)
      d.b1--;
    else
      d.b2--;
    r.add_term(d, c * double(e));
  }
  return r;
}

cplx Poly::eval(const Pt& z) const {
  cplx s = 0.0;
  for (const auto& [k, c] : terms_) s += c * Mono::from_key(k).eval(z);
  return s;
}

Poly Poly::scaled_arg(double s) const {
  Poly r;
  for (const auto& [k, c] : terms_) {
    Mono m = Mono::from_key(k);
    r.add_term(m, c * std::pow(s, m.degree()));
  }
  return r;
}

double Poly::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& [k, c] : terms_) {
    (void)k;
    m = std::max(m, std::abs(c));
  }
  return m;
}

bool Poly::is_real(double tol) const {
  double scale = std::max(max_abs_coeff(), 1e-300);
  for (const auto& [k, c] : terms_) {
    Mono m = Mono::from_key(k);
    Mono sw{m.b1, m.b2, m.a1, m.a2};
    auto it = terms_.find(sw.key());
    cplx other = it == terms_.end() ? cplx(0.0) : it->second;
    if (std::abs(c - std::conj(other)) > tol * scale) return false;
  }
  return true;
}

std::string Poly::str() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, c] : terms_) {
    Mono m = Mono::from_key(k);
    if (!first) os << " + ";
    first = false;
    os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag())
       << "i)";
    if (m.a1) os << " z1^" << int(m.a1);
    if (m.a2) os << " z2^" << int(m.a2);
    if (m.b1) os << " zb1^" << int(m.b1);
    if (m.b2) os << " zb2^" << int(m.b2);
  }
  if (first) os << "0";
  return os.str();
}

ScalarField::ScalarField(Poly p) : p_(std::move(p)) {
  if (!p_.is_real(1e-10))
    throw std::invalid_argument(
        "ScalarField: coefficients are not conjugate-symmetric (field is not "
        "real-valued)");
}

}  // namespace dbarlab

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <string>

namespace dbarlab {

using cplx = std::complex<double>;

// Ambient complex dimension. Everything in this project lives in C^2.
inline constexpr int kDim = 2;

using Pt = std::array<cplx, kDim>;

// Monomial z1^a1 z2^a2 zb1^b1 zb2^b2 (zb = conjugate variable).
struct Mono {
  std::uint8_t a1 = 0, a2 = 0, b1 = 0, b2 = 0;

  std::uint32_t key() const {
    return std::uint32_t(a1) | std::uint32_t(a2) << 8 | std::uint32_t(b1) << 16 |
           std::uint32_t(b2) << 24;
  }
  static Mono from_key(std::uint32_t k) {
    return Mono{std::uint8_t(k & 0xff), std::uint8_t(k >> 8 & 0xff),
                std::uint8_t(k >> 16 & 0xff), std::uint8_t(k >> 24 & 0xff)};
  }
  int a(int j) const { return j == 0 ? a1 : a2; }
  int b(int j) const { return j == 0 ? b1 : b2; }
  int degree() const { return int(a1) + a2 + b1 + b2; }
  cplx eval(const Pt& z) const;
};

// Polynomial in (z, zbar) with complex coefficients, stored sparsely in a
// canonical (key-ordered) map. Zero coefficients are never stored.
class Poly {
 public:
  Poly() = default;
  explicit Poly(cplx c) { add_term(Mono{}, c); }

  static Poly monomial(Mono m, cplx c = 1.0) {
    Poly p;
    p.add_term(m, c);
    return p;
  }
  // Convenience: z1^a1 z2^a2 zb1^b1 zb2^b2
  static Poly monomial(int a1, int a2, int b1, int b2, cplx c = 1.0) {
    return monomial(Mono{std::uint8_t(a1), std::uint8_t(a2), std::uint8_t(b1),
                         std::uint8_t(b2)},
                    c);
  }
  static Poly zero() { return Poly(); }
  // |z|^2 = z1 zb1 + z2 zb2
  static Poly norm_sq();

  void add_term(Mono m, cplx c);

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(cplx s);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, cplx s) { return a *= s; }
  friend Poly operator*(cplx s, Poly a) { return a *= s; }
  friend Poly operator*(const Poly& a, const Poly& b);

  bool empty() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }
  int degree() const;

  Poly conj() const;
  Poly dz(int j) const;     // d/dz_j
  Poly dzbar(int j) const;  // d/dzbar_j

  cplx eval(const Pt& z) const;

  // Substitute z -> s*z (s real), i.e. coefficients scale by s^degree.
  Poly scaled_arg(double s) const;

  // Largest |coefficient|, 0 for the zero polynomial.
  double max_abs_coeff() const;

  // true if p(z) is real for all z, i.e. coefficient map is conj-symmetric
  // under (a,b) <-> (b,a), up to `tol` on coefficients.
  bool is_real(double tol = 1e-12) const;

  const std::map<std::uint32_t, cplx>& terms() const { return terms_; }

  std::string str() const;

 private:
  std::map<std::uint32_t, cplx> terms_;
};

// Real-valued polynomial scalar field (conjugate-symmetric coefficients);
// used for certificate functions and defining functions.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(Poly p);
  const Poly& poly() const { return p_; }
  double eval(const Pt& z) const { return p_.eval(z).real(); }
  // Complex Hessian entry d^2 b / dz_j dzbar_k.
  Poly hessian(int j, int k) const { return p_.dz(j).dzbar(k); }

 private:
  Poly p_;
};

}  // namespace dbarlab

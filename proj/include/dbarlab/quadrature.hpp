#pragma once

#include <functional>
#include <vector>

#include "dbarlab/domain.hpp"
#include "dbarlab/forms.hpp"

namespace dbarlab {

// Deterministic product quadrature in star coordinates. Interior rules use
// Gauss-Legendre radial x Gauss-Legendre (in u = |w2|^2) x uniform phase
// grids; boundary rules use the same direction grid with the exact surface
// element R^3 |grad rho| / (w . grad rho) relative to the solid angle.
// Node ordering is canonical (direction-major, radial minor) regardless of
// thread count.
struct QuadratureRule {
  enum class Kind { Interior, Boundary };
  Kind kind = Kind::Interior;
  int level = 1;
  DomainPtr domain;
  std::vector<Pt> nodes;
  std::vector<double> weights;
  std::vector<NormalData> normals;  // boundary rules only
  int exactness_degree = 0;         // heuristic for built-in kinds

  double total_weight() const;
  std::size_t size() const { return nodes.size(); }
};

// level >= 1. Exact for ball monomials of total degree <= 2*level.
QuadratureRule interior_quadrature(const DomainPtr& d, int level);

// Interior rule with the radial integral split into panels at the given
// fractions of the star radius (exclusive of 0 and 1, sorted). Resolves
// sharp membership cuts along dilation families exactly.
QuadratureRule interior_quadrature_radial_panels(const DomainPtr& d, int level,
                                                 std::vector<double> fractions);

// Interior rule with a per-direction radial panel at the collar boundary
// {dist(z, bd) = delta}: collar masses are resolved regardless of delta.
QuadratureRule interior_quadrature_collar_split(const DomainPtr& d, int level,
                                                double delta);

// Throws for non-smooth-boundary kinds (polydisc) and on star violations.
QuadratureRule boundary_quadrature(const DomainPtr& d, int level);

// Default level for a polynomial trial space of degree N: targets exact
// integration of monomials of total degree <= 2N+4 on built-ins.
int auto_level(int N);

// Gauss-Legendre nodes/weights on [0,1] (Newton on Legendre polynomials).
void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w);

// --- monomial moment tables -------------------------------------------------
// mu[a,b] = sum_i w_i z^a zbar^b over the rule's nodes, for |a|+|b| <= degree.
// The node sum for each entry runs serially in node order: entries are
// bit-identical for any thread count.
class MomentTable {
 public:
  MomentTable() = default;
  MomentTable(int degree, std::vector<cplx> data);
  int degree() const { return degree_; }
  cplx at(int a1, int a2, int b1, int b2) const;
  cplx at_pair(const Mono& p, const Mono& conj_q) const {
    return at(p.a1 + conj_q.b1, p.a2 + conj_q.b2, p.b1 + conj_q.a1,
              p.b2 + conj_q.a2);
  }

 private:
  int degree_ = -1;
  int stride_ = 0;
  std::vector<cplx> mu_;
};

MomentTable interior_moments(const QuadratureRule& rule, int degree);
MomentTable interior_moments_serial(const QuadratureRule& rule, int degree);

// Boundary tables weighted by the unit normal: T(l,lp)[a,b] =
// sum_i w_i nu_l(z_i) conj(nu_lp(z_i)) z_i^a zbar_i^b.
struct BoundaryTables {
  std::array<std::array<MomentTable, kDim>, kDim> t;
  const MomentTable& at(int l, int lp) const { return t[l][lp]; }
};
BoundaryTables boundary_moments(const QuadratureRule& rule, int degree);
BoundaryTables boundary_moments_serial(const QuadratureRule& rule, int degree);

// integral of a polynomial / pairing integral of P conj(Q) via a table
cplx integrate(const Poly& p, const MomentTable& mu);
cplx pairing(const Poly& p, const Poly& q, const MomentTable& mu);

// Direct node-sum integration (serial, canonical order). Independent of the
// moment-table path; used by checkers and tests.
cplx integrate_fn(const QuadratureRule& rule,
                  const std::function<cplx(const Pt&)>& f);
double integrate_fn_real(const QuadratureRule& rule,
                         const std::function<double(const Pt&)>& f);

// L2 pairing of two polynomial forms by direct node evaluation.
cplx form_inner_numeric(const QuadratureRule& rule, const PolyForm& f,
                        const PolyForm& g);

// Residual of the Green identity
//   <dbar u, f> - <u, theta f> = ∮ <u, nu* -| f> dS
// (unit-normal pairing, derived by monomial brute force; see tests).
double check_green(const Domain& d, const PolyForm& u, const PolyForm& f,
                   const QuadratureRule& q_int, const QuadratureRule& q_bdy);

}  // namespace dbarlab

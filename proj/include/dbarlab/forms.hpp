#pragma once

#include <array>
#include <map>
#include <vector>

#include "dbarlab/poly.hpp"

namespace dbarlab {

class Domain;

// Strictly increasing index tuples J of {1..n} are stored as bitmasks
// (bit j-1 set iff j in J); for n = 2 the masks are 0, 1, 2, 3.
using IndexMask = std::uint8_t;

int mask_q(IndexMask m);
// Lex-ordered list of all strictly increasing q-tuples.
std::vector<IndexMask> multiindex_list(int q);
// Sign of sorting dzbar_l into dzbar_J (l zero-based); 0 if l already in J.
int insert_sign(int l, IndexMask J);
// Sign of merging two disjoint sorted tuples A followed by B; 0 if not disjoint.
int merge_sign(IndexMask A, IndexMask B);
std::vector<int> mask_indices(IndexMask m);  // zero-based, ascending

// Pointwise value of a (0,q)-form: component values indexed by mask.
struct PointForm {
  int q = 0;
  std::array<cplx, 4> comp{};  // by mask; only popcount-q slots used

  double norm_sq() const;
  friend cplx inner(const PointForm& f, const PointForm& g);  // <f,g>
};

// (0,q)-form with polynomial coefficients: sum'_J f_J dzbar_J.
class PolyForm {
 public:
  PolyForm() = default;
  explicit PolyForm(int q) : q_(q) {}

  static PolyForm from_scalar(Poly p) {
    PolyForm f(0);
    f.set(0, std::move(p));
    return f;
  }
  // single-component form p dzbar_J
  static PolyForm component(int q, IndexMask J, Poly p) {
    PolyForm f(q);
    f.set(J, std::move(p));
    return f;
  }

  int q() const { return q_; }
  void set(IndexMask J, Poly p);
  const Poly& at(IndexMask J) const;  // zero poly if absent
  const std::map<IndexMask, Poly>& components() const { return comps_; }
  bool empty() const;
  int degree() const;

  PolyForm& operator+=(const PolyForm& o);
  PolyForm& operator*=(cplx s);
  friend PolyForm operator+(PolyForm a, const PolyForm& b) { return a += b; }
  friend PolyForm operator*(PolyForm a, cplx s) { return a *= s; }

  PointForm eval(const Pt& z) const;

 private:
  int q_ = 0;
  std::map<IndexMask, Poly> comps_;
};

// dbar f = sum_l sum'_J (df_J/dzbar_l) dzbar_l ^ dzbar_J, exact symbolic.
// Throws for q = n.
PolyForm dbar(const PolyForm& f);

// Formal adjoint: theta f = -sum'_K sum_j (df_{jK}/dz_j) dzbar_K.
// Sign convention fixed by the Green identity <dbar u, f> = <u, theta f>
// for forms vanishing on the boundary. Throws for q = 0.
PolyForm theta(const PolyForm& f);

// Contraction with the (0,1)-vector field dual to sum_j c_j dzbar_j:
// result_K = sum_j c_j f_{jK}. Coefficients c_j given as polynomials.
PolyForm contract(const PolyForm& f, const std::array<Poly, kDim>& c);

// (dbar rho)* -| f with the domain's raw defining function gradient.
PolyForm contract_normal(const Domain& d, const PolyForm& f);

// Pointwise contraction with constant covector components.
PointForm contract_point(const PointForm& f, const std::array<cplx, kDim>& c);

// Wedge of point values: (0,p) ^ (0,s).
PointForm wedge_point(const PointForm& a, const PointForm& b);

// Normal/tangential split at a boundary point: f = f^tau + f^nu with
// f^nu = f_N ^ (unit dbar rho) and (unit dbar rho)* -| f^tau = 0.
// Throws if |grad rho(z)| < 1e-8.
struct SplitResult {
  PointForm tangential;
  PointForm normal;
};
SplitResult split_normal_tangential(const Domain& d, const PolyForm& f,
                                    const Pt& z);

// Complex Hessian of a scalar field acting on a (0,q)-form at a point:
// H_q(b)(f) = sum'_K sum_{j,k} (d^2 b/dz_j dzbar_k) f_{jK} conj(f_{kK}).
// Real by hermiticity of the Hessian. Requires q >= 1.
double hessian_action(const ScalarField& b, const PolyForm& f, const Pt& z);
double hessian_action_point(const std::array<std::array<cplx, kDim>, kDim>& H,
                            const PointForm& f);

}  // namespace dbarlab

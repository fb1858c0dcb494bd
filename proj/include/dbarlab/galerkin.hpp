#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dbarlab/matrix.hpp"
#include "dbarlab/quadrature.hpp"

namespace dbarlab {

// Trial-space element: monomial coefficient (optionally times a zero-trace
// weight) on dzbar_J.
struct BasisElement {
  Mono mono;
  IndexMask J = 0;
};

struct BasisDescriptor {
  int n = kDim;
  int q = 1;
  int N = 0;  // total degree bound of the monomial part
  std::vector<BasisElement> elems;
  std::optional<Poly> trace_weight;  // multiplied into every coefficient

  std::size_t size() const { return elems.size(); }
  Poly coeff(std::size_t i) const;        // full coefficient polynomial
  PolyForm element(std::size_t i) const;  // coeff * dzbar_J
  int max_coeff_degree() const;
};

// Canonical basis: monomials of total degree <= N in graded-lex order, major;
// multi-indices J in lex order, minor. size = #monomials * C(n,q).
BasisDescriptor build_basis(int n, int q, int N);

// Zero-trace trial space for the q = n Dirichlet route: w * monomials with
// w vanishing on the boundary (w = -rho for smooth kinds, the product of
// disc factors for the polydisc).
BasisDescriptor build_dirichlet_basis(const DomainPtr& d, int N);

struct GalerkinSystem {
  BasisDescriptor basis;
  CMatrix M;  // mass      <e_j, e_i>
  CMatrix E;  // energy    <dbar e_j, dbar e_i> + <theta e_j, theta e_i>
  CMatrix B;  // penalty   ∮ <nu -| e_j, nu -| e_i> dS (empty if no boundary)
  double sigma = 0.0;
  DomainPtr domain;
  int level_int = 0, level_bdy = 0;
  bool has_boundary = false;

  CMatrix A() const;  // E + sigma B
  std::size_t size() const { return basis.size(); }
};

// Assemble mass/energy/penalty from the symbolic dbar/theta/contraction
// outputs against quadrature moment tables. Deterministic for any thread
// count (each table entry and each matrix entry is one serial sum).
// Throws if M fails Cholesky, naming the condition estimate.
GalerkinSystem assemble(const DomainPtr& d, const BasisDescriptor& basis,
                        const QuadratureRule& q_int,
                        const QuadratureRule* q_bdy, double sigma);

// Serial reference path (identical arithmetic, single thread).
GalerkinSystem assemble_serial(const DomainPtr& d, const BasisDescriptor& basis,
                               const QuadratureRule& q_int,
                               const QuadratureRule* q_bdy, double sigma);

// Rules at auto_level(N); boundary rule skipped for q = n on kinds with the
// penalty disabled or for weighted (zero-trace) bases.
GalerkinSystem assemble_auto(const DomainPtr& d, const BasisDescriptor& basis,
                             double sigma, int level_override = 0);

struct LoadVector {
  std::vector<cplx> v;
  bool exactness_warning = false;
};
LoadVector load_vector(const PolyForm& f, const BasisDescriptor& basis,
                       const QuadratureRule& q_int);

// f = sum_i c_i e_i as a symbolic form.
PolyForm reconstruct_form(const BasisDescriptor& basis,
                          const std::vector<cplx>& coeffs);

double default_sigma(const Domain& d);  // 100 / diameter

}  // namespace dbarlab

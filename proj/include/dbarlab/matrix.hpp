#pragma once

#include <vector>

#include "dbarlab/poly.hpp"

namespace dbarlab {

// Dense complex matrix, row-major.
struct CMatrix {
  int rows = 0, cols = 0;
  std::vector<cplx> a;

  CMatrix() = default;
  CMatrix(int r, int c) : rows(r), cols(c), a(std::size_t(r) * c, cplx(0.0)) {}

  cplx& at(int i, int j) { return a[std::size_t(i) * cols + j]; }
  const cplx& at(int i, int j) const { return a[std::size_t(i) * cols + j]; }

  static CMatrix identity(int n);
  CMatrix adjoint() const;
  friend CMatrix operator*(const CMatrix& x, const CMatrix& y);
  CMatrix plus_scaled(const CMatrix& o, double s) const;  // this + s*o

  double max_abs() const;
  double herm_defect() const;  // max |a_ij - conj(a_ji)|
};

std::vector<cplx> matvec(const CMatrix& m, const std::vector<cplx>& x);

// Lower Cholesky factor of a Hermitian positive definite matrix.
// Throws std::runtime_error (with the failing pivot) if not pd.
CMatrix cholesky(const CMatrix& m);

// In-place forward/back substitution with the Cholesky factor.
void solve_lower(const CMatrix& L, std::vector<cplx>& x);        // L y = x
void solve_lower_adj(const CMatrix& L, std::vector<cplx>& x);    // L* y = x

// Cyclic complex Jacobi eigensolver for Hermitian matrices. Deterministic:
// fixed sweep order, tolerance relative to the Frobenius norm. Eigenvalues
// ascending, V's columns are the corresponding orthonormal eigenvectors.
void jacobi_hermitian(CMatrix a, std::vector<double>& evals, CMatrix& vecs,
                      int max_sweeps = 60);

}  // namespace dbarlab

#pragma once

#include <string>
#include <vector>

#include "dbarlab/galerkin.hpp"
#include "dbarlab/matrix.hpp"

namespace dbarlab {

// Discrete variational values of a Hermitian pencil (A, M). The values are
// reported as "discrete variational values": the identification with
// eigenvalues of the continuous operator holds only when its spectrum is
// purely discrete.
struct Spectrum {
  std::vector<double> eigenvalues;  // ascending; values < 1e-10*||A|| clamp to 0
  CMatrix vectors;                  // basis-size x k, M-orthonormal columns
  std::vector<double> residuals;    // ||A v - lambda M v|| per pair
  // metadata
  double sigma = 0.0;
  int N = 0;
  int level_int = 0, level_bdy = 0;
  std::string domain_id;
  int truncated = 0;  // M directions removed by spectral filtering
};

// First k eigenpairs of A v = lambda M v via Cholesky reduction and a cyclic
// complex Jacobi solve. If M is ill-conditioned (est. condition > 1e12) the
// near-null directions are truncated by spectral filtering of M at
// 1e-12*||M||. Throws on dimension mismatch, k out of range, or M not pd.
Spectrum hermitian_gen_eig(const CMatrix& A, const CMatrix& M, int k);

// Spectrum of the penalized pencil (E + sigma B, M) with metadata.
Spectrum variational_eigenvalues(const GalerkinSystem& sys, int k);

struct InverseResult {
  std::vector<cplx> coeffs;
  double residual = 0.0;  // ||A c - v|| / ||v||
};

// Discrete analogue of applying the inverse Laplacian: solves
// (E + sigma B) c = load_vector(f). Throws if the operator is singular or
// near-singular (smallest pencil eigenvalue <= 1e-10), carrying the value.
InverseResult apply_inverse(const GalerkinSystem& sys, const PolyForm& f);

}  // namespace dbarlab

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "dbarlab/eigensolver.hpp"
#include "dbarlab/galerkin.hpp"

using namespace dbarlab;

namespace {

// det(A - lambda M) by complex LU with partial pivoting; real for Hermitian
// pencils with real lambda.
double pencil_det(const CMatrix& A, const CMatrix& M, double lambda) {
  int n = A.rows;
  CMatrix T = A.plus_scaled(M, -lambda);
  cplx det = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(T.at(r, c)) > std::abs(T.at(piv, c))) piv = r;
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(T.at(c, j), T.at(piv, j));
      det = -det;
    }
    if (std::abs(T.at(c, c)) < 1e-300) return 0.0;
    det *= T.at(c, c);
    for (int r = c + 1; r < n; ++r) {
      cplx f = T.at(r, c) / T.at(c, c);
      for (int j = c; j < n; ++j) T.at(r, j) -= f * T.at(c, j);
    }
  }
  return det.real();
}

std::vector<double> det_bisection_roots(const CMatrix& A, const CMatrix& M,
                                        double lo, double hi, int grid) {
  std::vector<double> roots;
  double prev = pencil_det(A, M, lo);
  double prev_x = lo;
  for (int i = 1; i <= grid; ++i) {
    double x = lo + (hi - lo) * i / grid;
    double v = pencil_det(A, M, x);
    if (prev * v < 0.0) {
      double a = prev_x, b = x;
      for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (a + b);
        if (pencil_det(A, M, a) * pencil_det(A, M, mid) <= 0.0)
          b = mid;
        else
          a = mid;
      }
      roots.push_back(0.5 * (a + b));
    }
    prev = v;
    prev_x = x;
  }
  return roots;
}

}  // namespace

TEST_CASE("diagonal pencils") {
  CMatrix A(2, 2), M = CMatrix::identity(2);
  A.at(0, 0) = 1.0;
  A.at(1, 1) = 2.0;
  Spectrum s = hermitian_gen_eig(A, M, 2);
  CHECK(s.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(s.eigenvalues[1] == doctest::Approx(2.0));

  CMatrix M2 = CMatrix::identity(2);
  M2.at(0, 0) = 2.0;
  M2.at(1, 1) = 2.0;
  s = hermitian_gen_eig(A, M2, 2);
  CHECK(s.eigenvalues[0] == doctest::Approx(0.5));
  CHECK(s.eigenvalues[1] == doctest::Approx(1.0));

  CHECK_THROWS_AS(hermitian_gen_eig(A, M, 3), std::invalid_argument);
}

TEST_CASE("random 3x3 pencil vs det bisection oracle") {
  std::mt19937_64 rng(99);
  auto uni = [&] { return double(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
  for (int trial = 0; trial < 5; ++trial) {
    CMatrix A(3, 3), M(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        cplx a(uni(), i == j ? 0.0 : uni());
        A.at(i, j) = a;
        A.at(j, i) = std::conj(a);
        cplx m(uni(), i == j ? 0.0 : uni());
        M.at(i, j) = m;
        M.at(j, i) = std::conj(m);
      }
    M = M * M;
    for (int i = 0; i < 3; ++i) M.at(i, i) += 3.0;
    Spectrum s = hermitian_gen_eig(A, M, 3);
    auto roots = det_bisection_roots(A, M, -10.0, 10.0, 4000);
    REQUIRE(roots.size() == 3);
    for (int i = 0; i < 3; ++i)
      CHECK(s.eigenvalues[i] == doctest::Approx(roots[i]).epsilon(1e-7));
  }
}

TEST_CASE("residuals and M-orthonormality") {
  std::mt19937_64 rng(123);
  auto uni = [&] { return double(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
  int n = 12;
  CMatrix A(n, n), M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      cplx a(uni(), i == j ? 0.0 : uni());
      A.at(i, j) = a;
      A.at(j, i) = std::conj(a);
      cplx m(uni(), i == j ? 0.0 : uni());
      M.at(i, j) = m;
      M.at(j, i) = std::conj(m);
    }
  M = M * M;
  for (int i = 0; i < n; ++i) M.at(i, i) += double(n);
  Spectrum s = hermitian_gen_eig(A, M, n);
  double anorm = A.max_abs();
  for (int j = 0; j < n; ++j) CHECK(s.residuals[j] <= 1e-8 * std::max(anorm, 1.0));
  for (int a = 0; a < n; ++a) {
    std::vector<cplx> va(n), Mvb(n);
    for (int i = 0; i < n; ++i) va[i] = s.vectors.at(i, a);
    for (int b = 0; b < n; ++b) {
      std::vector<cplx> vb(n);
      for (int i = 0; i < n; ++i) vb[i] = s.vectors.at(i, b);
      Mvb = matvec(M, vb);
      cplx dot = 0.0;
      for (int i = 0; i < n; ++i) dot += std::conj(va[i]) * Mvb[i];
      CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-8);
    }
  }
  // ascending order
  for (int j = 0; j + 1 < n; ++j)
    CHECK(s.eigenvalues[j] <= s.eigenvalues[j + 1] + 1e-14);
}

TEST_CASE("variational eigenvalues: ball constant basis gives sigma/2") {
  auto ball = make_ball();
  BasisDescriptor basis = build_basis(2, 1, 0);
  QuadratureRule qi = interior_quadrature(ball, 4);
  QuadratureRule qb = boundary_quadrature(ball, 4);
  GalerkinSystem sys = assemble(ball, basis, qi, &qb, 1.0);
  Spectrum s = variational_eigenvalues(sys, 2);
  CHECK(s.eigenvalues[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(s.eigenvalues[1] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(s.domain_id == ball->id());

  // sigma = 0 with constant forms: zero energy
  GalerkinSystem s0 = assemble(ball, basis, qi, &qb, 0.0);
  Spectrum z = variational_eigenvalues(s0, 1);
  CHECK(z.eigenvalues[0] == doctest::Approx(0.0));
}

TEST_CASE("apply_inverse: direct solve equals the eigen-expansion") {
  auto ball = make_ball();
  BasisDescriptor basis = build_basis(2, 1, 1);
  GalerkinSystem sys = assemble_auto(ball, basis, 1.0);
  int n = int(basis.size());
  Spectrum full = variational_eigenvalues(sys, n);

  PolyForm f = PolyForm::component(1, 1, Poly::monomial(0, 0, 1, 0)) +
               PolyForm::component(1, 2, Poly(cplx(0.3, 0.7)));
  InverseResult inv = apply_inverse(sys, f);
  CHECK(inv.residual < 1e-10);

  QuadratureRule qi = interior_quadrature(ball, sys.level_int);
  LoadVector rhs = load_vector(f, basis, qi);
  // c = V diag(1/lambda) V^* rhs for M-orthonormal V
  std::vector<cplx> y(n, cplx(0.0));
  for (int j = 0; j < n; ++j) {
    cplx dot = 0.0;
    for (int i = 0; i < n; ++i) dot += std::conj(full.vectors.at(i, j)) * rhs.v[i];
    y[j] = dot / full.eigenvalues[j];
  }
  std::vector<cplx> c(n, cplx(0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) c[i] += full.vectors.at(i, j) * y[j];
  double err = 0.0, scale = 0.0;
  for (int i = 0; i < n; ++i) {
    err = std::max(err, std::abs(c[i] - inv.coeffs[i]));
    scale = std::max(scale, std::abs(c[i]));
  }
  CHECK(err < 1e-8 * std::max(scale, 1.0));

  // eigenform in, coefficients/lambda out
  std::vector<cplx> e1(n);
  for (int i = 0; i < n; ++i) e1[i] = full.vectors.at(i, 2);
  PolyForm ef = reconstruct_form(basis, e1);
  InverseResult ei = apply_inverse(sys, ef);
  for (int i = 0; i < n; ++i)
    CHECK(std::abs(ei.coeffs[i] - e1[i] / full.eigenvalues[2]) < 1e-8);

  // zero form in, zero out
  InverseResult zi = apply_inverse(sys, PolyForm(1));
  for (const cplx& v : zi.coeffs) CHECK(std::abs(v) < 1e-14);

  // singular operator rejected
  QuadratureRule qb = boundary_quadrature(ball, auto_level(1) + 1);
  GalerkinSystem sing = assemble(ball, build_basis(2, 1, 0), qi, &qb, 0.0);
  CHECK_THROWS_AS(apply_inverse(sing, PolyForm(1)), std::runtime_error);
}

TEST_CASE("min-max consistency on random 8x8 pencils") {
  std::mt19937_64 rng(2024);
  auto uni = [&] { return double(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
  const int n = 8, k = 3;
  CMatrix A(n, n), M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      cplx a(uni(), i == j ? 0.0 : uni());
      A.at(i, j) = a;
      A.at(j, i) = std::conj(a);
      cplx m(uni(), i == j ? 0.0 : uni());
      M.at(i, j) = m;
      M.at(j, i) = std::conj(m);
    }
  M = M * M;
  for (int i = 0; i < n; ++i) M.at(i, i) += double(n);
  Spectrum s = hermitian_gen_eig(A, M, k);
  double best = 1e300;
  for (int t = 0; t < 10000; ++t) {
    CMatrix P(n, k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < k; ++j) P.at(i, j) = cplx(uni(), uni());
    Spectrum sub = hermitian_gen_eig(P.adjoint() * A * P, P.adjoint() * M * P, k);
    best = std::min(best, sub.eigenvalues[k - 1]);
  }
  CHECK(s.eigenvalues[k - 1] <= best + 1e-9);
  CMatrix P(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) P.at(i, j) = s.vectors.at(i, j);
  Spectrum sub = hermitian_gen_eig(P.adjoint() * A * P, P.adjoint() * M * P, k);
  best = std::min(best, sub.eigenvalues[k - 1]);
  CHECK(std::abs(best - s.eigenvalues[k - 1]) < 1e-6);
}

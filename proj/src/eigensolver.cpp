#include "dbarlab/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dbarlab {

CMatrix CMatrix::identity(int n) {
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix m(cols, rows);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m.at(j, i) = std::conj(at(i, j));
  return m;
}

CMatrix operator*(const CMatrix& x, const CMatrix& y) {
  if (x.cols != y.rows) throw std::invalid_argument("matmul shape mismatch");
  CMatrix r(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      cplx s = x.at(i, k);
      if (s == cplx(0.0)) continue;
      for (int j = 0; j < y.cols; ++j) r.at(i, j) += s * y.at(k, j);
    }
  return r;
}

CMatrix CMatrix::plus_scaled(const CMatrix& o, double s) const {
  CMatrix r = *this;
  for (std::size_t i = 0; i < a.size(); ++i) r.a[i] += s * o.a[i];
  return r;
}

double CMatrix::max_abs() const {
  double m = 0.0;
  for (const cplx& c : a) m = std::max(m, std::abs(c));
  return m;
}

double CMatrix::herm_defect() const {
  double m = 0.0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      m = std::max(m, std::abs(at(i, j) - std::conj(at(j, i))));
  return m;
}

std::vector<cplx> matvec(const CMatrix& m, const std::vector<cplx>& x) {
  std::vector<cplx> y(m.rows, cplx(0.0));
  for (int i = 0; i < m.rows; ++i) {
    cplx s = 0.0;
    for (int j = 0; j < m.cols; ++j) s += m.at(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

CMatrix cholesky(const CMatrix& m) {
  if (m.rows != m.cols) throw std::invalid_argument("cholesky: square only");
  const int n = m.rows;
  CMatrix L(n, n);
  for (int j = 0; j < n; ++j) {
    double d = m.at(j, j).real();
    for (int k = 0; k < j; ++k) d -= std::norm(L.at(j, k));
    if (!(d > 0.0))
      throw std::runtime_error("cholesky: pivot " + std::to_string(j) +
                               " is " + std::to_string(d));
    double ljj = std::sqrt(d);
    L.at(j, j) = ljj;
    for (int i = j + 1; i < n; ++i) {
      cplx s = m.at(i, j);
      for (int k = 0; k < j; ++k) s -= L.at(i, k) * std::conj(L.at(j, k));
      L.at(i, j) = s / ljj;
    }
  }
  return L;
}

void solve_lower(const CMatrix& L, std::vector<cplx>& x) {
  const int n = L.rows;
  for (int i = 0; i < n; ++i) {
    cplx s = x[i];
    for (int k = 0; k < i; ++k) s -= L.at(i, k) * x[k];
    x[i] = s / L.at(i, i);
  }
}

void solve_lower_adj(const CMatrix& L, std::vector<cplx>& x) {
  const int n = L.rows;
  for (int i = n - 1; i >= 0; --i) {
    cplx s = x[i];
    for (int k = i + 1; k < n; ++k) s -= std::conj(L.at(k, i)) * x[k];
    x[i] = s / L.at(i, i);
  }
}

void jacobi_hermitian(CMatrix a, std::vector<double>& evals, CMatrix& vecs,
                      int max_sweeps) {
  if (a.rows != a.cols) throw std::invalid_argument("jacobi: square only");
  const int n = a.rows;
  vecs = CMatrix::identity(n);
  if (n == 0) {
    evals.clear();
    return;
  }
  double fro = 0.0;
  for (const cplx& c : a.a) fro += std::norm(c);
  fro = std::sqrt(fro);
  const double tol = 1e-14 * std::max(fro, 1e-300);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += std::norm(a.at(p, q));
    off = std::sqrt(2.0 * off);
    if (off <= tol) break;

    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        cplx apq = a.at(p, q);
        double mag = std::abs(apq);
        if (mag <= 1e-300) continue;
        double app = a.at(p, p).real();
        double aqq = a.at(q, q).real();
        cplx eph = apq / mag;  // phase of the off-diagonal entry
        // annihilation: |b|(1 - t^2) + t (aqq - app) = 0, small root
        double tau = (aqq - app) / (2.0 * mag);
        double t = (tau >= 0.0 ? -1.0 : 1.0) /
                   (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;

        // columns: col_p <- c col_p + s conj(eph) col_q
        //          col_q <- -s eph col_p + c col_q
        for (int k = 0; k < n; ++k) {
          cplx akp = a.at(k, p), akq = a.at(k, q);
          a.at(k, p) = c * akp + s * std::conj(eph) * akq;
          a.at(k, q) = -s * eph * akp + c * akq;
        }
        // rows (adjoint action)
        for (int k = 0; k < n; ++k) {
          cplx apk = a.at(p, k), aqk = a.at(q, k);
          a.at(p, k) = c * apk + s * eph * aqk;
          a.at(q, k) = -s * std::conj(eph) * apk + c * aqk;
        }
        a.at(p, q) = 0.0;
        a.at(q, p) = 0.0;
        a.at(p, p) = a.at(p, p).real();
        a.at(q, q) = a.at(q, q).real();
        for (int k = 0; k < n; ++k) {
          cplx vkp = vecs.at(k, p), vkq = vecs.at(k, q);
          vecs.at(k, p) = c * vkp + s * std::conj(eph) * vkq;
          vecs.at(k, q) = -s * eph * vkp + c * vkq;
        }
      }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> diag(n);
  for (int i = 0; i < n; ++i) diag[i] = a.at(i, i).real();
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return diag[i] < diag[j]; });
  evals.resize(n);
  CMatrix sorted(n, n);
  for (int j = 0; j < n; ++j) {
    evals[j] = diag[order[j]];
    for (int i = 0; i < n; ++i) sorted.at(i, j) = vecs.at(i, order[j]);
  }
  vecs = std::move(sorted);
}

namespace {

// Spectral filtering of M: drop directions below 1e-12*||M||, return
// W = V S^{-1/2} over the retained block.
struct Whitener {
  CMatrix W;       // n x r
  int truncated = 0;
};

Whitener spectral_whiten(const CMatrix& M) {
  std::vector<double> ev;
  CMatrix V;
  jacobi_hermitian(M, ev, V);
  double thresh = 1e-12 * std::max(ev.back(), 0.0);
  int keep0 = 0;
  while (keep0 < int(ev.size()) && ev[keep0] <= thresh) ++keep0;
  if (keep0 == int(ev.size()))
    throw std::runtime_error("mass matrix is numerically zero");
  Whitener w;
  w.truncated = keep0;
  int r = int(ev.size()) - keep0;
  w.W = CMatrix(M.rows, r);
  for (int j = 0; j < r; ++j) {
    double s = 1.0 / std::sqrt(ev[keep0 + j]);
    for (int i = 0; i < M.rows; ++i) w.W.at(i, j) = V.at(i, keep0 + j) * s;
  }
  return w;
}

}  // namespace

Spectrum hermitian_gen_eig(const CMatrix& A, const CMatrix& M, int k) {
  if (A.rows != A.cols || M.rows != M.cols || A.rows != M.rows)
    throw std::invalid_argument("hermitian_gen_eig: dimension mismatch");
  const int n = A.rows;
  if (k < 1 || k > n)
    throw std::invalid_argument("hermitian_gen_eig: k out of range");

  Spectrum spec;
  CMatrix full_vecs;            // n x n in original coordinates
  std::vector<double> ev;

  bool filtered = false;
  CMatrix L;
  try {
    L = cholesky(M);
    // condition estimate from the factor diagonal
    double dmax = 0.0, dmin = 1e300;
    for (int i = 0; i < n; ++i) {
      double d = L.at(i, i).real();
      dmax = std::max(dmax, d);
      dmin = std::min(dmin, d);
    }
    if (dmin <= 0.0 || (dmax / dmin) * (dmax / dmin) > 1e12) filtered = true;
  } catch (const std::exception&) {
    filtered = true;
  }

  if (!filtered) {
    // Ahat = L^-1 A L^-*: columns solve, then adjoint trick
    CMatrix Y = A;
    for (int j = 0; j < n; ++j) {
      std::vector<cplx> col(n);
      for (int i = 0; i < n; ++i) col[i] = Y.at(i, j);
      solve_lower(L, col);
      for (int i = 0; i < n; ++i) Y.at(i, j) = col[i];
    }
    CMatrix Yh = Y.adjoint();
    for (int j = 0; j < n; ++j) {
      std::vector<cplx> col(n);
      for (int i = 0; i < n; ++i) col[i] = Yh.at(i, j);
      solve_lower(L, col);
      for (int i = 0; i < n; ++i) Yh.at(i, j) = col[i];
    }
    CMatrix Ahat = Yh.adjoint();
    // enforce hermiticity of the reduced matrix against rounding
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        cplx v = 0.5 * (Ahat.at(i, j) + std::conj(Ahat.at(j, i)));
        Ahat.at(i, j) = v;
        Ahat.at(j, i) = std::conj(v);
      }
    CMatrix Vh;
    jacobi_hermitian(std::move(Ahat), ev, Vh);
    full_vecs = CMatrix(n, n);
    for (int j = 0; j < n; ++j) {
      std::vector<cplx> col(n);
      for (int i = 0; i < n; ++i) col[i] = Vh.at(i, j);
      solve_lower_adj(L, col);
      for (int i = 0; i < n; ++i) full_vecs.at(i, j) = col[i];
    }
  } else {
    Whitener w = spectral_whiten(M);
    spec.truncated = w.truncated;
    CMatrix Ahat = w.W.adjoint() * A * w.W;
    for (int i = 0; i < Ahat.rows; ++i)
      for (int j = i; j < Ahat.cols; ++j) {
        cplx v = 0.5 * (Ahat.at(i, j) + std::conj(Ahat.at(j, i)));
        Ahat.at(i, j) = v;
        Ahat.at(j, i) = std::conj(v);
      }
    CMatrix Vh;
    jacobi_hermitian(std::move(Ahat), ev, Vh);
    if (k > int(ev.size()))
      throw std::runtime_error(
          "hermitian_gen_eig: k exceeds the filtered subspace dimension");
    full_vecs = w.W * Vh;
  }

  double anorm = A.max_abs();
  spec.eigenvalues.assign(ev.begin(), ev.begin() + k);
  for (double& v : spec.eigenvalues)
    if (std::abs(v) < 1e-10 * anorm) v = 0.0;
  spec.vectors = CMatrix(n, k);
  spec.residuals.resize(k);
  for (int j = 0; j < k; ++j) {
    std::vector<cplx> v(n);
    for (int i = 0; i < n; ++i) v[i] = full_vecs.at(i, j);
    for (int i = 0; i < n; ++i) spec.vectors.at(i, j) = v[i];
    std::vector<cplx> Av = matvec(A, v), Mv = matvec(M, v);
    double r = 0.0;
    for (int i = 0; i < n; ++i) r += std::norm(Av[i] - ev[j] * Mv[i]);
    spec.residuals[j] = std::sqrt(r);
  }
  return spec;
}

Spectrum variational_eigenvalues(const GalerkinSystem& sys, int k) {
  if (k < 1 || std::size_t(k) > sys.size())
    throw std::invalid_argument("variational_eigenvalues: k out of range");
  Spectrum s = hermitian_gen_eig(sys.A(), sys.M, k);
  s.sigma = sys.sigma;
  s.N = sys.basis.N;
  s.level_int = sys.level_int;
  s.level_bdy = sys.level_bdy;
  s.domain_id = sys.domain->id();
  return s;
}

InverseResult apply_inverse(const GalerkinSystem& sys, const PolyForm& f) {
  const int n = int(sys.size());
  CMatrix A = sys.A();
  // positivity gate: smallest pencil eigenvalue must exceed 1e-10
  Spectrum low = hermitian_gen_eig(A, sys.M, 1);
  if (low.eigenvalues[0] <= 1e-10)
    throw std::runtime_error(
        "apply_inverse: operator singular or near-singular, smallest pencil "
        "eigenvalue " +
        std::to_string(low.eigenvalues[0]));
  QuadratureRule qi = interior_quadrature(sys.domain, sys.level_int);
  LoadVector rhs = load_vector(f, sys.basis, qi);
  CMatrix L = cholesky(A);
  std::vector<cplx> c = rhs.v;
  solve_lower(L, c);
  solve_lower_adj(L, c);
  std::vector<cplx> Ac = matvec(A, c);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    num += std::norm(Ac[i] - rhs.v[i]);
    den += std::norm(rhs.v[i]);
  }
  InverseResult out;
  out.coeffs = std::move(c);
  out.residual = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  return out;
}

}  // namespace dbarlab

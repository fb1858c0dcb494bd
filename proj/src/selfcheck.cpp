#include "dbarlab/selfcheck.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "dbarlab/certify.hpp"
#include "dbarlab/eigensolver.hpp"
#include "dbarlab/io.hpp"
#include "dbarlab/oracles.hpp"
#include "dbarlab/parallel.hpp"
#include "dbarlab/stability.hpp"

namespace dbarlab {

namespace {

using clock_t_ = std::chrono::steady_clock;

CheckResult timed(const std::string& name,
                  const std::function<std::pair<bool, std::string>()>& fn) {
  CheckResult r;
  r.name = name;
  auto t0 = clock_t_::now();
  try {
    auto [ok, detail] = fn();
    r.pass = ok;
    r.detail = detail;
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(clock_t_::now() - t0).count();
  return r;
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

std::pair<bool, std::string> quadrature_oracle_ball() {
  auto ball = make_ball();
  QuadratureRule qi = interior_quadrature(ball, 6);
  QuadratureRule qb = boundary_quadrature(ball, 6);
  double vol = qi.total_weight();
  double mz1 = integrate_fn_real(qi, [](const Pt& z) { return std::norm(z[0]); });
  double area = qb.total_weight();
  double bz1 = 0.0;
  for (std::size_t i = 0; i < qb.size(); ++i)
    bz1 += qb.weights[i] * std::norm(qb.nodes[i][0]);
  double e1 = rel_err(vol, ball_monomial_integral(1.0, 0, 0, 0, 0));
  double e2 = rel_err(mz1, ball_monomial_integral(1.0, 1, 0, 1, 0));
  double e3 = rel_err(area, sphere_monomial_integral(1.0, 0, 0, 0, 0));
  double e4 = rel_err(bz1, sphere_monomial_integral(1.0, 1, 0, 1, 0));
  double worst = std::max({e1, e2, e3, e4});
  std::ostringstream os;
  os << "vol=" << fmt(vol) << " int|z1|^2=" << fmt(mz1) << " area=" << fmt(area)
     << " bd|z1|^2=" << fmt(bz1) << " worst rel err=" << fmt(worst);
  return {worst <= 1e-4, os.str()};
}

std::pair<bool, std::string> quadrature_oracle_ellipsoid() {
  auto ell = make_ellipsoid(2);
  QuadratureRule qi = interior_quadrature(ell, 6);
  double worst = 0.0;
  for (int p = 0; p <= 2; ++p)
    for (int q = 0; q + p <= 2; ++q) {
      double got = integrate_fn_real(qi, [&](const Pt& z) {
        return std::pow(std::norm(z[0]), p) * std::pow(std::norm(z[1]), q);
      });
      worst = std::max(worst,
                       rel_err(got, ellipsoid_monomial_integral(2, p, q, p, q)));
    }
  std::ostringstream os;
  os << "worst rel err over |z1|^2p |z2|^2q (p+q<=2): " << fmt(worst);
  return {worst <= 1e-4, os.str()};
}

std::pair<bool, std::string> green_identity() {
  auto ball = make_ball();
  PolyForm u = PolyForm::from_scalar(Poly::monomial(0, 0, 1, 0));  // zbar1
  PolyForm f = PolyForm::component(1, 1, Poly(1.0));               // dzbar1
  QuadratureRule qi = interior_quadrature(ball, 4);
  QuadratureRule qb = boundary_quadrature(ball, 4);
  double res = check_green(*ball, u, f, qi, qb);

  // halving under level doubling on a pair whose pairings survive the
  // phase averaging (otherwise every term is exactly zero)
  auto ell = make_ellipsoid(2);
  PolyForm u2 = PolyForm::from_scalar(Poly::monomial(0, 1, 1, 1));
  PolyForm f2 = PolyForm::component(1, 1, Poly::monomial(2, 0, 2, 0)) +
                PolyForm::component(1, 2, Poly::monomial(1, 0, 1, 1));
  double r1 = check_green(*ell, u2, f2, interior_quadrature(ell, 1),
                          boundary_quadrature(ell, 1));
  double r2 = check_green(*ell, u2, f2, interior_quadrature(ell, 2),
                          boundary_quadrature(ell, 2));
  bool halves = r2 <= 0.5 * r1 && r1 > 1e-6;
  std::ostringstream os;
  os << "ball residual(level 4)=" << fmt(res) << "; ellipsoid residual "
     << fmt(r1) << " -> " << fmt(r2) << " under level doubling";
  return {res < 1e-3 && halves, os.str()};
}

std::pair<bool, std::string> green_sensitivity() {
  // flipping the sign of theta must break the identity: the check has teeth
  auto ball = make_ball();
  PolyForm u = PolyForm::from_scalar(Poly::monomial(1, 0, 1, 0));
  PolyForm f = PolyForm::component(1, 1, Poly::monomial(1, 0, 0, 0));
  QuadratureRule qi = interior_quadrature(ball, 5);
  QuadratureRule qb = boundary_quadrature(ball, 5);
  double good = check_green(*ball, u, f, qi, qb);
  // corrupted adjoint: <u, -theta f> changes the middle term by 2<u, theta f>
  PolyForm tf = theta(f);
  double corrupted = std::abs(
      form_inner_numeric(qi, dbar(u), f) + form_inner_numeric(qi, u, tf) -
      [&] {
        cplx b = 0.0;
        for (std::size_t i = 0; i < qb.size(); ++i) {
          std::array<cplx, kDim> nu;
          for (int j = 0; j < kDim; ++j) nu[j] = qb.normals[i].nu[j];
          b += qb.weights[i] *
               inner(u.eval(qb.nodes[i]), contract_point(f.eval(qb.nodes[i]), nu));
        }
        return b;
      }());
  std::ostringstream os;
  os << "residual=" << fmt(good) << ", sign-flipped residual=" << fmt(corrupted);
  return {good < 1e-8 && corrupted > 1e-2, os.str()};
}

std::pair<bool, std::string> monotonicities() {
  auto ball = make_ball();
  BasisDescriptor b2 = build_basis(kDim, 1, 2);
  BasisDescriptor b3 = build_basis(kDim, 1, 3);
  int lvl = auto_level(3);
  QuadratureRule qi = interior_quadrature(ball, lvl);
  QuadratureRule qb = boundary_quadrature(ball, lvl + 1);
  GalerkinSystem s2a = assemble(ball, b2, qi, &qb, 1.0);
  GalerkinSystem s2b = assemble(ball, b2, qi, &qb, 4.0);
  GalerkinSystem s3 = assemble(ball, b3, qi, &qb, 1.0);
  int k = 4;
  Spectrum e2a = variational_eigenvalues(s2a, k);
  Spectrum e2b = variational_eigenvalues(s2b, k);
  Spectrum e3 = variational_eigenvalues(s3, k);
  bool sigma_mono = true, refine_mono = true;
  for (int i = 0; i < k; ++i) {
    if (e2b.eigenvalues[i] < e2a.eigenvalues[i] - 1e-9) sigma_mono = false;
    if (e3.eigenvalues[i] > e2a.eigenvalues[i] + 1e-9) refine_mono = false;
  }
  std::ostringstream os;
  os << "sigma: l1 " << fmt(e2a.eigenvalues[0]) << " -> " << fmt(e2b.eigenvalues[0])
     << "; refine: l1 " << fmt(e2a.eigenvalues[0]) << " -> "
     << fmt(e3.eigenvalues[0]);
  return {sigma_mono && refine_mono, os.str()};
}

std::pair<bool, std::string> scaling_covariance() {
  auto ball = make_ball();
  StabilityReport rep =
      dilate_sweep(ball, 1, 4, {0.8, 0.9, 1.0, 1.1}, 3, 1.0);
  double dev = rep.metrics.at("max_r2_covariance_deviation");
  std::ostringstream os;
  os << "max |r^2 lambda(r) - lambda(1)| / lambda(1) = " << fmt(dev);
  return {dev <= 1e-8, os.str()};
}

std::pair<bool, std::string> catlin_bound() {
  auto ball = make_ball();
  BasisDescriptor basis = build_basis(kDim, 1, 4);
  GalerkinSystem sys = assemble_auto(ball, basis, 100.0);
  Spectrum spec = variational_eigenvalues(sys, 4);
  Certificate cert = builtin_certificate(ball, 1);
  check_certificate(ball, cert, 1, 1000, 7);
  double bound = catlin_lower_bound(cert);
  bool l1 = spec.eigenvalues[0] >= bound * (1.0 - 0.02);
  auto margins = check_catlin_on_spectrum(sys, spec, cert, 4);
  bool all = l1;
  for (const auto& m : margins) all = all && m.pass;
  std::ostringstream os;
  os << "lambda1=" << fmt(spec.eigenvalues[0]) << " vs bound " << fmt(bound)
     << "; margins";
  for (const auto& m : margins) os << " " << fmt(m.margin / m.q_value);
  return {all, os.str()};
}

std::pair<bool, std::string> pencil_brute_force() {
  std::mt19937_64 rng(12345);
  auto uni = [&] { return double(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
  const int n = 8, k = 3;
  bool ok = true;
  double worst_gap = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    CMatrix A(n, n), M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        cplx v(uni(), i == j ? 0.0 : uni());
        A.at(i, j) = v;
        A.at(j, i) = std::conj(v);
        cplx w(uni(), i == j ? 0.0 : uni());
        M.at(i, j) = w;
        M.at(j, i) = std::conj(w);
      }
    // make M positive definite: M <- M*M + n I
    M = M * M;
    for (int i = 0; i < n; ++i) M.at(i, i) += double(n);
    Spectrum s = hermitian_gen_eig(A, M, k);

    // brute force over random k-subspaces: lambda_k <= max Rayleigh on each
    double best = 1e300;
    for (int t = 0; t < 10000; ++t) {
      CMatrix P(n, k);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) P.at(i, j) = cplx(uni(), uni());
      CMatrix Ah = P.adjoint() * A * P;
      CMatrix Mh = P.adjoint() * M * P;
      try {
        Spectrum sub = hermitian_gen_eig(Ah, Mh, k);
        best = std::min(best, sub.eigenvalues[k - 1]);
      } catch (const std::exception&) {
        continue;  // degenerate random subspace
      }
    }
    if (s.eigenvalues[k - 1] > best + 1e-9) ok = false;
    // include the solver's own eigenspace: brute force must touch lambda_k
    CMatrix P(n, k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < k; ++j) P.at(i, j) = s.vectors.at(i, j);
    Spectrum sub = hermitian_gen_eig(P.adjoint() * A * P, P.adjoint() * M * P, k);
    best = std::min(best, sub.eigenvalues[k - 1]);
    double gap = std::abs(best - s.eigenvalues[k - 1]);
    worst_gap = std::max(worst_gap, gap);
    if (gap > 1e-6) ok = false;
  }
  std::ostringstream os;
  os << "worst |brute - solver| with eigenspace included = " << fmt(worst_gap);
  return {ok, os.str()};
}

std::pair<bool, std::string> assembly_determinism() {
  auto ell = make_ellipsoid(2);
  BasisDescriptor basis = build_basis(kDim, 1, 2);
  int lvl = auto_level(2);
  QuadratureRule qi = interior_quadrature(ell, lvl);
  QuadratureRule qb = boundary_quadrature(ell, lvl + 1);
  GalerkinSystem a = assemble(ell, basis, qi, &qb, 2.0);
  GalerkinSystem b = assemble_serial(ell, basis, qi, &qb, 2.0);
  bool same = a.M.a == b.M.a && a.E.a == b.E.a && a.B.a == b.B.a;
  return {same, same ? "parallel == serial (bitwise)" : "MISMATCH"};
}

}  // namespace

std::vector<CheckResult> run_selftest() {
  std::vector<CheckResult> out;
  out.push_back(timed("quadrature_oracle_ball", quadrature_oracle_ball));
  out.push_back(timed("quadrature_oracle_ellipsoid", quadrature_oracle_ellipsoid));
  out.push_back(timed("green_identity", green_identity));
  out.push_back(timed("green_sign_sensitivity", green_sensitivity));
  out.push_back(timed("minmax_monotonicities", monotonicities));
  out.push_back(timed("scaling_covariance", scaling_covariance));
  out.push_back(timed("catlin_lower_bound", catlin_bound));
  out.push_back(timed("pencil_brute_force", pencil_brute_force));
  out.push_back(timed("assembly_determinism", assembly_determinism));
  return out;
}

std::string determinism_fingerprint() {
  std::ostringstream os;
  auto ball = make_ball();
  BasisDescriptor basis = build_basis(kDim, 1, 2);
  int lvl = auto_level(2);
  QuadratureRule qi = interior_quadrature(ball, lvl);
  QuadratureRule qb = boundary_quadrature(ball, lvl + 1);
  GalerkinSystem sys = assemble(ball, basis, qi, &qb, 2.0);
  Spectrum spec = variational_eigenvalues(sys, 4);
  for (const cplx& v : sys.M.a) os << fmt(v.real()) << "," << fmt(v.imag()) << "\n";
  for (const cplx& v : sys.E.a) os << fmt(v.real()) << "," << fmt(v.imag()) << "\n";
  for (const cplx& v : sys.B.a) os << fmt(v.real()) << "," << fmt(v.imag()) << "\n";
  for (double l : spec.eigenvalues) os << fmt(l) << "\n";
  auto ell = make_ellipsoid(2);
  HausdorffEstimate h = hausdorff_distance(*ball, *ell, 3);
  os << fmt(h.value) << "," << fmt(h.grid_spacing) << "\n";
  Certificate cert = builtin_certificate(ball, 1);
  CertificateVerdict v = check_certificate(ball, cert, 1, 500, 99);
  os << (v.pass ? "pass" : "fail") << "," << fmt(v.worst_margin) << "\n";
  return os.str();
}

void print_check_table(const std::vector<CheckResult>& results) {
  std::printf("%-32s %-6s %8s  %s\n", "check", "status", "time", "detail");
  for (const auto& r : results)
    std::printf("%-32s %-6s %7.2fs  %s\n", r.name.c_str(),
                r.pass ? "PASS" : "FAIL", r.seconds, r.detail.c_str());
}

bool all_pass(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

}  // namespace dbarlab

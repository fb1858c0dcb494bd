// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line each. Exit code 0 iff all criteria pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dbarlab/certify.hpp"
#include "dbarlab/io.hpp"
#include "dbarlab/oracles.hpp"
#include "dbarlab/parallel.hpp"
#include "dbarlab/selfcheck.hpp"
#include "dbarlab/stability.hpp"

using namespace dbarlab;

namespace {

struct Criterion {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

double now_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

Criterion run(const std::string& name,
              const std::function<std::pair<bool, std::string>()>& fn) {
  Criterion c;
  c.name = name;
  auto t0 = std::chrono::steady_clock::now();
  try {
    auto [ok, detail] = fn();
    c.pass = ok;
    c.detail = detail;
  } catch (const std::exception& e) {
    c.pass = false;
    c.detail = std::string("exception: ") + e.what();
  }
  c.seconds = now_seconds(t0);
  return c;
}

double rel(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

// 1. quadrature oracle: four ball integrals at level >= 6 to 1e-4, < 10 s
std::pair<bool, std::string> c1() {
  auto t0 = std::chrono::steady_clock::now();
  auto ball = make_ball();
  QuadratureRule qi = interior_quadrature(ball, 6);
  QuadratureRule qb = boundary_quadrature(ball, 6);
  double vol = qi.total_weight();
  double m1 = integrate_fn_real(qi, [](const Pt& z) { return std::norm(z[0]); });
  double area = qb.total_weight();
  double b1 = 0.0;
  for (std::size_t i = 0; i < qb.size(); ++i)
    b1 += qb.weights[i] * std::norm(qb.nodes[i][0]);
  double worst = std::max(
      {rel(vol, M_PI * M_PI / 2.0), rel(m1, M_PI * M_PI / 6.0),
       rel(area, 2.0 * M_PI * M_PI), rel(b1, M_PI * M_PI)});
  double secs = now_seconds(t0);
  std::ostringstream os;
  os << "worst rel err " << fmt(worst) << ", " << fmt(secs) << " s";
  return {worst <= 1e-4 && secs < 10.0, os.str()};
}

// 2. Dirichlet oracle on (0,2)-forms: N = 8, sigma-extrapolated, 10%, < 2 min
std::pair<bool, std::string> c2() {
  auto t0 = std::chrono::steady_clock::now();
  auto ball = make_ball();
  BasisDescriptor basis = build_basis(kDim, 2, 8);
  int lvl = auto_level(8);
  QuadratureRule qi = interior_quadrature(ball, lvl);
  QuadratureRule qb = boundary_quadrature(ball, lvl + 1);
  GalerkinSystem sys = assemble(ball, basis, qi, &qb, 1000.0);
  std::vector<double> sigmas{1000.0, 2000.0, 4000.0}, lams;
  for (double s : sigmas) {
    GalerkinSystem scaled = sys;
    scaled.sigma = s;
    lams.push_back(variational_eigenvalues(scaled, 1).eigenvalues[0]);
  }
  // least squares for lambda(sigma) = lambda_inf - c / sigma
  double s11 = 3.0, s12 = 0, s22 = 0, r1 = 0, r2 = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    double x = 1.0 / sigmas[i];
    s12 -= x;
    s22 += x * x;
    r1 += lams[i];
    r2 -= x * lams[i];
  }
  double det = s11 * s22 - s12 * s12;
  double extrapolated = (r1 * s22 - s12 * r2) / det;
  double oracle = dirichlet_ball_mu1(4, 1.0) / 4.0;
  double err = rel(extrapolated, oracle);
  double secs = now_seconds(t0);
  std::ostringstream os;
  os << "discrete " << fmt(extrapolated) << " vs oracle " << fmt(oracle)
     << " (rel " << fmt(err) << "), " << fmt(secs) << " s";
  return {err <= 0.10 && secs < 120.0, os.str()};
}

// 3. exact scaling sharpness to 1e-8 for k <= 4, r in {0.8, 0.9, 1.1}
std::pair<bool, std::string> c3() {
  auto ball = make_ball();
  StabilityReport rep = dilate_sweep(ball, 1, 4, {0.8, 0.9, 1.1}, 3, 1.0);
  double dev = rep.metrics.at("max_r2_covariance_deviation");
  return {dev <= 1e-8, "max rel deviation " + fmt(dev)};
}

// 4. upper semicontinuity on ball and ellipsoid m=2, k <= 4, both sides,
//    excess decreasing to <= 5%, < 5 min
std::pair<bool, std::string> c4() {
  auto t0 = std::chrono::steady_clock::now();
  std::ostringstream os;
  bool ok = true;
  for (const DomainPtr& d : {make_ball(), make_ellipsoid(2)}) {
    StabilityReport rep = offset_sweep(d, 1, 4, {0.02, 0.04, 0.08},
                                       OffsetSide::Both, 4, default_sigma(*d));
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
      // excess at the smallest delta, relative to the base value
      std::ostringstream key;
      key << "excess_k" << (i + 1) << "_delta";
      double emin = 0.0;
      double dmin = 1e300;
      for (const auto& [k, v] : rep.metrics) {
        if (k.rfind(key.str(), 0) != 0) continue;
        double delta = std::stod(k.substr(key.str().size()));
        if (delta < dmin) {
          dmin = delta;
          emin = v;
        }
      }
      worst = std::max(worst, emin / rep.base_lambda[i]);
    }
    ok = ok && rep.all_pass();
    os << d->id() << " worst excess " << fmt(worst) << "; ";
  }
  double secs = now_seconds(t0);
  os << fmt(secs) << " s";
  return {ok && secs < 300.0, os.str()};
}

// 5. quantitative rate: slope of |lambda_1(r) - lambda_1| vs delta in [0.8,1.2]
std::pair<bool, std::string> c5() {
  auto ball = make_ball();
  StabilityReport rep =
      dilate_sweep(ball, 1, 1, {0.9, 0.95, 1.05, 1.1}, 3, 1.0);
  double slope = rep.slopes[0].slope;
  std::ostringstream os;
  os << "fitted slope " << fmt(slope) << " +- " << fmt(rep.slopes[0].band);
  return {slope >= 0.8 && slope <= 1.2, os.str()};
}

// 6. Catlin bound at N = 4: lambda_1 >= 1/e - 2% and 4 eigenform margins
std::pair<bool, std::string> c6() {
  auto ball = make_ball();
  BasisDescriptor basis = build_basis(kDim, 1, 4);
  GalerkinSystem sys = assemble_auto(ball, basis, 100.0);
  Spectrum spec = variational_eigenvalues(sys, 4);
  Certificate cert;
  cert.b = ScalarField(Poly::norm_sq() - Poly(1.0));
  cert.hessian_bound = 1.0;
  cert.label = "|z|^2-1";
  check_certificate(ball, cert, 1, 2000, 11);
  double bound = catlin_lower_bound(cert);
  bool l1 = spec.eigenvalues[0] >= bound * (1.0 - 0.02);
  auto margins = check_catlin_on_spectrum(sys, spec, cert, 4);
  bool all = l1;
  for (const auto& m : margins) all = all && m.pass;
  std::ostringstream os;
  os << "lambda_1 " << fmt(spec.eigenvalues[0]) << " vs 1/e "
     << fmt(bound) << "; margins pass "
     << (margins[0].pass && margins[1].pass && margins[2].pass &&
                 margins[3].pass
             ? "4/4"
             : "NO");
  return {all, os.str()};
}

// 7. Hardy: closed forms to 1% and the A = 0 verdict on the built-in family
std::pair<bool, std::string> c7() {
  auto ball = make_ball();
  ScalarField g(Poly(1.0) - Poly::norm_sq());
  HardyReport r = check_hardy_scalar(ball, g, 6);
  double e1 = rel(r.lhs, 49.0 * M_PI * M_PI / 30.0);
  double e2 = rel(4.0 * r.grad_sq, 16.0 * M_PI * M_PI / 3.0);
  Poly g2p = (Poly(1.0) - Poly::norm_sq()) * (Poly(1.0) - Poly::norm_sq());
  HardyReport r2 = check_hardy_scalar(ball, ScalarField(g2p), 6);
  PolyForm f = PolyForm::component(1, 1, Poly(1.0) - Poly::norm_sq());
  HardyReport r3 = check_hardy_form(ball, f, 6);
  bool ok = e1 <= 0.01 && e2 <= 0.01 && r.pass16 && r.min_A_form == 0.0 &&
            r2.pass_scalar && r3.pass16;
  std::ostringstream os;
  os << "lhs " << fmt(r.lhs) << " (err " << fmt(e1) << "), 4||grad g||^2 "
     << fmt(4.0 * r.grad_sq) << " (err " << fmt(e2) << "), A = "
     << fmt(r.min_A_form);
  return {ok, os.str()};
}

// 8. monotonicity / min-max suite
std::pair<bool, std::string> c8() {
  auto results = run_selftest();
  bool ok = true;
  std::ostringstream os;
  for (const auto& r : results) {
    if (r.name == "minmax_monotonicities" || r.name == "pencil_brute_force" ||
        r.name == "green_identity" || r.name == "green_sign_sensitivity") {
      ok = ok && r.pass;
      os << r.name << (r.pass ? " pass; " : " FAIL; ");
    }
  }
  return {ok, os.str()};
}

// 9. resolvent trend: strictly decreasing distances for r = 0.9, 0.95, 0.99
std::pair<bool, std::string> c9() {
  auto ball = make_ball();
  PolyForm f = PolyForm::component(1, 1, Poly(1.0));
  ResolventReport rep =
      resolvent_convergence(ball, {0.9, 0.95, 0.99}, f, 1, 3, 1.0);
  std::ostringstream os;
  os << "distances";
  for (double v : rep.distances) os << " " << fmt(v);
  return {rep.strictly_decreasing, os.str()};
}

// 10. determinism: byte-identical fingerprints under 1, 2, 8 threads
std::pair<bool, std::string> c10() {
  set_thread_cap(1);
  std::string f1 = determinism_fingerprint();
  set_thread_cap(2);
  std::string f2 = determinism_fingerprint();
  set_thread_cap(8);
  std::string f8 = determinism_fingerprint();
  set_thread_cap(0);
  bool ok = f1 == f2 && f1 == f8;
  return {ok, ok ? "fingerprints identical" : "MISMATCH"};
}

}  // namespace

int main() {
  std::vector<Criterion> cs;
  cs.push_back(run("1. quadrature oracle (ball integrals, 1e-4, <10s)", c1));
  cs.push_back(run("2. dirichlet oracle ((0,2)-forms, N=8, 10%, <2min)", c2));
  cs.push_back(run("3. exact scaling sharpness (1e-8, k<=4)", c3));
  cs.push_back(run("4. upper semicontinuity (ball+ellipsoid, 5%, <5min)", c4));
  cs.push_back(run("5. quantitative rate (slope in [0.8,1.2])", c5));
  cs.push_back(run("6. catlin lower bound (1/e - 2%, 4 margins)", c6));
  cs.push_back(run("7. hardy inequality (closed forms 1%, A=0)", c7));
  cs.push_back(run("8. monotonicity/min-max suite", c8));
  cs.push_back(run("9. resolvent trend (strictly decreasing)", c9));
  cs.push_back(run("10. determinism across 1/2/8 threads", c10));

  bool all = true;
  for (const auto& c : cs) {
    std::printf("[%s] %s  --  %s (%.1fs)\n", c.pass ? "PASS" : "FAIL",
                c.name.c_str(), c.detail.c_str(), c.seconds);
    all = all && c.pass;
  }
  std::printf("%s\n", all ? "ACCEPTANCE: all criteria pass"
                          : "ACCEPTANCE: FAILURES PRESENT");
  return all ? 0 : 1;
}

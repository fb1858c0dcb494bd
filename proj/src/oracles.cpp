#include "dbarlab/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace dbarlab {

namespace {
double factorial(int n) { return std::tgamma(double(n) + 1.0); }
}  // namespace

double ball_monomial_integral(double r, int a1, int a2, int b1, int b2) {
  if (a1 != b1 || a2 != b2) return 0.0;
  // pi^n a! / (n+|a|)! on the unit ball, n = 2
  double v = M_PI * M_PI * factorial(a1) * factorial(a2) /
             factorial(2 + a1 + a2);
  return v * std::pow(r, 2 * (a1 + a2) + 4);
}

double sphere_monomial_integral(double r, int a1, int a2, int b1, int b2) {
  if (a1 != b1 || a2 != b2) return 0.0;
  double v = 2.0 * M_PI * M_PI * factorial(a1) * factorial(a2) /
             factorial(1 + a1 + a2);
  return v * std::pow(r, 2 * (a1 + a2) + 3);
}

double ellipsoid_monomial_integral(int m, int a1, int a2, int b1, int b2) {
  if (a1 != b1 || a2 != b2) return 0.0;
  int p = a1, q = a2;
  // pi^2/(m(p+1)) * B((q+1)/m, p+2)
  double lb = std::lgamma((q + 1.0) / m) + std::lgamma(p + 2.0) -
              std::lgamma((q + 1.0) / m + p + 2.0);
  return M_PI * M_PI / (m * (p + 1.0)) * std::exp(lb);
}

double polydisc_monomial_integral(double r1, double r2, int a1, int a2, int b1,
                                  int b2) {
  if (a1 != b1 || a2 != b2) return 0.0;
  double f1 = M_PI * std::pow(r1, 2 * a1 + 2) / (a1 + 1.0);
  double f2 = M_PI * std::pow(r2, 2 * a2 + 2) / (a2 + 1.0);
  return f1 * f2;
}

namespace {

// u(1; mu) for the radial Dirichlet problem u'' + ((d-1)/r) u' + mu u = 0,
// u(0) = 1, u'(0) = 0, integrated by RK4 from a series start.
double radial_endpoint(int dim, double mu) {
  const double r0 = 1e-3;
  // series u = sum c_k r^{2k}, c_k = -mu c_{k-1} / (2k (2k + d - 2))
  double c = 1.0, u = 1.0, du = 0.0;
  for (int k = 1; k <= 4; ++k) {
    c *= -mu / (2.0 * k * (2.0 * k + dim - 2.0));
    u += c * std::pow(r0, 2 * k);
    du += 2.0 * k * c * std::pow(r0, 2 * k - 1);
  }
  auto rhs = [&](double r, double uu, double vv, double& duu, double& dvv) {
    duu = vv;
    dvv = -((dim - 1.0) / r) * vv - mu * uu;
  };
  const int steps = 4000;
  const double h = (1.0 - r0) / steps;
  double r = r0, v = du;
  for (int i = 0; i < steps; ++i) {
    double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
    rhs(r, u, v, k1u, k1v);
    rhs(r + 0.5 * h, u + 0.5 * h * k1u, v + 0.5 * h * k1v, k2u, k2v);
    rhs(r + 0.5 * h, u + 0.5 * h * k2u, v + 0.5 * h * k2v, k3u, k3v);
    rhs(r + h, u + h * k3u, v + h * k3v, k4u, k4v);
    u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    r += h;
  }
  return u;
}

}  // namespace

double dirichlet_ball_mu1(int dim, double radius) {
  if (dim < 2) throw std::invalid_argument("dirichlet_ball_mu1: dim >= 2");
  // first sign change of u(1; mu) on the unit ball, then scale by 1/r^2
  double lo = 1.0, hi = 1.0;
  double ulo = radial_endpoint(dim, lo);
  for (hi = 2.0; hi < 400.0; hi *= 1.5) {
    double uhi = radial_endpoint(dim, hi);
    if (ulo > 0.0 && uhi <= 0.0) break;
    lo = hi;
    ulo = uhi;
  }
  if (hi >= 400.0) throw std::runtime_error("dirichlet_ball_mu1: no bracket");
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (radial_endpoint(dim, mid) > 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-11 * hi) break;
  }
  return 0.5 * (lo + hi) / (radius * radius);
}

double dirichlet_polydisc_mu1(double r1, double r2) {
  return dirichlet_ball_mu1(2, r1) + dirichlet_ball_mu1(2, r2);
}

}  // namespace dbarlab

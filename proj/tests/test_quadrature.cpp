#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dbarlab/oracles.hpp"
#include "dbarlab/quadrature.hpp"

using namespace dbarlab;

TEST_CASE("gauss-legendre nodes") {
  std::vector<double> x, w;
  gauss_legendre_01(5, x, w);
  double s = 0.0, s3 = 0.0;
  for (int i = 0; i < 5; ++i) {
    s += w[i];
    s3 += w[i] * x[i] * x[i] * x[i];
  }
  CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s3 == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("ball quadrature against closed forms and a grid count") {
  auto ball = make_ball();
  QuadratureRule qi = interior_quadrature(ball, 6);
  double vol = qi.total_weight();
  CHECK(vol == doctest::Approx(M_PI * M_PI / 2.0).epsilon(1e-10));

  double m1 = integrate_fn_real(qi, [](const Pt& z) { return std::norm(z[0]); });
  CHECK(m1 == doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-10));

  cplx cross = integrate_fn(qi, [](const Pt& z) {
    return z[0] * std::conj(z[1]);
  });
  CHECK(std::abs(cross) < 1e-12);

  // brute-force 4d grid count confirms the closed forms independently
  double h = 0.08;
  long count = 0;
  double wm1 = 0.0;
  int n = int(std::ceil(1.0 / h));
  for (int i1 = -n; i1 <= n; ++i1)
    for (int i2 = -n; i2 <= n; ++i2)
      for (int i3 = -n; i3 <= n; ++i3)
        for (int i4 = -n; i4 <= n; ++i4) {
          double x1 = i1 * h, y1 = i2 * h, x2 = i3 * h, y2 = i4 * h;
          double r2 = x1 * x1 + y1 * y1 + x2 * x2 + y2 * y2;
          if (r2 < 1.0) {
            ++count;
            wm1 += x1 * x1 + y1 * y1;
          }
        }
  double vol_brute = double(count) * h * h * h * h;
  CHECK(vol == doctest::Approx(vol_brute).epsilon(0.03));
  CHECK(m1 == doctest::Approx(wm1 * h * h * h * h).epsilon(0.05));
}

TEST_CASE("sphere quadrature") {
  auto ball = make_ball();
  QuadratureRule qb = boundary_quadrature(ball, 6);
  CHECK(qb.total_weight() == doctest::Approx(2.0 * M_PI * M_PI).epsilon(1e-10));
  double m1 = 0.0;
  for (std::size_t i = 0; i < qb.size(); ++i)
    m1 += qb.weights[i] * std::norm(qb.nodes[i][0]);
  CHECK(m1 == doctest::Approx(M_PI * M_PI).epsilon(1e-10));

  auto pd = make_polydisc();
  CHECK_THROWS_AS(boundary_quadrature(pd, 3), std::invalid_argument);
}

TEST_CASE("monomial convergence in the level") {
  auto ell = make_ellipsoid(2);
  double prev = 1e300;
  for (int level : {2, 4, 6}) {
    QuadratureRule qi = interior_quadrature(ell, level);
    double got = integrate_fn_real(qi, [](const Pt& z) {
      return std::norm(z[0]) * std::pow(std::norm(z[1]), 2);
    });
    double want = ellipsoid_monomial_integral(2, 1, 2, 1, 2);
    double err = std::abs(got - want) / want;
    CHECK(err <= prev * 1.5);  // decreasing within noise
    prev = err;
  }
  CHECK(prev < 1e-6);
}

TEST_CASE("polydisc interior quadrature") {
  auto pd = make_polydisc(1.0, 0.5);
  QuadratureRule qi = interior_quadrature(pd, 6);
  CHECK(qi.total_weight() ==
        doctest::Approx(polydisc_monomial_integral(1.0, 0.5, 0, 0, 0, 0))
            .epsilon(1e-6));
  double m = integrate_fn_real(qi, [](const Pt& z) { return std::norm(z[1]); });
  CHECK(m == doctest::Approx(polydisc_monomial_integral(1.0, 0.5, 0, 1, 0, 1))
                 .epsilon(1e-6));
}

TEST_CASE("moment tables match direct integration") {
  auto ball = make_ball();
  QuadratureRule qi = interior_quadrature(ball, 5);
  MomentTable mu = interior_moments(qi, 6);
  MomentTable mus = interior_moments_serial(qi, 6);
  CHECK(mu.at(2, 1, 2, 1) == mus.at(2, 1, 2, 1));  // bitwise

  Poly p = Poly::monomial(1, 0, 1, 0) + Poly::monomial(0, 2, 0, 2, cplx(0, 1));
  cplx direct = integrate_fn(qi, [&](const Pt& z) { return p.eval(z); });
  CHECK(std::abs(integrate(p, mu) - direct) < 1e-12 * (1.0 + std::abs(direct)));

  Poly q = Poly::monomial(1, 1, 0, 0);
  cplx pair_direct =
      integrate_fn(qi, [&](const Pt& z) { return p.eval(z) * std::conj(q.eval(z)); });
  CHECK(std::abs(pairing(p, q, mu) - pair_direct) <
        1e-12 * (1.0 + std::abs(pair_direct)));

  CHECK_THROWS_AS(mu.at(4, 3, 0, 0), std::out_of_range);
}

TEST_CASE("boundary tables match direct integration") {
  auto ell = make_ellipsoid(2);
  QuadratureRule qb = boundary_quadrature(ell, 5);
  BoundaryTables T = boundary_moments(qb, 4);
  Poly p = Poly::monomial(1, 0, 0, 1);
  Poly q = Poly::monomial(0, 1, 0, 0);
  cplx direct = 0.0;
  for (std::size_t i = 0; i < qb.size(); ++i)
    direct += qb.weights[i] * qb.normals[i].nu[0] *
              std::conj(qb.normals[i].nu[1]) * p.eval(qb.nodes[i]) *
              std::conj(q.eval(qb.nodes[i]));
  cplx via = 0.0;
  for (const auto& [kp, cp] : p.terms())
    for (const auto& [kq, cq] : q.terms())
      via += cp * std::conj(cq) *
             T.at(0, 1).at_pair(Mono::from_key(kp), Mono::from_key(kq));
  CHECK(std::abs(via - direct) < 1e-12 * (1.0 + std::abs(direct)));
}

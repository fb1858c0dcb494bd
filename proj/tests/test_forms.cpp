#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "dbarlab/domain.hpp"
#include "dbarlab/forms.hpp"
#include "dbarlab/quadrature.hpp"

using namespace dbarlab;

namespace {

Poly random_poly(std::mt19937_64& rng, int max_deg) {
  auto uni = [&] { return double(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
  Poly p;
  for (int t = 0; t < 6; ++t) {
    int a1 = int(rng() % (max_deg + 1));
    int a2 = int(rng() % (max_deg + 1 - a1));
    int b1 = int(rng() % (max_deg + 1 - a1 - a2));
    int b2 = int(rng() % (max_deg + 1 - a1 - a2 - b1));
    p.add_term(Mono{std::uint8_t(a1), std::uint8_t(a2), std::uint8_t(b1),
                    std::uint8_t(b2)},
               cplx(uni(), uni()));
  }
  return p;
}

}  // namespace

TEST_CASE("dbar basics") {
  // dbar(zbar1) = dzbar1
  PolyForm u = PolyForm::from_scalar(Poly::monomial(0, 0, 1, 0));
  PolyForm du = dbar(u);
  CHECK(du.q() == 1);
  CHECK(du.at(1).eval(Pt{}) == cplx(1.0));
  CHECK(du.at(2).empty());

  // dbar(zbar2 dzbar1) = -dzbar1^dzbar2 (antisymmetry sign)
  PolyForm f = PolyForm::component(1, 1, Poly::monomial(0, 0, 0, 1));
  PolyForm df = dbar(f);
  CHECK(df.at(3).eval(Pt{}) == cplx(-1.0));

  // top degree rejected
  PolyForm top(2);
  CHECK_THROWS_AS(dbar(top), std::invalid_argument);
}

TEST_CASE("dbar o dbar = 0 symbolically up to degree 8") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    PolyForm g = PolyForm::from_scalar(random_poly(rng, 8));
    PolyForm ddg = dbar(dbar(g));
    CHECK(ddg.empty());
  }
}

TEST_CASE("theta examples") {
  // theta(z1 dzbar1) = -1
  PolyForm f = PolyForm::component(1, 1, Poly::monomial(1, 0, 0, 0));
  PolyForm tf = theta(f);
  CHECK(tf.q() == 0);
  CHECK(tf.at(0).eval(Pt{}) == cplx(-1.0));
  // theta(dzbar1) = 0, theta(z2 dzbar1) = 0
  CHECK(theta(PolyForm::component(1, 1, Poly(1.0))).empty());
  CHECK(theta(PolyForm::component(1, 1, Poly::monomial(0, 1, 0, 0))).empty());
  CHECK_THROWS_AS(theta(PolyForm(0)), std::invalid_argument);
}

TEST_CASE("theta is the formal adjoint of dbar (mollified brute check)") {
  // <dbar u, f> = <u, theta f> for u vanishing on the boundary; the boundary
  // pairing drops and the quadrature is exact for polynomials.
  auto ball = make_ball();
  QuadratureRule qi = interior_quadrature(ball, 9);
  std::mt19937_64 rng(7);
  Poly moll = Poly(1.0) - Poly::norm_sq();
  for (int trial = 0; trial < 4; ++trial) {
    PolyForm u = PolyForm::from_scalar(moll * random_poly(rng, 3));
    PolyForm f = PolyForm::component(1, 1, random_poly(rng, 3)) +
                 PolyForm::component(1, 2, random_poly(rng, 3));
    cplx lhs = form_inner_numeric(qi, dbar(u), f);
    cplx rhs = form_inner_numeric(qi, u, theta(f));
    CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(lhs)));
  }
  // and on (0,2)-forms against (0,1) test forms, via a vanishing 1-form
  for (int trial = 0; trial < 4; ++trial) {
    PolyForm u = PolyForm::component(1, 1, moll * random_poly(rng, 2)) +
                 PolyForm::component(1, 2, moll * random_poly(rng, 2));
    PolyForm f = PolyForm::component(2, 3, random_poly(rng, 3));
    cplx lhs = form_inner_numeric(qi, dbar(u), f);
    cplx rhs = form_inner_numeric(qi, u, theta(f));
    CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(lhs)));
  }
}

TEST_CASE("contraction with the defining-function gradient") {
  auto ball = make_ball();
  // f = dzbar1 at (1,0): coefficient drho/dz1 = zb1/2 -> 1/2
  PolyForm f1 = PolyForm::component(1, 1, Poly(1.0));
  PolyForm c1 = contract_normal(*ball, f1);
  Pt p10{cplx(1.0), cplx(0.0)};
  CHECK(c1.at(0).eval(p10) == cplx(0.5));

  // antisymmetric tangential form contracts to zero identically
  PolyForm ft = PolyForm::component(1, 1, Poly::monomial(0, 0, 0, 1)) +
                PolyForm::component(1, 2, Poly::monomial(0, 0, 1, 0, -1.0));
  CHECK(contract_normal(*ball, ft).empty());

  // top-degree contraction at (0,1): -(1/2) dzbar1
  PolyForm f2 = PolyForm::component(2, 3, Poly(1.0));
  PolyForm c2 = contract_normal(*ball, f2);
  Pt p01{cplx(0.0), cplx(1.0)};
  CHECK(c2.at(1).eval(p01) == cplx(-0.5));
  CHECK(c2.at(2).eval(p01) == cplx(0.0));

  // double contraction vanishes identically (antisymmetry)
  std::mt19937_64 rng(3);
  PolyForm g = PolyForm::component(2, 3, random_poly(rng, 4));
  CHECK(contract_normal(*ball, contract_normal(*ball, g)).empty());
}

TEST_CASE("normal/tangential split") {
  auto ball = make_ball();
  PolyForm f = PolyForm::component(1, 1, Poly(1.0));  // dzbar1
  Pt p10{cplx(1.0), cplx(0.0)};
  SplitResult s = split_normal_tangential(*ball, f, p10);
  CHECK(std::abs(s.normal.comp[1] - cplx(1.0)) < 1e-12);
  CHECK(std::sqrt(s.tangential.norm_sq()) < 1e-12);

  PolyForm f2 = PolyForm::component(1, 2, Poly(1.0));  // dzbar2 is tangential
  s = split_normal_tangential(*ball, f2, p10);
  CHECK(std::sqrt(s.normal.norm_sq()) < 1e-12);
  CHECK(std::abs(s.tangential.comp[2] - cplx(1.0)) < 1e-12);

  // f = dzbar1 + dzbar2 at (1,0): |f_nu| = |f_tau| = 1
  PolyForm f3 = PolyForm::component(1, 1, Poly(1.0)) +
                PolyForm::component(1, 2, Poly(1.0));
  s = split_normal_tangential(*ball, f3, p10);
  CHECK(std::sqrt(s.normal.norm_sq()) == doctest::Approx(1.0));
  CHECK(std::sqrt(s.tangential.norm_sq()) == doctest::Approx(1.0));

  // at (1,1)/sqrt(2) the same form is purely normal (projection oracle)
  Pt pdiag{cplx(1.0 / std::sqrt(2.0)), cplx(1.0 / std::sqrt(2.0))};
  s = split_normal_tangential(*ball, f3, pdiag);
  CHECK(std::sqrt(s.tangential.norm_sq()) < 1e-12);
  CHECK(std::sqrt(s.normal.norm_sq()) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("split against a Gram-Schmidt projection oracle") {
  auto ball = make_ball();
  std::mt19937_64 rng(11);
  auto uni = [&] { return double(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
  for (int trial = 0; trial < 10; ++trial) {
    // random boundary point and random constant (0,1)-form
    double u = 0.5 * (uni() + 1.0), b = M_PI * uni(), g = M_PI * uni();
    Pt z{std::sqrt(1.0 - u) * std::exp(cplx(0, b)),
         std::sqrt(u) * std::exp(cplx(0, g))};
    PolyForm f = PolyForm::component(1, 1, Poly(cplx(uni(), uni()))) +
                 PolyForm::component(1, 2, Poly(cplx(uni(), uni())));
    SplitResult s = split_normal_tangential(*ball, f, z);

    // oracle: orthogonal projection onto the unit dbar-rho covector
    std::array<cplx, 2> nu{std::conj(ball->drho()[0].eval(z)),
                           std::conj(ball->drho()[1].eval(z))};
    double len = std::sqrt(std::norm(nu[0]) + std::norm(nu[1]));
    nu[0] /= len;
    nu[1] /= len;
    PointForm fv = f.eval(z);
    cplx coef = fv.comp[1] * std::conj(nu[0]) + fv.comp[2] * std::conj(nu[1]);
    PointForm proj;
    proj.q = 1;
    proj.comp[1] = coef * nu[0];
    proj.comp[2] = coef * nu[1];

    CHECK(std::abs(s.normal.comp[1] - proj.comp[1]) < 1e-12);
    CHECK(std::abs(s.normal.comp[2] - proj.comp[2]) < 1e-12);
    // decomposition and orthogonality at the point
    for (IndexMask m : multiindex_list(1))
      CHECK(std::abs(s.normal.comp[m] + s.tangential.comp[m] - fv.comp[m]) <
            1e-12);
    CHECK(std::abs(inner(s.tangential, s.normal)) < 1e-12);
    // tangential part has zero normal trace
    std::array<cplx, 2> nu_dual{ball->drho()[0].eval(z) / len,
                                ball->drho()[1].eval(z) / len};
    PointForm tr = contract_point(s.tangential, nu_dual);
    CHECK(std::sqrt(tr.norm_sq()) < 1e-10);
  }
}

TEST_CASE("hessian action") {
  ScalarField nsq{Poly::norm_sq()};  // identity Hessian
  std::mt19937_64 rng(5);
  auto uni = [&] { return double(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
  for (int trial = 0; trial < 5; ++trial) {
    PolyForm f = PolyForm::component(1, 1, Poly(cplx(uni(), uni()))) +
                 PolyForm::component(1, 2, Poly(cplx(uni(), uni())));
    Pt z{cplx(uni(), uni()), cplx(uni(), uni())};
    CHECK(hessian_action(nsq, f, z) ==
          doctest::Approx(f.eval(z).norm_sq()).epsilon(1e-12));
  }

  // pluriharmonic: Re(z1^2) has zero complex Hessian
  ScalarField ph{Poly::monomial(2, 0, 0, 0, 0.5) +
                 Poly::monomial(0, 0, 2, 0, 0.5)};
  PolyForm f = PolyForm::component(1, 1, Poly(1.0));
  CHECK(hessian_action(ph, f, Pt{cplx(0.3, 0.1), cplx(0.2, -0.4)}) ==
        doctest::Approx(0.0));

  // b = |z1|^4: H(f = dzbar1) = 4 |z1|^2  (finite-difference cross-check)
  ScalarField quart{Poly::monomial(2, 0, 2, 0)};
  Pt z{cplx(0.6, -0.2), cplx(0.1, 0.4)};
  CHECK(hessian_action(quart, f, z) ==
        doctest::Approx(4.0 * std::norm(z[0])).epsilon(1e-12));
  {
    // finite differences of b along z1/zbar1 directions
    double h = 1e-5;
    auto b = [&](const Pt& w) { return quart.eval(w); };
    // d^2 b / dz1 dzbar1 = (1/4)(b_xx + b_yy) for the (1,1) entry
    Pt zp = z, zm = z;
    zp[0] += h;
    zm[0] -= h;
    double bxx = (b(zp) - 2.0 * b(z) + b(zm)) / (h * h);
    zp = z;
    zm = z;
    zp[0] += cplx(0, h);
    zm[0] -= cplx(0, h);
    double byy = (b(zp) - 2.0 * b(z) + b(zm)) / (h * h);
    CHECK(0.25 * (bxx + byy) == doctest::Approx(4.0 * std::norm(z[0])).epsilon(1e-4));
  }

  // linearity in b and reality
  ScalarField sum{Poly::norm_sq() + Poly::monomial(2, 0, 2, 0)};
  PolyForm g = PolyForm::component(1, 1, Poly(cplx(0.3, 0.8))) +
               PolyForm::component(1, 2, Poly(cplx(-0.5, 0.2)));
  double lhs = hessian_action(sum, g, z);
  double rhs = hessian_action(nsq, g, z) + hessian_action(quart, g, z);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("green identity on the ball") {
  auto ball = make_ball();
  QuadratureRule qi = interior_quadrature(ball, 4);
  QuadratureRule qb = boundary_quadrature(ball, 4);

  // u = zbar1, f = dzbar1: both sides quadrature-exact, residual tiny
  PolyForm u = PolyForm::from_scalar(Poly::monomial(0, 0, 1, 0));
  PolyForm f = PolyForm::component(1, 1, Poly(1.0));
  CHECK(check_green(*ball, u, f, qi, qb) < 1e-3);

  // compactly-vanishing pair: boundary term drops
  Poly moll = Poly(1.0) - Poly::norm_sq();
  PolyForm um = PolyForm::from_scalar(moll * Poly::monomial(0, 1, 1, 0));
  CHECK(check_green(*ball, um, f, qi, qb) < 1e-10);

  // tangential f: boundary term vanishes so <dbar u, f> = <u, theta f>
  PolyForm ft = PolyForm::component(1, 1, Poly::monomial(0, 0, 0, 1)) +
                PolyForm::component(1, 2, Poly::monomial(0, 0, 1, 0, -1.0));
  PolyForm u2 = PolyForm::from_scalar(Poly::monomial(1, 1, 0, 1));
  cplx lhs = form_inner_numeric(qi, dbar(u2), ft);
  cplx rhs = form_inner_numeric(qi, u2, theta(ft));
  CHECK(std::abs(lhs - rhs) < 1e-10);
  CHECK(check_green(*ball, u2, ft, qi, qb) < 1e-10);
}

TEST_CASE("green residual decreases under level doubling") {
  // the pairings must survive the phase averaging (torus-invariant products),
  // otherwise every term is exactly zero and the check is vacuous
  auto ell = make_ellipsoid(2);
  PolyForm u = PolyForm::from_scalar(Poly::monomial(0, 1, 1, 1));
  PolyForm f = PolyForm::component(1, 1, Poly::monomial(2, 0, 2, 0)) +
               PolyForm::component(1, 2, Poly::monomial(1, 0, 1, 1));
  double prev = -1.0;
  for (int level : {1, 2, 4, 8}) {
    double res = check_green(*ell, u, f, interior_quadrature(ell, level),
                             boundary_quadrature(ell, level));
    if (prev >= 0.0) CHECK(res <= 0.5 * prev);  // at least halves per doubling
    prev = res;
  }
  CHECK(prev < 1e-10);
}

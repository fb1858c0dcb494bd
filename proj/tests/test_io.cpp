#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "dbarlab/io.hpp"

using namespace dbarlab;

TEST_CASE("polyform json round trip") {
  PolyForm f = PolyForm::component(1, 1, Poly::monomial(2, 0, 1, 0, cplx(0.5, -1.5))) +
               PolyForm::component(1, 2, Poly::monomial(0, 1, 0, 0, cplx(0, 2)));
  json j = polyform_to_json(f);
  PolyForm g = polyform_from_json(j);
  Pt z{cplx(0.3, 0.4), cplx(-0.7, 0.1)};
  PointForm fv = f.eval(z), gv = g.eval(z);
  for (int m = 0; m < 4; ++m) CHECK(fv.comp[m] == gv.comp[m]);
  CHECK(j["q"] == 1);
  CHECK(j["components"][0]["J"][0] == 1);
}

TEST_CASE("matrix binary round trip with header") {
  CMatrix m(3, 2);
  m.at(0, 0) = cplx(1.5, -2.5);
  m.at(2, 1) = cplx(0.25, 1e-17);
  std::stringstream ss;
  write_matrix_binary(ss, m, 2, 1, 4);
  int n, q, N;
  CMatrix r = read_matrix_binary(ss, n, q, N);
  CHECK(n == 2);
  CHECK(q == 1);
  CHECK(N == 4);
  CHECK(r.rows == 3);
  CHECK(r.cols == 2);
  CHECK(r.a == m.a);  // bitwise
}

TEST_CASE("flat key-value parsing") {
  std::istringstream in(
      "# comment\nkind = complex_ellipsoid\nm = 3\ncenter = 0 0 0 0\n");
  DomainSpec spec = parse_domain_descriptor(in);
  CHECK(spec.kind == "complex_ellipsoid");
  CHECK(spec.m == 3);
  auto d = make_domain(spec);
  CHECK(d->ellipsoid_m() == 3);
}

TEST_CASE("domain short forms") {
  CHECK(domain_from_string("ball")->kind() == DomainKind::Ball);
  CHECK(domain_from_string("ball:0.5")->radius() == doctest::Approx(0.5));
  CHECK(domain_from_string("ellipsoid:2")->kind() == DomainKind::ComplexEllipsoid);
  auto pd = domain_from_string("polydisc:1,0.5");
  CHECK(pd->polydisc_r2() == doctest::Approx(0.5));
  CHECK_THROWS_AS(domain_from_string("torus"), std::invalid_argument);
}

TEST_CASE("certificate round trip") {
  Certificate c;
  c.b = ScalarField(Poly::norm_sq() - Poly(1.0));
  c.hessian_bound = 1.0;
  c.alpha = 0.5;
  c.collar = 0.1;
  c.label = "unit";
  std::stringstream ss;
  write_certificate(ss, c);
  Certificate r = parse_certificate(ss);
  CHECK(r.hessian_bound == 1.0);
  CHECK(r.alpha.has_value());
  CHECK(*r.alpha == 0.5);
  CHECK(r.collar == 0.1);
  Pt z{cplx(0.3, 0.2), cplx(0.5, -0.4)};
  CHECK(r.b.eval(z) == doctest::Approx(c.b.eval(z)));
}

TEST_CASE("domain descriptor text embeds the kind") {
  auto ball = make_ball(0.75);
  std::string d = ball->descriptor();
  CHECK(d.find("kind = ball") != std::string::npos);
  CHECK(d.find("radius = 0.75") != std::string::npos);
  std::istringstream in(d);
  DomainSpec spec = parse_domain_descriptor(in);
  CHECK(spec.radius == doctest::Approx(0.75));
}

TEST_CASE("quadrature csv export") {
  auto ball = make_ball();
  QuadratureRule qi = interior_quadrature(ball, 1);
  std::ostringstream out;
  write_quadrature_csv(out, qi);
  std::string s = out.str();
  CHECK(s.rfind("re1,im1,re2,im2,weight\n", 0) == 0);
  std::size_t lines = std::count(s.begin(), s.end(), '\n');
  CHECK(lines == qi.size() + 1);
}

TEST_CASE("fmt is stable") {
  CHECK(fmt(0.5) == "0.5");
  CHECK(fmt(1.0 / 3.0) == fmt(1.0 / 3.0));
  CHECK(fmt(M_PI) == "3.1415926535897931");
}

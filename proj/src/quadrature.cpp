#include "dbarlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dbarlab/parallel.hpp"

namespace dbarlab {

void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p0 = 0.0, p1 = 0.0, dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      p0 = 1.0;
      p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
      }
      dp = n * (t * p0 - p1) / (t * t - 1.0);
      double step = p0 / dp;
      t -= step;
      if (std::abs(step) < 1e-15) break;
    }
    // map [-1,1] -> [0,1]
    x[i] = 0.5 * (1.0 - t);
    x[n - 1 - i] = 0.5 * (1.0 + t);
    double wi = 1.0 / ((1.0 - t * t) * dp * dp);
    w[i] = wi;
    w[n - 1 - i] = wi;
  }
}

double QuadratureRule::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

int auto_level(int N) { return N + 2; }

namespace {

struct DirGrid {
  std::vector<double> u, wu;
  int nb = 0, ng = 0;
  int nu = 0;
};

// Phase grids are exact for trigonometric monomials below the point count.
// The u grid is Gauss-Legendre: exact in u for the ball (the star radius is
// constant), doubled for kinds whose star radius varies with u, and split at
// the corner latitude u* = r2^2/(r1^2+r2^2) for the polydisc where the star
// radius has a kink.
DirGrid direction_grid(int level, const Domain& d) {
  DirGrid g;
  int base = level + 2;
  g.nb = 2 * base;
  g.ng = 2 * base;
  std::vector<double> x, w;
  if (d.kind() == DomainKind::Ball) {
    g.nu = base;
    gauss_legendre_01(g.nu, g.u, g.wu);
    return g;
  }
  int nu = 2 * base;
  gauss_legendre_01(nu, x, w);
  if (d.kind() == DomainKind::Polydisc) {
    double r1 = d.polydisc_r1(), r2 = d.polydisc_r2();
    double ustar = r2 * r2 / (r1 * r1 + r2 * r2);
    g.nu = 2 * nu;
    g.u.resize(g.nu);
    g.wu.resize(g.nu);
    for (int i = 0; i < nu; ++i) {
      g.u[i] = ustar * x[i];
      g.wu[i] = ustar * w[i];
      g.u[nu + i] = ustar + (1.0 - ustar) * x[i];
      g.wu[nu + i] = (1.0 - ustar) * w[i];
    }
    return g;
  }
  g.nu = nu;
  g.u = std::move(x);
  g.wu = std::move(w);
  return g;
}

}  // namespace

namespace {

// Shared interior-rule builder. `cuts(w)` returns the radial panel edges in
// (0,1) as fractions of the star radius along direction w (empty = single
// panel). Node ordering stays canonical: direction-major, panel, radial.
QuadratureRule interior_rule_impl(
    const DomainPtr& d, int level,
    const std::function<std::vector<double>(const Dir&)>& cuts) {
  if (level < 1) throw std::invalid_argument("quadrature level must be >= 1");
  QuadratureRule rule;
  rule.kind = QuadratureRule::Kind::Interior;
  rule.level = level;
  rule.domain = d;
  rule.exactness_degree = 2 * level;

  DirGrid g = direction_grid(level, *d);
  int nr = level + 2;
  std::vector<double> xr, wr;
  gauss_legendre_01(nr, xr, wr);

  const int ndir = g.nu * g.nb * g.ng;
  const int npanel_max = 8;
  std::vector<Pt> nodes(std::size_t(ndir) * nr * npanel_max);
  std::vector<double> weights(std::size_t(ndir) * nr * npanel_max, -1.0);
  const Pt c = d->center();
  const double wphase = (2.0 * M_PI / g.nb) * (2.0 * M_PI / g.ng) * 0.5;

#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (int dir = 0; dir < ndir; ++dir) {
    int iu = dir / (g.nb * g.ng);
    int ib = dir / g.ng % g.nb;
    int ig = dir % g.ng;
    double u = g.u[iu];
    double beta = 2.0 * M_PI * ib / g.nb;
    double gam = 2.0 * M_PI * ig / g.ng;
    Dir w{std::sqrt(1.0 - u) * std::exp(cplx(0.0, beta)),
          std::sqrt(u) * std::exp(cplx(0.0, gam))};
    double R = d->star_radius(w);
    double wdir = g.wu[iu] * wphase;
    std::vector<double> edges{0.0};
    for (double t : cuts(w))
      if (t > edges.back() + 1e-12 && t < 1.0) edges.push_back(t);
    edges.push_back(1.0);
    std::size_t base = std::size_t(dir) * nr * npanel_max;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
      double a = edges[p], b = edges[p + 1];
      for (int ir = 0; ir < nr; ++ir) {
        double t = R * (a + (b - a) * xr[ir]);
        std::size_t idx = base + p * nr + ir;
        nodes[idx] = Pt{c[0] + t * w[0], c[1] + t * w[1]};
        weights[idx] = wdir * wr[ir] * (b - a) * R * t * t * t;
      }
    }
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0) continue;
    rule.nodes.push_back(nodes[i]);
    rule.weights.push_back(weights[i]);
  }
  return rule;
}

}  // namespace

QuadratureRule interior_quadrature(const DomainPtr& d, int level) {
  return interior_rule_impl(
      d, level, [](const Dir&) { return std::vector<double>{}; });
}

QuadratureRule interior_quadrature_radial_panels(const DomainPtr& d, int level,
                                                 std::vector<double> fractions) {
  std::sort(fractions.begin(), fractions.end());
  if (fractions.size() > 6)
    throw std::invalid_argument("at most 6 radial panel cuts supported");
  return interior_rule_impl(d, level, [fractions](const Dir&) {
    return fractions;
  });
}

QuadratureRule interior_quadrature_collar_split(const DomainPtr& d, int level,
                                                double delta) {
  DomainPtr inner = offset_domain(d, -delta);
  return interior_rule_impl(d, level, [d, inner](const Dir& w) {
    double tcut = inner->star_radius(w) / d->star_radius(w);
    return std::vector<double>{tcut};
  });
}

QuadratureRule boundary_quadrature(const DomainPtr& d, int level) {
  if (level < 1) throw std::invalid_argument("quadrature level must be >= 1");
  if (!d->smooth_boundary())
    throw std::invalid_argument("boundary quadrature requires a smooth-boundary kind; '" +
                                d->id() + "' is not");
  QuadratureRule rule;
  rule.kind = QuadratureRule::Kind::Boundary;
  rule.level = level;
  rule.domain = d;
  rule.exactness_degree = 2 * level;

  DirGrid g = direction_grid(level, *d);
  const int ndir = g.nu * g.nb * g.ng;
  rule.nodes.resize(ndir);
  rule.weights.resize(ndir);
  rule.normals.resize(ndir);
  const Pt c = d->center();
  const double wphase = (2.0 * M_PI / g.nb) * (2.0 * M_PI / g.ng) * 0.5;

#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (int dir = 0; dir < ndir; ++dir) {
    int iu = dir / (g.nb * g.ng);
    int ib = dir / g.ng % g.nb;
    int ig = dir % g.ng;
    double u = g.u[iu];
    double beta = 2.0 * M_PI * ib / g.nb;
    double gam = 2.0 * M_PI * ig / g.ng;
    Dir w{std::sqrt(1.0 - u) * std::exp(cplx(0.0, beta)),
          std::sqrt(u) * std::exp(cplx(0.0, gam))};
    double R = d->star_radius(w);
    Pt z{c[0] + R * w[0], c[1] + R * w[1]};
    NormalData nd = d->normal_data(z);  // throws on |grad rho| = 0
    // cos of the angle between the outward normal and the ray direction
    cplx s = 0.0;
    for (int j = 0; j < kDim; ++j) s += w[j] * nd.nu[j];
    double cosang = 2.0 * s.real();
    if (cosang <= 1e-8)
      throw std::runtime_error("star-parametrized surface element degenerate (ray nearly tangent) on " +
                               d->id());
    rule.nodes[dir] = z;
    rule.weights[dir] = g.wu[iu] * wphase * R * R * R / cosang;
    rule.normals[dir] = nd;
  }
  return rule;
}

// --- moment tables ----------------------------------------------------------

MomentTable::MomentTable(int degree, std::vector<cplx> data)
    : degree_(degree), stride_(degree + 1), mu_(std::move(data)) {}

cplx MomentTable::at(int a1, int a2, int b1, int b2) const {
  if (a1 + a2 + b1 + b2 > degree_)
    throw std::out_of_range("moment degree " +
                            std::to_string(a1 + a2 + b1 + b2) +
                            " exceeds table degree " + std::to_string(degree_));
  std::size_t s = stride_;
  return mu_[((std::size_t(a1) * s + a2) * s + b1) * s + b2];
}

namespace {

struct MomentJob {
  int degree;
  std::vector<std::array<int, 4>> idx;  // valid exponent tuples
  std::vector<cplx> pows;               // node-major power tables
  std::size_t nn;
  int np;  // degree+1

  void build_pows(const QuadratureRule& rule, int nthreads) {
    nn = rule.size();
    np = degree + 1;
    pows.resize(nn * 2 * np);
#pragma omp parallel for schedule(static) num_threads(nthreads)
    for (std::size_t i = 0; i < nn; ++i) {
      for (int v = 0; v < 2; ++v) {
        cplx* p = &pows[(i * 2 + v) * np];
        p[0] = 1.0;
        for (int k = 1; k < np; ++k) p[k] = p[k - 1] * rule.nodes[i][v];
      }
    }
    for (int a1 = 0; a1 <= degree; ++a1)
      for (int a2 = 0; a2 + a1 <= degree; ++a2)
        for (int b1 = 0; a1 + a2 + b1 <= degree; ++b1)
          for (int b2 = 0; a1 + a2 + b1 + b2 <= degree; ++b2)
            idx.push_back({a1, a2, b1, b2});
  }

  cplx entry(const QuadratureRule& rule, const std::array<int, 4>& e,
             const double* extra_w) const {
    cplx s = 0.0;
    for (std::size_t i = 0; i < nn; ++i) {
      const cplx* p1 = &pows[(i * 2 + 0) * np];
      const cplx* p2 = &pows[(i * 2 + 1) * np];
      cplx v = p1[e[0]] * p2[e[1]] * std::conj(p1[e[2]] * p2[e[3]]);
      double w = extra_w ? extra_w[i] : rule.weights[i];
      s += w * v;
    }
    return s;
  }
};

MomentTable build_interior(const QuadratureRule& rule, int degree,
                           int nthreads) {
  MomentJob job;
  job.degree = degree;
  job.build_pows(rule, nthreads);
  std::size_t stride = degree + 1;
  std::vector<cplx> data(stride * stride * stride * stride, cplx(0.0));
  const auto& idx = job.idx;
#pragma omp parallel for schedule(dynamic, 16) num_threads(nthreads)
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto& e = idx[k];
    data[((std::size_t(e[0]) * stride + e[1]) * stride + e[2]) * stride + e[3]] =
        job.entry(rule, e, nullptr);
  }
  return MomentTable(degree, std::move(data));
}

BoundaryTables build_boundary(const QuadratureRule& rule, int degree,
                              int nthreads) {
  if (rule.kind != QuadratureRule::Kind::Boundary)
    throw std::invalid_argument("boundary_moments needs a boundary rule");
  MomentJob job;
  job.degree = degree;
  job.build_pows(rule, nthreads);
  std::size_t stride = degree + 1;
  BoundaryTables out;
  // per-(l,lp) effective weights w_i nu_l conj(nu_lp); complex in general,
  // folded as two real tables would be overkill: reuse entry() with complex
  // weights via two passes (real and imaginary parts).
  for (int l = 0; l < kDim; ++l)
    for (int lp = 0; lp < kDim; ++lp) {
      std::vector<double> wre(rule.size()), wim(rule.size());
      for (std::size_t i = 0; i < rule.size(); ++i) {
        cplx f = rule.weights[i] * rule.normals[i].nu[l] *
                 std::conj(rule.normals[i].nu[lp]);
        wre[i] = f.real();
        wim[i] = f.imag();
      }
      std::vector<cplx> data(stride * stride * stride * stride, cplx(0.0));
      const auto& idx = job.idx;
#pragma omp parallel for schedule(dynamic, 16) num_threads(nthreads)
      for (std::size_t k = 0; k < idx.size(); ++k) {
        const auto& e = idx[k];
        cplx re = job.entry(rule, e, wre.data());
        cplx im = job.entry(rule, e, wim.data());
        data[((std::size_t(e[0]) * stride + e[1]) * stride + e[2]) * stride +
             e[3]] = re + cplx(0.0, 1.0) * im;
      }
      out.t[l][lp] = MomentTable(degree, std::move(data));
    }
  return out;
}

}  // namespace

MomentTable interior_moments(const QuadratureRule& rule, int degree) {
  return build_interior(rule, degree, thread_count());
}
MomentTable interior_moments_serial(const QuadratureRule& rule, int degree) {
  return build_interior(rule, degree, 1);
}
BoundaryTables boundary_moments(const QuadratureRule& rule, int degree) {
  return build_boundary(rule, degree, thread_count());
}
BoundaryTables boundary_moments_serial(const QuadratureRule& rule, int degree) {
  return build_boundary(rule, degree, 1);
}

cplx integrate(const Poly& p, const MomentTable& mu) {
  cplx s = 0.0;
  for (const auto& [k, c] : p.terms()) {
    Mono m = Mono::from_key(k);
    s += c * mu.at(m.a1, m.a2, m.b1, m.b2);
  }
  return s;
}

cplx pairing(const Poly& p, const Poly& q, const MomentTable& mu) {
  cplx s = 0.0;
  for (const auto& [kp, cp] : p.terms())
    for (const auto& [kq, cq] : q.terms()) {
      Mono mp = Mono::from_key(kp), mq = Mono::from_key(kq);
      s += cp * std::conj(cq) * mu.at_pair(mp, mq);
    }
  return s;
}

cplx integrate_fn(const QuadratureRule& rule,
                  const std::function<cplx(const Pt&)>& f) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i)
    s += rule.weights[i] * f(rule.nodes[i]);
  return s;
}

double integrate_fn_real(const QuadratureRule& rule,
                         const std::function<double(const Pt&)>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i)
    s += rule.weights[i] * f(rule.nodes[i]);
  return s;
}

cplx form_inner_numeric(const QuadratureRule& rule, const PolyForm& f,
                        const PolyForm& g) {
  return integrate_fn(rule, [&](const Pt& z) {
    return inner(f.eval(z), g.eval(z));
  });
}

double check_green(const Domain& d, const PolyForm& u, const PolyForm& f,
                   const QuadratureRule& q_int, const QuadratureRule& q_bdy) {
  (void)d;
  PolyForm du = dbar(u);
  PolyForm tf = theta(f);
  cplx lhs1 = form_inner_numeric(q_int, du, f);
  cplx lhs2 = form_inner_numeric(q_int, u, tf);
  cplx bdy = 0.0;
  for (std::size_t i = 0; i < q_bdy.size(); ++i) {
    const Pt& z = q_bdy.nodes[i];
    std::array<cplx, kDim> nu_dual;
    for (int j = 0; j < kDim; ++j) nu_dual[j] = q_bdy.normals[i].nu[j];
    PointForm cf = contract_point(f.eval(z), nu_dual);
    bdy += q_bdy.weights[i] * inner(u.eval(z), cf);
  }
  return std::abs(lhs1 - lhs2 - bdy);
}

}  // namespace dbarlab

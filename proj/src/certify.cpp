#include "dbarlab/certify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "dbarlab/parallel.hpp"
#include "dbarlab/quadrature.hpp"

namespace dbarlab {

namespace {

constexpr double kE = 2.718281828459045235;

double uniform01(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller; avoids the implementation-defined std distributions so runs
// are reproducible across standard libraries.
double gaussian(std::mt19937_64& rng) {
  double u1 = uniform01(rng), u2 = uniform01(rng);
  u1 = std::max(u1, 1e-300);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// |grad f|^2 of a complex polynomial at a point (real 4-gradient)
double grad_sq_at(const std::array<Poly, kDim>& dz,
                  const std::array<Poly, kDim>& dzb, const Pt& z) {
  double s = 0.0;
  for (int j = 0; j < kDim; ++j)
    s += 2.0 * (std::norm(dz[j].eval(z)) + std::norm(dzb[j].eval(z)));
  return s;
}

// Q(f,f) of a reconstructed form by direct quadrature (penalty included):
// ||dbar f||^2 + ||theta f||^2 + sigma ∮ |nu -| f|^2 dS.
double q_value_numeric(const GalerkinSystem& sys, const PolyForm& f) {
  QuadratureRule qi = interior_quadrature(sys.domain, sys.level_int);
  double qv = 0.0;
  if (f.q() < kDim) {
    PolyForm df = dbar(f);
    qv += form_inner_numeric(qi, df, df).real();
  }
  PolyForm tf = theta(f);
  qv += form_inner_numeric(qi, tf, tf).real();
  if (sys.has_boundary && sys.sigma > 0.0) {
    QuadratureRule qb = boundary_quadrature(sys.domain, sys.level_bdy);
    double bterm = 0.0;
    for (std::size_t i = 0; i < qb.size(); ++i) {
      std::array<cplx, kDim> nu;
      for (int j = 0; j < kDim; ++j) nu[j] = qb.normals[i].nu[j];
      PointForm ctr = contract_point(f.eval(qb.nodes[i]), nu);
      bterm += qb.weights[i] * ctr.norm_sq();
    }
    qv += sys.sigma * bterm;
  }
  return qv;
}

}  // namespace

Certificate builtin_certificate(const DomainPtr& d, int q) {
  double s = d->bounding_radius();
  // b = (|z-c|^2 - s^2)/s^2, identity Hessian / s^2
  Poly p;
  const Pt& c = d->center();
  for (int j = 0; j < kDim; ++j) {
    Poly zj = Poly::monomial(j == 0 ? 1 : 0, j == 0 ? 0 : 1, 0, 0);
    Poly zbj = Poly::monomial(0, 0, j == 0 ? 1 : 0, j == 0 ? 0 : 1);
    p += (zj - Poly(c[j])) * (zbj - Poly(std::conj(c[j])));
  }
  p -= Poly(s * s);
  p *= 1.0 / (s * s);
  Certificate cert;
  cert.b = ScalarField(std::move(p));
  cert.hessian_bound = double(q) / (s * s);
  std::ostringstream os;
  os << "scaled-norm(b=(|z-c|^2-" << s * s << ")/" << s * s << ", q=" << q
     << ")";
  cert.label = os.str();
  return cert;
}

CertificateVerdict check_certificate(const DomainPtr& d, Certificate& c, int q,
                                     int samples, std::uint64_t seed) {
  if (samples < 100)
    throw std::invalid_argument("check_certificate: need >= 100 samples");
  if (q < 1 || q > kDim)
    throw std::invalid_argument("check_certificate: q must be in 1..n");

  std::mt19937_64 rng(seed);
  const Pt& ctr = d->center();
  const double R = d->bounding_radius();

  struct Sample {
    Pt z;
    PointForm f;
    double dist = 0.0;  // distance to the boundary (positive inside)
  };
  std::vector<Sample> pts;
  pts.reserve(samples);
  auto jlist = multiindex_list(q);
  while (int(pts.size()) < samples) {
    Sample s;
    bool boundary = pts.size() % 4 == 3;
    if (boundary) {
      double u = uniform01(rng);
      double beta = 2.0 * M_PI * uniform01(rng);
      double gam = 2.0 * M_PI * uniform01(rng);
      Dir w{std::sqrt(1.0 - u) * std::exp(cplx(0.0, beta)),
            std::sqrt(u) * std::exp(cplx(0.0, gam))};
      double rr = d->star_radius(w);
      s.z = Pt{ctr[0] + rr * w[0], ctr[1] + rr * w[1]};
      s.dist = 0.0;
    } else {
      Pt z{ctr[0] + cplx(R * (2.0 * uniform01(rng) - 1.0),
                         R * (2.0 * uniform01(rng) - 1.0)),
           ctr[1] + cplx(R * (2.0 * uniform01(rng) - 1.0),
                         R * (2.0 * uniform01(rng) - 1.0))};
      if (d->rho_eval(z) >= 0.0) continue;
      s.z = z;
      s.dist = -d->signed_distance(z);
    }
    s.f.q = q;
    double nrm = 0.0;
    for (IndexMask J : jlist) {
      s.f.comp[J] = cplx(gaussian(rng), gaussian(rng));
      nrm += std::norm(s.f.comp[J]);
    }
    nrm = std::sqrt(nrm);
    if (nrm < 1e-12) continue;
    for (IndexMask J : jlist) s.f.comp[J] /= nrm;
    pts.push_back(std::move(s));
  }

  // precompute Hessian polynomials once
  std::array<std::array<Poly, kDim>, kDim> hess;
  for (int j = 0; j < kDim; ++j)
    for (int kk = 0; kk < kDim; ++kk) hess[j][kk] = c.b.hessian(j, kk);

  std::vector<double> margins(samples), bvals(samples);
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (int i = 0; i < samples; ++i) {
    const Sample& s = pts[i];
    bvals[i] = c.b.eval(s.z);
    std::array<std::array<cplx, kDim>, kDim> H;
    for (int j = 0; j < kDim; ++j)
      for (int kk = 0; kk < kDim; ++kk) H[j][kk] = hess[j][kk].eval(s.z);
    double hq = hessian_action_point(H, s.f);
    double bound = c.hessian_bound;
    if (c.alpha) {
      if (c.collar <= 0.0 || s.dist >= c.collar) {
        margins[i] = 1e300;  // constraint only asserted on the collar
        continue;
      }
      bound = c.hessian_bound / std::pow(std::max(s.dist, 1e-12), 2.0 * *c.alpha);
    }
    margins[i] = hq - bound;  // |f| = 1
  }

  CertificateVerdict v;
  v.pass = true;
  v.worst_margin = 1e300;
  for (int i = 0; i < samples; ++i) {
    if (bvals[i] < -1.0 - 1e-9 || bvals[i] > 1e-9) {
      v.pass = false;
      v.reason = "b out of [-1, 0] at a sampled point";
      v.witness_point = pts[i].z;
      break;
    }
    if (margins[i] < v.worst_margin) {
      v.worst_margin = margins[i];
      if (margins[i] < -1e-9) {
        v.pass = false;
        v.reason = "Hessian bound violated";
        v.witness_point = pts[i].z;
        v.witness_form.clear();
        for (IndexMask J : multiindex_list(q))
          v.witness_form.push_back(pts[i].f.comp[J]);
        break;
      }
    }
  }
  c.checked = v.pass;
  return v;
}

double catlin_lower_bound(const Certificate& c) {
  if (!c.checked)
    throw std::runtime_error(
        "catlin_lower_bound: certificate has not passed check_certificate");
  return c.hessian_bound / kE;
}

std::vector<CatlinMargin> check_catlin_on_spectrum(const GalerkinSystem& sys,
                                                   const Spectrum& spec,
                                                   const Certificate& c,
                                                   int count) {
  if (!c.checked)
    throw std::runtime_error("check_catlin_on_spectrum: unchecked certificate");
  count = std::min(count, spec.vectors.cols);
  std::array<std::array<Poly, kDim>, kDim> hess;
  for (int j = 0; j < kDim; ++j)
    for (int kk = 0; kk < kDim; ++kk) hess[j][kk] = c.b.hessian(j, kk);
  QuadratureRule qi = interior_quadrature(sys.domain, sys.level_int);

  std::vector<CatlinMargin> out;
  for (int e = 0; e < count; ++e) {
    std::vector<cplx> coef(spec.vectors.rows);
    for (int i = 0; i < spec.vectors.rows; ++i) coef[i] = spec.vectors.at(i, e);
    PolyForm f = reconstruct_form(sys.basis, coef);
    CatlinMargin m;
    m.lambda = spec.eigenvalues[e];
    m.q_value = q_value_numeric(sys, f);
    double hint = 0.0;
    for (std::size_t i = 0; i < qi.size(); ++i) {
      std::array<std::array<cplx, kDim>, kDim> H;
      for (int j = 0; j < kDim; ++j)
        for (int kk = 0; kk < kDim; ++kk) H[j][kk] = hess[j][kk].eval(qi.nodes[i]);
      hint += qi.weights[i] * hessian_action_point(H, f.eval(qi.nodes[i]));
    }
    m.hessian_int = hint;
    m.margin = m.q_value - hint / kE;
    m.pass = m.margin >= -0.02 * std::max(m.q_value, 1e-300);
    out.push_back(m);
  }
  return out;
}

namespace {

HardyReport hardy_scalar_once(const DomainPtr& d, const ScalarField& g,
                              int level, double collar_floor) {
  QuadratureRule qi = interior_quadrature(d, level);
  std::array<Poly, kDim> dz, dzb;
  for (int j = 0; j < kDim; ++j) {
    dz[j] = g.poly().dz(j);
    dzb[j] = g.poly().dzbar(j);
  }
  HardyReport r;
  for (std::size_t i = 0; i < qi.size(); ++i) {
    const Pt& z = qi.nodes[i];
    double dist = -d->signed_distance(z);
    double g2 = std::norm(g.poly().eval(z));
    if (dist < collar_floor) {
      r.excluded_mass += qi.weights[i] * g2 / (dist * dist);
      continue;
    }
    r.lhs += qi.weights[i] * g2 / (dist * dist);
    r.grad_sq += qi.weights[i] * grad_sq_at(dz, dzb, z);
    r.rhs_mass += qi.weights[i] * g2;
  }
  r.rhs_q = r.grad_sq / 4.0;
  return r;
}

HardyReport hardy_form_once(const DomainPtr& d, const PolyForm& f, int level,
                            double collar_floor) {
  QuadratureRule qi = interior_quadrature(d, level);
  const double h = 1e-5 * d->bounding_radius();
  auto fN_at = [&](const Pt& z) {
    auto G = d->dist_gradient(z);
    std::array<cplx, kDim> cdist;  // d(dist)/dz_j = -conj(G_j)/2
    for (int j = 0; j < kDim; ++j) cdist[j] = -std::conj(G[j]) / 2.0;
    return contract_point(f.eval(z), cdist);
  };
  HardyReport r;
  for (std::size_t i = 0; i < qi.size(); ++i) {
    const Pt& z = qi.nodes[i];
    double dist = -d->signed_distance(z);
    PointForm fN = fN_at(z);
    double fN2 = fN.norm_sq();
    if (dist < collar_floor) {
      r.excluded_mass += qi.weights[i] * fN2 / (dist * dist);
      continue;
    }
    r.lhs += qi.weights[i] * fN2 / (dist * dist);
    r.rhs_mass += qi.weights[i] * fN2;
    // central finite differences along the four real axes
    double gs = 0.0;
    for (int axis = 0; axis < 4; ++axis) {
      Pt zp = z, zm = z;
      int j = axis / 2;
      cplx dh = axis % 2 == 0 ? cplx(h, 0.0) : cplx(0.0, h);
      zp[j] += dh;
      zm[j] -= dh;
      PointForm fp = fN_at(zp), fm = fN_at(zm);
      for (int m = 0; m < 4; ++m)
        gs += std::norm((fp.comp[m] - fm.comp[m]) / (2.0 * h));
    }
    r.grad_sq += qi.weights[i] * gs;
  }
  r.rhs_q = r.grad_sq / 4.0;
  return r;
}

void finish_hardy(HardyReport& r, const HardyReport& refined) {
  auto rel = [](double a, double b) {
    double s = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / s;
  };
  r.level_agreement = std::max(rel(r.lhs, refined.lhs),
                               rel(r.grad_sq, refined.grad_sq));
  if (r.level_agreement > 0.01)
    throw std::runtime_error(
        "check_hardy: quadrature levels disagree by more than 1% "
        "(agreement = " +
        std::to_string(r.level_agreement) + "); no verdict issued");
  double fuzz = 1e-9 * std::max(r.lhs, 1.0);
  r.min_A_form =
      std::max(0.0, (r.lhs / 16.0 - r.rhs_q) / std::max(r.rhs_mass, 1e-300));
  r.min_A_scalar =
      std::max(0.0, (r.lhs - 4.0 * r.grad_sq) / std::max(r.rhs_mass, 1e-300));
  r.pass16 = r.lhs <= 16.0 * r.rhs_q + fuzz;
  r.pass_scalar = r.lhs <= 4.0 * r.grad_sq + fuzz;
}

}  // namespace

HardyReport check_hardy_scalar(const DomainPtr& d, const ScalarField& g,
                               int level, double collar_floor) {
  // boundary trace must vanish (1/d^2 integrand)
  QuadratureRule qb = boundary_quadrature(d, std::max(level, 3));
  double scale = std::max(g.poly().max_abs_coeff(), 1e-300);
  for (std::size_t i = 0; i < qb.size(); ++i)
    if (std::abs(g.poly().eval(qb.nodes[i])) > 1e-6 * scale)
      throw std::invalid_argument(
          "check_hardy: scalar test does not vanish on the boundary");
  HardyReport r = hardy_scalar_once(d, g, level, collar_floor);
  HardyReport r2 = hardy_scalar_once(d, g, level + 2, collar_floor);
  finish_hardy(r, r2);
  return r;
}

HardyReport check_hardy_form(const DomainPtr& d, const PolyForm& f, int level,
                             double collar_floor) {
  if (f.q() < 1) throw std::invalid_argument("check_hardy: form path needs q >= 1");
  QuadratureRule qb = boundary_quadrature(d, std::max(level, 3));
  double scale = 0.0;
  for (const auto& [J, p] : f.components()) {
    (void)J;
    scale = std::max(scale, p.max_abs_coeff());
  }
  scale = std::max(scale, 1e-300);
  for (std::size_t i = 0; i < qb.size(); ++i) {
    const Pt& z = qb.nodes[i];
    auto G = d->dist_gradient(z);
    std::array<cplx, kDim> cdist;
    for (int j = 0; j < kDim; ++j) cdist[j] = -std::conj(G[j]) / 2.0;
    PointForm fN = contract_point(f.eval(z), cdist);
    if (std::sqrt(fN.norm_sq()) > 1e-6 * scale)
      throw std::invalid_argument(
          "check_hardy: normal trace f_N does not vanish on the boundary "
          "(integrand non-integrable)");
  }
  HardyReport r = hardy_form_once(d, f, level, collar_floor);
  HardyReport r2 = hardy_form_once(d, f, level + 2, collar_floor);
  finish_hardy(r, r2);
  return r;
}

EllipticityRow check_interior_ellipticity(const GalerkinSystem& sys,
                                          const Spectrum& spec, int idx,
                                          double delta) {
  if (idx < 0 || idx >= spec.vectors.cols)
    throw std::invalid_argument("interior_ellipticity: index out of range");
  std::vector<cplx> coef(spec.vectors.rows);
  for (int i = 0; i < spec.vectors.rows; ++i) coef[i] = spec.vectors.at(i, idx);
  PolyForm f = reconstruct_form(sys.basis, coef);

  QuadratureRule qi = interior_quadrature(sys.domain, sys.level_int);
  // symbolic gradients per component
  std::vector<std::pair<IndexMask, std::array<Poly, 2 * kDim>>> grads;
  for (const auto& [J, p] : f.components()) {
    std::array<Poly, 2 * kDim> g;
    for (int j = 0; j < kDim; ++j) {
      g[j] = p.dz(j);
      g[kDim + j] = p.dzbar(j);
    }
    grads.emplace_back(J, std::move(g));
  }
  double lhs = 0.0, mass = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < qi.size(); ++i) {
    const Pt& z = qi.nodes[i];
    double fz2 = f.eval(z).norm_sq();
    mass += qi.weights[i] * fz2;
    if (sys.domain->signed_distance(z) < -delta) {
      double g2 = 0.0;
      for (const auto& [J, g] : grads) {
        (void)J;
        for (int j = 0; j < kDim; ++j)
          g2 += 2.0 * (std::norm(g[j].eval(z)) + std::norm(g[kDim + j].eval(z)));
      }
      lhs += qi.weights[i] * (fz2 + g2);
      ++hits;
    }
  }
  if (hits == 0)
    throw std::runtime_error(
        "interior_ellipticity: no quadrature nodes in the delta-interior");
  EllipticityRow row;
  row.delta = delta;
  row.lhs = lhs;
  row.rhs = q_value_numeric(sys, f) + mass / (delta * delta);
  row.c_emp = row.lhs / row.rhs;
  return row;
}

EllipticityLadder interior_ellipticity_ladder(
    const GalerkinSystem& sys, const Spectrum& spec, int idx,
    const std::vector<double>& deltas) {
  EllipticityLadder lad;
  double cmin = 1e300, cmax = 0.0;
  for (double delta : deltas) {
    EllipticityRow row = check_interior_ellipticity(sys, spec, idx, delta);
    cmin = std::min(cmin, row.c_emp);
    cmax = std::max(cmax, row.c_emp);
    lad.rows.push_back(row);
  }
  lad.stable = cmax <= 4.0 * cmin;
  return lad;
}

RateFit fit_subelliptic_rate(const std::vector<std::pair<double, double>>& decay,
                             double q_value) {
  if (decay.size() < 3)
    throw std::invalid_argument("fit_subelliptic_rate: need >= 3 points");
  std::vector<double> xs, ys;
  for (const auto& [delta, mass] : decay) {
    if (mass <= 0.0)
      throw std::invalid_argument("fit_subelliptic_rate: non-positive mass");
    xs.push_back(delta);
    ys.push_back(mass);
  }
  // fit_loglog lives in stability; re-derive the least squares here to keep
  // the modules decoupled
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = int(xs.size());
  std::vector<double> lx(n), ly(n);
  for (int i = 0; i < n; ++i) {
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  double det = n * sxx - sx * sx;
  double slope = (n * sxy - sx * sy) / det;
  double icpt = (sy * sxx - sx * sxy) / det;
  RateFit fit;
  fit.alpha = slope / 2.0;
  for (int i = 0; i < n; ++i)
    fit.band = std::max(fit.band, std::abs(ly[i] - slope * lx[i] - icpt) / 2.0);
  fit.c_estimate = std::exp(icpt) / std::max(q_value, 1e-300);
  return fit;
}

}  // namespace dbarlab

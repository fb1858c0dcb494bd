#include "dbarlab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dbarlab/parallel.hpp"

namespace dbarlab {

namespace {

// C^1 smoothstep and its derivative
double sstep(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * (3.0 - 2.0 * x);
}
double sstep_d(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return 6.0 * x * (1.0 - x);
}

// periodic telescoping window: B(s) = S(s+1) - S(s), supported on (-1, 1)
double bwin(double s) { return sstep(s + 1.0) - sstep(s); }
double bwin_d(double s) { return sstep_d(s + 1.0) - sstep_d(s); }

double wrap_cells(double s, int n) {
  // wrap into (-n/2, n/2]
  while (s > 0.5 * n) s -= n;
  while (s <= -0.5 * n) s += n;
  return s;
}

struct Angles {
  double t, beta, gamma, x, y;
};

Angles angles_of(const Pt& z) {
  Angles a;
  a.x = std::abs(z[0]);
  a.y = std::abs(z[1]);
  a.t = std::atan2(a.y, a.x);
  a.beta = std::atan2(z[0].imag(), z[0].real());
  a.gamma = std::atan2(z[1].imag(), z[1].real());
  return a;
}

}  // namespace

PushPlan PushPlan::make(const DomainPtr& d, int per_circle) {
  if (per_circle < 4)
    throw std::invalid_argument("push plan needs >= 4 anchors per circle");
  PushPlan p;
  p.domain_ = d;
  p.nphase_ = per_circle;
  p.edges_ = {M_PI / 8.0, 2.0 * M_PI / 8.0, 3.0 * M_PI / 8.0};
  p.hband_ = M_PI / 12.0;
  double rin = d->inscribed_radius();
  p.d0_ = -0.45 * rin;
  p.d1_ = -0.22 * rin;
  p.max_delta_ = 0.2 * rin;

  const double tc[4] = {0.5 * (p.edges_[0] + 0.5 * p.hband_),
                        0.5 * (p.edges_[0] + p.edges_[1]),
                        0.5 * (p.edges_[1] + p.edges_[2]),
                        0.5 * (p.edges_[2] - 0.5 * p.hband_ + M_PI / 2.0)};
  auto add_patch = [&](int band, int jb, int jg) {
    double beta = jb < 0 ? 0.0 : 2.0 * M_PI * jb / per_circle;
    double gam = jg < 0 ? 0.0 : 2.0 * M_PI * jg / per_circle;
    Dir w{std::cos(tc[band]) * std::exp(cplx(0.0, beta)),
          std::sin(tc[band]) * std::exp(cplx(0.0, gam))};
    double R = d->star_radius(w);
    PushPatch patch;
    patch.anchor = Pt{d->center()[0] + R * w[0], d->center()[1] + R * w[1]};
    auto G = d->dist_gradient(patch.anchor);
    patch.normal = {G[0], G[1]};
    patch.band = band;
    patch.jbeta = jb;
    patch.jgamma = jg;
    p.patches_.push_back(patch);
  };
  for (int j = 0; j < per_circle; ++j) add_patch(0, j, -1);
  for (int jb = 0; jb < per_circle; ++jb)
    for (int jg = 0; jg < per_circle; ++jg) add_patch(1, jb, jg);
  for (int jb = 0; jb < per_circle; ++jb)
    for (int jg = 0; jg < per_circle; ++jg) add_patch(2, jb, jg);
  for (int j = 0; j < per_circle; ++j) add_patch(3, -1, j);
  return p;
}

void PushPlan::eval(const Pt& z, std::vector<double>& psi) const {
  std::vector<std::array<cplx, kDim>> unused;
  eval_grad(z, psi, unused);
}

void PushPlan::eval_grad(const Pt& z, std::vector<double>& psi,
                         std::vector<std::array<cplx, kDim>>& dzbar) const {
  const int np = patch_count();
  psi.assign(np + 1, 0.0);
  dzbar.assign(np + 1, {cplx(0.0), cplx(0.0)});

  const Pt zc{z[0] - domain_->center()[0], z[1] - domain_->center()[1]};
  Angles an = angles_of(zc);
  double dsd = domain_->signed_distance(z);

  // radial cutoff chi rising from d0 (deep inside) to d1 (boundary side)
  double s = (dsd - d0_) / (d1_ - d0_);
  double chi = sstep(s);
  double chi_d = sstep_d(s) / (d1_ - d0_);
  std::array<cplx, kDim> grad_d{};
  if (chi_d != 0.0) {
    auto G = domain_->dist_gradient(z);
    grad_d = {G[0] / 2.0, G[1] / 2.0};  // d(dist)/dzbar_j
  }
  psi[0] = 1.0 - chi;
  dzbar[0] = {-chi_d * grad_d[0], -chi_d * grad_d[1]};
  if (chi == 0.0) return;  // deep interior: boundary patches vanish

  // latitude band weights via telescoping steps at the three edges
  double Sv[3], Sd[3];
  for (int k = 0; k < 3; ++k) {
    double arg = (an.t - edges_[k]) / hband_ + 0.5;
    Sv[k] = sstep(arg);
    Sd[k] = sstep_d(arg) / hband_;
  }
  double wband[4] = {1.0 - Sv[0], Sv[0] - Sv[1], Sv[1] - Sv[2], Sv[2]};
  double wband_d[4] = {-Sd[0], Sd[0] - Sd[1], Sd[1] - Sd[2], Sd[2]};

  // gradients of the star angle t = atan2(|z2|,|z1|)
  std::array<cplx, kDim> grad_t{};
  {
    double r2 = an.x * an.x + an.y * an.y;
    if (r2 > 1e-28) {
      if (an.x > 1e-14) grad_t[0] = (-an.y / r2) * (zc[0] / (2.0 * an.x));
      if (an.y > 1e-14) grad_t[1] = (an.x / r2) * (zc[1] / (2.0 * an.y));
    }
  }
  // gradients of the phases
  std::array<cplx, kDim> grad_beta{}, grad_gamma{};
  if (an.x > 1e-14) grad_beta[0] = cplx(0.0, 0.5) / std::conj(zc[0]);
  if (an.y > 1e-14) grad_gamma[1] = cplx(0.0, 0.5) / std::conj(zc[1]);

  const double cell = 2.0 * M_PI / nphase_;
  for (int l = 0; l < np; ++l) {
    const PushPatch& pt = patches_[l];
    double wb = wband[pt.band];
    if (wb == 0.0 && wband_d[pt.band] == 0.0) continue;
    double wbe = 1.0, wbe_d = 0.0;  // beta window
    if (pt.jbeta >= 0) {
      double sarg = wrap_cells(an.beta / cell - pt.jbeta, nphase_);
      wbe = bwin(sarg);
      wbe_d = bwin_d(sarg) / cell;
    }
    double wga = 1.0, wga_d = 0.0;  // gamma window
    if (pt.jgamma >= 0) {
      double sarg = wrap_cells(an.gamma / cell - pt.jgamma, nphase_);
      wga = bwin(sarg);
      wga_d = bwin_d(sarg) / cell;
    }
    double val = chi * wb * wbe * wga;
    psi[1 + l] = val;
    if (val == 0.0 && wbe * wga * wband_d[pt.band] == 0.0 &&
        wb * wga * wbe_d == 0.0 && wb * wbe * wga_d == 0.0 &&
        wb * wbe * wga * chi_d == 0.0)
      continue;
    for (int j = 0; j < kDim; ++j) {
      cplx g = chi_d * grad_d[j] * wb * wbe * wga +
               chi * wband_d[pt.band] * grad_t[j] * wbe * wga +
               chi * wb * wbe_d * grad_beta[j] * wga +
               chi * wb * wbe * wga_d * grad_gamma[j];
      dzbar[1 + l][j] = g;
    }
  }
}

double SampledForm::norm_sq() const {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    s += weights[i] * values[i].norm_sq();
  return s;
}
double SampledForm::norm() const { return std::sqrt(norm_sq()); }

namespace {

PointForm dbar_chain(const std::array<cplx, kDim>& dpsi_dzbar,
                     const PointForm& fval) {
  PointForm dpsi;
  dpsi.q = 1;
  for (int j = 0; j < kDim; ++j) dpsi.comp[1u << j] = dpsi_dzbar[j];
  return wedge_point(dpsi, fval);
}

}  // namespace

PushResult push_out(const DomainPtr& d, const PolyForm& f, double delta,
                    const PushPlan& plan, int level) {
  if (delta <= 0.0 || delta > plan.max_delta())
    throw std::invalid_argument("push_out: delta outside (0, " +
                                std::to_string(plan.max_delta()) + "]");
  DomainPtr outer = offset_domain(d, delta);
  QuadratureRule rule = interior_quadrature(outer, level);
  PolyForm df = f.q() < kDim ? dbar(f) : PolyForm(f.q() + 1);

  PushResult out;
  out.value.q = f.q();
  out.derivative.q = f.q() + 1;
  out.value.nodes = rule.nodes;
  out.value.weights = rule.weights;
  out.derivative.nodes = rule.nodes;
  out.derivative.weights = rule.weights;
  out.value.values.resize(rule.size());
  out.derivative.values.resize(rule.size());

  std::vector<double> psi;
  std::vector<std::array<cplx, kDim>> dpsi;
  int max_overlap = 0;
  double diff2 = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Pt& z = rule.nodes[i];
    plan.eval_grad(z, psi, dpsi);
    PointForm val;
    val.q = f.q();
    PointForm dval;
    dval.q = f.q() + 1;
    int overlap = 0;
    if (psi[0] != 0.0) {
      ++overlap;
      PointForm fv = f.eval(z);
      PointForm dfv = df.eval(z);
      for (int m = 0; m < 4; ++m) val.comp[m] += psi[0] * fv.comp[m];
      PointForm wedge = dbar_chain(dpsi[0], fv);
      for (int m = 0; m < 4; ++m)
        dval.comp[m] += wedge.comp[m] + psi[0] * dfv.comp[m];
    }
    for (int l = 0; l < plan.patch_count(); ++l) {
      double w = psi[1 + l];
      bool grad_active = dpsi[1 + l][0] != cplx(0.0) || dpsi[1 + l][1] != cplx(0.0);
      if (w < 1e-14 && !grad_active) continue;
      ++overlap;
      const PushPatch& patch = plan.patch(l);
      Pt zl{z[0] - 2.0 * delta * patch.normal[0],
            z[1] - 2.0 * delta * patch.normal[1]};
      if (d->rho_eval(zl) >= 0.0) {
        std::ostringstream os;
        os << "push_out: containment z - 2*delta*n^l not inside " << d->id()
           << " for patch " << l << " (band " << patch.band << ")";
        throw std::runtime_error(os.str());
      }
      PointForm fv = f.eval(zl);
      PointForm dfv = df.eval(zl);
      for (int m = 0; m < 4; ++m) val.comp[m] += w * fv.comp[m];
      PointForm wedge = dbar_chain(dpsi[1 + l], fv);
      for (int m = 0; m < 4; ++m)
        dval.comp[m] += wedge.comp[m] + w * dfv.comp[m];
    }
    out.value.values[i] = val;
    out.derivative.values[i] = dval;
    max_overlap = std::max(max_overlap, overlap);
    // reference: zero extension of f
    PointForm ref;
    ref.q = f.q();
    if (d->rho_eval(z) < 0.0) ref = f.eval(z);
    double dd = 0.0;
    for (int m = 0; m < 4; ++m) dd += std::norm(val.comp[m] - ref.comp[m]);
    diff2 += rule.weights[i] * dd;
  }
  out.norm_value = out.value.norm();
  out.norm_derivative = out.derivative.norm();
  out.diff_to_reference = std::sqrt(diff2);
  out.overlap_bound = double(max_overlap);
  return out;
}

PushResult push_in(const DomainPtr& d, const PolyForm& f, double delta,
                   const PushPlan& plan, int level) {
  if (delta <= 0.0 || delta > plan.max_delta())
    throw std::invalid_argument("push_in: delta outside (0, " +
                                std::to_string(plan.max_delta()) + "]");
  if (f.q() < 1) throw std::invalid_argument("push_in: q must be >= 1");
  QuadratureRule rule = interior_quadrature(d, level);
  PolyForm tf = theta(f);

  PushResult out;
  out.value.q = f.q();
  out.derivative.q = f.q() - 1;
  out.value.nodes = rule.nodes;
  out.value.weights = rule.weights;
  out.derivative.nodes = rule.nodes;
  out.derivative.weights = rule.weights;
  out.value.values.resize(rule.size());
  out.derivative.values.resize(rule.size());

  std::vector<double> psi;
  std::vector<std::array<cplx, kDim>> dpsi;
  int max_overlap = 0;
  double diff2 = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Pt& z = rule.nodes[i];
    double sd = d->signed_distance(z);
    plan.eval_grad(z, psi, dpsi);
    PointForm val;
    val.q = f.q();
    PointForm dval;
    dval.q = f.q() - 1;
    int overlap = 0;
    if (psi[0] != 0.0 || dpsi[0][0] != cplx(0.0) || dpsi[0][1] != cplx(0.0)) {
      ++overlap;
      if (d->rho_eval(z) < 0.0) {
        PointForm fv = f.eval(z);
        PointForm tfv = tf.eval(z);
        for (int m = 0; m < 4; ++m) val.comp[m] += psi[0] * fv.comp[m];
        std::array<cplx, kDim> dz;  // d psi / d z_j
        for (int j = 0; j < kDim; ++j) dz[j] = std::conj(dpsi[0][j]);
        PointForm ctr = contract_point(fv, dz);
        for (int m = 0; m < 4; ++m)
          dval.comp[m] += psi[0] * tfv.comp[m] - ctr.comp[m];
      }
    }
    for (int l = 0; l < plan.patch_count(); ++l) {
      double w = psi[1 + l];
      bool grad_active = dpsi[1 + l][0] != cplx(0.0) || dpsi[1 + l][1] != cplx(0.0);
      if (w < 1e-14 && !grad_active) continue;
      ++overlap;
      const PushPatch& patch = plan.patch(l);
      Pt zl{z[0] + 2.0 * delta * patch.normal[0],
            z[1] + 2.0 * delta * patch.normal[1]};
      bool zl_inside = d->rho_eval(zl) < 0.0;
      if (sd > -delta && zl_inside && w > 1e-14) {
        std::ostringstream os;
        os << "push_in: containment z + 2*delta*n^l not outside " << d->id()
           << " for patch " << l << " (band " << patch.band << ")";
        throw std::runtime_error(os.str());
      }
      if (!zl_inside) continue;  // zero extension
      PointForm fv = f.eval(zl);
      PointForm tfv = tf.eval(zl);
      for (int m = 0; m < 4; ++m) val.comp[m] += w * fv.comp[m];
      std::array<cplx, kDim> dz;
      for (int j = 0; j < kDim; ++j) dz[j] = std::conj(dpsi[1 + l][j]);
      PointForm ctr = contract_point(fv, dz);
      for (int m = 0; m < 4; ++m)
        dval.comp[m] += w * tfv.comp[m] - ctr.comp[m];
    }
    out.value.values[i] = val;
    out.derivative.values[i] = dval;
    max_overlap = std::max(max_overlap, overlap);
    PointForm ref = f.eval(z);  // on the base rule every node is in Omega
    double dd = 0.0;
    for (int m = 0; m < 4; ++m) dd += std::norm(val.comp[m] - ref.comp[m]);
    diff2 += rule.weights[i] * dd;
  }
  out.norm_value = out.value.norm();
  out.norm_derivative = out.derivative.norm();
  out.diff_to_reference = std::sqrt(diff2);
  out.overlap_bound = double(max_overlap);
  return out;
}

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_loglog: need >= 2 points");
  SlopeFit fit;
  fit.npoints = int(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0 || y[i] <= 0.0)
      throw std::invalid_argument("fit_loglog: non-positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  double n = double(x.size());
  double det = n * sxx - sx * sx;
  if (det <= 1e-14 * std::max(n * sxx, 1.0))
    throw std::invalid_argument("fit_loglog: abscissas are not distinct");
  fit.slope = (n * sxy - sx * sy) / det;
  fit.intercept = (sy * sxx - sx * sxy) / det;
  for (std::size_t i = 0; i < x.size(); ++i)
    fit.band = std::max(fit.band,
                        std::abs(ly[i] - fit.slope * lx[i] - fit.intercept));
  return fit;
}

bool StabilityReport::all_pass() const {
  for (const auto& [name, ok] : verdicts) {
    (void)name;
    if (!ok) return false;
  }
  return true;
}

StabilityReport dilate_sweep(const DomainPtr& d, int q, int k,
                             const std::vector<double>& radii, int N,
                             double sigma, int level_override) {
  for (double r : radii)
    if (r <= 0.5 || r >= 1.5)
      throw std::invalid_argument("dilate_sweep: radii must lie in (0.5, 1.5)");
  BasisDescriptor basis = build_basis(kDim, q, N);
  StabilityReport rep;
  rep.domain_id = d->id();
  rep.q = q;
  rep.k = k;
  rep.N = N;
  rep.sigma = sigma;

  GalerkinSystem base = assemble_auto(d, basis, sigma, level_override);
  Spectrum bs = variational_eigenvalues(base, k);
  rep.base_lambda = bs.eigenvalues;

  for (double r : radii) {
    SweepRow row;
    row.tag = "dilate";
    row.param = r;
    if (r == 1.0) {
      row.delta = 0.0;
      row.lambda = bs.eigenvalues;
    } else {
      DomainPtr dr = d->dilated(r);
      GalerkinSystem sys = assemble_auto(dr, basis, sigma / r, level_override);
      Spectrum s = variational_eigenvalues(sys, k);
      row.lambda = s.eigenvalues;
      row.delta = hausdorff_distance(*d, *dr, 4).value;
    }
    rep.rows.push_back(std::move(row));
  }
  std::stable_sort(rep.rows.begin(), rep.rows.end(),
                   [](const SweepRow& a, const SweepRow& b) {
                     return a.delta < b.delta;
                   });

  double dev = 0.0;
  for (const auto& row : rep.rows)
    for (int i = 0; i < k; ++i) {
      double scaled = row.param * row.param * row.lambda[i];
      double ref = std::max(std::abs(rep.base_lambda[i]), 1e-300);
      dev = std::max(dev, std::abs(scaled - rep.base_lambda[i]) / ref);
    }
  rep.metrics["max_r2_covariance_deviation"] = dev;
  rep.verdicts.emplace_back("scaling_covariance_1e-8", dev <= 1e-8);

  for (int i = 0; i < k; ++i) {
    std::vector<double> xs, ys;
    int distinct = 0;
    for (const auto& row : rep.rows) {
      double diff = std::abs(row.lambda[i] - rep.base_lambda[i]);
      if (row.delta > 0.0 && diff > 0.0) {
        if (xs.empty() || std::abs(row.delta - xs.back()) > 1e-12) ++distinct;
        xs.push_back(row.delta);
        ys.push_back(diff);
      }
    }
    if (distinct >= 2)
      rep.slopes.push_back(fit_loglog(xs, ys));
    else
      rep.slopes.push_back(SlopeFit{});
  }
  if (rep.slopes[0].npoints >= 2) {
    bool in_band = rep.slopes[0].slope >= 0.8 && rep.slopes[0].slope <= 1.2;
    rep.metrics["rate_slope_k1"] = rep.slopes[0].slope;
    rep.verdicts.emplace_back("rate_slope_k1_in_[0.8,1.2]", in_band);
  }
  return rep;
}

StabilityReport offset_sweep(const DomainPtr& d, int q, int k,
                             const std::vector<double>& deltas, OffsetSide side,
                             int N, double sigma, const Certificate* cert,
                             int level_override) {
  BasisDescriptor basis = build_basis(kDim, q, N);
  StabilityReport rep;
  rep.domain_id = d->id();
  rep.q = q;
  rep.k = k;
  rep.N = N;
  rep.sigma = sigma;

  GalerkinSystem base = assemble_auto(d, basis, sigma, level_override);
  Spectrum bs = variational_eigenvalues(base, k);
  rep.base_lambda = bs.eigenvalues;
  double diam0 = d->diameter();

  auto run_side = [&](double delta, bool inner) {
    if (delta == 0.0) {
      SweepRow row;
      row.tag = inner ? "inner" : "outer";
      row.param = 0.0;
      row.delta = 0.0;
      row.lambda = bs.eigenvalues;
      rep.rows.push_back(std::move(row));
      return;
    }
    double signed_delta = inner ? -delta : delta;
    DomainPtr dd = offset_domain(d, signed_delta);
    double sig = sigma * diam0 / dd->diameter();
    GalerkinSystem sys = assemble_auto(dd, basis, sig, level_override);
    Spectrum s = variational_eigenvalues(sys, k);
    SweepRow row;
    row.tag = inner ? "inner" : "outer";
    row.param = signed_delta;
    row.delta = hausdorff_distance(*d, *dd, 4).value;
    row.lambda = s.eigenvalues;
    rep.rows.push_back(std::move(row));
  };

  for (double delta : deltas) {
    if (delta < 0.0)
      throw std::invalid_argument("offset_sweep: deltas must be >= 0");
    if (side != OffsetSide::Outer) run_side(delta, true);
    if (side != OffsetSide::Inner) run_side(delta, false);
  }
  std::stable_sort(rep.rows.begin(), rep.rows.end(),
                   [](const SweepRow& a, const SweepRow& b) {
                     return a.delta < b.delta;
                   });

  // upper-semicontinuity ladder: E(d0) = max_{delta<=d0} (lambda_k - base)+
  std::vector<double> ladder;
  for (const auto& row : rep.rows)
    if (row.delta > 0.0) ladder.push_back(row.delta);
  ladder.erase(std::unique(ladder.begin(), ladder.end()), ladder.end());
  bool cert_ok = cert && cert->checked;
  auto excess_at = [&](int i, double d0, bool two_sided) {
    double e = 0.0;
    for (const auto& row : rep.rows)
      if (row.delta > 0.0 && row.delta <= d0) {
        double diff = row.lambda[i] - rep.base_lambda[i];
        e = std::max(e, two_sided ? std::abs(diff) : diff);
      }
    return std::max(e, 0.0);
  };
  for (int i = 0; i < k; ++i) {
    double scale = std::max(std::abs(rep.base_lambda[i]), 1e-300);
    for (double d0 : ladder) {
      std::ostringstream key;
      key << "excess_k" << (i + 1) << "_delta" << d0;
      rep.metrics[key.str()] = excess_at(i, d0, false);
    }
    double excess_min = ladder.empty() ? 0.0 : excess_at(i, ladder.front(), false);
    double two_sided_min = ladder.empty() ? 0.0 : excess_at(i, ladder.front(), true);
    std::ostringstream name;
    name << "upper_semicontinuity_k" << (i + 1) << "_5pct";
    rep.verdicts.emplace_back(name.str(), excess_min <= 0.05 * scale);
    if (cert_ok) {
      std::ostringstream n2;
      n2 << "two_sided_k" << (i + 1) << "_5pct";
      rep.verdicts.emplace_back(n2.str(), two_sided_min <= 0.05 * scale);
    }
  }
  if (!cert_ok && cert)
    rep.verdicts.emplace_back("certificate_checked", false);

  for (int i = 0; i < k; ++i) {
    std::vector<double> xs, ys;
    int distinct = 0;
    for (const auto& row : rep.rows) {
      double diff = std::abs(row.lambda[i] - rep.base_lambda[i]);
      if (row.delta > 0.0 && diff > 0.0 && row.param < 0.0) {
        if (xs.empty() || std::abs(row.delta - xs.back()) > 1e-12) ++distinct;
        xs.push_back(row.delta);
        ys.push_back(diff);
      }
    }
    rep.slopes.push_back(distinct >= 2 ? fit_loglog(xs, ys) : SlopeFit{});
  }
  return rep;
}

double boundary_mass(const GalerkinSystem& sys, const Spectrum& spec, int idx,
                     MassKind which, double delta) {
  if (idx < 0 || idx >= spec.vectors.cols)
    throw std::invalid_argument("boundary_mass: eigenform index out of range");
  if (delta <= 0.0) throw std::invalid_argument("boundary_mass: delta > 0");
  std::vector<cplx> c(spec.vectors.rows);
  for (int i = 0; i < spec.vectors.rows; ++i) c[i] = spec.vectors.at(i, idx);
  PolyForm f = reconstruct_form(sys.basis, c);
  PolyForm g;
  bool normal_trace = false;
  switch (which) {
    case MassKind::Value: g = f; break;
    case MassKind::Dbar: g = f.q() < kDim ? dbar(f) : PolyForm(f.q() + 1); break;
    case MassKind::Theta: g = theta(f); break;
    case MassKind::NormalTrace:
      g = f;
      normal_trace = true;
      break;
  }
  // collar-split rule: the radial panel edge sits on {dist = delta}, so the
  // collar mass is resolved for any delta
  QuadratureRule rule =
      delta < sys.domain->reach_estimate()
          ? interior_quadrature_collar_split(sys.domain, sys.level_int, delta)
          : interior_quadrature(sys.domain, sys.level_int);
  double mass = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    if (sys.domain->signed_distance(rule.nodes[i]) > -delta) {
      PointForm v = g.eval(rule.nodes[i]);
      if (normal_trace) {
        auto G = sys.domain->dist_gradient(rule.nodes[i]);
        std::array<cplx, kDim> cdist;
        for (int j = 0; j < kDim; ++j) cdist[j] = -std::conj(G[j]) / 2.0;
        v = contract_point(v, cdist);
      }
      mass += rule.weights[i] * v.norm_sq();
      ++hits;
    }
  }
  if (hits == 0)
    throw std::runtime_error(
        "boundary_mass: no quadrature nodes in the collar; increase the "
        "quadrature level");
  return mass;
}

ResolventReport resolvent_convergence(const DomainPtr& d,
                                      const std::vector<double>& radii,
                                      const PolyForm& f, int q, int N,
                                      double sigma, int level_override) {
  for (double r : radii)
    if (r <= 0.0 || r > 1.0)
      throw std::invalid_argument(
          "resolvent_convergence: radii must be in (0, 1] (inner exhaustion)");
  BasisDescriptor basis = build_basis(kDim, q, N);
  GalerkinSystem base = assemble_auto(d, basis, sigma, level_override);
  InverseResult binv = apply_inverse(base, f);
  PolyForm u = reconstruct_form(basis, binv.coeffs);
  // panel edges at the comparison radii: membership cuts along the dilation
  // family fall on panel boundaries, never across a node gap
  std::vector<double> cuts;
  for (double r : radii)
    if (r < 1.0) cuts.push_back(r);
  QuadratureRule rule =
      interior_quadrature_radial_panels(d, base.level_int + 1, cuts);

  ResolventReport rep;
  rep.radii = radii;
  for (double r : radii) {
    if (r == 1.0) {
      rep.distances.push_back(0.0);
      continue;
    }
    DomainPtr dr = d->dilated(r);
    GalerkinSystem sys = assemble_auto(dr, basis, sigma / r, level_override);
    InverseResult rin = apply_inverse(sys, f);
    PolyForm ur = reconstruct_form(basis, rin.coeffs);
    double dist2 = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const Pt& z = rule.nodes[i];
      PointForm uv = u.eval(z);
      if (dr->rho_eval(z) < 0.0) {
        PointForm rv = ur.eval(z);
        double s = 0.0;
        for (int m = 0; m < 4; ++m) s += std::norm(rv.comp[m] - uv.comp[m]);
        dist2 += rule.weights[i] * s;
      } else {
        dist2 += rule.weights[i] * uv.norm_sq();
      }
    }
    rep.distances.push_back(std::sqrt(dist2));
  }
  rep.strictly_decreasing = true;
  for (std::size_t i = 0; i + 1 < rep.radii.size(); ++i) {
    if (rep.radii[i] < rep.radii[i + 1] &&
        rep.distances[i + 1] >= rep.distances[i])
      rep.strictly_decreasing = false;
  }
  return rep;
}

}  // namespace dbarlab

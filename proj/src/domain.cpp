#include "dbarlab/domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dbarlab/parallel.hpp"

namespace dbarlab {

namespace {

constexpr int kCurveSamples = 4097;  // dense modulus-curve sample (64 x 64 + 1)

double abs2(const Pt& z) { return std::norm(z[0]) + std::norm(z[1]); }

Pt sub(const Pt& a, const Pt& b) { return Pt{a[0] - b[0], a[1] - b[1]}; }

// ball defining polynomial (|z-c|^2 - r^2) / (2r)
Poly ball_rho(const Pt& c, double r) {
  Poly p;
  for (int j = 0; j < kDim; ++j) {
    Poly zj = Poly::monomial(j == 0 ? 1 : 0, j == 0 ? 0 : 1, 0, 0);
    Poly zbj = Poly::monomial(0, 0, j == 0 ? 1 : 0, j == 0 ? 0 : 1);
    p += (zj - Poly(c[j])) * (zbj - Poly(std::conj(c[j])));
  }
  p -= Poly(r * r);
  p *= 1.0 / (2.0 * r);
  return p;
}

Poly ellipsoid_rho(int m, double scale) {
  // |z1/s|^2 + |z2/s|^(2m) - 1
  Poly p = Poly::monomial(1, 0, 1, 0, 1.0 / (scale * scale));
  Poly t = Poly::monomial(0, 1, 0, 1, 1.0 / (scale * scale));
  Poly tm(1.0);
  for (int i = 0; i < m; ++i) tm = tm * t;
  p += tm;
  p -= Poly(1.0);
  return p;
}

}  // namespace

const char* kind_name(DomainKind k) {
  switch (k) {
    case DomainKind::Ball: return "ball";
    case DomainKind::ComplexEllipsoid: return "complex_ellipsoid";
    case DomainKind::Polydisc: return "polydisc";
    case DomainKind::Custom: return "custom";
  }
  return "?";
}

const Poly& Domain::rho() const {
  if (!has_rho_)
    throw std::runtime_error("domain '" + id() +
                             "' has no polynomial defining function");
  return rho_;
}

const std::array<Poly, kDim>& Domain::drho() const {
  if (!has_rho_)
    throw std::runtime_error("domain '" + id() +
                             "' has no polynomial defining function");
  return drho_;
}

double Domain::rho_eval(const Pt& z) const {
  switch (kind_) {
    case DomainKind::Ball:
      return (abs2(sub(z, center_)) - radius_ * radius_) / (2.0 * radius_);
    case DomainKind::ComplexEllipsoid:
      return rho_.eval(z).real();
    case DomainKind::Polydisc:
      return std::max(std::norm(z[0]) - r1_ * r1_, std::norm(z[1]) - r2_ * r2_);
    case DomainKind::Custom:
      if (base_) return signed_distance(z);
      return rho_.eval(z).real();
  }
  return 0.0;
}

double Domain::star_radius(const Dir& w) const {
  switch (kind_) {
    case DomainKind::Ball:
      return radius_;
    case DomainKind::Polydisc: {
      double w1 = std::abs(w[0]), w2 = std::abs(w[1]);
      double t = 1e300;
      if (w1 > 1e-15) t = std::min(t, r1_ / w1);
      if (w2 > 1e-15) t = std::min(t, r2_ / w2);
      return t;
    }
    case DomainKind::ComplexEllipsoid: {
      // t^2 u + t^(2m) v^m = 1, u = |w1|^2, v = |w2|^2: monotone, Newton
      double u = std::norm(w[0]), v = std::norm(w[1]);
      double vm = std::pow(v, m_);
      double t = 1.0;
      for (int it = 0; it < 60; ++it) {
        double t2 = t * t;
        double f = t2 * u + std::pow(t2, m_) * vm - 1.0;
        double df = 2.0 * t * u + 2.0 * m_ * std::pow(t, 2 * m_ - 1) * vm;
        double step = f / df;
        t -= step;
        if (std::abs(step) < 1e-15 * t) break;
      }
      return t;
    }
    case DomainKind::Custom: {
      // root of the membership function along the ray, by bisection + Newton
      auto g = [&](double t) {
        Pt z{center_[0] + t * w[0], center_[1] + t * w[1]};
        return base_ ? base_->signed_distance(z) - offset_ : rho_.eval(z).real();
      };
      double lo = 0.0, hi = bounding_radius_ * 1.5;
      if (g(hi) < 0.0) return hi;  // clamped; validate() rejects this case
      for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
        if (hi - lo < 1e-14 * bounding_radius_) break;
      }
      return 0.5 * (lo + hi);
    }
  }
  return 0.0;
}

void Domain::build_modulus_cache() {
  if (!reinhardt_) return;
  curve_.resize(kCurveSamples);
  min_star_ = 1e300;
  max_star_ = 0.0;
  for (int i = 0; i < kCurveSamples; ++i) {
    double t = (M_PI / 2.0) * double(i) / double(kCurveSamples - 1);
    Dir w{std::cos(t), std::sin(t)};
    double R = star_radius(w);
    curve_[i] = {R * std::cos(t), R * std::sin(t)};
    min_star_ = std::min(min_star_, R);
    max_star_ = std::max(max_star_, R);
  }
}

std::pair<std::array<double, 2>, double> Domain::modulus_foot(double x,
                                                              double y) const {
  // nearest point on the cached modulus boundary curve, golden-section polish
  int best = 0;
  double bd = 1e300;
  for (int i = 0; i < int(curve_.size()); ++i) {
    double dx = x - curve_[i][0], dy = y - curve_[i][1];
    double d2 = dx * dx + dy * dy;
    if (d2 < bd) {
      bd = d2;
      best = i;
    }
  }
  auto point_at = [&](double t) -> std::array<double, 2> {
    Dir w{std::cos(t), std::sin(t)};
    double R = star_radius(w);
    return {R * std::cos(t), R * std::sin(t)};
  };
  auto dist2_at = [&](double t) {
    auto p = point_at(t);
    double dx = x - p[0], dy = y - p[1];
    return dx * dx + dy * dy;
  };
  double step = (M_PI / 2.0) / double(curve_.size() - 1);
  double lo = std::max(0.0, (best - 1) * step);
  double hi = std::min(M_PI / 2.0, (best + 1) * step);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = dist2_at(c), fd = dist2_at(d);
  for (int it = 0; it < 60; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = dist2_at(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = dist2_at(d);
    }
  }
  double t = 0.5 * (lo + hi);
  auto foot = point_at(t);
  double dx = x - foot[0], dy = y - foot[1];
  double dist = std::sqrt(dx * dx + dy * dy);
  return {foot, dist};
}

double Domain::signed_distance(const Pt& z) const {
  switch (kind_) {
    case DomainKind::Ball:
      return std::sqrt(abs2(sub(z, center_))) - radius_;
    case DomainKind::Polydisc: {
      double a = std::abs(z[0]) - r1_, b = std::abs(z[1]) - r2_;
      if (a <= 0.0 && b <= 0.0) return std::max(a, b);
      double ap = std::max(a, 0.0), bp = std::max(b, 0.0);
      return std::sqrt(ap * ap + bp * bp);
    }
    case DomainKind::Custom:
      if (base_) return base_->signed_distance(z) - offset_;
      [[fallthrough]];
    case DomainKind::ComplexEllipsoid: {
      double x = std::abs(z[0]), y = std::abs(z[1]);
      auto [foot, dist] = modulus_foot(x, y);
      (void)foot;
      double sign = rho_eval_raw_inside(z) ? -1.0 : 1.0;
      return sign * dist;
    }
  }
  return 0.0;
}

// membership that avoids recursion through signed_distance for custom kinds
bool Domain::rho_eval_raw_inside(const Pt& z) const {
  if (kind_ == DomainKind::Custom && base_) {
    return base_->signed_distance(z) < offset_;
  }
  if (kind_ == DomainKind::Custom) return rho_.eval(z).real() < 0.0;
  return rho_eval(z) < 0.0;
}

std::array<cplx, kDim> Domain::dist_gradient(const Pt& z) const {
  switch (kind_) {
    case DomainKind::Ball: {
      Pt v = sub(z, center_);
      double n = std::sqrt(abs2(v));
      if (n < 1e-14) return {cplx(1.0), cplx(0.0)};
      return {v[0] / n, v[1] / n};
    }
    case DomainKind::Polydisc: {
      double a = std::abs(z[0]) - r1_, b = std::abs(z[1]) - r2_;
      auto phase = [&](int j) {
        double m = std::abs(z[j]);
        return m < 1e-14 ? cplx(1.0) : z[j] / m;
      };
      if (a <= 0.0 && b <= 0.0) {
        if (a >= b) return {phase(0), cplx(0.0)};
        return {cplx(0.0), phase(1)};
      }
      double ap = std::max(a, 0.0), bp = std::max(b, 0.0);
      double n = std::sqrt(ap * ap + bp * bp);
      return {ap / n * phase(0), bp / n * phase(1)};
    }
    case DomainKind::Custom:
      if (base_) return base_->dist_gradient(z);
      [[fallthrough]];
    case DomainKind::ComplexEllipsoid: {
      double x = std::abs(z[0]), y = std::abs(z[1]);
      auto [foot, dist] = modulus_foot(x, y);
      double sd = rho_eval_raw_inside(z) ? -dist : dist;
      if (std::abs(sd) < 1e-12) {
        // on the boundary: fall back to the defining-function normal
        auto nd = normal_data(z);
        return {2.0 * std::conj(nd.nu[0]), 2.0 * std::conj(nd.nu[1])};
      }
      double gx = (x - foot[0]) / sd, gy = (y - foot[1]) / sd;
      auto phase = [&](int j) {
        double m = std::abs(z[j]);
        return m < 1e-14 ? cplx(1.0) : z[j] / m;
      };
      return {gx * phase(0), gy * phase(1)};
    }
  }
  return {cplx(1.0), cplx(0.0)};
}

NormalData Domain::normal_data(const Pt& z) const {
  NormalData nd;
  if (has_rho_) {
    std::array<cplx, kDim> g;
    double s2 = 0.0;
    for (int j = 0; j < kDim; ++j) {
      g[j] = drho_[j].eval(z);
      s2 += std::norm(g[j]);
    }
    nd.grad_norm = 2.0 * std::sqrt(s2);
    if (nd.grad_norm < 1e-12)
      throw std::runtime_error("vanishing |grad rho| at a boundary node of " +
                               id());
    for (int j = 0; j < kDim; ++j) nd.nu[j] = g[j] / nd.grad_norm;
    return nd;
  }
  // composite/offset kinds: the signed distance has unit gradient
  auto G = dist_gradient(z);
  nd.grad_norm = 1.0;
  for (int j = 0; j < kDim; ++j) nd.nu[j] = std::conj(G[j]) / 2.0;
  return nd;
}

double Domain::reach_estimate() const {
  switch (kind_) {
    case DomainKind::Ball: return radius_;
    case DomainKind::ComplexEllipsoid: return 0.35 * min_star_;
    case DomainKind::Polydisc: return 0.9 * std::min(r1_, r2_);
    case DomainKind::Custom:
      if (base_) return base_->reach_estimate() - std::abs(offset_);
      return 0.3 * min_star_;
  }
  return 0.0;
}

double Domain::diameter() const { return 2.0 * max_star_; }
double Domain::inscribed_radius() const { return min_star_; }

std::string Domain::id() const { return label_; }

std::string Domain::descriptor() const {
  std::ostringstream os;
  os << "kind = " << kind_name(kind_) << "\n";
  os << "center = " << center_[0].real() << " " << center_[0].imag() << " "
     << center_[1].real() << " " << center_[1].imag() << "\n";
  switch (kind_) {
    case DomainKind::Ball: os << "radius = " << radius_ << "\n"; break;
    case DomainKind::ComplexEllipsoid: os << "m = " << m_ << "\n"; break;
    case DomainKind::Polydisc:
      os << "r1 = " << r1_ << "\nr2 = " << r2_ << "\n";
      break;
    case DomainKind::Custom:
      if (base_) {
        os << "offset = " << offset_ << "\nbase = " << base_->id() << "\n";
      } else {
        os << "rho = " << rho_.str() << "\n";
      }
      break;
  }
  os << "bounding_radius = " << bounding_radius_ << "\n";
  return os.str();
}

void Domain::validate() const {
  Pt c = center_;
  if (rho_eval(c) >= 0.0)
    throw std::invalid_argument("domain center is not interior (rho(center) >= 0)");
  if (has_rho_ && !rho_.is_real(1e-10))
    throw std::invalid_argument("defining function is not real-valued");
  // star-shapedness: every ray crosses {rho=0} exactly once within 1.5x bound
  const int nt = 9, nb = 8, ng = 8;
  for (int it = 0; it < nt; ++it)
    for (int ib = 0; ib < nb; ++ib)
      for (int ig = 0; ig < ng; ++ig) {
        double t = (M_PI / 2.0) * (it + 0.5) / nt;
        double beta = 2.0 * M_PI * ib / nb, gam = 2.0 * M_PI * ig / ng;
        Dir w{std::cos(t) * std::exp(cplx(0, beta)),
              std::sin(t) * std::exp(cplx(0, gam))};
        int crossings = 0;
        double prev = rho_eval(c);
        const int steps = 200;
        for (int s = 1; s <= steps; ++s) {
          double tt = 1.5 * bounding_radius_ * s / steps;
          Pt z{c[0] + tt * w[0], c[1] + tt * w[1]};
          double cur = rho_eval(z);
          if (prev < 0.0 && cur >= 0.0) ++crossings;
          if (prev >= 0.0 && cur < 0.0) ++crossings;
          prev = cur;
        }
        if (crossings != 1)
          throw std::invalid_argument(
              "domain is not star-shaped about its center (ray crosses the "
              "boundary " +
              std::to_string(crossings) + " times)");
      }
  // smooth kinds: |grad rho| bounded away from zero on a boundary mesh
  if (smooth_boundary_ && has_rho_) {
    for (int it = 0; it < nt; ++it)
      for (int ib = 0; ib < nb; ++ib) {
        double t = (M_PI / 2.0) * (it + 0.5) / nt;
        double beta = 2.0 * M_PI * ib / nb;
        Dir w{std::cos(t) * std::exp(cplx(0, beta)), std::sin(t)};
        double R = star_radius(w);
        Pt z{c[0] + R * w[0], c[1] + R * w[1]};
        normal_data(z);  // throws on vanishing gradient
      }
  }
}

DomainPtr make_domain(const DomainSpec& spec) {
  auto d = std::shared_ptr<Domain>(new Domain());
  d->center_ = spec.center;
  if (spec.kind == "ball") {
    if (spec.radius <= 0.0)
      throw std::invalid_argument("ball radius must be positive");
    d->kind_ = DomainKind::Ball;
    d->radius_ = spec.radius;
    d->bounding_radius_ = spec.radius;
    d->rho_ = ball_rho(spec.center, spec.radius);
    d->has_rho_ = true;
    d->smooth_boundary_ = true;
    d->reinhardt_ = (std::abs(spec.center[0]) + std::abs(spec.center[1]) == 0.0);
    std::ostringstream os;
    os << "ball(r=" << spec.radius << ")";
    d->label_ = os.str();
  } else if (spec.kind == "complex_ellipsoid" || spec.kind == "ellipsoid") {
    if (spec.m < 1) throw std::invalid_argument("ellipsoid exponent m must be >= 1");
    if (std::abs(spec.center[0]) + std::abs(spec.center[1]) != 0.0)
      throw std::invalid_argument("complex ellipsoid must be centered at 0");
    d->kind_ = DomainKind::ComplexEllipsoid;
    d->m_ = spec.m;
    d->rho_ = ellipsoid_rho(spec.m, 1.0);
    d->has_rho_ = true;
    d->smooth_boundary_ = true;
    d->bounding_radius_ = 1.3;  // refined below from the curve cache
    std::ostringstream os;
    os << "ellipsoid(m=" << spec.m << ")";
    d->label_ = os.str();
  } else if (spec.kind == "polydisc") {
    if (spec.r1 <= 0.0 || spec.r2 <= 0.0)
      throw std::invalid_argument("polydisc radii must be positive");
    if (std::abs(spec.center[0]) + std::abs(spec.center[1]) != 0.0)
      throw std::invalid_argument("polydisc must be centered at 0");
    d->kind_ = DomainKind::Polydisc;
    d->r1_ = spec.r1;
    d->r2_ = spec.r2;
    d->bounding_radius_ = std::hypot(spec.r1, spec.r2);
    d->smooth_boundary_ = false;
    std::ostringstream os;
    os << "polydisc(" << spec.r1 << "," << spec.r2 << ")";
    d->label_ = os.str();
  } else if (spec.kind == "custom") {
    if (!spec.rho) throw std::invalid_argument("custom domain needs rho");
    if (spec.bounding_radius <= 0.0)
      throw std::invalid_argument("custom domain needs a bounding radius");
    if (!spec.rho->is_real(1e-10))
      throw std::invalid_argument("custom rho is not real-valued");
    d->kind_ = DomainKind::Custom;
    d->rho_ = *spec.rho;
    d->has_rho_ = true;
    d->bounding_radius_ = spec.bounding_radius;
    // Reinhardt iff all terms have a_j = b_j
    d->reinhardt_ = true;
    for (const auto& [k, cc] : spec.rho->terms()) {
      (void)cc;
      Mono mm = Mono::from_key(k);
      if (mm.a1 != mm.b1 || mm.a2 != mm.b2) d->reinhardt_ = false;
    }
    d->smooth_boundary_ = true;  // checked in validate()
    d->label_ = "custom";
  } else {
    throw std::invalid_argument("unknown domain kind '" + spec.kind + "'");
  }
  if (d->has_rho_)
    for (int j = 0; j < kDim; ++j) d->drho_[j] = d->rho_.dz(j);
  d->build_modulus_cache();
  if (d->kind_ == DomainKind::ComplexEllipsoid)
    d->bounding_radius_ = d->max_star_ * 1.0000001;
  if (!d->reinhardt_)
    throw std::invalid_argument(
        "non-Reinhardt custom domains are not supported (signed distance "
        "needs torus symmetry)");
  d->validate();
  return d;
}

DomainPtr make_ball(double r, const Pt& c) {
  DomainSpec s;
  s.kind = "ball";
  s.radius = r;
  s.center = c;
  return make_domain(s);
}

DomainPtr make_ellipsoid(int m) {
  DomainSpec s;
  s.kind = "complex_ellipsoid";
  s.m = m;
  return make_domain(s);
}

DomainPtr make_polydisc(double r1, double r2) {
  DomainSpec s;
  s.kind = "polydisc";
  s.r1 = r1;
  s.r2 = r2;
  return make_domain(s);
}

DomainPtr offset_domain(const DomainPtr& d, double delta) {
  if (delta == 0.0) return d;
  if (std::abs(delta) >= d->reach_estimate())
    throw std::invalid_argument(
        "offset " + std::to_string(delta) + " exceeds the reach estimate " +
        std::to_string(d->reach_estimate()) + " of " + d->id());
  if (d->kind() == DomainKind::Ball)
    return make_ball(d->radius() + delta, d->center());
  if (d->kind() == DomainKind::Polydisc && delta < 0.0)
    return make_polydisc(d->polydisc_r1() + delta, d->polydisc_r2() + delta);

  auto out = std::shared_ptr<Domain>(new Domain());
  // collapse offset-of-offset chains
  const Domain* primitive = d.get();
  double total = delta;
  if (d->kind() == DomainKind::Custom && d->base_) {
    total += d->offset_;
    out->base_ = d->base_;
    primitive = d->base_.get();
  } else {
    out->base_ = d;
  }
  out->kind_ = DomainKind::Custom;
  out->offset_ = total;
  out->center_ = primitive->center();
  out->bounding_radius_ = primitive->bounding_radius() + std::max(total, 0.0);
  out->smooth_boundary_ = primitive->smooth_boundary();
  out->reinhardt_ = primitive->is_reinhardt();
  out->has_rho_ = false;
  std::ostringstream os;
  os << primitive->id() << (total >= 0 ? "+" : "") << total;
  out->label_ = os.str();
  out->build_modulus_cache();
  if (out->min_star_ <= 1e-9)
    throw std::invalid_argument("offset collapses the domain: " + out->label_);
  return out;
}

std::shared_ptr<const Domain> Domain::dilated(double s) const {
  if (s <= 0.0) throw std::invalid_argument("dilation factor must be positive");
  switch (kind_) {
    case DomainKind::Ball:
      return make_ball(s * radius_, center_);
    case DomainKind::Polydisc:
      return make_polydisc(s * r1_, s * r2_);
    case DomainKind::ComplexEllipsoid: {
      DomainSpec sp;
      sp.kind = "custom";
      sp.rho = ellipsoid_rho(m_, s);
      sp.bounding_radius = s * bounding_radius_;
      auto d = make_domain(sp);
      auto* mut = const_cast<Domain*>(d.get());
      std::ostringstream os;
      os << id() << "*" << s;
      mut->label_ = os.str();
      return d;
    }
    case DomainKind::Custom: {
      if (base_) throw std::invalid_argument("cannot dilate an offset domain");
      DomainSpec sp;
      sp.kind = "custom";
      sp.rho = rho_.scaled_arg(1.0 / s);
      sp.bounding_radius = s * bounding_radius_;
      return make_domain(sp);
    }
  }
  throw std::logic_error("unreachable");
}

HausdorffEstimate hausdorffhalf(const Domain& from, const Domain& to, int level) {
  // max |signed distance to `to`| over boundary samples of `from`
  int nsamp = std::max(64, int(std::ceil(
                               (M_PI / 2.0) * from.bounding_radius() /
                               (from.bounding_radius() / (32.0 * level)))));
  std::vector<double> vals(nsamp, 0.0);
  std::vector<double> arc(nsamp, 0.0);
  std::vector<std::array<double, 2>> pts(nsamp);
  for (int i = 0; i < nsamp; ++i) {
    double t = (M_PI / 2.0) * double(i) / double(nsamp - 1);
    Dir w{std::cos(t), std::sin(t)};
    double R = from.star_radius(w);
    pts[i] = {R * std::cos(t), R * std::sin(t)};
  }
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (int i = 0; i < nsamp; ++i) {
    Pt z{pts[i][0], pts[i][1]};
    vals[i] = std::abs(to.signed_distance(z));
    if (i > 0)
      arc[i] = std::hypot(pts[i][0] - pts[i - 1][0], pts[i][1] - pts[i - 1][1]);
  }
  HausdorffEstimate e;
  for (int i = 0; i < nsamp; ++i) {
    e.value = std::max(e.value, vals[i]);
    e.grid_spacing = std::max(e.grid_spacing, arc[i]);
  }
  return e;
}

HausdorffEstimate hausdorff_distance(const Domain& d1, const Domain& d2,
                                     int level) {
  if (!d1.is_reinhardt() || !d2.is_reinhardt())
    throw std::invalid_argument("hausdorff_distance needs Reinhardt domains");
  HausdorffEstimate a = hausdorffhalf(d1, d2, level);
  HausdorffEstimate b = hausdorffhalf(d2, d1, level);
  return {std::max(a.value, b.value), std::max(a.grid_spacing, b.grid_spacing)};
}

}  // namespace dbarlab

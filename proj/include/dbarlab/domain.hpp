#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dbarlab/poly.hpp"

namespace dbarlab {

enum class DomainKind { Ball, ComplexEllipsoid, Polydisc, Custom };

const char* kind_name(DomainKind k);

// Descriptor for make_domain (mirrors the flat key-value external format).
struct DomainSpec {
  std::string kind = "ball";
  Pt center{};
  double radius = 1.0;          // ball
  int m = 2;                    // complex ellipsoid exponent
  double r1 = 1.0, r2 = 1.0;    // polydisc radii
  std::optional<Poly> rho;      // custom kind
  double bounding_radius = 0.0; // custom kind; derived for built-ins
};

// Real 4-direction represented as a complex pair of unit Euclidean length.
using Dir = Pt;

struct NormalData {
  double grad_norm = 0.0;            // |grad rho| (real gradient)
  std::array<cplx, kDim> nu{};       // unit normal, Wirtinger components
                                     // nu_k = (drho/dz_k)/|grad rho|, sum|nu_k|^2 = 1/4
};

// Bounded star-shaped domain in C^2. Immutable after construction and safe
// to share across threads.
class Domain {
 public:
  DomainKind kind() const { return kind_; }
  const Pt& center() const { return center_; }
  double bounding_radius() const { return bounding_radius_; }
  bool smooth_boundary() const { return smooth_boundary_; }
  double radius() const { return radius_; }
  int ellipsoid_m() const { return m_; }
  double polydisc_r1() const { return r1_; }
  double polydisc_r2() const { return r2_; }
  double offset() const { return offset_; }

  // Polynomial defining function (throws for kinds without one).
  const Poly& rho() const;
  const std::array<Poly, kDim>& drho() const;
  bool has_poly_rho() const { return has_rho_; }

  double rho_eval(const Pt& z) const;  // sign-correct membership function
  bool inside(const Pt& z) const { return rho_eval(z) < 0.0; }

  // Distance from center to the boundary along unit direction w.
  double star_radius(const Dir& w) const;

  // Signed Euclidean distance to the boundary (negative inside), from the
  // kind-exact closed form or a dense modulus-curve sample with Newton polish.
  double signed_distance(const Pt& z) const;

  // Unit outward gradient of the signed distance, as the complex pair
  // G_k = dd/dx_k + i dd/dy_k  (so dd/dz_k = conj(G_k)/2).
  std::array<cplx, kDim> dist_gradient(const Pt& z) const;

  // |grad rho| and unit normal Wirtinger components at a boundary point.
  NormalData normal_data(const Pt& z) const;

  double reach_estimate() const;
  double diameter() const;
  double inscribed_radius() const;

  bool is_reinhardt() const { return reinhardt_; }

  std::string id() const;
  std::string descriptor() const;  // flat key-value text

  // Dilation about the star center by factor s (exact per kind).
  std::shared_ptr<const Domain> dilated(double s) const;

  friend std::shared_ptr<const Domain> make_domain(const DomainSpec& spec);
  friend std::shared_ptr<const Domain> offset_domain(
      const std::shared_ptr<const Domain>& d, double delta);

 private:
  Domain() = default;
  void build_modulus_cache();
  void validate() const;
  bool rho_eval_raw_inside(const Pt& z) const;
  // nearest boundary point in the modulus plane; returns (foot, signed dist)
  std::pair<std::array<double, 2>, double> modulus_foot(double x, double y) const;

  DomainKind kind_ = DomainKind::Ball;
  Pt center_{};
  double bounding_radius_ = 1.0;
  bool smooth_boundary_ = true;
  bool reinhardt_ = true;
  bool has_rho_ = false;
  Poly rho_;
  std::array<Poly, kDim> drho_{};
  double radius_ = 1.0;
  int m_ = 2;
  double r1_ = 1.0, r2_ = 1.0;
  double offset_ = 0.0;                  // composite offset from base_
  std::shared_ptr<const Domain> base_;   // set for offset composites
  std::vector<std::array<double, 2>> curve_;  // modulus boundary samples
  double min_star_ = 1.0, max_star_ = 1.0;
  std::string label_;
};

using DomainPtr = std::shared_ptr<const Domain>;

// Build a domain from a descriptor. Built-ins:
//   ball               rho = (|z-c|^2 - r^2) / (2r)   (|grad rho| = 1 on bd)
//   complex_ellipsoid  rho = |z1|^2 + |z2|^(2m) - 1
//   polydisc           product of discs, non-smooth boundary
// Throws std::invalid_argument for malformed descriptors (non-real rho,
// rho(center) >= 0, radius <= 0, ...).
DomainPtr make_domain(const DomainSpec& spec);
DomainPtr make_ball(double r = 1.0, const Pt& c = Pt{});
DomainPtr make_ellipsoid(int m);
DomainPtr make_polydisc(double r1 = 1.0, double r2 = 1.0);

// delta-offset domain: boundary is the delta-level set of the signed
// distance. Ball offsets stay balls; polydisc inner offsets stay polydiscs;
// everything else becomes a base+offset composite (d_offset = d_base - delta,
// which is exact within the reach). Throws if |delta| exceeds the reach.
DomainPtr offset_domain(const DomainPtr& d, double delta);

struct HausdorffEstimate {
  double value = 0.0;
  double grid_spacing = 0.0;  // error bar
};

// Symmetrized Hausdorff distance max{d_H(O1,O2), d_H(O1^c,O2^c)}, estimated
// as max over dense boundary samples of either domain of |signed distance to
// the other|. Reported with the boundary sample spacing as the error bar.
HausdorffEstimate hausdorff_distance(const Domain& d1, const Domain& d2,
                                     int level);

}  // namespace dbarlab

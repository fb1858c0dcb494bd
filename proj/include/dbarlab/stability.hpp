#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dbarlab/certify_types.hpp"
#include "dbarlab/eigensolver.hpp"

namespace dbarlab {

// --- partition-of-unity push plan -------------------------------------------
// Boundary patches on latitude bands of the star parametrization: two pole
// caps carrying 8 anchors each on the great circles {z2=0}, {z1=0}, and two
// middle bands with 8x8 phase grids. psi windows are C^1 smoothstep
// telescopes in (t, beta, gamma) times a radial cutoff in signed distance,
// so sum_l psi^l = 1 exactly on the closure.
struct PushPatch {
  Pt anchor;                     // boundary anchor point
  std::array<cplx, kDim> normal; // unit outward normal (complex pair)
  int band = 0;
  int jbeta = -1, jgamma = -1;   // window indices (-1 = independent)
};

class PushPlan {
 public:
  static PushPlan make(const DomainPtr& d, int per_circle = 8);

  const DomainPtr& domain() const { return domain_; }
  int patch_count() const { return int(patches_.size()); }
  const PushPatch& patch(int l) const { return patches_[l]; }
  double max_delta() const { return max_delta_; }

  // psi[0] = interior psi^0, psi[1+l] = boundary patch l.
  void eval(const Pt& z, std::vector<double>& psi) const;
  // additionally d psi / d zbar_j (Wirtinger); d psi / d z_j = conj.
  void eval_grad(const Pt& z, std::vector<double>& psi,
                 std::vector<std::array<cplx, kDim>>& dzbar) const;

 private:
  DomainPtr domain_;
  std::vector<PushPatch> patches_;
  int nphase_ = 8;
  std::array<double, 3> edges_{};  // latitude band edges in t
  double hband_ = 0.1;
  double d0_ = -0.4, d1_ = -0.2;   // radial cutoff window in signed distance
  double max_delta_ = 0.05;
};

// Form sampled on quadrature nodes (push-out/push-in results).
struct SampledForm {
  int q = 0;
  std::vector<Pt> nodes;
  std::vector<double> weights;
  std::vector<PointForm> values;

  double norm_sq() const;
  double norm() const;
};

struct PushResult {
  SampledForm value;       // fhat (or fcheck)
  SampledForm derivative;  // dbar fhat (or theta fcheck)
  double norm_value = 0.0;
  double norm_derivative = 0.0;
  double diff_to_reference = 0.0;  // ||fhat - f~|| resp. ||fcheck - f||
  double overlap_bound = 0.0;      // max overlap count x max psi
};

// Push-out: fhat(z) = psi0 f(z) + sum_l psi^l f(z - 2 delta n^l) on the outer
// offset domain. Throws if a containment condition z - 2 delta n^l in Omega
// fails at a node (naming the patch) or delta exceeds the plan's bound.
PushResult push_out(const DomainPtr& d, const PolyForm& f, double delta,
                    const PushPlan& plan, int level);

// Push-in: fcheck(z) = psi0 f~(z) + sum_l psi^l f~(z + 2 delta n^l) with f~
// the zero extension; support inside the inner offset is verified at nodes.
PushResult push_in(const DomainPtr& d, const PolyForm& f, double delta,
                   const PushPlan& plan, int level);

// --- sweeps ------------------------------------------------------------------
struct SweepRow {
  double delta = 0.0;     // Hausdorff distance to the base domain
  std::string tag;        // inner | outer | dilate
  double param = 0.0;     // offset delta (signed) or radius
  std::vector<double> lambda;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double band = 0.0;  // half-width of the log-space residual band
  int npoints = 0;
};

struct StabilityReport {
  std::string domain_id;
  int q = 0, k = 0, N = 0;
  double sigma = 0.0;
  std::vector<double> base_lambda;
  std::vector<SweepRow> rows;               // sorted by delta
  std::vector<SlopeFit> slopes;             // per k where defined
  std::map<std::string, double> metrics;
  std::vector<std::pair<std::string, bool>> verdicts;

  bool all_pass() const;
};

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

// Dilation sweep: spectra of r*Omega with penalty sigma/r; checks the exact
// r^2-covariance and fits |lambda_k(r) - lambda_k(1)| against delta = d_H.
StabilityReport dilate_sweep(const DomainPtr& d, int q, int k,
                             const std::vector<double>& radii, int N,
                             double sigma, int level_override = 0);

enum class OffsetSide { Inner, Outer, Both };

// Offset sweep: spectra of the delta-offset domains (penalty rescaled by the
// diameter ratio); upper-semicontinuity verdict, two-sided when a checked
// certificate is attached.
StabilityReport offset_sweep(const DomainPtr& d, int q, int k,
                             const std::vector<double>& deltas, OffsetSide side,
                             int N, double sigma,
                             const Certificate* cert = nullptr,
                             int level_override = 0);

// Collar mass ||g||^2 over {dist(z, bd) < delta} for g in {f, dbar f,
// theta f, f_N} of the idx-th eigenform (f_N is the normal component against
// the distance gradient; its collar exponent is reported as a heuristic
// only). Throws if the collar holds no quadrature nodes.
enum class MassKind { Value, Dbar, Theta, NormalTrace };
double boundary_mass(const GalerkinSystem& sys, const Spectrum& spec, int idx,
                     MassKind which, double delta);

struct ResolventReport {
  std::vector<double> radii;
  std::vector<double> distances;  // ||N_r f - N f||_{L2(C^2)}
  bool strictly_decreasing = false;
};

// Inner exhaustion r*Omega -> Omega: compares zero-extended discrete inverses
// against the base inverse in L^2(C^2).
ResolventReport resolvent_convergence(const DomainPtr& d,
                                      const std::vector<double>& radii,
                                      const PolyForm& f, int q, int N,
                                      double sigma, int level_override = 0);

}  // namespace dbarlab

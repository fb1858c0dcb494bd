#pragma once

#include <cstdint>
#include <vector>

#include "dbarlab/certify_types.hpp"
#include "dbarlab/eigensolver.hpp"

namespace dbarlab {

// Canonical built-in certificate for a domain: b = (|z-c|^2 - s^2)/s^2 with
// s^2 = max |z-c|^2 over the closure, so the identity Hessian gives the
// q-eigenvalue-sum bound q/s^2.
Certificate builtin_certificate(const DomainPtr& d, int q);

struct CertificateVerdict {
  bool pass = false;
  std::string reason;
  Pt witness_point{};
  std::vector<cplx> witness_form;  // component values (q-form, mask order)
  double worst_margin = 0.0;       // min of H_q(b)(f) - bound*|f|^2
};

// Monte-Carlo verification of -1 <= b <= 0 on the closure and of the Hessian
// bound H_q(b)(f) >= M |f|^2 (or >= M |f|^2 / d^(2 alpha) on the collar)
// on random points and unit test forms. Deterministic given the seed; the
// certificate's `checked` flag is set on pass.
CertificateVerdict check_certificate(const DomainPtr& d, Certificate& c, int q,
                                     int samples, std::uint64_t seed);

// Lower bound lambda_1 >= M_q / e from the certified Hessian bound.
// Requires a checked certificate.
double catlin_lower_bound(const Certificate& c);

struct CatlinMargin {
  double lambda = 0.0;
  double q_value = 0.0;       // Q(f,f) by quadrature (incl. penalty term)
  double hessian_int = 0.0;   // ∫ H_q(b)(f) dV by quadrature
  double margin = 0.0;        // q_value - hessian_int / e
  bool pass = false;          // margin >= -tol * q_value
};

// Per-eigenform margins Q(f,f) - (1/e) ∫ H_q(b)(f) dV, both sides integrated
// by quadrature from the reconstructed eigenforms (tolerance 2%).
std::vector<CatlinMargin> check_catlin_on_spectrum(const GalerkinSystem& sys,
                                                   const Spectrum& spec,
                                                   const Certificate& c,
                                                   int count = 4);

struct HardyReport {
  double lhs = 0.0;          // ∫ |f_N|^2 / d^2
  double rhs_q = 0.0;        // Q(f_N, f_N) = (1/4)||grad f_N||^2
  double rhs_mass = 0.0;     // ||f_N||^2
  double grad_sq = 0.0;      // ||grad f_N||^2
  double min_A_form = 0.0;   // minimal A with lhs <= 16 (rhs_q + A rhs_mass)
  double min_A_scalar = 0.0; // minimal A with lhs <= 4 grad_sq + A ||g||^2
  double excluded_mass = 0.0;    // lhs contribution dropped by the collar floor
  double level_agreement = 0.0;  // relative change under level refinement
  bool pass16 = false;       // Eq-(8)-style verdict with the constant 16
  bool pass_scalar = false;  // scalar-variant verdict
};

// Scalar Hardy check for g vanishing on the boundary:
// ∫ g^2/d^2 <= 4 ||grad g||^2 + A ||g||^2. Nodes with d < collar_floor are
// excluded and the dropped mass reported. Two quadrature levels must agree
// to 1% before a verdict is issued.
HardyReport check_hardy_scalar(const DomainPtr& d, const ScalarField& g,
                               int level, double collar_floor = 1e-3);

// Form variant via the normal component f_N = (dbar d)* -| f (signed-distance
// gradient); requires the sampled boundary trace of f_N below 1e-6.
HardyReport check_hardy_form(const DomainPtr& d, const PolyForm& f, int level,
                             double collar_floor = 1e-3);

struct EllipticityRow {
  double delta = 0.0;
  double lhs = 0.0;    // ||f||^2 + ||grad f||^2 over the delta-interior
  double rhs = 0.0;    // Q(f,f) + delta^-2 ||f||^2
  double c_emp = 0.0;  // lhs / rhs
};

// Interior ellipticity: first-order energy of an eigenform over
// Omega_delta = {dist > delta} against Q + delta^-2 ||f||^2 (symbolic
// gradients, quadrature restricted). Throws if no nodes lie that deep.
EllipticityRow check_interior_ellipticity(const GalerkinSystem& sys,
                                          const Spectrum& spec, int idx,
                                          double delta);

// Ladder helper: C_emp stability verdict max/min <= 4 across deltas.
struct EllipticityLadder {
  std::vector<EllipticityRow> rows;
  bool stable = false;
};
EllipticityLadder interior_ellipticity_ladder(const GalerkinSystem& sys,
                                              const Spectrum& spec, int idx,
                                              const std::vector<double>& deltas);

struct RateFit {
  double alpha = 0.0;  // slope/2 of log mass vs log delta
  double band = 0.0;
  double c_estimate = 0.0;  // fitted constant against Q
};

// Least-squares exponent of a collar-mass decay ladder; never a claim about
// the true D'Angelo type. Throws on fewer than 3 points or non-positive mass.
RateFit fit_subelliptic_rate(const std::vector<std::pair<double, double>>& decay,
                             double q_value);

}  // namespace dbarlab

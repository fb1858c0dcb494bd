#pragma once

#include <optional>
#include <string>

#include "dbarlab/poly.hpp"

namespace dbarlab {

// Property-(P)/(P_q^alpha) certificate: a bounded scalar field b with a
// claimed complex-Hessian lower bound. Certificates are user or built-in
// inputs, never synthesized.
struct Certificate {
  ScalarField b;                 // -1 <= b <= 0 on the closure
  double hessian_bound = 0.0;    // claimed min of the q-eigenvalue sum
  std::optional<double> alpha;   // (P_q^alpha) collar exponent
  double collar = 0.0;           // collar width for the alpha variant
  bool checked = false;          // set by check_certificate on pass
  std::string label;
};

}  // namespace dbarlab

#pragma once

#include "dbarlab/poly.hpp"

namespace dbarlab {

// Closed-form monomial integrals used as quadrature references. All are
// radial/Beta reductions, independent of the quadrature code paths.

// ∫_{|z|<r} z^a zbar^b dV  (zero unless a == b)
double ball_monomial_integral(double r, int a1, int a2, int b1, int b2);

// ∮_{|z|=r} z^a zbar^b dS  (zero unless a == b)
double sphere_monomial_integral(double r, int a1, int a2, int b1, int b2);

// ∫ over {|z1|^2 + |z2|^(2m) < 1}
double ellipsoid_monomial_integral(int m, int a1, int a2, int b1, int b2);

// ∫ over the polydisc D(r1) x D(r2)
double polydisc_monomial_integral(double r1, double r2, int a1, int a2, int b1,
                                  int b2);

// First Dirichlet eigenvalue of the Laplacian on a ball of the given radius
// in R^dim, by radial RK4 shooting with bisection on the eigenvalue.
// (For dim = 4 this is j_{1,1}^2 / r^2; for dim = 2, j_{0,1}^2 / r^2.)
double dirichlet_ball_mu1(int dim, double radius);

// First Dirichlet eigenvalue of D(r1) x D(r2) in C^2 (sum of disc values).
double dirichlet_polydisc_mu1(double r1, double r2);

}  // namespace dbarlab

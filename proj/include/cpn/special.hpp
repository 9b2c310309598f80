#pragma once

#include "cpn/types.hpp"

namespace cpn {

// Cylinder functions of order one, ascending series for small argument and
// the large-argument expansions beyond; absolute accuracy ~1e-13 on the
// ranges exercised here.
double bessel_j1(double x);
double bessel_i1(double x);

// Orthonormal Hermite function phi_n(y) = (2^n n! sqrt(pi))^{-1/2}
// e^{-y^2/2} H_n(y), evaluated by the normalized three-term recurrence.
double hermite_function(int n, double y);

// phi_n and its first two derivatives in one recurrence pass.
// phi' uses phi_{n-1}; phi'' follows from the oscillator identity
// phi_n'' = (y^2 - 2n - 1) phi_n.
struct HermiteValues {
  double phi = 0.0;
  double dphi = 0.0;
  double d2phi = 0.0;
};
HermiteValues hermite_with_derivatives(int n, double y);

// All of phi_0..phi_{n_max} at one point.
RealVector hermite_functions_upto(int n_max, double y);

// Gauss-Hermite rule adapted to plain integrals over the whole line:
// integral f(y) dy ~= sum_i weights[i] * f(nodes[i]).  The usual e^{-y^2}
// factor is folded into the weights through the Hermite-function Christoffel
// sum, which keeps every intermediate bounded.
struct GaussHermiteRule {
  RealVector nodes;
  RealVector weights;
};
GaussHermiteRule gauss_hermite(int order);

}  // namespace cpn

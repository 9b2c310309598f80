#pragma once

#include <functional>

#include "cpn/special.hpp"
#include "cpn/types.hpp"

namespace cpn {

enum class Sector { spacelike, timelike };

struct FieldParams {
  double alpha = kFineStructure;
  double r0 = 1.0;
  Sector sector = Sector::spacelike;

  void validate() const {
    if (!(alpha > 0.0)) throw ConfigInvalid("alpha must be positive");
    if (!(r0 > 0.0)) throw ConfigInvalid("r0 must be positive");
  }
};

// Radial solution -J1(alpha rho)/rho of the massive Lorentz-radial equation
// u'' + (3/rho) u' + alpha^2 u = 0, continuous value -alpha/2 at rho = 0.
Complex lommel_solution(const FieldParams& params, double rho);

// Modified-Bessel branch I1(alpha rho')/rho' of the sign-flipped equation,
// value alpha/2 at rho' = 0.
Complex timelike_solution(const FieldParams& params, double rho_prime);

// Both sectors as a single function of y = sign(rho^2) (rho/r0)^2:
// the spacelike branch for y > 0, the timelike branch for y < 0.
Complex paired_sector_field(const FieldParams& params, double y);

struct ModeExpansion {
  ComplexVector coeffs;
  FieldParams params;
  // quadrature diagnostics
  int quadrature_order = 0;
  double last_delta = 0.0;
  bool converged = true;

  int modes() const { return static_cast<int>(coeffs.size()); }
};

struct ExpandOptions {
  double tol = 1e-10;
  int initial_order = 64;
  int max_order = 2048;
  bool strict = true;  // throw QuadratureUnconverged at the cap
};

enum class NegativeAxis {
  timelike_branch,  // default pairing of the two sectors
  even_extension,   // mirror of the positive axis
};

// Hermite coefficients c_m = integral phi_m(y) f(y) dy by Gauss-Hermite
// quadrature with doubling until the coefficient change drops below tol.
ModeExpansion expand(const std::function<Complex(double)>& f, int modes,
                     const FieldParams& params, const ExpandOptions& opt = {});

// Expansion of the paired-sector field itself.
ModeExpansion expand_lommel(int modes, const FieldParams& params,
                            const ExpandOptions& opt = {},
                            NegativeAxis axis = NegativeAxis::timelike_branch);

Complex reconstruct(const ModeExpansion& exp, double y);

// Spacetime derivatives of phi_n(y(x, t)) with y = (t^2 - |x|^2) / r0^2.
struct BasisDerivatives {
  Eigen::Vector3cd gradient;
  Complex time_derivative;
};
BasisDerivatives basis_derivatives(int n, const Eigen::Vector3d& x, double t,
                                   const FieldParams& params);

struct ScalarFieldProfile {
  RealVector grid;  // strictly increasing rho samples
  ComplexVector values;
  FieldParams params;

  void validate() const {
    if (grid.size() != values.size())
      throw DimensionMismatch("profile grid/value size mismatch");
    for (Eigen::Index i = 1; i < grid.size(); ++i)
      if (!(grid(i) > grid(i - 1)))
        throw ConfigInvalid("profile grid must be strictly increasing");
  }
};

// Reconstruction sampled on a rho grid (y = (rho/r0)^2 branch).
ScalarFieldProfile sample_profile(const ModeExpansion& exp, const RealVector& rho_grid);

// Trapezoid L2 distance between f and g over a dense y grid.
double l2_distance(const std::function<Complex(double)>& f,
                   const std::function<Complex(double)>& g, double y_min,
                   double y_max, int samples);

}  // namespace cpn

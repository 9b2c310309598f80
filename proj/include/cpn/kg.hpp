#pragma once

#include <functional>
#include <string>

#include "cpn/dynvars.hpp"
#include "cpn/field.hpp"
#include "cpn/flow.hpp"
#include "cpn/geometry.hpp"

namespace cpn {

enum class DeltaForm {
  small_tau,  // -g psi0 tau^2 (1 + |psi0|^2/R^2)^{-1/2} Gamma^i_{km} xi^k psi^m
  general,    // psi0 * (-Gamma^i_{km} xi^k dpi^m tau)
};

inline const char* to_string(DeltaForm f) {
  return f == DeltaForm::small_tau ? "small_tau" : "general";
}

// Mode-coefficient correction induced by a geodesic shift.  Component 0 (the
// chart amplitude) is never perturbed.  Vanishes identically at tau = 0 and
// xi = 0 and falls off as R^-2 through the connection.
ComplexVector delta_psi(const ComplexVector& psi, const TangentVector& xi,
                        const ComplexVector& dpi, double tau, double g,
                        const GeometryConfig& cfg,
                        ConnectionVariant variant = ConnectionVariant::levi_civita,
                        DeltaForm form = DeltaForm::small_tau);

struct Perturbation {
  ComplexVector delta_coeffs;
  double tau = 0.0;
  double g = 1.0;
  GeometryConfig cfg;
};

struct GeodesicPerturbationParams {
  double tau = 0.1;
  double g = 1.0;
  DeltaForm form = DeltaForm::small_tau;
  ConnectionVariant variant = ConnectionVariant::levi_civita;
};

// Full pipeline from mode coefficients: coset extraction, polarization
// operator, chart components, transport increment, coefficient correction.
Perturbation geodesic_perturbation(const ComplexVector& coeffs,
                                   const GeometryConfig& cfg,
                                   const GeodesicPerturbationParams& params);

using DeltaMap = std::function<ComplexVector(const ComplexVector&)>;

// Density of the perturbed Lagrangian at a spacetime point, assembled from
// the three bilinear blocks (time derivative, gradient, mass) over the mode
// basis.  Real by conjugate symmetry of the blocks.
double perturbed_lagrangian(const ComplexVector& psi, const ComplexVector& delta,
                            const Eigen::Vector3d& x, double t,
                            const FieldParams& params);

// Wirtinger Jacobian d(delta)/d(psi) of a coefficient map, by central
// differences in the real and imaginary directions.
ComplexMatrix delta_map_jacobian(const DeltaMap& map, const ComplexVector& psi,
                                 double step = 1e-6);

// Collocation samples of the generalized radial equation: with
// a = conj(psi + delta) + J^T conj(psi), the residual at y = (rho/r0)^2 is
//   sum_n a_n [ box phi_n(y) + alpha^2 phi_n(y) ],
// where box phi_n = (4y phi_n'' + 8 phi_n') / r0^2.  The mixed variational
// terms collapse onto the d'Alembertian of the J^T conj(psi) component, which
// is how the Jacobian of the correction enters both blocks.
ComplexVector kg_residual(const ComplexVector& coeffs, const DeltaMap& delta_map,
                          const FieldParams& params, const RealVector& rho_grid);

// Independent route for the linear operator: pointwise reconstruction of the
// conjugated field and its y-derivatives, then (4y/r0^2) d2 + (8/r0^2) d1
// + alpha^2.
ComplexVector linear_kg_residual(const ComplexVector& coeffs,
                                 const FieldParams& params,
                                 const RealVector& rho_grid);

// Second-order stencil residual of u'' + (3/rho) u' + sgn alpha^2 u on a
// uniform profile grid; interior points only.  sgn = +1 for the spacelike
// sector, -1 for the timelike one.
ComplexVector radial_residual_fd(const ScalarFieldProfile& profile, double sign = 1.0);

struct DropletScheme {
  double damping = 0.5;
  int max_iter = 40;
  double tol = 1e-10;  // relative fixed-point displacement
  GeodesicPerturbationParams perturbation;
  bool include_jacobian_terms = true;
};

struct DropletSolution {
  ComplexVector coeffs;
  ScalarFieldProfile profile;
  double fixed_point_residual = 0.0;
  double pde_residual_l2 = 0.0;
  int iterations = 0;
  bool converged = false;
  double l2_norm = 0.0;
  double effective_width = 0.0;
  double action_estimate = 0.0;
  std::string message;
};

// Damped fixed-point iteration around the initial linear solution: the
// equation asks psi + delta(psi) + jacobian-term(psi) to reproduce a vector
// annihilated by the linear operator, for which the initial expansion is the
// reference representative.  Non-convergence is reported, never thrown.
DropletSolution solve_droplet(const FieldParams& params, const GeometryConfig& cfg,
                              const ModeExpansion& init, const DropletScheme& scheme,
                              const RealVector& rho_grid);

}  // namespace cpn

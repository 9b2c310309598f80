#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "cpn/types.hpp"

namespace cpn {

struct MetricAtPoint {
  ComplexMatrix g;  // Hermitian positive-definite
};

// Chart-wise Christoffel coefficients.  The coefficients have the separable
// form  Gamma^i_{km} = -prefactor * (delta^i_k conj(pi^m) + delta^i_m conj(pi^k)),
// so only the scalar prefactor and the conjugated coordinates are stored.
struct ConnectionAtPoint {
  ComplexVector conj_coords;
  double prefactor = 0.0;  // variant factor / (R^2 + |pi|^2)
  ConnectionVariant variant = ConnectionVariant::levi_civita;

  Complex coeff(int i, int k, int m) const {
    Complex v(0.0, 0.0);
    if (i == k) v += conj_coords(m);
    if (i == m) v += conj_coords(k);
    return -prefactor * v;
  }

  // Gamma^i_{km} xi^k dpi^m contracted over k and m.
  template <typename DerivedA, typename DerivedB>
  ComplexVector contract(const Eigen::MatrixBase<DerivedA>& xi,
                         const Eigen::MatrixBase<DerivedB>& dpi) const {
    if (xi.size() != conj_coords.size() || dpi.size() != conj_coords.size())
      throw DimensionMismatch("connection contraction: size mismatch");
    const Complex pd = (conj_coords.array() * dpi.derived().array()).sum();
    const Complex px = (conj_coords.array() * xi.derived().array()).sum();
    return (-prefactor * (pd * xi.derived().array() + px * dpi.derived().array()))
        .matrix();
  }
};

// Ratios against the chart amplitude, ascending index order skipping the chart.
LocalPoint to_local(const StateVector& psi, int chart);

// Inverse chart map with the norm and the chart-component phase fixed.
StateVector from_local(const LocalPoint& p, double radius, double phase);

// G_{ik*} = 2 hbar R^2 [(R^2 + |pi|^2) delta_ik - conj(pi^i) pi^k] / (R^2 + |pi|^2)^2
template <typename Derived>
ComplexMatrix fubini_study_metric_at(const Eigen::MatrixBase<Derived>& coords,
                                     const GeometryConfig& cfg) {
  const double r2 = cfg.radius * cfg.radius;
  const double s = coords.derived().squaredNorm();
  const double denom = (r2 + s) * (r2 + s);
  const double scale = 2.0 * cfg.hbar * r2;
  const Eigen::Index n = coords.size();
  ComplexMatrix g =
      ComplexMatrix::Identity(n, n) * Complex(scale * (r2 + s) / denom, 0.0);
  g.noalias() -= (scale / denom) * coords.derived().conjugate() *
                 coords.derived().transpose();
  return g;
}

MetricAtPoint fubini_study_metric(const LocalPoint& p, const GeometryConfig& cfg);

ConnectionAtPoint connection(const LocalPoint& p, const GeometryConfig& cfg,
                             ConnectionVariant variant = ConnectionVariant::levi_civita);

// Absolute derivative of a tangent vector along a curve:
// dxi/dl + Gamma^i_{km} xi^k dpi^m/dl.
ComplexVector covariant_derivative(const TangentVector& xi,
                                   const ComplexVector& dxi_dl,
                                   const ComplexVector& dpi_dl,
                                   const GeometryConfig& cfg,
                                   ConnectionVariant variant = ConnectionVariant::levi_civita);

// Geodesic through the chart origin of the one-coordinate projective line,
// R e^{i alpha} tan(l) in the arc parameter l.
Complex geodesic_cp1(double l, double alpha, const GeometryConfig& cfg);

struct ThetaOdeResult {
  RealVector l;
  RealVector theta;
  RealVector dtheta;
};

// Fixed-step RK4 integration of
//   theta'' + 2 (1 + 2/R) (theta')^2 tan(theta) = 0
// from theta(0) = theta0, theta'(0) = dtheta0 up to l_max.
ThetaOdeResult integrate_theta_ode(const GeometryConfig& cfg, double theta0,
                                   double dtheta0, double l_max, int steps);

// Angle to the vacuum ray: acos(|phi^0| / R), clamped to [0, pi/2].
double fs_geodesic_angle(const StateVector& phi, const GeometryConfig& cfg);

}  // namespace cpn

#include "cpn/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace cpn {

LocalPoint to_local(const StateVector& psi, int chart) {
  const int n = psi.dim();
  if (chart < 0 || chart >= n) throw ConfigInvalid("chart index out of range");
  const Complex pivot = psi.amplitudes(chart);
  if (std::abs(pivot) < kChartFloor * psi.radius)
    throw ChartUndefined("chart amplitude below floor");
  ComplexVector coords(n - 1);
  int j = 0;
  for (int a = 0; a < n; ++a) {
    if (a == chart) continue;
    coords(j++) = psi.amplitudes(a) / pivot;
  }
  return LocalPoint{chart, coords};
}

StateVector from_local(const LocalPoint& p, double radius, double phase) {
  const int n = p.dim();
  const double s = p.coords.squaredNorm();
  const Complex pivot = std::polar(radius / std::sqrt(1.0 + s), phase);
  ComplexVector a(n);
  a(p.chart) = pivot;
  int j = 0;
  for (int i = 0; i < n; ++i) {
    if (i == p.chart) continue;
    a(i) = pivot * p.coords(j++);
  }
  return StateVector{a, radius};
}

MetricAtPoint fubini_study_metric(const LocalPoint& p, const GeometryConfig& cfg) {
  return MetricAtPoint{fubini_study_metric_at(p.coords, cfg)};
}

ConnectionAtPoint connection(const LocalPoint& p, const GeometryConfig& cfg,
                             ConnectionVariant variant) {
  const double factor = variant == ConnectionVariant::printed ? 2.0 : 1.0;
  const double r2 = cfg.radius * cfg.radius;
  ConnectionAtPoint c;
  c.conj_coords = p.coords.conjugate();
  c.prefactor = factor / (r2 + p.coords.squaredNorm());
  c.variant = variant;
  return c;
}

ComplexVector covariant_derivative(const TangentVector& xi,
                                   const ComplexVector& dxi_dl,
                                   const ComplexVector& dpi_dl,
                                   const GeometryConfig& cfg,
                                   ConnectionVariant variant) {
  if (xi.xi.size() != dxi_dl.size() || xi.xi.size() != dpi_dl.size())
    throw DimensionMismatch("covariant_derivative: size mismatch");
  const ConnectionAtPoint c = connection(xi.base, cfg, variant);
  return dxi_dl + c.contract(xi.xi, dpi_dl);
}

Complex geodesic_cp1(double l, double alpha, const GeometryConfig& cfg) {
  const double c = std::cos(l);
  if (std::abs(c) < 1e-9) throw NearPole("geodesic parameter too close to pole");
  return std::polar(cfg.radius, alpha) * std::tan(l);
}

namespace {

struct ThetaState {
  double theta;
  double rate;
};

ThetaState theta_rhs(const ThetaState& s, double k) {
  return ThetaState{s.rate, -2.0 * k * s.rate * s.rate * std::tan(s.theta)};
}

}  // namespace

ThetaOdeResult integrate_theta_ode(const GeometryConfig& cfg, double theta0,
                                   double dtheta0, double l_max, int steps) {
  if (steps < 2) throw ConfigInvalid("theta ode needs at least 2 steps");
  if (!(theta0 >= 0.0 && theta0 < M_PI / 2.0))
    throw ConfigInvalid("theta0 must lie in [0, pi/2)");
  const double k = 1.0 + 2.0 / cfg.radius;
  const double h = l_max / steps;

  ThetaOdeResult out;
  out.l.resize(steps + 1);
  out.theta.resize(steps + 1);
  out.dtheta.resize(steps + 1);

  ThetaState s{theta0, dtheta0};
  out.l(0) = 0.0;
  out.theta(0) = s.theta;
  out.dtheta(0) = s.rate;
  for (int i = 0; i < steps; ++i) {
    const ThetaState k1 = theta_rhs(s, k);
    const ThetaState k2 = theta_rhs({s.theta + 0.5 * h * k1.theta, s.rate + 0.5 * h * k1.rate}, k);
    const ThetaState k3 = theta_rhs({s.theta + 0.5 * h * k2.theta, s.rate + 0.5 * h * k2.rate}, k);
    const ThetaState k4 = theta_rhs({s.theta + h * k3.theta, s.rate + h * k3.rate}, k);
    s.theta += h / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta);
    s.rate += h / 6.0 * (k1.rate + 2.0 * k2.rate + 2.0 * k3.rate + k4.rate);
    if (!std::isfinite(s.theta) || !std::isfinite(s.rate) ||
        std::abs(s.theta) >= M_PI / 2.0)
      throw StepFailure("theta ode left the integrable region");
    out.l(i + 1) = (i + 1) * h;
    out.theta(i + 1) = s.theta;
    out.dtheta(i + 1) = s.rate;
  }
  return out;
}

double fs_geodesic_angle(const StateVector& phi, const GeometryConfig& cfg) {
  const double c = std::clamp(std::abs(phi.amplitudes(0)) / cfg.radius, 0.0, 1.0);
  return std::acos(c);
}

}  // namespace cpn

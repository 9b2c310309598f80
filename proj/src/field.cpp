#include "cpn/field.hpp"

#include <cmath>

namespace cpn {

namespace {

// J1(z)/z and I1(z)/z are entire and even; their small-argument series keep
// the rho -> 0 limit finite.
double j1_over_z(double z) {
  if (std::abs(z) < 1e-8) return 0.5 - z * z / 16.0;
  return bessel_j1(z) / z;
}

double i1_over_z(double z) {
  if (std::abs(z) < 1e-8) return 0.5 + z * z / 16.0;
  return bessel_i1(z) / z;
}

}  // namespace

Complex lommel_solution(const FieldParams& params, double rho) {
  if (rho < 0.0) throw ConfigInvalid("lommel_solution: rho must be >= 0");
  // rho^{-1} J_{-1}(alpha rho) = -J1(alpha rho)/rho
  return Complex(-params.alpha * j1_over_z(params.alpha * rho), 0.0);
}

Complex timelike_solution(const FieldParams& params, double rho_prime) {
  if (rho_prime < 0.0) throw ConfigInvalid("timelike_solution: rho' must be >= 0");
  // I_{-1} = I_1
  return Complex(params.alpha * i1_over_z(params.alpha * rho_prime), 0.0);
}

Complex paired_sector_field(const FieldParams& params, double y) {
  const double r = params.r0 * std::sqrt(std::abs(y));
  return y >= 0.0 ? lommel_solution(params, r) : timelike_solution(params, r);
}

namespace {

ComplexVector quadrature_coeffs(const std::function<Complex(double)>& f,
                                int modes, const GaussHermiteRule& rule) {
  ComplexVector coeffs = ComplexVector::Zero(modes);
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
    const double y = rule.nodes(i);
    const Complex fy = f(y);
    if (fy == Complex(0.0, 0.0)) continue;
    const RealVector phis = hermite_functions_upto(modes - 1, y);
    coeffs += (rule.weights(i) * fy) * phis.cast<Complex>();
  }
  return coeffs;
}

}  // namespace

ModeExpansion expand(const std::function<Complex(double)>& f, int modes,
                     const FieldParams& params, const ExpandOptions& opt) {
  if (modes < 1) throw ConfigInvalid("expand: modes >= 1");
  params.validate();

  int order = std::max(opt.initial_order, modes);
  ComplexVector prev = quadrature_coeffs(f, modes, gauss_hermite(order));
  double delta = 0.0;
  while (true) {
    const int next_order = order * 2;
    if (next_order > opt.max_order) {
      if (opt.strict)
        throw QuadratureUnconverged("expand: node cap reached at delta " +
                                    std::to_string(delta));
      ModeExpansion out;
      out.coeffs = prev;
      out.params = params;
      out.quadrature_order = order;
      out.last_delta = delta;
      out.converged = false;
      return out;
    }
    const ComplexVector cur = quadrature_coeffs(f, modes, gauss_hermite(next_order));
    delta = (cur - prev).cwiseAbs().maxCoeff();
    prev = cur;
    order = next_order;
    if (delta < opt.tol) {
      ModeExpansion out;
      out.coeffs = prev;
      out.params = params;
      out.quadrature_order = order;
      out.last_delta = delta;
      out.converged = true;
      return out;
    }
  }
}

ModeExpansion expand_lommel(int modes, const FieldParams& params,
                            const ExpandOptions& opt, NegativeAxis axis) {
  const auto f = [&params, axis](double y) -> Complex {
    if (axis == NegativeAxis::even_extension)
      return paired_sector_field(params, std::abs(y));
    return paired_sector_field(params, y);
  };
  return expand(f, modes, params, opt);
}

Complex reconstruct(const ModeExpansion& exp, double y) {
  if (exp.modes() == 0) return Complex(0.0, 0.0);
  const RealVector phis = hermite_functions_upto(exp.modes() - 1, y);
  return (exp.coeffs.array() * phis.cast<Complex>().array()).sum();
}

BasisDerivatives basis_derivatives(int n, const Eigen::Vector3d& x, double t,
                                   const FieldParams& params) {
  const double inv_r02 = 1.0 / (params.r0 * params.r0);
  const double y = (t * t - x.squaredNorm()) * inv_r02;
  const HermiteValues v = hermite_with_derivatives(n, y);
  BasisDerivatives out;
  // chain rule: dy/dt = 2t/r0^2, dy/dx_j = -2 x_j / r0^2
  out.time_derivative = Complex(2.0 * t * inv_r02 * v.dphi, 0.0);
  out.gradient = (-2.0 * inv_r02 * v.dphi) * x.cast<Complex>();
  return out;
}

ScalarFieldProfile sample_profile(const ModeExpansion& exp, const RealVector& rho_grid) {
  ScalarFieldProfile p;
  p.grid = rho_grid;
  p.params = exp.params;
  p.values.resize(rho_grid.size());
  const double inv_r02 = 1.0 / (exp.params.r0 * exp.params.r0);
  for (Eigen::Index i = 0; i < rho_grid.size(); ++i)
    p.values(i) = reconstruct(exp, rho_grid(i) * rho_grid(i) * inv_r02);
  p.validate();
  return p;
}

double l2_distance(const std::function<Complex(double)>& f,
                   const std::function<Complex(double)>& g, double y_min,
                   double y_max, int samples) {
  if (samples < 2) throw GridTooCoarse("l2_distance: need at least 2 samples");
  const double h = (y_max - y_min) / (samples - 1);
  double acc = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double y = y_min + i * h;
    const double d = std::abs(f(y) - g(y));
    const double w = (i == 0 || i == samples - 1) ? 0.5 : 1.0;
    acc += w * d * d;
  }
  return std::sqrt(acc * h);
}

}  // namespace cpn

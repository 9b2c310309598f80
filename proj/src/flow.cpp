#include "cpn/flow.hpp"

#include <algorithm>
#include <cmath>

namespace cpn {

FlowSpec make_flow_spec(const ComplexVector& f, double tau) {
  FlowSpec s;
  s.f = f;
  s.g = f.norm();
  s.tau = tau;
  s.theta = s.g * tau;
  return s;
}

GeneratorMatrix build_generator(const ComplexVector& f) {
  const int n = static_cast<int>(f.size()) + 1;
  ComplexMatrix b = ComplexMatrix::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    b(0, i) = std::conj(f(i - 1));
    b(i, 0) = f(i - 1);
  }
  return GeneratorMatrix{b};
}

GeneratorMatrix generator_k(const ComplexVector& f) {
  const int n = static_cast<int>(f.size()) + 1;
  ComplexMatrix k = ComplexMatrix::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    k(0, i) = -std::conj(f(i - 1));
    k(i, 0) = f(i - 1);
  }
  return GeneratorMatrix{k};
}

UnitaryMatrix flow_matrix(const FlowSpec& spec) {
  const int n = spec.dim();
  ComplexMatrix t = ComplexMatrix::Identity(n, n);
  if (spec.g == 0.0) return UnitaryMatrix{t};
  const double c = std::cos(spec.theta);
  const double s = std::sin(spec.theta);
  t(0, 0) = c;
  for (int i = 1; i < n; ++i) {
    const Complex fi = spec.f(i - 1) / spec.g;
    t(i, 0) = fi * s;
    t(0, i) = -std::conj(fi) * s;
    for (int j = 1; j < n; ++j) {
      const Complex fj = spec.f(j - 1) / spec.g;
      t(i, j) += fi * std::conj(fj) * (c - 1.0);
    }
  }
  return UnitaryMatrix{t};
}

UnitaryMatrix vacuum_gauge(const StateVector& phi) {
  const int n = phi.dim();
  const double norm = phi.amplitudes.norm();
  if (!(norm > 0.0)) throw ConfigInvalid("vacuum_gauge: zero state");
  const ComplexVector u = phi.amplitudes / norm;
  const Complex u0 = u(0);
  const double omega = std::abs(u0) > 0.0 ? std::arg(u0) : 0.0;

  // Rotation in the plane spanned by the target direction v = e^{i omega} e_0
  // and the remainder of u.
  ComplexVector v = ComplexVector::Zero(n);
  v(0) = std::polar(1.0, omega);
  const double a = std::abs(u0);  // <v, u> is real and nonnegative
  ComplexVector w = u - a * v;
  const double b = w.norm();
  if (b < 1e-14) return UnitaryMatrix{ComplexMatrix::Identity(n, n)};
  w /= b;

  ComplexMatrix g = ComplexMatrix::Identity(n, n);
  g.noalias() += (a - 1.0) * (v * v.adjoint());
  g.noalias() += (a - 1.0) * (w * w.adjoint());
  g.noalias() += b * (v * w.adjoint());
  g.noalias() -= b * (w * v.adjoint());
  return UnitaryMatrix{g};
}

FlowSpec extract_coset(const StateVector& phi, double g) {
  const int n = phi.dim();
  const double r = phi.radius;
  const double head = std::abs(phi.amplitudes(0));
  if (head >= r * (1.0 - 1e-12))
    throw AtVacuum("extract_coset: state is on the vacuum ray");
  const double omega =
      head > 0.0 ? std::arg(phi.amplitudes(0)) : 0.0;
  const double tail = std::sqrt(std::max(r * r - head * head, 0.0));
  FlowSpec spec;
  spec.f = (g / tail) * (std::polar(1.0, -omega) * phi.amplitudes.tail(n - 1));
  spec.g = g;
  spec.theta = std::acos(std::clamp(head / r, 0.0, 1.0));
  spec.tau = spec.theta / g;
  return spec;
}

ComplexVector geodesic_deform(const ComplexVector& coeffs, const FlowSpec& spec,
                              const UnitaryMatrix& gauge) {
  if (coeffs.size() != gauge.u.rows() || spec.dim() != gauge.u.rows())
    throw DimensionMismatch("geodesic_deform: size mismatch");
  if (spec.theta == 0.0) return coeffs;
  const UnitaryMatrix t = flow_matrix(spec);
  return gauge.u * (t.u * (gauge.u.adjoint() * coeffs));
}

GeneratorMatrix polarization_operator(const StateVector& phi, double g) {
  const FlowSpec spec = extract_coset(phi, g);
  const GeneratorMatrix b = build_generator(spec.f);
  const UnitaryMatrix gauge = vacuum_gauge(phi);
  return GeneratorMatrix{gauge.u.adjoint() * b.m * gauge.u};
}

ComplexVector coset_coordinates(const FlowSpec& spec, const GeometryConfig& cfg) {
  if (std::abs(std::cos(spec.theta)) < 1e-9)
    throw NearPole("coset_coordinates: rotation angle at the chart pole");
  if (spec.g == 0.0) return ComplexVector::Zero(spec.f.size());
  return (cfg.radius * std::tan(spec.theta) / spec.g) * spec.f;
}

double phase_aligned_distance(const ComplexVector& a, const ComplexVector& b) {
  const Complex overlap = b.dot(a);  // conj(b) . a
  const double phase = std::abs(overlap) > 0.0 ? std::arg(overlap) : 0.0;
  return (a - std::polar(1.0, phase) * b).norm();
}

}  // namespace cpn

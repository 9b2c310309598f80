#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace cpn {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr double kFineStructure = 1.0 / 137.036;

// Amplitude floor below which a chart component is treated as zero,
// relative to the sphere radius.
inline constexpr double kChartFloor = 1e-12;

struct ChartUndefined : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NearPole : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StepFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AtVacuum : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct QuadratureUnconverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GridTooCoarse : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigInvalid : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Curvature radius of the state-space sphere plus the action scale.
// dim is the Hilbert dimension N >= 2; the projective space has N-1
// complex coordinates per chart.
struct GeometryConfig {
  double hbar = 1.0;
  double radius = std::sqrt(1.0 / kFineStructure);
  int dim = 2;

  void validate() const {
    if (!(hbar > 0.0)) throw ConfigInvalid("hbar must be positive");
    if (!(radius > 0.0)) throw ConfigInvalid("radius must be positive");
    if (dim < 2) throw ConfigInvalid("dim must be at least 2");
  }
};

// Representative on the sphere of squared norm radius^2.
struct StateVector {
  ComplexVector amplitudes;
  double radius = 1.0;

  int dim() const { return static_cast<int>(amplitudes.size()); }
};

inline StateVector make_state(const ComplexVector& amplitudes) {
  return StateVector{amplitudes, amplitudes.norm()};
}

inline StateVector vacuum_state(int dim, double radius, double phase = 0.0) {
  ComplexVector a = ComplexVector::Zero(dim);
  a(0) = std::polar(radius, phase);
  return StateVector{a, radius};
}

// Chart index b plus the N-1 ratios against the b-th amplitude,
// enumerated in ascending index order skipping b.
struct LocalPoint {
  int chart = 0;
  ComplexVector coords;

  int dim() const { return static_cast<int>(coords.size()) + 1; }
};

struct TangentVector {
  LocalPoint base;
  ComplexVector xi;
};

enum class ConnectionVariant {
  levi_civita,  // metric-compatible coefficients, prefactor 1
  printed,      // alternative normalization, prefactor 2; kept for comparison
};

inline const char* to_string(ConnectionVariant v) {
  return v == ConnectionVariant::levi_civita ? "levi_civita" : "printed";
}

}  // namespace cpn

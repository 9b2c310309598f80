#pragma once

#include "cpn/geometry.hpp"
#include "cpn/types.hpp"

namespace cpn {

// Direction and rate of a one-parameter coset rotation.  g is the Euclidean
// norm of f and theta = g * tau.
struct FlowSpec {
  ComplexVector f;
  double g = 0.0;
  double tau = 0.0;
  double theta = 0.0;

  int dim() const { return static_cast<int>(f.size()) + 1; }
};

FlowSpec make_flow_spec(const ComplexVector& f, double tau);

struct GeneratorMatrix {
  ComplexMatrix m;
};

struct UnitaryMatrix {
  ComplexMatrix u;

  double unitarity_defect() const {
    return (u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols()))
        .cwiseAbs()
        .maxCoeff();
  }
};

// Hermitian ladder combination: first row carries conj(f), first column f.
GeneratorMatrix build_generator(const ComplexVector& f);

// Skew-Hermitian generator whose exponential is flow_matrix exactly:
// K(i,0) = f^i, K(0,i) = -conj(f^i).
GeneratorMatrix generator_k(const ComplexVector& f);

// Closed-form rotation:
//   T(0,0) = cos(theta)
//   T(0,j) = -conj(f^j)/g sin(theta)
//   T(i,0) =  f^i/g sin(theta)
//   T(i,j) = delta_ij + f^i conj(f^j)/g^2 (cos(theta) - 1)
// The g = 0 flow is the identity.
UnitaryMatrix flow_matrix(const FlowSpec& spec);

// Unitary G with G phi = (e^{i omega} |phi|, 0, ..., 0), omega = arg(phi^0),
// acting as the identity on the complement of span{phi, e_0}.
UnitaryMatrix vacuum_gauge(const StateVector& phi);

// Coset data of the geodesic joining the vacuum ray to phi:
// cos(theta) = |phi^0| / R, |f^i| = g |phi^i| (R^2 - |phi^0|^2)^{-1/2},
// and arg(f^i) = arg(phi^i) after the global phase arg(phi^0) is removed,
// so that flow_matrix applied to the vacuum reproduces phi up to that phase.
FlowSpec extract_coset(const StateVector& phi, double g);

// Conjugated rotation applied to a coefficient vector:
// out = gauge * T(tau, g) * gauge^{-1} * coeffs.
ComplexVector geodesic_deform(const ComplexVector& coeffs, const FlowSpec& spec,
                              const UnitaryMatrix& gauge);

// Hermitian driver of the transition between phi and the vacuum ray,
// G^{-1} B(f) G with f from extract_coset.
GeneratorMatrix polarization_operator(const StateVector& phi, double g = 1.0);

// Chart coordinates swept by the rotation, R (f^i / g) tan(theta).
ComplexVector coset_coordinates(const FlowSpec& spec, const GeometryConfig& cfg);

// Phase-aligned distance min_phi || a - e^{i phi} b ||.
double phase_aligned_distance(const ComplexVector& a, const ComplexVector& b);

}  // namespace cpn

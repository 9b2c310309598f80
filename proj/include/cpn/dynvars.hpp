#pragma once

#include <string>
#include <vector>

#include "cpn/geometry.hpp"
#include "cpn/polynomial.hpp"
#include "cpn/types.hpp"

namespace cpn {

// State-dependent dynamical variable: one degree-<=2 polynomial per chart
// coordinate (the holomorphic components) plus the matching components in the
// conjugated coordinates.  For real vector fields the conjugate part equals
// the conjugate of hol; transcribed reference fields may deviate, so both
// tables are kept and conjugate_pair records whether they coincide.
struct TangentField {
  std::vector<QuadraticPoly<Complex>> hol;
  std::vector<QuadraticPoly<Complex>> anti;
  bool conjugate_pair = true;

  int vars() const { return static_cast<int>(hol.size()); }

  TangentVector eval(const LocalPoint& p) const;
};

TangentField make_conjugate_pair_field(std::vector<QuadraticPoly<Complex>> hol);

double field_distance(const TangentField& a, const TangentField& b);

TangentField field_sum(const TangentField& a, const TangentField& b,
                       Complex wa = Complex(1, 0), Complex wb = Complex(1, 0));

// Chart components of the generator action at a point:
//   xi = -(i/hbar) [ (P t)_{1..} - (P t)_0 pi ],  t = (1, pi).
// Exact for Hermitian P including a nonzero (0,0) entry, so the identity
// descends to the zero field.
TangentVector local_components_closed(const LocalPoint& p, const ComplexMatrix& gen,
                                      const GeometryConfig& cfg);

enum class GroupSign {
  exp_minus,  // one-parameter action exp(-i eps P / hbar); matches the closed form
  exp_plus,   // opposite sign, kept for the convention comparison
};

// One-sided finite difference of the chart coordinates along the group action,
// eps^-1 [ pi(eps) - pi ].  Converges to local_components_closed as eps -> 0
// when sign = exp_minus.
TangentVector local_components_fd(const LocalPoint& p, const ComplexMatrix& gen,
                                  const GeometryConfig& cfg, double eps,
                                  GroupSign sign = GroupSign::exp_minus);

// Lagrange extrapolation of local_components_fd to eps = 0 over a ladder.
TangentVector local_components_fd_extrapolated(
    const LocalPoint& p, const ComplexMatrix& gen, const GeometryConfig& cfg,
    const std::vector<double>& eps_ladder = {1e-3, 1e-4, 1e-5},
    GroupSign sign = GroupSign::exp_minus);

// Symbolic coefficient tables of the descended generator field.  Evaluation
// agrees with local_components_closed; the map is linear in the generator and
// sends commutators to brackets: [field(P), field(Q)] = field((i/hbar)[P,Q]).
TangentField field_from_generator(const ComplexMatrix& gen, const GeometryConfig& cfg);

// Bracket on holomorphic parts, conjugate parts bracketed among themselves.
TangentField lie_bracket(const TangentField& x, const TangentField& y);
TangentField lie_bracket(const TangentField& x, const TangentField& y,
                         double* cubic_residual);

// Transcribed two-level rotation fields (x, y, z order).
std::vector<TangentField> printed_su2_fields(const GeometryConfig& cfg);

// Transcribed three-level fields, indices 1..8.
std::vector<TangentField> printed_su3_fields(const GeometryConfig& cfg);

struct AlgebraBasis {
  std::vector<ComplexMatrix> generators;  // Hermitian, traceless
  std::vector<std::string> labels;
};

AlgebraBasis pauli_basis(double hbar = 1.0);
AlgebraBasis gell_mann_basis(double hbar = 1.0);
// Generalized Gell-Mann construction for arbitrary dimension.
AlgebraBasis generalized_basis(int dim, double hbar = 1.0);

// Coset/isotropy split of a Hermitian basis relative to a chart: matrices with
// vanishing chart row/column off-diagonal entries form the isotropy (higgs)
// side, their trace-orthogonal complements the coset (goldstone) side.
struct GradedSplit {
  std::vector<ComplexMatrix> goldstone;
  std::vector<std::string> goldstone_labels;
  std::vector<ComplexMatrix> higgs;
  std::vector<std::string> higgs_labels;
};

GradedSplit graded_split(const AlgebraBasis& basis, int chart);

struct GradedInclusionResiduals {
  double hh_in_h = 0.0;
  double hb_in_b = 0.0;
  double bb_in_h = 0.0;

  double max() const { return std::max({hh_in_h, hb_in_b, bb_in_h}); }
};

GradedInclusionResiduals verify_graded_inclusions(const GradedSplit& split,
                                                  int chart);

// Hilbert-space representative with the chart amplitude held fixed:
// [psi0, psi0 pi^1, psi0 pi^2, ...].
StateVector lift(Complex psi0, const LocalPoint& p_shifted);

// Parallel-transport increment delta pi^i = -Gamma^i_{km} xi^k dpi^m tau.
ComplexVector transport_increment(const TangentVector& xi, const ComplexVector& dpi,
                                  double tau, const GeometryConfig& cfg,
                                  ConnectionVariant variant = ConnectionVariant::levi_civita);

}  // namespace cpn

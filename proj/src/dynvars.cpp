#include "cpn/dynvars.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace cpn {

namespace {

const Complex kI(0.0, 1.0);

ComplexVector homogeneous(const LocalPoint& p) {
  ComplexVector t(p.coords.size() + 1);
  t(0) = Complex(1.0, 0.0);
  t.tail(p.coords.size()) = p.coords;
  return t;
}

}  // namespace

TangentVector TangentField::eval(const LocalPoint& p) const {
  const int n = vars();
  if (p.coords.size() != n) throw DimensionMismatch("TangentField::eval");
  ComplexVector xi(n);
  for (int i = 0; i < n; ++i) xi(i) = hol[i].eval(p.coords);
  return TangentVector{p, xi};
}

TangentField make_conjugate_pair_field(std::vector<QuadraticPoly<Complex>> hol) {
  TangentField f;
  f.anti.reserve(hol.size());
  for (const auto& h : hol) f.anti.push_back(h.conjugated());
  f.hol = std::move(hol);
  f.conjugate_pair = true;
  return f;
}

double field_distance(const TangentField& a, const TangentField& b) {
  if (a.vars() != b.vars()) throw DimensionMismatch("field_distance");
  double m = 0.0;
  for (int i = 0; i < a.vars(); ++i) {
    m = std::max(m, coefficient_distance(a.hol[i], b.hol[i]));
    m = std::max(m, coefficient_distance(a.anti[i], b.anti[i]));
  }
  return m;
}

TangentField field_sum(const TangentField& a, const TangentField& b, Complex wa,
                       Complex wb) {
  if (a.vars() != b.vars()) throw DimensionMismatch("field_sum");
  TangentField out;
  out.conjugate_pair = a.conjugate_pair && b.conjugate_pair;
  for (int i = 0; i < a.vars(); ++i) {
    auto h = a.hol[i] * wa;
    h += b.hol[i] * wb;
    out.hol.push_back(h);
    auto t = a.anti[i] * Eigen::numext::conj(wa);
    t += b.anti[i] * Eigen::numext::conj(wb);
    out.anti.push_back(t);
  }
  return out;
}

TangentVector local_components_closed(const LocalPoint& p, const ComplexMatrix& gen,
                                      const GeometryConfig& cfg) {
  if (p.chart != 0)
    throw ConfigInvalid("local_components_closed expects chart 0");
  const int n = static_cast<int>(p.coords.size());
  if (gen.rows() != n + 1 || gen.cols() != n + 1)
    throw DimensionMismatch("local_components_closed: generator size");
  const ComplexVector t = homogeneous(p);
  const ComplexVector w = gen * t;
  const ComplexVector xi = (-kI / cfg.hbar) * (w.tail(n) - w(0) * p.coords);
  return TangentVector{p, xi};
}

TangentVector local_components_fd(const LocalPoint& p, const ComplexMatrix& gen,
                                  const GeometryConfig& cfg, double eps,
                                  GroupSign sign) {
  if (p.chart != 0) throw ConfigInvalid("local_components_fd expects chart 0");
  const int n = static_cast<int>(p.coords.size());
  const double s = sign == GroupSign::exp_minus ? -1.0 : 1.0;
  const ComplexMatrix u = (s * kI * (eps / cfg.hbar) * gen).exp();
  const ComplexVector moved = u * homogeneous(p);
  if (std::abs(moved(0)) < kChartFloor * moved.norm())
    throw ChartUndefined("local_components_fd: chart component vanished");
  const ComplexVector pi_eps = moved.tail(n) / moved(0);
  return TangentVector{p, (pi_eps - p.coords) / eps};
}

TangentVector local_components_fd_extrapolated(const LocalPoint& p,
                                               const ComplexMatrix& gen,
                                               const GeometryConfig& cfg,
                                               const std::vector<double>& eps_ladder,
                                               GroupSign sign) {
  const int m = static_cast<int>(eps_ladder.size());
  if (m == 0) throw ConfigInvalid("empty epsilon ladder");
  ComplexVector acc = ComplexVector::Zero(p.coords.size());
  for (int i = 0; i < m; ++i) {
    double w = 1.0;
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      w *= eps_ladder[j] / (eps_ladder[j] - eps_ladder[i]);
    }
    acc += w * local_components_fd(p, gen, cfg, eps_ladder[i], sign).xi;
  }
  return TangentVector{p, acc};
}

TangentField field_from_generator(const ComplexMatrix& gen,
                                  const GeometryConfig& cfg) {
  const int n = static_cast<int>(gen.rows()) - 1;
  if (gen.cols() != n + 1 || n < 1)
    throw DimensionMismatch("field_from_generator: generator size");
  const Complex scale = -kI / cfg.hbar;
  std::vector<QuadraticPoly<Complex>> hol;
  hol.reserve(n);
  for (int i = 0; i < n; ++i) {
    auto poly = QuadraticPoly<Complex>::zero(n);
    poly.c0 = scale * gen(i + 1, 0);
    for (int k = 0; k < n; ++k) poly.c1(k) = scale * gen(i + 1, k + 1);
    poly.c1(i) -= scale * gen(0, 0);
    // quadratic part: +(i/hbar) P(0,k) pi^k pi^i, symmetrized
    for (int k = 0; k < n; ++k) {
      const Complex u = -scale * gen(0, k + 1) * 0.5;
      poly.c2(i, k) += u;
      poly.c2(k, i) += u;
    }
    hol.push_back(std::move(poly));
  }
  return make_conjugate_pair_field(std::move(hol));
}

TangentField lie_bracket(const TangentField& x, const TangentField& y) {
  return lie_bracket(x, y, nullptr);
}

TangentField lie_bracket(const TangentField& x, const TangentField& y,
                         double* cubic_residual) {
  if (x.vars() != y.vars()) throw DimensionMismatch("lie_bracket");
  double hol_cubic = 0.0;
  double anti_cubic = 0.0;
  TangentField out;
  out.hol = poly_bracket(x.hol, y.hol, &hol_cubic);
  out.anti = poly_bracket(x.anti, y.anti, &anti_cubic);
  out.conjugate_pair = x.conjugate_pair && y.conjugate_pair;
  if (cubic_residual) *cubic_residual = std::max(hol_cubic, anti_cubic);
  return out;
}

namespace {

QuadraticPoly<Complex> poly1(Complex c0, Complex c1) {
  auto p = QuadraticPoly<Complex>::zero(1);
  p.c0 = c0;
  p.c1(0) = c1;
  return p;
}

QuadraticPoly<Complex> poly1_sq(Complex c0, Complex csq) {
  auto p = QuadraticPoly<Complex>::zero(1);
  p.c0 = c0;
  p.c2(0, 0) = csq;
  return p;
}

// Degree-<=2 polynomial in two variables from explicit monomial coefficients.
QuadraticPoly<Complex> poly2(Complex c0, Complex cz1, Complex cz2, Complex cz1z1,
                             Complex cz1z2, Complex cz2z2) {
  auto p = QuadraticPoly<Complex>::zero(2);
  p.c0 = c0;
  p.c1(0) = cz1;
  p.c1(1) = cz2;
  p.c2(0, 0) = cz1z1;
  p.c2(1, 1) = cz2z2;
  p.c2(0, 1) = cz1z2 * 0.5;
  p.c2(1, 0) = cz1z2 * 0.5;
  return p;
}

TangentField explicit_field(std::vector<QuadraticPoly<Complex>> hol,
                            std::vector<QuadraticPoly<Complex>> anti) {
  TangentField f;
  f.hol = std::move(hol);
  f.anti = std::move(anti);
  f.conjugate_pair = true;
  for (size_t i = 0; i < f.hol.size(); ++i) {
    if (coefficient_distance(f.anti[i], f.hol[i].conjugated()) > 0.0) {
      f.conjugate_pair = false;
      break;
    }
  }
  return f;
}

}  // namespace

std::vector<TangentField> printed_su2_fields(const GeometryConfig& cfg) {
  const double h = cfg.hbar;
  std::vector<TangentField> out;
  // D_x = -(h/2) [ (1 - pi^2) d/dpi - (1 - pi*^2) d/dpi* ]
  out.push_back(explicit_field({poly1_sq(-h / 2, h / 2)},
                               {poly1_sq(h / 2, -h / 2)}));
  // D_y = (h/2) [ (1 + pi^2) d/dpi + (1 + pi*^2) d/dpi* ]
  out.push_back(explicit_field({poly1_sq(h / 2, h / 2)},
                               {poly1_sq(h / 2, h / 2)}));
  // D_z = h [ -pi d/dpi + pi* d/dpi* ]
  out.push_back(explicit_field({poly1(0.0, -h)}, {poly1(0.0, h)}));
  return out;
}

std::vector<TangentField> printed_su3_fields(const GeometryConfig& cfg) {
  const double h = cfg.hbar;
  const Complex ih2 = kI * (h / 2);
  const Complex h2 = Complex(h / 2, 0.0);
  std::vector<TangentField> out;
  const Complex z(0.0, 0.0);
  // D_1
  out.push_back(explicit_field(
      {poly2(-ih2, z, z, ih2, z, z), poly2(z, z, z, z, ih2, z)},
      {poly2(-ih2, z, z, ih2, z, z), poly2(z, z, z, z, ih2, z)}));
  // D_2
  out.push_back(explicit_field(
      {poly2(ih2, z, z, ih2, z, z), poly2(z, z, z, z, ih2, z)},
      {poly2(-ih2, z, z, -ih2, z, z), poly2(z, z, z, z, -ih2, z)}));
  // D_3
  out.push_back(explicit_field(
      {QuadraticPoly<Complex>::zero(2), poly2(z, z, -h2, z, z, z)},
      {QuadraticPoly<Complex>::zero(2), poly2(z, z, -h2, z, z, z)}));
  // D_4
  out.push_back(explicit_field(
      {poly2(z, z, z, z, h2, z), poly2(-h2, z, z, z, z, h2)},
      {poly2(z, z, z, z, h2, z), poly2(-h2, z, z, z, z, h2)}));
  // D_5
  out.push_back(explicit_field(
      {poly2(z, z, z, z, h2, z), poly2(h2, z, z, z, z, h2)},
      {poly2(z, z, z, z, -h2, z), poly2(-h2, z, z, z, z, -h2)}));
  // D_6
  out.push_back(explicit_field(
      {poly2(z, z, -h2, z, z, z), poly2(z, -h2, z, z, z, z)},
      {poly2(z, z, h2, z, z, z), poly2(z, h2, z, z, z, z)}));
  // D_7
  out.push_back(explicit_field(
      {poly2(z, z, -h2, z, z, z), poly2(z, h2, z, z, z, z)},
      {poly2(z, z, h2, z, z, z), poly2(z, -h2, z, z, z, z)}));
  // D_8
  out.push_back(explicit_field(
      {QuadraticPoly<Complex>::zero(2), poly2(z, z, 3 * h, z, z, z)},
      {QuadraticPoly<Complex>::zero(2), poly2(z, z, -3 * h, z, z, z)}));
  return out;
}

AlgebraBasis pauli_basis(double hbar) {
  const double s = hbar / 2.0;
  ComplexMatrix sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, s, s, 0;
  sy << 0, Complex(0, -s), Complex(0, s), 0;
  sz << s, 0, 0, -s;
  return AlgebraBasis{{sx, sy, sz}, {"s_x", "s_y", "s_z"}};
}

AlgebraBasis gell_mann_basis(double hbar) {
  AlgebraBasis b = generalized_basis(3, hbar);
  // generalized_basis emits (sym, antisym) pairs then diagonals; reorder into
  // the conventional lambda_1..lambda_8 sequence.
  AlgebraBasis out;
  const int order[] = {0, 1, 6, 2, 3, 4, 5, 7};
  for (int idx : order) out.generators.push_back(b.generators[idx]);
  out.labels = {"lambda_1", "lambda_2", "lambda_3", "lambda_4",
                "lambda_5", "lambda_6", "lambda_7", "lambda_8"};
  return out;
}

AlgebraBasis generalized_basis(int dim, double hbar) {
  if (dim < 2) throw ConfigInvalid("generalized_basis: dim >= 2");
  const double s = hbar / 2.0;
  AlgebraBasis out;
  for (int j = 0; j < dim; ++j)
    for (int k = j + 1; k < dim; ++k) {
      ComplexMatrix sym = ComplexMatrix::Zero(dim, dim);
      sym(j, k) = s;
      sym(k, j) = s;
      out.generators.push_back(sym);
      out.labels.push_back("sym_" + std::to_string(j) + std::to_string(k));
      ComplexMatrix asym = ComplexMatrix::Zero(dim, dim);
      asym(j, k) = Complex(0, -s);
      asym(k, j) = Complex(0, s);
      out.generators.push_back(asym);
      out.labels.push_back("asym_" + std::to_string(j) + std::to_string(k));
    }
  for (int l = 1; l < dim; ++l) {
    ComplexMatrix d = ComplexMatrix::Zero(dim, dim);
    const double norm = hbar * std::sqrt(1.0 / (2.0 * l * (l + 1)));
    for (int j = 0; j < l; ++j) d(j, j) = norm;
    d(l, l) = -norm * l;
    out.generators.push_back(d);
    out.labels.push_back("diag_" + std::to_string(l));
  }
  return out;
}

GradedSplit graded_split(const AlgebraBasis& basis, int chart) {
  GradedSplit split;
  for (size_t idx = 0; idx < basis.generators.size(); ++idx) {
    const ComplexMatrix& m = basis.generators[idx];
    const int n = static_cast<int>(m.rows());
    if (chart < 0 || chart >= n) throw ConfigInvalid("graded_split: chart");
    ComplexMatrix coset = ComplexMatrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
      if (j == chart) continue;
      coset(chart, j) = m(chart, j);
      coset(j, chart) = m(j, chart);
    }
    const ComplexMatrix iso = m - coset;
    const std::string label =
        idx < basis.labels.size() ? basis.labels[idx] : std::to_string(idx);
    const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
    if (coset.cwiseAbs().maxCoeff() > 1e-14 * scale) {
      split.goldstone.push_back(coset);
      split.goldstone_labels.push_back(label);
    }
    if (iso.cwiseAbs().maxCoeff() > 1e-14 * scale) {
      split.higgs.push_back(iso);
      split.higgs_labels.push_back(label);
    }
  }
  return split;
}

namespace {

// Largest entry of the commutator lying in the forbidden block.
double forbidden_block_residual(const ComplexMatrix& a, const ComplexMatrix& b,
                                int chart, bool forbidden_is_coset) {
  const ComplexMatrix c = a * b - b * a;
  const int n = static_cast<int>(c.rows());
  double r = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const bool coset_entry = (i == chart) != (j == chart);
      if (coset_entry == forbidden_is_coset) r = std::max(r, std::abs(c(i, j)));
    }
  return r;
}

}  // namespace

GradedInclusionResiduals verify_graded_inclusions(const GradedSplit& split,
                                                  int chart) {
  GradedInclusionResiduals res;
  for (const auto& a : split.higgs)
    for (const auto& b : split.higgs)
      res.hh_in_h = std::max(res.hh_in_h,
                             forbidden_block_residual(a, b, chart, true));
  for (const auto& a : split.higgs)
    for (const auto& b : split.goldstone)
      res.hb_in_b = std::max(res.hb_in_b,
                             forbidden_block_residual(a, b, chart, false));
  for (const auto& a : split.goldstone)
    for (const auto& b : split.goldstone)
      res.bb_in_h = std::max(res.bb_in_h,
                             forbidden_block_residual(a, b, chart, true));
  return res;
}

StateVector lift(Complex psi0, const LocalPoint& p_shifted) {
  if (std::abs(psi0) == 0.0) throw ChartUndefined("lift: zero chart amplitude");
  const int n = p_shifted.dim();
  ComplexVector a(n);
  a(p_shifted.chart) = psi0;
  int j = 0;
  for (int i = 0; i < n; ++i) {
    if (i == p_shifted.chart) continue;
    a(i) = psi0 * p_shifted.coords(j++);
  }
  return make_state(a);
}

ComplexVector transport_increment(const TangentVector& xi, const ComplexVector& dpi,
                                  double tau, const GeometryConfig& cfg,
                                  ConnectionVariant variant) {
  const ConnectionAtPoint c = connection(xi.base, cfg, variant);
  return -tau * c.contract(xi.xi, dpi);
}

}  // namespace cpn

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "cpn/types.hpp"

namespace cpn {

// Polynomial of total degree <= 2 in n variables, stored as exact coefficient
// tables: value(z) = c0 + c1 . z + z^T c2 z with c2 symmetric.
template <typename Scalar>
struct QuadraticPoly {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Scalar c0 = Scalar(0);
  Vec c1;
  Mat c2;

  static QuadraticPoly zero(Eigen::Index n) {
    QuadraticPoly p;
    p.c0 = Scalar(0);
    p.c1 = Vec::Zero(n);
    p.c2 = Mat::Zero(n, n);
    return p;
  }

  Eigen::Index vars() const { return c1.size(); }

  Scalar eval(const Vec& z) const {
    Scalar v = c0;
    v += (c1.transpose() * z)(0);
    v += (z.transpose() * c2 * z)(0);
    return v;
  }

  // Partial derivative with respect to variable j as an affine pair (b0, b1).
  void partial(Eigen::Index j, Scalar& b0, Vec& b1) const {
    b0 = c1(j);
    b1 = Scalar(2) * c2.row(j).transpose();
  }

  QuadraticPoly conjugated() const {
    QuadraticPoly p;
    p.c0 = Eigen::numext::conj(c0);
    p.c1 = c1.conjugate();
    p.c2 = c2.conjugate();
    return p;
  }

  double max_abs() const {
    double m = std::abs(c0);
    if (c1.size() > 0) m = std::max(m, c1.cwiseAbs().maxCoeff());
    if (c2.size() > 0) m = std::max(m, c2.cwiseAbs().maxCoeff());
    return m;
  }

  QuadraticPoly& operator+=(const QuadraticPoly& o) {
    c0 += o.c0;
    c1 += o.c1;
    c2 += o.c2;
    return *this;
  }
  QuadraticPoly& operator-=(const QuadraticPoly& o) {
    c0 -= o.c0;
    c1 -= o.c1;
    c2 -= o.c2;
    return *this;
  }
  QuadraticPoly operator*(Scalar s) const {
    QuadraticPoly p;
    p.c0 = c0 * s;
    p.c1 = c1 * s;
    p.c2 = c2 * s;
    return p;
  }
};

template <typename Scalar>
double coefficient_distance(const QuadraticPoly<Scalar>& a,
                            const QuadraticPoly<Scalar>& b) {
  double m = std::abs(a.c0 - b.c0);
  if (a.c1.size() > 0) m = std::max(m, (a.c1 - b.c1).cwiseAbs().maxCoeff());
  if (a.c2.size() > 0) m = std::max(m, (a.c2 - b.c2).cwiseAbs().maxCoeff());
  return m;
}

namespace detail {

// Dense symmetrized cubic coefficient accumulator keyed by sorted index
// triples.  Small n only; used to verify that bracket cubics cancel.
template <typename Scalar>
class CubicAccumulator {
 public:
  explicit CubicAccumulator(Eigen::Index n)
      : n_(n), coeffs_(static_cast<size_t>(n * n * n), Scalar(0)) {}

  void add(Eigen::Index a, Eigen::Index b, Eigen::Index c, Scalar v) {
    Eigen::Index i[3] = {a, b, c};
    std::sort(i, i + 3);
    coeffs_[static_cast<size_t>((i[0] * n_ + i[1]) * n_ + i[2])] += v;
  }

  double max_abs() const {
    double m = 0.0;
    for (const Scalar& v : coeffs_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  Eigen::Index n_;
  std::vector<Scalar> coeffs_;
};

// out += sign * q(z) * (b0 + b1 . z); the cubic part goes to the accumulator.
template <typename Scalar>
void accumulate_product(const QuadraticPoly<Scalar>& q, Scalar b0,
                        const typename QuadraticPoly<Scalar>::Vec& b1,
                        Scalar sign, QuadraticPoly<Scalar>& out,
                        CubicAccumulator<Scalar>& cubic) {
  const Eigen::Index n = q.vars();
  out.c0 += sign * q.c0 * b0;
  out.c1 += sign * (q.c0 * b1 + b0 * q.c1);
  out.c2 += sign * b0 * q.c2;
  // c1 (x) b1, symmetrized
  out.c2 += (sign * Scalar(0.5)) *
            (q.c1 * b1.transpose() + b1 * q.c1.transpose());
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      const Scalar qab = q.c2(a, b);
      if (qab == Scalar(0)) continue;
      for (Eigen::Index c = 0; c < n; ++c) {
        if (b1(c) == Scalar(0)) continue;
        cubic.add(a, b, c, sign * qab * b1(c));
      }
    }
}

}  // namespace detail

// Lie bracket of polynomial vector fields with components X[i], Y[i]:
// [X, Y]^i = sum_k X^k d_k Y^i - Y^k d_k X^i.  The cubic monomials produced
// by the products cancel for the fields handled here; cubic_residual reports
// the largest surviving cubic coefficient so callers can assert it.
template <typename Scalar>
std::vector<QuadraticPoly<Scalar>> poly_bracket(
    const std::vector<QuadraticPoly<Scalar>>& x,
    const std::vector<QuadraticPoly<Scalar>>& y,
    double* cubic_residual = nullptr) {
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  if (y.size() != x.size()) throw DimensionMismatch("poly_bracket: arity");
  std::vector<QuadraticPoly<Scalar>> out(
      x.size(), QuadraticPoly<Scalar>::zero(n));
  double worst_cubic = 0.0;
  typename QuadraticPoly<Scalar>::Vec b1;
  Scalar b0;
  for (Eigen::Index i = 0; i < n; ++i) {
    detail::CubicAccumulator<Scalar> cubic(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      y[i].partial(k, b0, b1);
      detail::accumulate_product(x[k], b0, b1, Scalar(1), out[i], cubic);
      x[i].partial(k, b0, b1);
      detail::accumulate_product(y[k], b0, b1, Scalar(-1), out[i], cubic);
    }
    worst_cubic = std::max(worst_cubic, cubic.max_abs());
  }
  if (cubic_residual) *cubic_residual = worst_cubic;
  return out;
}

}  // namespace cpn

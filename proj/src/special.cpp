#include "cpn/special.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace cpn {

namespace {

const double kQuarterPi = std::atan(1.0);

// Ascending series of J1, valid and fully accurate for |x| <= 12.
double bessel_j1_series(double x) {
  const double q = 0.25 * x * x;
  double term = 0.5 * x;
  double sum = term;
  for (int k = 1; k < 60; ++k) {
    term *= -q / (static_cast<double>(k) * (k + 1));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// Hankel asymptotic expansion of J1 for large x.
double bessel_j1_asymptotic(double x) {
  const double mu = 4.0;  // 4 nu^2 with nu = 1
  double p = 1.0, q = 0.0;
  double term = 1.0;
  const double inv8x = 1.0 / (8.0 * x);
  double prev = std::abs(term);
  for (int k = 1; k < 30; ++k) {
    term *= (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) * inv8x / k;
    const double mag = std::abs(term);
    if (mag > prev) break;  // divergence point of the asymptotic series
    prev = mag;
    if (k % 2 == 1)
      q += (k % 4 == 1 ? term : -term);
    else
      p += (k % 4 == 2 ? -term : term);
    if (mag < 1e-18) break;
  }
  const double chi = x - 3.0 * kQuarterPi;
  return std::sqrt(2.0 / (4.0 * kQuarterPi * x)) *
         (p * std::cos(chi) - q * std::sin(chi));
}

double bessel_i1_series(double x) {
  const double q = 0.25 * x * x;
  double term = 0.5 * x;
  double sum = term;
  for (int k = 1; k < 80; ++k) {
    term *= q / (static_cast<double>(k) * (k + 1));
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

double bessel_i1_asymptotic(double x) {
  const double mu = 4.0;
  double sum = 1.0;
  double term = 1.0;
  const double inv8x = 1.0 / (8.0 * x);
  for (int k = 1; k < 30; ++k) {
    term *= -(mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) * inv8x / k;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return std::exp(x) / std::sqrt(8.0 * kQuarterPi * x) * sum;
}

}  // namespace

double bessel_j1(double x) {
  if (x < 0.0) return -bessel_j1(-x);
  return x <= 12.0 ? bessel_j1_series(x) : bessel_j1_asymptotic(x);
}

double bessel_i1(double x) {
  if (x < 0.0) return -bessel_i1(-x);
  return x <= 30.0 ? bessel_i1_series(x) : bessel_i1_asymptotic(x);
}

double hermite_function(int n, double y) {
  double prev = 0.0;
  double cur = std::pow(4.0 * kQuarterPi, -0.25) * std::exp(-0.5 * y * y);
  for (int k = 0; k < n; ++k) {
    const double next =
        y * std::sqrt(2.0 / (k + 1)) * cur - std::sqrt(k / (k + 1.0)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

HermiteValues hermite_with_derivatives(int n, double y) {
  double prev = 0.0;
  double cur = std::pow(4.0 * kQuarterPi, -0.25) * std::exp(-0.5 * y * y);
  for (int k = 0; k < n; ++k) {
    const double next =
        y * std::sqrt(2.0 / (k + 1)) * cur - std::sqrt(k / (k + 1.0)) * prev;
    prev = cur;
    cur = next;
  }
  HermiteValues v;
  v.phi = cur;
  v.dphi = (n > 0 ? std::sqrt(2.0 * n) * prev : 0.0) - y * cur;
  v.d2phi = (y * y - 2.0 * n - 1.0) * cur;
  return v;
}

RealVector hermite_functions_upto(int n_max, double y) {
  RealVector out(n_max + 1);
  double prev = 0.0;
  double cur = std::pow(4.0 * kQuarterPi, -0.25) * std::exp(-0.5 * y * y);
  out(0) = cur;
  for (int k = 0; k < n_max; ++k) {
    const double next =
        y * std::sqrt(2.0 / (k + 1)) * cur - std::sqrt(k / (k + 1.0)) * prev;
    prev = cur;
    cur = next;
    out(k + 1) = cur;
  }
  return out;
}

GaussHermiteRule gauss_hermite(int order) {
  if (order < 1) throw ConfigInvalid("gauss_hermite: order >= 1");
  RealVector diag = RealVector::Zero(order);
  RealVector sub(std::max(order - 1, 0));
  for (int k = 1; k < order; ++k) sub(k - 1) = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);

  GaussHermiteRule rule;
  rule.nodes = solver.eigenvalues();
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    // Christoffel weight over the orthonormal Hermite functions; this is the
    // e^{y^2}-modified weight, finite even at extreme nodes.  Where the
    // Gaussian factor underflows, every integrand in the targeted class is an
    // exact zero in double precision, so the node is dropped.
    const RealVector phis = hermite_functions_upto(order - 1, rule.nodes(i));
    const double norm2 = phis.squaredNorm();
    rule.weights(i) = norm2 > 0.0 ? 1.0 / norm2 : 0.0;
  }
  return rule;
}

}  // namespace cpn

#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "cpn/geometry.hpp"
#include "oracles.hpp"

using namespace cpn;

namespace {

GeometryConfig unit_config(int dim) {
  GeometryConfig cfg;
  cfg.dim = dim;
  cfg.radius = 1.0;
  cfg.hbar = 1.0;
  return cfg;
}

ComplexVector cvec(std::initializer_list<Complex> vals) {
  ComplexVector v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (const Complex& c : vals) v(i++) = c;
  return v;
}

}  // namespace

TEST_CASE("to_local ratios") {
  const StateVector psi = make_state(cvec({{1, 0}, {0, 0}, {0, 0}}));
  const LocalPoint origin = to_local(psi, 0);
  CHECK(origin.coords.cwiseAbs().maxCoeff() == 0.0);

  const StateVector psi2 = make_state(cvec({{1, 0}, {0, 2}, {-1, 0}}));
  const LocalPoint p2 = to_local(psi2, 0);
  CHECK(std::abs(p2.coords(0) - Complex(0, 2)) < 1e-15);
  CHECK(std::abs(p2.coords(1) - Complex(-1, 0)) < 1e-15);

  const StateVector psi3 = make_state(cvec({{2, 0}, {0, 4}}));
  const LocalPoint p3 = to_local(psi3, 1);
  CHECK(std::abs(p3.coords(0) - Complex(0, -0.5)) < 1e-15);
}

TEST_CASE("to_local rejects a vanishing chart amplitude") {
  const StateVector psi = make_state(cvec({{0, 0}, {1, 0}}));
  CHECK_THROWS_AS(to_local(psi, 0), ChartUndefined);
  CHECK_NOTHROW(to_local(psi, 1));
}

TEST_CASE("from_local basics") {
  const StateVector v = from_local(LocalPoint{0, cvec({{0, 0}, {0, 0}})}, 1.0, 0.0);
  CHECK(std::abs(v.amplitudes(0) - Complex(1, 0)) < 1e-15);
  CHECK(v.amplitudes.tail(2).cwiseAbs().maxCoeff() == 0.0);

  const StateVector w =
      from_local(LocalPoint{0, cvec({{1, 0}})}, std::sqrt(2.0), 0.0);
  CHECK(std::abs(w.amplitudes(0) - Complex(1, 0)) < 1e-14);
  CHECK(std::abs(w.amplitudes(1) - Complex(1, 0)) < 1e-14);
}

TEST_CASE("chart round trip is the identity") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> chart_dist(0, 3);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int chart = chart_dist(rng);
    const LocalPoint p{chart, oracles::random_complex_vector(3, rng, 2.0)};
    const StateVector s = from_local(p, 1.7, 0.4);
    CHECK(std::abs(s.amplitudes.norm() - 1.7) < 1e-13);
    CHECK(std::abs(std::arg(s.amplitudes(chart)) - 0.4) < 1e-14);
    const LocalPoint back = to_local(s, chart);
    worst = std::max(worst, (back.coords - p.coords).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-13);
}

TEST_CASE("metric at the origin is 2 hbar times the identity") {
  for (int dim : {2, 4, 7}) {
    GeometryConfig cfg = unit_config(dim);
    cfg.hbar = 0.8;
    cfg.radius = 3.0;
    const MetricAtPoint g =
        fubini_study_metric(LocalPoint{0, ComplexVector::Zero(dim - 1)}, cfg);
    const ComplexMatrix expected =
        2.0 * cfg.hbar * ComplexMatrix::Identity(dim - 1, dim - 1);
    CHECK((g.g - expected).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("metric scalar value on the projective line") {
  const GeometryConfig cfg = unit_config(2);
  const MetricAtPoint g = fubini_study_metric(LocalPoint{0, cvec({{1, 0}})}, cfg);
  // independent scalar arithmetic: 2 * (2 - 1) / 4
  CHECK(std::abs(g.g(0, 0) - Complex(0.5, 0.0)) < 1e-16);
}

TEST_CASE("unit-radius metric equals the reference formula") {
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const ComplexVector pi = oracles::random_complex_vector(4, rng, 1.5);
    const GeometryConfig cfg = unit_config(5);
    const ComplexMatrix g = fubini_study_metric(LocalPoint{0, pi}, cfg).g;
    const ComplexMatrix ref = oracles::unit_radius_metric_reference(pi, cfg.hbar);
    worst = std::max(worst, (g - ref).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-14);
}

TEST_CASE("metric is hermitian positive definite at random points") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> dim_dist(2, 16);
  std::uniform_real_distribution<double> radius_dist(0.5, 20.0);
  double worst_herm = 0.0;
  double min_eig = 1e300;
  for (int trial = 0; trial < 1000; ++trial) {
    GeometryConfig cfg;
    cfg.dim = dim_dist(rng);
    cfg.radius = radius_dist(rng);
    const ComplexVector pi = oracles::random_complex_vector(cfg.dim - 1, rng, 2.0);
    const ComplexMatrix g = fubini_study_metric(LocalPoint{0, pi}, cfg).g;
    worst_herm = std::max(worst_herm, (g - g.adjoint().eval()).cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(g);
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
  }
  CHECK(worst_herm < 1e-14);
  CHECK(min_eig > 0.0);
}

TEST_CASE("connection values and symmetry") {
  const GeometryConfig cfg = unit_config(2);
  const LocalPoint origin{0, cvec({{0, 0}})};
  CHECK(std::abs(connection(origin, cfg, ConnectionVariant::levi_civita).coeff(0, 0, 0)) == 0.0);
  CHECK(std::abs(connection(origin, cfg, ConnectionVariant::printed).coeff(0, 0, 0)) == 0.0);

  const LocalPoint p{0, cvec({{1, 0}})};
  CHECK(std::abs(connection(p, cfg, ConnectionVariant::levi_civita).coeff(0, 0, 0) -
                 Complex(-1, 0)) < 1e-15);
  CHECK(std::abs(connection(p, cfg, ConnectionVariant::printed).coeff(0, 0, 0) -
                 Complex(-2, 0)) < 1e-15);

  std::mt19937_64 rng(5);
  GeometryConfig cfg4 = unit_config(4);
  cfg4.radius = 2.0;
  const LocalPoint q{0, oracles::random_complex_vector(3, rng)};
  const ConnectionAtPoint c = connection(q, cfg4);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int m = 0; m < 3; ++m)
        CHECK(std::abs(c.coeff(i, k, m) - c.coeff(i, m, k)) == 0.0);
}

TEST_CASE("levi_civita connection matches finite-difference christoffels") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> radius_dist(0.7, 4.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    GeometryConfig cfg;
    cfg.dim = 4;
    cfg.radius = radius_dist(rng);
    const ComplexVector pi = oracles::random_complex_vector(3, rng);
    const ConnectionAtPoint c = connection(LocalPoint{0, pi}, cfg);
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k)
        for (int m = 0; m < 3; ++m) {
          const Complex fd =
              oracles::fd_christoffel(pi, i, k, m, cfg.radius, cfg.hbar);
          worst = std::max(worst, std::abs(fd - c.coeff(i, k, m)));
        }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("covariant derivative") {
  const GeometryConfig cfg = unit_config(3);
  const LocalPoint origin{0, ComplexVector::Zero(2)};
  const ComplexVector v = cvec({{0.3, 0.1}, {-2, 0.5}});
  const TangentVector xi{origin, cvec({{1, 1}, {0, -1}})};
  CHECK((covariant_derivative(xi, v, v, cfg) - v).cwiseAbs().maxCoeff() == 0.0);

  std::mt19937_64 rng(23);
  const LocalPoint p{0, oracles::random_complex_vector(1, rng)};
  const TangentVector zero_xi{p, ComplexVector::Zero(1)};
  CHECK((covariant_derivative(zero_xi, v.head(1), v.head(1), cfg) - v.head(1))
            .cwiseAbs()
            .maxCoeff() == 0.0);

  // scalar recomputation on the projective line
  for (int trial = 0; trial < 20; ++trial) {
    GeometryConfig c1 = unit_config(2);
    c1.radius = 1.3;
    const Complex pi = oracles::random_complex_vector(1, rng)(0);
    const Complex xival = oracles::random_complex_vector(1, rng)(0);
    const Complex dxi = oracles::random_complex_vector(1, rng)(0);
    const Complex dpi = oracles::random_complex_vector(1, rng)(0);
    const Complex gamma =
        -2.0 * std::conj(pi) / (c1.radius * c1.radius + std::norm(pi));
    const Complex expected = dxi + gamma * xival * dpi;
    ComplexVector pvec(1), xvec(1), dxvec(1), dpvec(1);
    pvec << pi;
    xvec << xival;
    dxvec << dxi;
    dpvec << dpi;
    const ComplexVector got =
        covariant_derivative(TangentVector{LocalPoint{0, pvec}, xvec}, dxvec,
                             dpvec, c1);
    CHECK(std::abs(got(0) - expected) < 1e-15);
  }
}

TEST_CASE("geodesic through the origin") {
  GeometryConfig cfg = unit_config(2);
  CHECK(std::abs(geodesic_cp1(0.0, 0.7, cfg)) == 0.0);
  CHECK(std::abs(geodesic_cp1(M_PI / 4, 0.0, cfg) - Complex(1, 0)) < 1e-15);
  CHECK_THROWS_AS(geodesic_cp1(M_PI / 2, 0.0, cfg), NearPole);

  // finite-difference residual of the geodesic equation, both variants
  cfg.radius = 1.4;
  const double alpha = 0.6;
  const auto curve = [&](double l) { return geodesic_cp1(l, alpha, cfg); };
  double worst_lc = 0.0, worst_printed = 0.0;
  for (double l = -1.2; l <= 1.2001; l += 0.08) {
    const Complex d1 = oracles::fd_first(curve, l, 6.4e-3);
    const Complex d2 = oracles::fd_second(curve, l, 6.4e-3);
    const Complex pi = curve(l);
    const double denom = cfg.radius * cfg.radius + std::norm(pi);
    const Complex res_lc = d2 - 2.0 * std::conj(pi) / denom * d1 * d1;
    const Complex res_printed = d2 - 4.0 * std::conj(pi) / denom * d1 * d1;
    worst_lc = std::max(worst_lc, std::abs(res_lc));
    worst_printed = std::max(worst_printed, std::abs(res_printed));
  }
  CHECK(worst_lc < 1e-9);
  CHECK(worst_printed > 1e-2);  // reported: the printed coefficient fails
}

TEST_CASE("theta ode") {
  GeometryConfig cfg = unit_config(2);
  cfg.radius = 5.0;

  SUBCASE("zero initial rate is constant") {
    const ThetaOdeResult r = integrate_theta_ode(cfg, 0.7, 0.0, 10.0, 100);
    CHECK((r.theta.array() - 0.7).abs().maxCoeff() == 0.0);
  }

  SUBCASE("approach to pi/2 at large radius and length") {
    GeometryConfig big = cfg;
    big.radius = 100.0;
    const ThetaOdeResult r = integrate_theta_ode(big, 0.0, 1.0, 300.0, 300000);
    CHECK(std::abs(r.theta(r.theta.size() - 1) - M_PI / 2) < 1e-2);
    // monotone, bounded
    for (Eigen::Index i = 1; i < r.theta.size(); ++i) {
      CHECK(r.theta(i) >= r.theta(i - 1));
      CHECK(r.theta(i) < M_PI / 2);
    }
  }

  SUBCASE("step halving self-consistency") {
    const ThetaOdeResult coarse = integrate_theta_ode(cfg, 0.2, 0.8, 6.0, 6000);
    const ThetaOdeResult fine = integrate_theta_ode(cfg, 0.2, 0.8, 6.0, 12000);
    CHECK(std::abs(coarse.theta(coarse.theta.size() - 1) -
                   fine.theta(fine.theta.size() - 1)) < 1e-8);
  }
}

TEST_CASE("angle to the vacuum ray") {
  GeometryConfig cfg = unit_config(3);
  cfg.radius = 2.0;
  const double r = cfg.radius;
  CHECK(fs_geodesic_angle(make_state(cvec({{r, 0}, {0, 0}, {0, 0}})), cfg) == 0.0);
  CHECK(std::abs(fs_geodesic_angle(make_state(cvec({{0, 0}, {r, 0}, {0, 0}})), cfg) -
                 M_PI / 2) < 1e-15);
  const double inv = r / std::sqrt(2.0);
  CHECK(std::abs(fs_geodesic_angle(make_state(cvec({{inv, 0}, {inv, 0}, {0, 0}})), cfg) -
                 M_PI / 4) < 1e-14);
}

#include <doctest.h>

#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "cpn/flow.hpp"
#include "cpn/geometry.hpp"
#include "oracles.hpp"

using namespace cpn;

namespace {

ComplexVector cvec(std::initializer_list<Complex> vals) {
  ComplexVector v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (const Complex& c : vals) v(i++) = c;
  return v;
}

}  // namespace

TEST_CASE("generator patterns") {
  const ComplexVector zero = ComplexVector::Zero(3);
  CHECK(build_generator(zero).m.cwiseAbs().maxCoeff() == 0.0);

  const GeneratorMatrix b = build_generator(cvec({{1, 0}, {0, 0}}));
  CHECK(b.m(0, 1) == Complex(1, 0));
  CHECK(b.m(1, 0) == Complex(1, 0));
  CHECK(b.m.cwiseAbs().sum() == 2.0);

  const GeneratorMatrix k = generator_k(cvec({{1, 0}}));
  CHECK(k.m(0, 1) == Complex(-1, 0));
  CHECK(k.m(1, 0) == Complex(1, 0));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexVector f = oracles::random_complex_vector(4, rng);
    const ComplexMatrix bm = build_generator(f).m;
    const ComplexMatrix km = generator_k(f).m;
    CHECK((bm - bm.adjoint().eval()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((km + km.adjoint().eval()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("flow matrix closed form") {
  SUBCASE("zero parameter gives the identity") {
    const FlowSpec spec = make_flow_spec(cvec({{0.3, 0.4}, {1, 0}}), 0.0);
    CHECK((flow_matrix(spec).u - ComplexMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() ==
          0.0);
  }
  SUBCASE("zero direction gives the identity") {
    const FlowSpec spec = make_flow_spec(ComplexVector::Zero(2), 1.7);
    CHECK((flow_matrix(spec).u - ComplexMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() ==
          0.0);
  }
  SUBCASE("quarter turn on two levels") {
    const FlowSpec spec = make_flow_spec(cvec({{1, 0}}), M_PI / 2);
    ComplexMatrix expected(2, 2);
    expected << 0, -1, 1, 0;
    CHECK((flow_matrix(spec).u - expected).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("periodicity") {
    std::mt19937_64 rng(9);
    const ComplexVector f = oracles::random_complex_vector(3, rng);
    const double g = f.norm();
    const double tau = 0.37;
    const ComplexMatrix a = flow_matrix(make_flow_spec(f, tau)).u;
    const ComplexMatrix b = flow_matrix(make_flow_spec(f, tau + 2.0 * M_PI / g)).u;
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("flow is unitary across dimensions") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> tau_dist(0.0, 10.0);
  for (int dim : {2, 8, 64}) {
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const ComplexVector f = oracles::random_complex_vector(dim - 1, rng);
      const FlowSpec spec = make_flow_spec(f, tau_dist(rng));
      worst = std::max(worst, flow_matrix(spec).unitarity_defect());
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("flow equals the exponential of the skew generator") {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> tau_dist(0.0, 4.0);

  SUBCASE("library scaling-and-squaring exponential") {
    for (int dim : {2, 5, 17, 64}) {
      double worst = 0.0;
      for (int trial = 0; trial < 10; ++trial) {
        const ComplexVector f = oracles::random_complex_vector(dim - 1, rng);
        const double tau = tau_dist(rng);
        const ComplexMatrix t = flow_matrix(make_flow_spec(f, tau)).u;
        const ComplexMatrix e = (tau * generator_k(f).m).exp();
        worst = std::max(worst, (t - e).cwiseAbs().maxCoeff());
      }
      CHECK(worst < 1e-8);
    }
  }

  SUBCASE("series expm with remainder bound, eight levels") {
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const ComplexVector f = oracles::random_complex_vector(7, rng);
      const double tau = tau_dist(rng);
      const ComplexMatrix t = flow_matrix(make_flow_spec(f, tau)).u;
      double remainder = 0.0;
      const ComplexMatrix e = oracles::expm_series(tau * generator_k(f).m, &remainder);
      CHECK(remainder < 1e-14);
      worst = std::max(worst, (t - e).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-10);
  }

  SUBCASE("the hermitian generator with an i factor is a different flow") {
    const ComplexVector f = cvec({{0.8, 0.3}});
    const double tau = 0.9;
    const ComplexMatrix t = flow_matrix(make_flow_spec(f, tau)).u;
    const ComplexMatrix eb = (Complex(0, tau) * build_generator(f).m).exp();
    CHECK((t - eb).cwiseAbs().maxCoeff() > 0.1);
  }
}

TEST_CASE("vacuum gauge") {
  SUBCASE("already vacuum form") {
    const StateVector phi = vacuum_state(4, 2.0, 0.3);
    const UnitaryMatrix g = vacuum_gauge(phi);
    CHECK((g.u - ComplexMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("swap on two levels") {
    const double r = 1.6;
    const StateVector phi = make_state(cvec({{0, 0}, {r, 0}}));
    const UnitaryMatrix g = vacuum_gauge(phi);
    ComplexMatrix expected(2, 2);
    expected << 0, 1, -1, 0;
    CHECK((g.u - expected).cwiseAbs().maxCoeff() < 1e-14);
    const ComplexVector mapped = g.u * phi.amplitudes;
    CHECK(std::abs(mapped(0) - Complex(r, 0)) < 1e-14);
    CHECK(std::abs(mapped(1)) < 1e-14);
  }
  SUBCASE("unitarity and the vacuum-form image on random states") {
    std::mt19937_64 rng(77);
    double worst_unit = 0.0, worst_form = 0.0, worst_fix = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const StateVector phi = make_state(oracles::random_complex_vector(5, rng));
      const UnitaryMatrix g = vacuum_gauge(phi);
      worst_unit = std::max(worst_unit, g.unitarity_defect());
      const ComplexVector mapped = g.u * phi.amplitudes;
      const double omega = std::arg(phi.amplitudes(0));
      worst_form = std::max(
          worst_form,
          std::abs(mapped(0) - std::polar(phi.radius, omega)));
      worst_form = std::max(worst_form, mapped.tail(4).cwiseAbs().maxCoeff());
      // identity action on the orthogonal complement of span{phi, e0}
      ComplexVector probe = oracles::random_complex_vector(5, rng);
      probe -= phi.amplitudes * (phi.amplitudes.dot(probe) /
                                 phi.amplitudes.squaredNorm());
      ComplexVector e0 = ComplexVector::Zero(5);
      e0(0) = 1.0;
      ComplexVector reduced = e0 - phi.amplitudes * (phi.amplitudes.dot(e0) /
                                                     phi.amplitudes.squaredNorm());
      probe -= reduced * (reduced.dot(probe) / reduced.squaredNorm());
      worst_fix = std::max(worst_fix, (g.u * probe - probe).cwiseAbs().maxCoeff());
    }
    CHECK(worst_unit < 1e-12);
    CHECK(worst_form < 1e-12);
    CHECK(worst_fix < 1e-12);
  }
}

TEST_CASE("coset extraction") {
  SUBCASE("balanced two-level state") {
    const double r = 2.0;
    const double inv = r / std::sqrt(2.0);
    const FlowSpec spec = extract_coset(make_state(cvec({{inv, 0}, {inv, 0}})), 1.0);
    CHECK(std::abs(spec.theta - M_PI / 4) < 1e-14);
    CHECK(std::abs(spec.f(0) - Complex(1, 0)) < 1e-14);
    CHECK(std::abs(spec.tau - M_PI / 4) < 1e-14);
  }
  SUBCASE("orthogonal state") {
    const FlowSpec spec = extract_coset(make_state(cvec({{0, 0}, {0, 1.5}})), 2.0);
    CHECK(std::abs(spec.theta - M_PI / 2) < 1e-14);
    CHECK(std::abs(spec.f.norm() - 2.0) < 1e-14);
  }
  SUBCASE("vacuum rejection") {
    CHECK_THROWS_AS(extract_coset(vacuum_state(3, 1.0), 1.0), AtVacuum);
  }
  SUBCASE("flow applied to the vacuum reconstructs the state") {
    std::mt19937_64 rng(123);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const StateVector phi = make_state(oracles::random_complex_vector(6, rng));
      const FlowSpec spec = extract_coset(phi, 1.4);
      const ComplexVector rebuilt =
          flow_matrix(spec).u * vacuum_state(6, phi.radius).amplitudes;
      worst = std::max(worst, phase_aligned_distance(phi.amplitudes, rebuilt));
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("geodesic deformation of coefficients") {
  std::mt19937_64 rng(31);
  const ComplexVector coeffs = oracles::random_complex_vector(5, rng);
  const StateVector phi = make_state(coeffs);
  const UnitaryMatrix gauge = vacuum_gauge(phi);
  const ComplexVector f = oracles::random_complex_vector(4, rng);

  SUBCASE("zero parameter is the identity") {
    const ComplexVector out = geodesic_deform(coeffs, make_flow_spec(f, 0.0), gauge);
    CHECK((out - coeffs).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("full period is the identity") {
    const double g = f.norm();
    const ComplexVector out =
        geodesic_deform(coeffs, make_flow_spec(f, 2.0 * M_PI / g), gauge);
    CHECK((out - coeffs).cwiseAbs().maxCoeff() < 1e-13);
  }
  SUBCASE("norm conservation across a parameter sweep") {
    for (double tau = 0.0; tau < 6.0; tau += 0.37) {
      const ComplexVector out = geodesic_deform(coeffs, make_flow_spec(f, tau), gauge);
      CHECK(std::abs(out.norm() - coeffs.norm()) < 1e-12);
    }
  }
  SUBCASE("dimension mismatch is rejected") {
    const ComplexVector short_f = oracles::random_complex_vector(2, rng);
    CHECK_THROWS_AS(geodesic_deform(coeffs, make_flow_spec(short_f, 0.1), gauge),
                    DimensionMismatch);
  }
}

TEST_CASE("polarization operator") {
  std::mt19937_64 rng(41);
  SUBCASE("hermitian with the ladder spectrum") {
    for (int trial = 0; trial < 25; ++trial) {
      const StateVector phi = make_state(oracles::random_complex_vector(5, rng));
      const double g = 1.3;
      const GeneratorMatrix p = polarization_operator(phi, g);
      CHECK((p.m - p.m.adjoint().eval()).cwiseAbs().maxCoeff() < 1e-12);
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(p.m);
      RealVector ev = es.eigenvalues();
      std::sort(ev.data(), ev.data() + ev.size());
      CHECK(std::abs(ev(0) + g) < 1e-12);
      CHECK(std::abs(ev(ev.size() - 1) - g) < 1e-12);
      for (Eigen::Index i = 1; i + 1 < ev.size(); ++i) CHECK(std::abs(ev(i)) < 1e-12);
    }
  }
  SUBCASE("gauge-trivial case reduces to the ladder generator") {
    // real positive head: the vacuum gauge is a rotation in span{phi, e0}
    const StateVector phi = make_state(cvec({{1, 0}, {0.6, 0}}));
    const FlowSpec spec = extract_coset(phi, 1.0);
    const GeneratorMatrix direct = build_generator(spec.f);
    const GeneratorMatrix p = polarization_operator(phi, 1.0);
    // same spectrum and hermiticity; equality holds when the gauge commutes
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> ea(direct.m), eb(p.m);
    CHECK((ea.eigenvalues() - eb.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("vacuum propagates") {
    CHECK_THROWS_AS(polarization_operator(vacuum_state(3, 1.0), 1.0), AtVacuum);
  }
}

TEST_CASE("coset coordinates") {
  GeometryConfig cfg;
  cfg.dim = 2;
  cfg.radius = 1.0;
  SUBCASE("zero parameter is the origin") {
    const ComplexVector pi =
        coset_coordinates(make_flow_spec(cvec({{1, 0}}), 0.0), cfg);
    CHECK(pi.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("unit direction quarter turn") {
    const ComplexVector pi =
        coset_coordinates(make_flow_spec(cvec({{1, 0}}), M_PI / 4), cfg);
    CHECK(std::abs(pi(0) - Complex(1, 0)) < 1e-14);
  }
  SUBCASE("pole rejection") {
    CHECK_THROWS_AS(coset_coordinates(make_flow_spec(cvec({{1, 0}}), M_PI / 2), cfg),
                    NearPole);
  }
  SUBCASE("agrees with the chart coordinates of the flowed vacuum at unit radius") {
    std::mt19937_64 rng(61);
    GeometryConfig cfg4;
    cfg4.dim = 4;
    cfg4.radius = 1.0;
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      ComplexVector f = oracles::random_complex_vector(3, rng);
      f *= 1.2 / f.norm();
      const FlowSpec spec = make_flow_spec(f, 1.0);  // theta = 1.2 < pi/2
      const ComplexVector direct = coset_coordinates(spec, cfg4);
      const StateVector flowed =
          make_state(flow_matrix(spec).u * vacuum_state(4, 1.0).amplitudes);
      const LocalPoint p = to_local(flowed, 0);
      worst = std::max(worst, (direct - p.coords).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-10);
  }
}

#include <doctest.h>

#include <random>

#include "cpn/kg.hpp"
#include "oracles.hpp"

using namespace cpn;

namespace {

struct PerturbationFixture {
  ComplexVector psi;
  TangentVector xi;
  ComplexVector dpi;

  explicit PerturbationFixture(int modes, std::mt19937_64& rng)
      : psi(oracles::random_complex_vector(modes, rng)),
        xi{LocalPoint{0, oracles::random_complex_vector(modes - 1, rng, 0.6)},
           oracles::random_complex_vector(modes - 1, rng)},
        dpi(oracles::random_complex_vector(modes - 1, rng)) {}
};

RealVector linspace(double lo, double hi, int n) {
  RealVector v(n);
  for (int i = 0; i < n; ++i) v(i) = lo + (hi - lo) * i / (n - 1);
  return v;
}

// Kernel-matrix route for the Lagrangian density, assembled mode pair by
// mode pair from the basis derivatives.
double lagrangian_by_kernels(const ComplexVector& c, const Eigen::Vector3d& x,
                             double t, const FieldParams& params) {
  const int m = static_cast<int>(c.size());
  const double y = (t * t - x.squaredNorm()) / (params.r0 * params.r0);
  Complex acc(0, 0);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const BasisDerivatives da = basis_derivatives(a, x, t, params);
      const BasisDerivatives db = basis_derivatives(b, x, t, params);
      const Complex kernel =
          da.time_derivative * db.time_derivative -
          da.gradient.dot(db.gradient.conjugate()) -
          params.alpha * params.alpha * hermite_function(a, y) *
              hermite_function(b, y);
      acc += std::conj(c(a)) * kernel * c(b);
    }
  return acc.real();
}

}  // namespace

TEST_CASE("coefficient perturbation") {
  std::mt19937_64 rng(83);
  GeometryConfig cfg;
  cfg.dim = 6;
  cfg.radius = 20.0;
  PerturbationFixture fx(6, rng);

  SUBCASE("vanishes at zero parameter and zero tangent") {
    CHECK(delta_psi(fx.psi, fx.xi, fx.dpi, 0.0, 1.0, cfg).cwiseAbs().maxCoeff() ==
          0.0);
    const TangentVector zero_xi{fx.xi.base, ComplexVector::Zero(5)};
    for (DeltaForm form : {DeltaForm::small_tau, DeltaForm::general}) {
      CHECK(delta_psi(fx.psi, zero_xi, fx.dpi, 0.7, 1.0, cfg,
                      ConnectionVariant::levi_civita, form)
                .cwiseAbs()
                .maxCoeff() == 0.0);
    }
  }
  SUBCASE("chart amplitude is never perturbed") {
    for (DeltaForm form : {DeltaForm::small_tau, DeltaForm::general}) {
      const ComplexVector d = delta_psi(fx.psi, fx.xi, fx.dpi, 0.4, 1.2, cfg,
                                        ConnectionVariant::levi_civita, form);
      CHECK(std::abs(d(0)) == 0.0);
      CHECK(d.cwiseAbs().maxCoeff() > 0.0);
    }
  }
  SUBCASE("falls off as the inverse square of the radius") {
    for (DeltaForm form : {DeltaForm::small_tau, DeltaForm::general}) {
      std::vector<double> lr, ln;
      for (double r = 10.0; r <= 1e4; r *= std::pow(10.0, 0.25)) {
        GeometryConfig c = cfg;
        c.radius = r;
        const double norm = delta_psi(fx.psi, fx.xi, fx.dpi, 0.4, 1.2, c,
                                      ConnectionVariant::levi_civita, form)
                                .norm();
        lr.push_back(std::log(r));
        ln.push_back(std::log(norm));
      }
      // least-squares slope
      const int n = static_cast<int>(lr.size());
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (int i = 0; i < n; ++i) {
        sx += lr[i];
        sy += ln[i];
        sxx += lr[i] * lr[i];
        sxy += lr[i] * ln[i];
      }
      const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      CHECK(std::abs(slope + 2.0) < 0.05);
    }
  }
  SUBCASE("pipeline from coefficients") {
    GeometryConfig c = cfg;
    c.radius = 15.0;
    GeodesicPerturbationParams params;
    params.tau = 0.2;
    const Perturbation p = geodesic_perturbation(fx.psi, c, params);
    CHECK(p.delta_coeffs.allFinite());
    CHECK(std::abs(p.delta_coeffs(0)) == 0.0);
    CHECK(p.delta_coeffs.cwiseAbs().maxCoeff() > 0.0);
  }
}

TEST_CASE("perturbed lagrangian density") {
  std::mt19937_64 rng(89);
  FieldParams params;
  const int m = 6;
  const ComplexVector psi = oracles::random_complex_vector(m, rng);
  const ComplexVector delta = oracles::random_complex_vector(m, rng, 0.05);
  const Eigen::Vector3d x(0.4, -0.2, 0.3);
  const double t = 0.8;

  SUBCASE("real and equal to the kernel-matrix route") {
    const double direct = perturbed_lagrangian(psi, delta, x, t, params);
    const double kernels = lagrangian_by_kernels(psi + delta, x, t, params);
    CHECK(std::abs(direct - kernels) < 1e-12 * std::max(1.0, std::abs(direct)));
  }
  SUBCASE("unperturbed density through the expansion") {
    const ComplexVector zero = ComplexVector::Zero(m);
    const double direct = perturbed_lagrangian(psi, zero, x, t, params);
    const double kernels = lagrangian_by_kernels(psi, x, t, params);
    CHECK(std::abs(direct - kernels) < 1e-10 * std::max(1.0, std::abs(direct)));
  }
  SUBCASE("directional derivative matches central differences") {
    const ComplexVector eta = oracles::random_complex_vector(m, rng);
    const double eps = 1e-5;
    const double fd = (perturbed_lagrangian(psi, delta + eps * eta, x, t, params) -
                       perturbed_lagrangian(psi, delta - eps * eta, x, t, params)) /
                      (2 * eps);
    // analytic first-order change through the kernel bilinear
    const double lp = lagrangian_by_kernels(psi + delta + eps * eta, x, t, params);
    const double lm = lagrangian_by_kernels(psi + delta - eps * eta, x, t, params);
    CHECK(std::abs(fd - (lp - lm) / (2 * eps)) <
          1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("generalized residual operator") {
  FieldParams params;
  const RealVector grid = linspace(0.05, 2.8, 40);

  SUBCASE("zero field gives a zero residual") {
    const ComplexVector zero = ComplexVector::Zero(8);
    CHECK(kg_residual(zero, nullptr, params, grid).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("code-path equality with the linear operator") {
    std::mt19937_64 rng(97);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const ComplexVector coeffs = oracles::random_complex_vector(16, rng);
      const ComplexVector a = kg_residual(coeffs, nullptr, params, grid);
      const ComplexVector b = linear_kg_residual(coeffs, params, grid);
      worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-12);
    // an explicitly zero delta map follows the same path
    const ComplexVector coeffs = oracles::random_complex_vector(16, rng);
    const DeltaMap zero_map = [](const ComplexVector& c) {
      return ComplexVector::Zero(c.size()).eval();
    };
    CHECK((kg_residual(coeffs, zero_map, params, grid) -
           linear_kg_residual(coeffs, params, grid))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
  SUBCASE("linear reduction on the expanded radial solution") {
    ExpandOptions opt;
    opt.strict = false;
    const ModeExpansion bessel = expand_lommel(24, params, opt);
    const ComplexVector a = kg_residual(bessel.coeffs, nullptr, params, grid);
    const ComplexVector b = linear_kg_residual(bessel.coeffs, params, grid);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-6);
  }
  SUBCASE("anti-linearity in the conjugated block") {
    std::mt19937_64 rng(101);
    const ComplexVector coeffs = oracles::random_complex_vector(10, rng);
    const Complex scale(0.7, -1.3);
    const ComplexVector a = kg_residual(scale * coeffs, nullptr, params, grid);
    const ComplexVector b =
        std::conj(scale) * kg_residual(coeffs, nullptr, params, grid);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-13);
  }
  SUBCASE("grid guards") {
    const ComplexVector coeffs = ComplexVector::Ones(4);
    CHECK_THROWS_AS(kg_residual(coeffs, nullptr, params, RealVector()),
                    GridTooCoarse);
  }
}

TEST_CASE("stencil residual on exact samples converges at second order") {
  FieldParams params;
  params.alpha = 2.5;  // order-one derivatives keep truncation above roundoff
  const auto exact = [&](double rho) { return lommel_solution(params, rho); };
  const auto residual_at = [&](int n) {
    ScalarFieldProfile p;
    p.grid = linspace(0.5, 10.0, n);
    p.values.resize(n);
    for (int i = 0; i < n; ++i) p.values(i) = exact(p.grid(i));
    p.params = params;
    return radial_residual_fd(p).cwiseAbs().maxCoeff();
  };
  const double coarse = residual_at(101);
  const double fine = residual_at(201);
  CHECK(coarse / fine > 3.0);  // second-order stencils gain ~4x
  CHECK(coarse / fine < 5.5);
  CHECK_THROWS_AS(
      [&] {
        ScalarFieldProfile p;
        p.grid = linspace(0, 1, 3);
        p.values = ComplexVector::Zero(3);
        p.params = params;
        radial_residual_fd(p);
      }(),
      GridTooCoarse);
}

TEST_CASE("droplet solver") {
  FieldParams params;
  ExpandOptions opt;
  opt.strict = false;
  const ModeExpansion init = expand_lommel(20, params, opt);
  const RealVector grid = linspace(0.05, 2.8, 50);

  SUBCASE("no iterations returns the initial data with its residual") {
    GeometryConfig cfg;
    cfg.dim = 20;
    cfg.radius = 50.0;
    DropletScheme scheme;
    scheme.max_iter = 0;
    scheme.damping = 1.0;
    const DropletSolution sol = solve_droplet(params, cfg, init, scheme, grid);
    CHECK((sol.coeffs - init.coeffs).cwiseAbs().maxCoeff() == 0.0);
    CHECK(sol.iterations == 0);
    CHECK(std::isfinite(sol.pde_residual_l2));
  }
  SUBCASE("large radius reproduces the linear solution") {
    GeometryConfig cfg;
    cfg.dim = 20;
    cfg.radius = 1e6;
    DropletScheme scheme;
    scheme.max_iter = 30;
    const DropletSolution sol = solve_droplet(params, cfg, init, scheme, grid);
    CHECK(sol.converged);
    CHECK((sol.coeffs - init.coeffs).norm() / init.coeffs.norm() < 1e-4);
  }
  SUBCASE("physical radius terminates and reports diagnostics") {
    GeometryConfig cfg;
    cfg.dim = 20;
    cfg.radius = std::sqrt(1.0 / params.alpha);
    DropletScheme scheme;
    scheme.max_iter = 25;
    const DropletSolution sol = solve_droplet(params, cfg, init, scheme, grid);
    CHECK(sol.iterations <= 25);
    CHECK(std::isfinite(sol.fixed_point_residual));
    CHECK(std::isfinite(sol.pde_residual_l2));
    CHECK(std::isfinite(sol.effective_width));
    CHECK(std::isfinite(sol.action_estimate));
    CHECK(sol.l2_norm > 0.0);
    MESSAGE("physical-radius droplet: converged=", sol.converged,
            " fixed-point residual=", sol.fixed_point_residual,
            " pde residual=", sol.pde_residual_l2,
            " width=", sol.effective_width);
  }
}

#include "cpn/checks.hpp"

#include <random>

#include <Eigen/Eigenvalues>

#include "cpn/dynvars.hpp"
#include "cpn/field.hpp"
#include "cpn/flow.hpp"
#include "cpn/geometry.hpp"
#include "cpn/kg.hpp"
#include "cpn/special.hpp"

namespace cpn {

namespace {

ComplexVector random_complex_vector(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  ComplexVector v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(dist(rng), dist(rng));
  return v;
}

ComplexMatrix random_hermitian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(dist(rng), dist(rng));
  return 0.5 * (m + m.adjoint().eval());
}

}  // namespace

std::vector<CheckResult> run_invariant_checks(int dim, std::uint64_t seed) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(seed);
  GeometryConfig cfg;
  cfg.dim = dim;
  cfg.radius = 1.0;

  const auto push = [&out](const std::string& name, double value, double threshold) {
    out.push_back(CheckResult{name, value, threshold, value < threshold});
  };

  {
    double worst_herm = 0.0, worst_eig = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const LocalPoint p{0, random_complex_vector(dim - 1, rng)};
      const ComplexMatrix g = fubini_study_metric(p, cfg).g;
      worst_herm = std::max(worst_herm, (g - g.adjoint().eval()).cwiseAbs().maxCoeff());
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(g);
      worst_eig = std::max(worst_eig, -es.eigenvalues().minCoeff());
    }
    push("metric hermitian", worst_herm, 1e-14);
    push("metric positive definite (negative part)", worst_eig, 1e-14);
  }
  {
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const LocalPoint p{0, random_complex_vector(dim - 1, rng)};
      const StateVector s = from_local(p, 2.5, 0.3);
      const LocalPoint back = to_local(s, 0);
      worst = std::max(worst, (back.coords - p.coords).norm());
      worst = std::max(worst, std::abs(s.amplitudes.norm() - 2.5));
    }
    push("chart round trip", worst, 1e-13);
  }
  {
    double worst_unit = 0.0, worst_recon = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const ComplexVector f = random_complex_vector(dim - 1, rng);
      std::uniform_real_distribution<double> tau_dist(0.0, 6.0);
      const FlowSpec spec = make_flow_spec(f, tau_dist(rng));
      worst_unit = std::max(worst_unit, flow_matrix(spec).unitarity_defect());

      const StateVector phi = make_state(random_complex_vector(dim, rng));
      try {
        const FlowSpec back = extract_coset(phi, 1.0);
        const UnitaryMatrix t = flow_matrix(back);
        ComplexVector rebuilt =
            t.u * vacuum_state(dim, phi.radius).amplitudes;
        worst_recon = std::max(
            worst_recon, phase_aligned_distance(phi.amplitudes, rebuilt));
      } catch (const AtVacuum&) {
      }
    }
    push("flow unitarity", worst_unit, 1e-10);
    push("coset reconstruction", worst_recon, 1e-10);
  }
  {
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const ComplexMatrix p = random_hermitian(dim, rng);
      const ComplexMatrix q = random_hermitian(dim, rng);
      const TangentField dp = field_from_generator(p, cfg);
      const TangentField dq = field_from_generator(q, cfg);
      double cubic = 0.0;
      const TangentField bracket = lie_bracket(dp, dq, &cubic);
      const ComplexMatrix comm = Complex(0.0, 1.0 / cfg.hbar) * (p * q - q * p);
      worst = std::max(worst, field_distance(bracket, field_from_generator(comm, cfg)));
      worst = std::max(worst, cubic);
    }
    push("generator field bracket closure", worst, 1e-12);
    const ComplexMatrix eye = ComplexMatrix::Identity(dim, dim);
    double idmax = 0.0;
    for (const auto& poly : field_from_generator(eye, cfg).hol)
      idmax = std::max(idmax, poly.max_abs());
    push("identity generator descends to zero", idmax, 1e-15);
  }
  {
    double worst = 0.0;
    const GaussHermiteRule rule = gauss_hermite(64);
    for (int m = 0; m <= 20; ++m)
      for (int n = 0; n <= 20; ++n) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < rule.nodes.size(); ++i)
          acc += rule.weights(i) * hermite_function(m, rule.nodes(i)) *
                 hermite_function(n, rule.nodes(i));
        worst = std::max(worst, std::abs(acc - (m == n ? 1.0 : 0.0)));
      }
    push("hermite orthonormality (n <= 20)", worst, 1e-10);
  }
  {
    FieldParams fp;
    const auto f3 = [](double y) { return Complex(hermite_function(3, y), 0.0); };
    const ModeExpansion e = expand(f3, 8, fp);
    ComplexVector unit = ComplexVector::Zero(8);
    unit(3) = Complex(1.0, 0.0);
    push("expansion of a basis function", (e.coeffs - unit).cwiseAbs().maxCoeff(),
         1e-10);
  }
  {
    GeometryConfig kcfg;
    kcfg.dim = dim;
    const int m = dim;
    const ComplexVector psi = random_complex_vector(m, rng);
    const LocalPoint base{0, random_complex_vector(m - 1, rng, 0.3)};
    const TangentVector xi{base, random_complex_vector(m - 1, rng)};
    const ComplexVector dpi = random_complex_vector(m - 1, rng);
    double worst = 0.0;
    kcfg.radius = 25.0;
    worst = std::max(worst,
                     delta_psi(psi, xi, dpi, 0.0, 1.0, kcfg).cwiseAbs().maxCoeff());
    const TangentVector zero_xi{base, ComplexVector::Zero(m - 1)};
    worst = std::max(
        worst, delta_psi(psi, zero_xi, dpi, 0.5, 1.0, kcfg).cwiseAbs().maxCoeff());
    push("perturbation vanishes at tau = 0 and xi = 0", worst, 1e-300);

    const auto norm_at = [&](double r) {
      GeometryConfig c2 = kcfg;
      c2.radius = r;
      return delta_psi(psi, xi, dpi, 0.5, 1.0, c2).norm();
    };
    const double slope = std::log(norm_at(1000.0) / norm_at(100.0)) /
                         std::log(1000.0 / 100.0);
    push("perturbation falls as R^-2 (|slope + 2|)", std::abs(slope + 2.0), 0.05);
  }
  return out;
}

}  // namespace cpn

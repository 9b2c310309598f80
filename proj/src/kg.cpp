#include "cpn/kg.hpp"

#include <cmath>
#include <limits>

namespace cpn {

namespace {

const Complex kI(0.0, 1.0);

}  // namespace

ComplexVector delta_psi(const ComplexVector& psi, const TangentVector& xi,
                        const ComplexVector& dpi, double tau, double g,
                        const GeometryConfig& cfg, ConnectionVariant variant,
                        DeltaForm form) {
  const int m = static_cast<int>(psi.size());
  if (xi.xi.size() != m - 1 || dpi.size() != m - 1)
    throw DimensionMismatch("delta_psi: tangent data must have size modes-1");
  ComplexVector delta = ComplexVector::Zero(m);
  if (tau == 0.0) return delta;
  const Complex psi0 = psi(0);
  const ConnectionAtPoint gamma = connection(xi.base, cfg, variant);
  if (form == DeltaForm::general) {
    delta.tail(m - 1) = psi0 * (-tau) * gamma.contract(xi.xi, dpi);
  } else {
    const double r2 = cfg.radius * cfg.radius;
    const Complex scale =
        -g * psi0 * tau * tau / std::sqrt(1.0 + std::norm(psi0) / r2);
    delta.tail(m - 1) = scale * gamma.contract(xi.xi, psi.tail(m - 1));
  }
  return delta;
}

Perturbation geodesic_perturbation(const ComplexVector& coeffs,
                                   const GeometryConfig& cfg,
                                   const GeodesicPerturbationParams& params) {
  // The chart component plays the role of the local vacuum.  Working in the
  // chart of the dominant coefficient keeps the ratios bounded; the ladder
  // machinery is index-symmetric, so a swap of mode 0 with the dominant mode
  // carries the whole pipeline to that sheet of the atlas.
  Eigen::Index dominant = 0;
  coeffs.cwiseAbs().maxCoeff(&dominant);
  ComplexVector work = coeffs;
  std::swap(work(0), work(dominant));

  const StateVector state = make_state(work);
  const FlowSpec spec = extract_coset(state, params.g);
  const GeneratorMatrix pol = polarization_operator(state, params.g);
  const LocalPoint pi = to_local(state, 0);
  const TangentVector xi = local_components_closed(pi, pol.m, cfg);
  // coordinate velocity of the coset rotation through this point
  const double sec = 1.0 / std::cos(spec.theta);
  const ComplexVector dpi = (cfg.radius * sec * sec) * spec.f;
  Perturbation out;
  out.delta_coeffs = delta_psi(work, xi, dpi, params.tau, params.g, cfg,
                               params.variant, params.form);
  std::swap(out.delta_coeffs(0), out.delta_coeffs(dominant));
  out.tau = params.tau;
  out.g = params.g;
  out.cfg = cfg;
  return out;
}

double perturbed_lagrangian(const ComplexVector& psi, const ComplexVector& delta,
                            const Eigen::Vector3d& x, double t,
                            const FieldParams& params) {
  if (psi.size() != delta.size())
    throw DimensionMismatch("perturbed_lagrangian: coefficient sizes differ");
  const int m = static_cast<int>(psi.size());
  const double inv_r02 = 1.0 / (params.r0 * params.r0);
  const double y = (t * t - x.squaredNorm()) * inv_r02;

  Complex u(0, 0), u_t(0, 0);
  Eigen::Vector3cd u_x = Eigen::Vector3cd::Zero();
  for (int n = 0; n < m; ++n) {
    const Complex c = psi(n) + delta(n);
    const HermiteValues v = hermite_with_derivatives(n, y);
    u += c * v.phi;
    u_t += c * (2.0 * t * inv_r02 * v.dphi);
    u_x += c * (-2.0 * inv_r02 * v.dphi) * x.cast<Complex>();
  }
  return std::norm(u_t) - u_x.squaredNorm() -
         params.alpha * params.alpha * std::norm(u);
}

ComplexMatrix delta_map_jacobian(const DeltaMap& map, const ComplexVector& psi,
                                 double step) {
  const int m = static_cast<int>(psi.size());
  ComplexMatrix jac(m, m);
  ComplexVector probe = psi;
  for (int n = 0; n < m; ++n) {
    probe(n) = psi(n) + step;
    const ComplexVector fp = map(probe);
    probe(n) = psi(n) - step;
    const ComplexVector fm = map(probe);
    probe(n) = psi(n) + kI * step;
    const ComplexVector gp = map(probe);
    probe(n) = psi(n) - kI * step;
    const ComplexVector gm = map(probe);
    probe(n) = psi(n);
    const ComplexVector d_re = (fp - fm) / (2.0 * step);  // dF/dx_n
    const ComplexVector d_im = (gp - gm) / (2.0 * step);  // dF/dy_n
    jac.col(n) = 0.5 * (d_re - kI * d_im);
  }
  return jac;
}

namespace {

// a_n = conj(psi_n + delta_n) + sum_m conj(psi_m) J(m, n)
ComplexVector conjugated_equation_vector(const ComplexVector& psi,
                                         const ComplexVector& delta,
                                         const ComplexMatrix* jac) {
  ComplexVector a = (psi + delta).conjugate();
  if (jac) a += jac->transpose() * psi.conjugate();
  return a;
}

}  // namespace

ComplexVector kg_residual(const ComplexVector& coeffs, const DeltaMap& delta_map,
                          const FieldParams& params, const RealVector& rho_grid) {
  if (rho_grid.size() < 1) throw GridTooCoarse("kg_residual: empty grid");
  const int m = static_cast<int>(coeffs.size());
  const double inv_r02 = 1.0 / (params.r0 * params.r0);
  const double a2 = params.alpha * params.alpha;

  ComplexVector delta = ComplexVector::Zero(m);
  ComplexMatrix jac;
  bool have_delta = false;
  if (delta_map) {
    delta = delta_map(coeffs);
    if (delta.size() != m) throw DimensionMismatch("kg_residual: delta size");
    have_delta = delta.cwiseAbs().maxCoeff() > 0.0;
    if (have_delta) jac = delta_map_jacobian(delta_map, coeffs);
  }
  const ComplexVector a = conjugated_equation_vector(
      coeffs, delta, have_delta ? &jac : nullptr);

  ComplexVector res = ComplexVector::Zero(rho_grid.size());
  for (Eigen::Index j = 0; j < rho_grid.size(); ++j) {
    const double y = rho_grid(j) * rho_grid(j) * inv_r02;
    const RealVector phis = hermite_functions_upto(m - 1, y);
    Complex acc(0, 0);
    for (int n = 0; n < m; ++n) {
      const double dphi = (n > 0 ? std::sqrt(2.0 * n) * phis(n - 1) : 0.0) -
                          y * phis(n);
      const double d2phi = (y * y - 2.0 * n - 1.0) * phis(n);
      const double box = (4.0 * y * d2phi + 8.0 * dphi) * inv_r02;
      acc += a(n) * (box + a2 * phis(n));
    }
    res(j) = acc;
  }
  return res;
}

ComplexVector linear_kg_residual(const ComplexVector& coeffs,
                                 const FieldParams& params,
                                 const RealVector& rho_grid) {
  const int m = static_cast<int>(coeffs.size());
  const double inv_r02 = 1.0 / (params.r0 * params.r0);
  const double a2 = params.alpha * params.alpha;
  ComplexVector res(rho_grid.size());
  for (Eigen::Index j = 0; j < rho_grid.size(); ++j) {
    const double y = rho_grid(j) * rho_grid(j) * inv_r02;
    const RealVector phis = hermite_functions_upto(m - 1, y);
    Complex u(0, 0), du(0, 0), d2u(0, 0);
    for (int n = 0; n < m; ++n) {
      const Complex c = std::conj(coeffs(n));
      u += c * phis(n);
      du += c * ((n > 0 ? std::sqrt(2.0 * n) * phis(n - 1) : 0.0) - y * phis(n));
      d2u += c * ((y * y - 2.0 * n - 1.0) * phis(n));
    }
    res(j) = (4.0 * y * d2u + 8.0 * du) * inv_r02 + a2 * u;
  }
  return res;
}

ComplexVector radial_residual_fd(const ScalarFieldProfile& profile, double sign) {
  profile.validate();
  const Eigen::Index n = profile.grid.size();
  if (n < 5) throw GridTooCoarse("radial_residual_fd: need at least 5 points");
  const double h = profile.grid(1) - profile.grid(0);
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const double step = profile.grid(i + 1) - profile.grid(i);
    if (std::abs(step - h) > 1e-9 * std::max(std::abs(h), 1.0))
      throw ConfigInvalid("radial_residual_fd: grid must be uniform");
  }
  const double a2 = profile.params.alpha * profile.params.alpha;
  ComplexVector res(n - 2);
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const Complex d2 =
        (profile.values(i + 1) - 2.0 * profile.values(i) + profile.values(i - 1)) /
        (h * h);
    const Complex d1 = (profile.values(i + 1) - profile.values(i - 1)) / (2.0 * h);
    res(i - 1) = d2 + 3.0 / profile.grid(i) * d1 + sign * a2 * profile.values(i);
  }
  return res;
}

namespace {

struct GridMoments {
  double l2 = 0.0;
  double width = 0.0;
};

GridMoments profile_moments(const ScalarFieldProfile& p) {
  GridMoments m;
  double mass = 0.0, second = 0.0;
  for (Eigen::Index i = 0; i + 1 < p.grid.size(); ++i) {
    const double h = p.grid(i + 1) - p.grid(i);
    const double f0 = std::norm(p.values(i));
    const double f1 = std::norm(p.values(i + 1));
    mass += 0.5 * h * (f0 + f1);
    second += 0.5 * h *
              (f0 * p.grid(i) * p.grid(i) + f1 * p.grid(i + 1) * p.grid(i + 1));
  }
  m.l2 = std::sqrt(mass);
  m.width = mass > 0.0 ? std::sqrt(second / mass) : 0.0;
  return m;
}

double action_estimate_on_grid(const ComplexVector& coeffs,
                               const ComplexVector& delta,
                               const FieldParams& params, const RealVector& grid) {
  // Lorentz-radial volume element rho^3 drho, sampled along the time axis
  // where y = (rho/r0)^2 is nonnegative.
  double acc = 0.0;
  const Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  for (Eigen::Index i = 0; i + 1 < grid.size(); ++i) {
    const double h = grid(i + 1) - grid(i);
    const double l0 = perturbed_lagrangian(coeffs, delta, origin, grid(i), params) *
                      std::pow(grid(i), 3);
    const double l1 =
        perturbed_lagrangian(coeffs, delta, origin, grid(i + 1), params) *
        std::pow(grid(i + 1), 3);
    acc += 0.5 * h * (l0 + l1);
  }
  return acc;
}

}  // namespace

DropletSolution solve_droplet(const FieldParams& params, const GeometryConfig& cfg,
                              const ModeExpansion& init, const DropletScheme& scheme,
                              const RealVector& rho_grid) {
  DropletSolution sol;
  const ComplexVector target = init.coeffs;
  ComplexVector psi = init.coeffs;
  const double target_norm = std::max(target.norm(), 1e-300);

  const auto delta_terms = [&](const ComplexVector& c) -> ComplexVector {
    const Perturbation p = geodesic_perturbation(c, cfg, scheme.perturbation);
    ComplexVector terms = p.delta_coeffs;
    if (scheme.include_jacobian_terms) {
      const DeltaMap map = [&](const ComplexVector& v) {
        return geodesic_perturbation(v, cfg, scheme.perturbation).delta_coeffs;
      };
      const ComplexMatrix jac = delta_map_jacobian(map, c);
      terms += (jac.transpose() * c.conjugate()).conjugate();
    }
    return terms;
  };

  double prev_residual = std::numeric_limits<double>::infinity();
  int growth_streak = 0;
  sol.message = "ok";
  try {
    for (int it = 0; it < scheme.max_iter; ++it) {
      const ComplexVector terms = delta_terms(psi);
      const ComplexVector next =
          (1.0 - scheme.damping) * psi + scheme.damping * (target - terms);
      const double residual = (psi + terms - target).norm() / target_norm;
      sol.iterations = it + 1;
      sol.fixed_point_residual = residual;
      if (!next.allFinite()) {
        sol.message = "iteration produced non-finite coefficients";
        break;
      }
      psi = next;
      if (residual < scheme.tol) {
        sol.converged = true;
        break;
      }
      if (residual > prev_residual) {
        if (++growth_streak >= 5) {
          sol.message = "residual grew over 5 consecutive iterations";
          break;
        }
      } else {
        growth_streak = 0;
      }
      prev_residual = residual;
    }
    if (scheme.max_iter == 0) {
      const ComplexVector terms = delta_terms(psi);
      sol.fixed_point_residual = (psi + terms - target).norm() / target_norm;
    }
  } catch (const std::exception& e) {
    sol.message = std::string("iteration stopped: ") + e.what();
  }

  sol.coeffs = psi;
  ModeExpansion final_exp;
  final_exp.coeffs = psi;
  final_exp.params = params;
  sol.profile = sample_profile(final_exp, rho_grid);

  ComplexVector delta = ComplexVector::Zero(psi.size());
  try {
    delta = geodesic_perturbation(psi, cfg, scheme.perturbation).delta_coeffs;
    const DeltaMap map = [&](const ComplexVector& v) {
      return geodesic_perturbation(v, cfg, scheme.perturbation).delta_coeffs;
    };
    sol.pde_residual_l2 = kg_residual(psi, map, params, rho_grid).norm() /
                          std::sqrt(static_cast<double>(rho_grid.size()));
  } catch (const std::exception& e) {
    sol.message = std::string("residual evaluation failed: ") + e.what();
  }

  const GridMoments moments = profile_moments(sol.profile);
  sol.l2_norm = psi.norm();
  sol.effective_width = moments.width;
  sol.action_estimate = action_estimate_on_grid(psi, delta, params, rho_grid);
  if (!sol.converged && sol.message == "ok")
    sol.message = "max iterations reached";
  return sol;
}

}  // namespace cpn

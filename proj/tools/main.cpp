#include <cstdlib>
#include <future>
#include <iostream>
#include <random>

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include "cpn/checks.hpp"
#include "cpn/dynvars.hpp"
#include "cpn/field.hpp"
#include "cpn/flow.hpp"
#include "cpn/geometry.hpp"
#include "cpn/kg.hpp"
#include "cpn/report.hpp"
#include "cpn/special.hpp"

namespace {

using namespace cpn;

ComplexVector seeded_vector(int n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, scale);
  ComplexVector v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(dist(rng), dist(rng));
  return v;
}

QuantityTable matrix_table(const ComplexMatrix& m) {
  QuantityTable t;
  t.real_columns = {"row", "col"};
  t.complex_columns = {""};
  const Eigen::Index nr = m.rows() * m.cols();
  t.reals.resize(nr, 2);
  t.complexes.resize(nr, 1);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j, ++k) {
      t.reals(k, 0) = static_cast<double>(i);
      t.reals(k, 1) = static_cast<double>(j);
      t.complexes(k, 0) = m(i, j);
    }
  return t;
}

QuantityTable profile_table(const ScalarFieldProfile& p) {
  QuantityTable t;
  t.real_columns = {"rho"};
  t.complex_columns = {""};
  t.reals = p.grid;
  t.complexes = p.values;
  return t;
}

QuantityTable coefficient_table(const ComplexVector& c) {
  QuantityTable t;
  t.real_columns = {"mode"};
  t.complex_columns = {""};
  t.reals.resize(c.size(), 1);
  t.complexes.resize(c.size(), 1);
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    t.reals(i, 0) = static_cast<double>(i);
    t.complexes(i, 0) = c(i);
  }
  return t;
}

GeometryConfig geometry_of(const RunConfig& cfg) {
  GeometryConfig g;
  g.dim = cfg.dim;
  g.radius = cfg.radius;
  g.hbar = cfg.hbar;
  return g;
}

FieldParams field_of(const RunConfig& cfg) {
  FieldParams p;
  p.alpha = cfg.alpha;
  return p;
}

RealVector rho_grid_of(const RunConfig& cfg) {
  RealVector g(cfg.grid_size);
  for (int i = 0; i < cfg.grid_size; ++i)
    g(i) = 0.05 + (cfg.grid_max - 0.05) * i / (cfg.grid_size - 1);
  return g;
}

void run_metric(const RunConfig& cfg, RunReport& report) {
  const GeometryConfig geo = geometry_of(cfg);
  const LocalPoint origin{0, ComplexVector::Zero(cfg.dim - 1)};
  const ComplexMatrix g0 = fubini_study_metric(origin, geo).g;
  report.results["metric_origin"] = matrix_table(g0);

  const LocalPoint p{0, seeded_vector(cfg.dim - 1, cfg.seed)};
  const ComplexMatrix g = fubini_study_metric(p, geo).g;
  report.results["metric_seeded_point"] = matrix_table(g);

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(g);
  QuantityTable eig;
  eig.real_columns = {"index", "eigenvalue"};
  eig.reals.resize(es.eigenvalues().size(), 2);
  eig.complexes.resize(es.eigenvalues().size(), 0);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    eig.reals(i, 0) = static_cast<double>(i);
    eig.reals(i, 1) = es.eigenvalues()(i);
  }
  report.results["metric_eigenvalues"] = eig;
  report.diagnostics.emplace_back(
      "hermiticity_defect", (g - g.adjoint().eval()).cwiseAbs().maxCoeff());
  report.diagnostics.emplace_back("min_eigenvalue", es.eigenvalues().minCoeff());
}

void run_geodesic(const RunConfig& cfg, RunReport& report) {
  GeometryConfig geo = geometry_of(cfg);
  const double span = std::min(cfg.l_max, 1.5);
  const int samples = 97;
  QuantityTable curve;
  curve.real_columns = {"l"};
  curve.complex_columns = {""};
  curve.reals.resize(samples, 1);
  curve.complexes.resize(samples, 1);
  double worst_lc = 0.0, worst_printed = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double l = -span + 2.0 * span * i / (samples - 1);
    const Complex pi = geodesic_cp1(l, 0.3, geo);
    curve.reals(i, 0) = l;
    curve.complexes(i, 0) = pi;
    // analytic equation residuals for the two coefficient variants
    const double sec2 = 1.0 / (std::cos(l) * std::cos(l));
    const Complex d1 = std::polar(geo.radius, 0.3) * sec2;
    const Complex d2 = 2.0 * std::polar(geo.radius, 0.3) * sec2 * std::tan(l);
    const double denom = geo.radius * geo.radius + std::norm(pi);
    worst_lc = std::max(worst_lc,
                        std::abs(d2 - 2.0 * std::conj(pi) / denom * d1 * d1));
    worst_printed = std::max(
        worst_printed, std::abs(d2 - 4.0 * std::conj(pi) / denom * d1 * d1));
  }
  report.results["geodesic_cp1"] = curve;
  report.diagnostics.emplace_back("geodesic_residual_levi_civita", worst_lc);
  report.diagnostics.emplace_back("geodesic_residual_printed", worst_printed);

  const ThetaOdeResult ode =
      integrate_theta_ode(geo, cfg.theta0, cfg.dtheta0, std::max(cfg.l_max, 1.0),
                          cfg.steps);
  QuantityTable theta;
  theta.real_columns = {"l", "theta", "dtheta"};
  const int stride = std::max<Eigen::Index>(1, ode.l.size() / 512);
  std::vector<int> keep;
  for (Eigen::Index i = 0; i < ode.l.size(); i += stride)
    keep.push_back(static_cast<int>(i));
  if (keep.back() != ode.l.size() - 1)
    keep.push_back(static_cast<int>(ode.l.size() - 1));
  theta.reals.resize(static_cast<Eigen::Index>(keep.size()), 3);
  theta.complexes.resize(static_cast<Eigen::Index>(keep.size()), 0);
  for (size_t i = 0; i < keep.size(); ++i) {
    theta.reals(static_cast<Eigen::Index>(i), 0) = ode.l(keep[i]);
    theta.reals(static_cast<Eigen::Index>(i), 1) = ode.theta(keep[i]);
    theta.reals(static_cast<Eigen::Index>(i), 2) = ode.dtheta(keep[i]);
  }
  report.results["theta_of_l"] = theta;
  report.diagnostics.emplace_back("theta_final", ode.theta(ode.theta.size() - 1));
}

void run_flow(const RunConfig& cfg, RunReport& report) {
  const ComplexVector f = seeded_vector(cfg.dim - 1, cfg.seed);
  const FlowSpec spec = make_flow_spec(f, cfg.tau);
  const UnitaryMatrix t = flow_matrix(spec);
  report.results["flow_matrix"] = matrix_table(t.u);
  report.diagnostics.emplace_back("g", spec.g);
  report.diagnostics.emplace_back("theta", spec.theta);
  report.diagnostics.emplace_back("unitarity_defect", t.unitarity_defect());

  const StateVector flowed =
      make_state(t.u * vacuum_state(cfg.dim, cfg.radius).amplitudes);
  report.results["flowed_vacuum"] = coefficient_table(flowed.amplitudes);
  try {
    const FlowSpec back = extract_coset(flowed, spec.g > 0 ? spec.g : 1.0);
    const ComplexVector rebuilt =
        flow_matrix(back).u * vacuum_state(cfg.dim, cfg.radius).amplitudes;
    report.diagnostics.emplace_back(
        "coset_round_trip",
        phase_aligned_distance(flowed.amplitudes, rebuilt));
  } catch (const AtVacuum&) {
    report.diagnostics.emplace_back("coset_round_trip", 0.0);
  }
}

void run_fields(const RunConfig& cfg, RunReport& report) {
  const GeometryConfig geo = geometry_of(cfg);
  AlgebraBasis basis;
  if (cfg.dim == 2)
    basis = pauli_basis(cfg.hbar);
  else if (cfg.dim == 3)
    basis = gell_mann_basis(cfg.hbar);
  else
    basis = generalized_basis(cfg.dim, cfg.hbar);

  std::vector<TangentField> fields;
  for (const auto& gen : basis.generators)
    fields.push_back(field_from_generator(gen, geo));

  const LocalPoint at{0, seeded_vector(cfg.dim - 1, cfg.seed, 0.5)};
  QuantityTable values;
  values.real_columns = {"sigma", "component"};
  values.complex_columns = {""};
  const Eigen::Index rows =
      static_cast<Eigen::Index>(fields.size()) * (cfg.dim - 1);
  values.reals.resize(rows, 2);
  values.complexes.resize(rows, 1);
  Eigen::Index r = 0;
  for (size_t s = 0; s < fields.size(); ++s) {
    const TangentVector xi = fields[s].eval(at);
    for (int i = 0; i < cfg.dim - 1; ++i, ++r) {
      values.reals(r, 0) = static_cast<double>(s);
      values.reals(r, 1) = static_cast<double>(i);
      values.complexes(r, 0) = xi.xi(i);
    }
  }
  report.results["field_components"] = values;

  double closure = 0.0;
  for (size_t a = 0; a < fields.size(); ++a)
    for (size_t b = a + 1; b < fields.size(); ++b) {
      double cubic = 0.0;
      const TangentField bracket = lie_bracket(fields[a], fields[b], &cubic);
      const ComplexMatrix comm = Complex(0, 1.0 / cfg.hbar) *
                                 (basis.generators[a] * basis.generators[b] -
                                  basis.generators[b] * basis.generators[a]);
      closure = std::max(closure,
                         field_distance(bracket, field_from_generator(comm, geo)));
      closure = std::max(closure, cubic);
    }
  report.diagnostics.emplace_back("bracket_closure_residual", closure);

  const GradedSplit split = graded_split(basis, 0);
  const GradedInclusionResiduals inc = verify_graded_inclusions(split, 0);
  report.diagnostics.emplace_back("goldstone_count",
                                  static_cast<double>(split.goldstone.size()));
  report.diagnostics.emplace_back("higgs_count",
                                  static_cast<double>(split.higgs.size()));
  report.diagnostics.emplace_back("graded_inclusion_residual", inc.max());

  ComplexMatrix probe = ComplexMatrix::Zero(cfg.dim, cfg.dim);
  {
    std::mt19937_64 rng(cfg.seed + 1);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (int i = 0; i < cfg.dim; ++i)
      for (int j = 0; j < cfg.dim; ++j) probe(i, j) = Complex(dist(rng), dist(rng));
    probe = 0.5 * (probe + probe.adjoint().eval());
    probe /= probe.norm();
  }
  const TangentVector closed = local_components_closed(at, probe, geo);
  const TangentVector fd = local_components_fd_extrapolated(at, probe, geo);
  report.diagnostics.emplace_back("fd_vs_closed",
                                  (closed.xi - fd.xi).cwiseAbs().maxCoeff());

  if (cfg.dim == 2 || cfg.dim == 3) {
    const auto printed =
        cfg.dim == 2 ? printed_su2_fields(geo) : printed_su3_fields(geo);
    double dist = 0.0;
    for (size_t i = 0; i < printed.size(); ++i)
      dist = std::max(dist, field_distance(printed[i], fields[i]));
    report.diagnostics.emplace_back("printed_vs_generated_distance", dist);
  }
}

void run_expand(const RunConfig& cfg, RunReport& report) {
  const FieldParams params = field_of(cfg);
  ExpandOptions opt;
  opt.tol = cfg.tolerance;
  opt.strict = false;
  const ModeExpansion e = expand_lommel(cfg.modes, params, opt);
  report.results["coefficients"] = coefficient_table(e.coeffs);
  report.results["profile"] = profile_table(sample_profile(e, rho_grid_of(cfg)));
  report.diagnostics.emplace_back("quadrature_order",
                                  static_cast<double>(e.quadrature_order));
  report.diagnostics.emplace_back("quadrature_delta", e.last_delta);
  report.diagnostics.emplace_back("quadrature_converged",
                                  e.converged ? 1.0 : 0.0);

  const auto target = [&](double y) { return paired_sector_field(params, y); };
  QuantityTable l2;
  l2.real_columns = {"modes", "l2_error"};
  std::vector<std::pair<int, double>> errs;
  for (int m = std::max(2, cfg.modes / 8); m <= cfg.modes; m *= 2) {
    ModeExpansion em = expand_lommel(m, params, opt);
    const auto recon = [&](double y) { return reconstruct(em, y); };
    errs.emplace_back(m, l2_distance(target, recon, -12.0, 12.0, 2001));
  }
  l2.reals.resize(static_cast<Eigen::Index>(errs.size()), 2);
  l2.complexes.resize(static_cast<Eigen::Index>(errs.size()), 0);
  for (size_t i = 0; i < errs.size(); ++i) {
    l2.reals(static_cast<Eigen::Index>(i), 0) = errs[i].first;
    l2.reals(static_cast<Eigen::Index>(i), 1) = errs[i].second;
  }
  report.results["truncation_error"] = l2;
}

DropletScheme scheme_of(const RunConfig& cfg) {
  DropletScheme scheme;
  scheme.damping = cfg.damping;
  scheme.max_iter = cfg.max_iter;
  scheme.tol = cfg.tolerance;
  scheme.perturbation.tau = cfg.tau;
  scheme.perturbation.g = cfg.g;
  scheme.perturbation.variant = cfg.variant;
  scheme.perturbation.form =
      cfg.delta_form == "general" ? DeltaForm::general : DeltaForm::small_tau;
  return scheme;
}

void run_droplet(const RunConfig& cfg, RunReport& report,
                 const std::vector<double>& sweep_radii) {
  const FieldParams params = field_of(cfg);
  ExpandOptions opt;
  opt.strict = false;
  const ModeExpansion init = expand_lommel(cfg.modes, params, opt);
  const RealVector grid = rho_grid_of(cfg);
  const DropletScheme scheme = scheme_of(cfg);

  const auto solve_at = [&](double radius) {
    GeometryConfig geo = geometry_of(cfg);
    geo.radius = radius;
    return solve_droplet(params, geo, init, scheme, grid);
  };

  const DropletSolution sol = solve_at(cfg.radius);
  report.results["coefficients"] = coefficient_table(sol.coeffs);
  report.results["profile"] = profile_table(sol.profile);
  report.diagnostics.emplace_back("converged", sol.converged ? 1.0 : 0.0);
  report.diagnostics.emplace_back("iterations",
                                  static_cast<double>(sol.iterations));
  report.diagnostics.emplace_back("fixed_point_residual", sol.fixed_point_residual);
  report.diagnostics.emplace_back("pde_residual_l2", sol.pde_residual_l2);
  report.diagnostics.emplace_back("l2_norm", sol.l2_norm);
  report.diagnostics.emplace_back("effective_width", sol.effective_width);
  report.diagnostics.emplace_back("action_estimate", sol.action_estimate);
  if (!sol.converged) report.discrepancies.push_back("droplet: " + sol.message);

  if (!sweep_radii.empty()) {
    // independent solves fan out; assembly is keyed by the radius order
    std::vector<std::future<DropletSolution>> futures;
    futures.reserve(sweep_radii.size());
    for (double r : sweep_radii)
      futures.push_back(std::async(std::launch::async, solve_at, r));
    QuantityTable sweep;
    sweep.real_columns = {"radius",   "converged", "iterations",
                          "residual", "l2_norm",   "width"};
    sweep.reals.resize(static_cast<Eigen::Index>(sweep_radii.size()), 6);
    sweep.complexes.resize(static_cast<Eigen::Index>(sweep_radii.size()), 0);
    for (size_t i = 0; i < sweep_radii.size(); ++i) {
      const DropletSolution s = futures[i].get();
      const Eigen::Index r = static_cast<Eigen::Index>(i);
      sweep.reals(r, 0) = sweep_radii[i];
      sweep.reals(r, 1) = s.converged ? 1.0 : 0.0;
      sweep.reals(r, 2) = static_cast<double>(s.iterations);
      sweep.reals(r, 3) = s.fixed_point_residual;
      sweep.reals(r, 4) = s.l2_norm;
      sweep.reals(r, 5) = s.effective_width;
    }
    report.results["radius_sweep"] = sweep;
  }
}

int run_check(const RunConfig& cfg, RunReport& report) {
  const std::vector<CheckResult> checks = run_invariant_checks(cfg.dim, cfg.seed);
  int failures = 0;
  QuantityTable table;
  table.real_columns = {"index", "value", "threshold", "pass"};
  table.reals.resize(static_cast<Eigen::Index>(checks.size()), 4);
  table.complexes.resize(static_cast<Eigen::Index>(checks.size()), 0);
  for (size_t i = 0; i < checks.size(); ++i) {
    const CheckResult& c = checks[i];
    std::cout << (c.pass ? "pass" : "FAIL") << "  " << c.name << "  value "
              << c.value << "  threshold " << c.threshold << "\n";
    report.diagnostics.emplace_back(c.name, c.value);
    const Eigen::Index r = static_cast<Eigen::Index>(i);
    table.reals(r, 0) = static_cast<double>(i);
    table.reals(r, 1) = c.value;
    table.reals(r, 2) = c.threshold;
    table.reals(r, 3) = c.pass ? 1.0 : 0.0;
    if (!c.pass) ++failures;
  }
  report.results["checks"] = table;
  std::cout << (checks.size() - failures) << "/" << checks.size()
            << " checks passed\n";
  return failures == 0 ? 0 : 1;
}

std::string default_output_path(const RunConfig& cfg) {
  const char* dir = std::getenv("CPN_OUT_DIR");
  const std::string base = cfg.command + "_report." + cfg.format;
  if (dir && *dir) return std::string(dir) + "/" + base;
  return base;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"state-space geometry and nonlinear field experiments"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value configuration file");
  app.fallthrough();

  RunConfig cfg;
  std::string sweep_spec;
  app.add_option("--dim", cfg.dim, "Hilbert dimension N");
  app.add_option("--radius", cfg.radius, "curvature radius R");
  app.add_option("--alpha", cfg.alpha, "coupling constant");
  app.add_option("--hbar", cfg.hbar, "action scale");
  app.add_option("--tau", cfg.tau, "flow / perturbation parameter");
  app.add_option("--g", cfg.g, "coset rotation rate");
  app.add_option("--modes", cfg.modes, "mode truncation order");
  app.add_option("--grid-size", cfg.grid_size, "radial grid points");
  app.add_option("--grid-max", cfg.grid_max, "radial grid upper end");
  app.add_option("--tol", cfg.tolerance, "solver / quadrature tolerance");
  app.add_option("--seed", cfg.seed, "random generator seed");
  app.add_option("--l-max", cfg.l_max, "geodesic parameter range");
  app.add_option("--steps", cfg.steps, "ode integration steps");
  app.add_option("--theta0", cfg.theta0, "initial angle");
  app.add_option("--dtheta0", cfg.dtheta0, "initial angle rate");
  app.add_option("--damping", cfg.damping, "fixed-point damping");
  app.add_option("--max-iter", cfg.max_iter, "fixed-point iteration cap");
  app.add_option("--delta-form", cfg.delta_form,
                 "perturbation form: small_tau or general");
  app.add_option("--output", cfg.output_path,
                 "report path ('-' prints the document to stdout)");
  app.add_option("--format", cfg.format, "report format: json or csv");
  const std::map<std::string, ConnectionVariant> variant_map{
      {"levi_civita", ConnectionVariant::levi_civita},
      {"printed", ConnectionVariant::printed}};
  app.add_option("--variant", cfg.variant, "connection variant")
      ->transform(CLI::CheckedTransformer(variant_map, CLI::ignore_case));

  CLI::App* c_metric = app.add_subcommand("metric", "metric tensor at a point");
  CLI::App* c_geodesic =
      app.add_subcommand("geodesic", "geodesic curve and the angle rate ode");
  CLI::App* c_flow = app.add_subcommand("flow", "coset rotation matrix");
  CLI::App* c_fields =
      app.add_subcommand("fields", "state-dependent generator fields");
  CLI::App* c_expand = app.add_subcommand("expand", "mode expansion of the field");
  CLI::App* c_droplet = app.add_subcommand("droplet", "nonlinear radial solve");
  c_droplet->add_option("--sweep", sweep_spec,
                        "radius sweep lo:hi:count (log spaced)");
  CLI::App* c_check = app.add_subcommand("check", "invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  int exit_code = 0;
  try {
    if (c_metric->parsed()) cfg.command = "metric";
    if (c_geodesic->parsed()) cfg.command = "geodesic";
    if (c_flow->parsed()) cfg.command = "flow";
    if (c_fields->parsed()) cfg.command = "fields";
    if (c_expand->parsed()) cfg.command = "expand";
    if (c_droplet->parsed()) cfg.command = "droplet";
    if (c_check->parsed()) cfg.command = "check";
    cfg.validate();

    std::vector<double> sweep_radii;
    if (!sweep_spec.empty()) {
      double lo = 0, hi = 0;
      int count = 0;
      if (std::sscanf(sweep_spec.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 ||
          !(lo > 0) || !(hi > lo) || count < 2)
        throw ConfigInvalid("sweep must be lo:hi:count with 0 < lo < hi");
      for (int i = 0; i < count; ++i)
        sweep_radii.push_back(
            lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
    }

    RunReport report;
    report.config_echo = cfg.echo();
    report.discrepancies = discrepancy_log(geometry_of(cfg));

    if (cfg.command == "metric") run_metric(cfg, report);
    else if (cfg.command == "geodesic") run_geodesic(cfg, report);
    else if (cfg.command == "flow") run_flow(cfg, report);
    else if (cfg.command == "fields") run_fields(cfg, report);
    else if (cfg.command == "expand") run_expand(cfg, report);
    else if (cfg.command == "droplet") run_droplet(cfg, report, sweep_radii);
    else if (cfg.command == "check") exit_code = run_check(cfg, report);

    const std::string bytes = serialize(report, cfg.format);
    if (cfg.output_path == "-") {
      std::cout << bytes;
    } else {
      const std::string path =
          cfg.output_path.empty() ? default_output_path(cfg) : cfg.output_path;
      write_report(report, path, cfg.format);
      std::cout << cfg.command << ": report written to " << path << "\n";
    }
  } catch (const ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}

#include "cpn/report.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "cpn/dynvars.hpp"
#include "cpn/field.hpp"
#include "cpn/flow.hpp"
#include "cpn/geometry.hpp"
#include "cpn/special.hpp"

namespace cpn {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void RunConfig::validate() const {
  if (dim < 2) throw ConfigInvalid("dim must be >= 2");
  if (!(radius > 0.0)) throw ConfigInvalid("radius must be > 0");
  if (!(alpha > 0.0)) throw ConfigInvalid("alpha must be > 0");
  if (!(hbar > 0.0)) throw ConfigInvalid("hbar must be > 0");
  if (modes < 1) throw ConfigInvalid("modes must be >= 1");
  if (grid_size < 2) throw ConfigInvalid("grid size must be >= 2");
  if (!(grid_max > 0.0)) throw ConfigInvalid("grid max must be > 0");
  if (!(tolerance > 0.0)) throw ConfigInvalid("tolerance must be > 0");
  if (!(damping > 0.0 && damping <= 1.0))
    throw ConfigInvalid("damping must lie in (0, 1]");
  if (max_iter < 0) throw ConfigInvalid("max_iter must be >= 0");
  if (steps < 2) throw ConfigInvalid("steps must be >= 2");
  if (format != "json" && format != "csv")
    throw ConfigInvalid("format must be json or csv");
  if (delta_form != "small_tau" && delta_form != "general")
    throw ConfigInvalid("delta form must be small_tau or general");
}

std::string RunConfig::echo() const {
  std::ostringstream out;
  out << "command=" << command << '\n';
  out << "dim=" << dim << '\n';
  out << "radius=" << fmt_double(radius) << '\n';
  out << "alpha=" << fmt_double(alpha) << '\n';
  out << "hbar=" << fmt_double(hbar) << '\n';
  out << "tau=" << fmt_double(tau) << '\n';
  out << "g=" << fmt_double(g) << '\n';
  out << "modes=" << modes << '\n';
  out << "grid_size=" << grid_size << '\n';
  out << "grid_max=" << fmt_double(grid_max) << '\n';
  out << "tolerance=" << fmt_double(tolerance) << '\n';
  out << "seed=" << seed << '\n';
  out << "variant=" << to_string(variant) << '\n';
  out << "delta_form=" << delta_form << '\n';
  out << "damping=" << fmt_double(damping) << '\n';
  out << "max_iter=" << max_iter << '\n';
  out << "l_max=" << fmt_double(l_max) << '\n';
  out << "steps=" << steps << '\n';
  out << "theta0=" << fmt_double(theta0) << '\n';
  out << "dtheta0=" << fmt_double(dtheta0) << '\n';
  // the output path routes the document and is not part of the hashed region
  out << "format=" << format << '\n';
  return out.str();
}

bool operator==(const QuantityTable& a, const QuantityTable& b) {
  if (a.real_columns != b.real_columns || a.complex_columns != b.complex_columns)
    return false;
  if (a.reals.rows() != b.reals.rows() || a.reals.cols() != b.reals.cols())
    return false;
  if (a.complexes.rows() != b.complexes.rows() ||
      a.complexes.cols() != b.complexes.cols())
    return false;
  if (a.reals.size() > 0 && a.reals != b.reals) return false;
  if (a.complexes.size() > 0 && a.complexes != b.complexes) return false;
  return true;
}

bool operator==(const RunReport& a, const RunReport& b) {
  return a.config_echo == b.config_echo && a.version == b.version &&
         a.rng == b.rng && a.results == b.results &&
         a.diagnostics == b.diagnostics && a.discrepancies == b.discrepancies;
}

namespace {

using OrderedJson = nlohmann::ordered_json;

OrderedJson table_to_json(const QuantityTable& t) {
  OrderedJson jt;
  jt["real_columns"] = t.real_columns;
  jt["complex_columns"] = t.complex_columns;
  OrderedJson rows = OrderedJson::array();
  for (Eigen::Index r = 0; r < t.rows(); ++r) {
    OrderedJson row = OrderedJson::array();
    for (Eigen::Index c = 0; c < t.reals.cols(); ++c) row.push_back(t.reals(r, c));
    for (Eigen::Index c = 0; c < t.complexes.cols(); ++c)
      row.push_back(OrderedJson::array(
          {t.complexes(r, c).real(), t.complexes(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  jt["rows"] = std::move(rows);
  return jt;
}

QuantityTable table_from_json(const OrderedJson& jt) {
  QuantityTable t;
  t.real_columns = jt.at("real_columns").get<std::vector<std::string>>();
  t.complex_columns = jt.at("complex_columns").get<std::vector<std::string>>();
  const auto& rows = jt.at("rows");
  const Eigen::Index nr = static_cast<Eigen::Index>(rows.size());
  t.reals.resize(nr, static_cast<Eigen::Index>(t.real_columns.size()));
  t.complexes.resize(nr, static_cast<Eigen::Index>(t.complex_columns.size()));
  for (Eigen::Index r = 0; r < nr; ++r) {
    const auto& row = rows[static_cast<size_t>(r)];
    size_t k = 0;
    for (Eigen::Index c = 0; c < t.reals.cols(); ++c)
      t.reals(r, c) = row.at(k++).get<double>();
    for (Eigen::Index c = 0; c < t.complexes.cols(); ++c) {
      const auto& cell = row.at(k++);
      t.complexes(r, c) = Complex(cell.at(0).get<double>(), cell.at(1).get<double>());
    }
  }
  return t;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += "\"\"";
    out += ch;
  }
  out += "\"";
  return out;
}

void table_to_csv(std::ostringstream& out, const std::string& name,
                  const QuantityTable& t) {
  out << "#table " << name << '\n';
  bool first = true;
  for (const auto& c : t.real_columns) {
    if (!first) out << ',';
    out << csv_escape(c);
    first = false;
  }
  for (const auto& c : t.complex_columns) {
    if (!first) out << ',';
    out << csv_escape(c.empty() ? "re" : c + "_re") << ','
        << csv_escape(c.empty() ? "im" : c + "_im");
    first = false;
  }
  out << '\n';
  for (Eigen::Index r = 0; r < t.rows(); ++r) {
    first = true;
    for (Eigen::Index c = 0; c < t.reals.cols(); ++c) {
      if (!first) out << ',';
      out << fmt_double(t.reals(r, c));
      first = false;
    }
    for (Eigen::Index c = 0; c < t.complexes.cols(); ++c) {
      if (!first) out << ',';
      out << fmt_double(t.complexes(r, c).real()) << ','
          << fmt_double(t.complexes(r, c).imag());
      first = false;
    }
    out << '\n';
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  cells.push_back(cur);
  return cells;
}

}  // namespace

std::string serialize(const RunReport& report, const std::string& format) {
  if (format == "json") {
    OrderedJson j;
    j["config"] = report.config_echo;
    j["version"] = report.version;
    j["rng"] = report.rng;
    OrderedJson results = OrderedJson::object();
    for (const auto& [name, table] : report.results)
      results[name] = table_to_json(table);
    j["results"] = std::move(results);
    OrderedJson diag = OrderedJson::array();
    for (const auto& [k, v] : report.diagnostics)
      diag.push_back(OrderedJson::array({k, v}));
    j["diagnostics"] = std::move(diag);
    j["discrepancies"] = report.discrepancies;
    return j.dump(2) + "\n";
  }
  if (format != "csv") throw ConfigInvalid("serialize: unknown format");

  std::ostringstream out;
  out << "#cpn-report," << report.version << ',' << report.rng << '\n';
  out << "#config-lines," << std::count(report.config_echo.begin(),
                                        report.config_echo.end(), '\n')
      << '\n';
  out << report.config_echo;
  for (const auto& [name, table] : report.results) table_to_csv(out, name, table);
  out << "#diagnostics\n";
  for (const auto& [k, v] : report.diagnostics)
    out << csv_escape(k) << ',' << fmt_double(v) << '\n';
  out << "#discrepancies\n";
  for (const auto& d : report.discrepancies) out << csv_escape(d) << '\n';
  return out.str();
}

RunReport parse_report(const std::string& bytes, const std::string& format) {
  RunReport report;
  if (format == "json") {
    const OrderedJson j = OrderedJson::parse(bytes);
    report.config_echo = j.at("config").get<std::string>();
    report.version = j.at("version").get<std::string>();
    report.rng = j.at("rng").get<std::string>();
    for (const auto& [name, jt] : j.at("results").items())
      report.results[name] = table_from_json(jt);
    for (const auto& entry : j.at("diagnostics"))
      report.diagnostics.emplace_back(entry.at(0).get<std::string>(),
                                      entry.at(1).get<double>());
    report.discrepancies = j.at("discrepancies").get<std::vector<std::string>>();
    return report;
  }
  if (format != "csv") throw ConfigInvalid("parse_report: unknown format");

  std::istringstream in(bytes);
  std::string line;
  if (!std::getline(in, line) || line.rfind("#cpn-report,", 0) != 0)
    throw IoError("parse_report: missing csv preamble");
  {
    const auto cells = split_csv_line(line);
    if (cells.size() != 3) throw IoError("parse_report: bad preamble");
    report.version = cells[1];
    report.rng = cells[2];
  }
  if (!std::getline(in, line) || line.rfind("#config-lines,", 0) != 0)
    throw IoError("parse_report: missing config header");
  const int config_lines = std::stoi(line.substr(14));
  std::ostringstream cfg;
  for (int i = 0; i < config_lines; ++i) {
    if (!std::getline(in, line)) throw IoError("parse_report: truncated config");
    cfg << line << '\n';
  }
  report.config_echo = cfg.str();

  std::string pending_table;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> body;
  enum class Section { tables, diagnostics, discrepancies } section = Section::tables;

  const auto flush_table = [&]() {
    if (pending_table.empty()) return;
    QuantityTable t;
    std::vector<bool> complex_re(header.size(), false);
    for (size_t c = 0; c < header.size(); ++c) {
      const std::string& h = header[c];
      const bool re_head =
          h == "re" || (h.size() > 3 && h.compare(h.size() - 3, 3, "_re") == 0);
      if (re_head && c + 1 < header.size()) {
        const std::string base = h == "re" ? "" : h.substr(0, h.size() - 3);
        const std::string expected_im = base.empty() ? "im" : base + "_im";
        if (header[c + 1] == expected_im) {
          complex_re[c] = true;
          t.complex_columns.push_back(base);
          ++c;
          continue;
        }
      }
      t.real_columns.push_back(h);
    }
    const Eigen::Index nr = static_cast<Eigen::Index>(body.size());
    t.reals.resize(nr, static_cast<Eigen::Index>(t.real_columns.size()));
    t.complexes.resize(nr, static_cast<Eigen::Index>(t.complex_columns.size()));
    for (Eigen::Index r = 0; r < nr; ++r) {
      Eigen::Index rc = 0, cc = 0;
      for (size_t c = 0; c < header.size(); ++c) {
        if (complex_re[c]) {
          t.complexes(r, cc++) = Complex(std::stod(body[r][c]),
                                         std::stod(body[r][c + 1]));
          ++c;
        } else {
          t.reals(r, rc++) = std::stod(body[r][c]);
        }
      }
    }
    report.results[pending_table] = std::move(t);
    pending_table.clear();
    header.clear();
    body.clear();
  };

  while (std::getline(in, line)) {
    if (line.rfind("#table ", 0) == 0) {
      flush_table();
      pending_table = line.substr(7);
      if (!std::getline(in, line)) throw IoError("parse_report: missing header");
      header = split_csv_line(line);
      continue;
    }
    if (line == "#diagnostics") {
      flush_table();
      section = Section::diagnostics;
      continue;
    }
    if (line == "#discrepancies") {
      flush_table();
      section = Section::discrepancies;
      continue;
    }
    if (line.empty()) continue;
    if (section == Section::tables) {
      body.push_back(split_csv_line(line));
    } else if (section == Section::diagnostics) {
      const auto cells = split_csv_line(line);
      if (cells.size() != 2) throw IoError("parse_report: bad diagnostic row");
      report.diagnostics.emplace_back(cells[0], std::stod(cells[1]));
    } else {
      report.discrepancies.push_back(split_csv_line(line)[0]);
    }
  }
  flush_table();
  return report;
}

void write_report(const RunReport& report, const std::string& path,
                  const std::string& format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path);
  const std::string bytes = serialize(report, format);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path);
}

namespace {

// Wirtinger holomorphic partial of the metric by central differences.
ComplexMatrix metric_partial(const ComplexVector& coords, int k,
                             const GeometryConfig& cfg, double h) {
  ComplexVector p = coords;
  const auto at = [&](Complex shift) {
    p(k) = coords(k) + shift;
    return fubini_study_metric_at(p, cfg);
  };
  const ComplexMatrix dx = (at(Complex(h, 0)) - at(Complex(-h, 0))) / (2.0 * h);
  const ComplexMatrix dy = (at(Complex(0, h)) - at(Complex(0, -h))) / (2.0 * h);
  return 0.5 * (dx - Complex(0, 1) * dy);
}

Complex fd_christoffel(const ComplexVector& coords, int i, int k, int m,
                       const GeometryConfig& cfg, double h = 1e-5) {
  const ComplexMatrix g = fubini_study_metric_at(coords, cfg);
  const ComplexMatrix ginv = g.inverse();
  const ComplexMatrix dk = metric_partial(coords, k, cfg, h);
  // Gamma^i_{km} = G^{i l*} d_k G_{m l*}, with G^{i l*} = conj(ginv(i, l))
  Complex acc(0, 0);
  for (Eigen::Index l = 0; l < coords.size(); ++l)
    acc += std::conj(ginv(i, l)) * dk(m, l);
  return acc;
}

}  // namespace

std::vector<std::string> discrepancy_log(const GeometryConfig& cfg_in) {
  std::vector<std::string> log;
  GeometryConfig cfg = cfg_in;
  cfg.dim = 2;
  cfg.radius = 1.0;

  {
    ComplexVector pi(1);
    pi(0) = Complex(1.0, 0.0);
    const Complex fd = fd_christoffel(pi, 0, 0, 0, cfg);
    const LocalPoint p{0, pi};
    const Complex lc = connection(p, cfg, ConnectionVariant::levi_civita).coeff(0, 0, 0);
    const Complex pr = connection(p, cfg, ConnectionVariant::printed).coeff(0, 0, 0);
    log.push_back(
        "connection factor at pi=1, R=1: finite-difference " +
        fmt_double(fd.real()) + ", levi_civita " + fmt_double(lc.real()) +
        ", printed " + fmt_double(pr.real()) +
        "; the finite-difference value selects levi_civita");
  }
  {
    // geodesic equation residual of R tan(l) under both coefficient variants
    double worst_printed = 0.0;
    for (double l = -1.2; l <= 1.2; l += 0.1) {
      const double sec2 = 1.0 / (std::cos(l) * std::cos(l));
      const double residual = -2.0 * cfg.radius * std::tan(l) * sec2;
      worst_printed = std::max(worst_printed, std::abs(residual));
    }
    log.push_back(
        "geodesic residual on l in [-1.2, 1.2]: levi_civita 0 analytically, "
        "printed up to " +
        fmt_double(worst_printed));
  }
  {
    ComplexVector f(1);
    f(0) = Complex(1.0, 0.0);
    const FlowSpec spec = make_flow_spec(f, 0.7);
    const UnitaryMatrix t = flow_matrix(spec);
    const ComplexMatrix ek = (0.7 * generator_k(f).m).exp();
    const ComplexMatrix eb =
        (Complex(0, 0.7) * build_generator(f).m).exp();
    log.push_back("flow closed form vs exp(tau K): " +
                  fmt_double((t.u - ek).cwiseAbs().maxCoeff()) +
                  "; vs exp(i tau B): " +
                  fmt_double((t.u - eb).cwiseAbs().maxCoeff()) +
                  "; the closed form is generated by the skew-Hermitian K");
  }
  {
    GeometryConfig su2 = cfg;
    su2.dim = 2;
    const auto printed = printed_su2_fields(su2);
    const Complex minus_i_h(0.0, -su2.hbar);
    double worst = 0.0;
    const int idx[3][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
    for (const auto& t : idx) {
      const TangentField bracket = lie_bracket(printed[t[0]], printed[t[1]]);
      const TangentField target = field_sum(
          printed[t[2]], printed[t[2]], minus_i_h, Complex(0, 0));
      worst = std::max(worst, field_distance(bracket, target));
    }
    log.push_back(
        "transcribed two-level fields: max |[D_a, D_b] + i hbar eps D_c| = " +
        fmt_double(worst) + " (nonzero; transcription differs by an i factor)");

    const auto pauli = pauli_basis(su2.hbar);
    std::vector<TangentField> gen;
    for (const auto& p : pauli.generators) gen.push_back(field_from_generator(p, su2));
    // closure constant c with [D_a, D_b] = c eps_abc D_c
    const TangentField b01 = lie_bracket(gen[0], gen[1]);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < b01.vars(); ++i) {
      num += (b01.hol[i].c0 * std::conj(gen[2].hol[i].c0)).real();
      num += (b01.hol[i].c1.dot(gen[2].hol[i].c1)).real();
      den += std::norm(gen[2].hol[i].c0) + gen[2].hol[i].c1.squaredNorm();
    }
    log.push_back("generated su(2) closure constant c = " +
                  fmt_double(den > 0 ? num / den : 0.0) +
                  " in [D_a, D_b] = c eps_abc D_c");
  }
  {
    FieldParams fp;
    const Eigen::Vector3d x(0.3, -0.2, 0.5);
    const double t = 0.9;
    double same = 0.0, flipped = 0.0;
    for (int n = 1; n <= 4; ++n) {
      const BasisDerivatives d = basis_derivatives(n, x, t, fp);
      const double y = t * t - x.squaredNorm();
      const HermiteValues v = hermite_with_derivatives(n, y);
      // transcribed form carries (y H_n - 2n H_{n-1}), the negative of dphi/dy
      const Complex printed_grad0 = -2.0 * x(0) * (-v.dphi);
      same = std::max(same, std::abs(printed_grad0 - d.gradient(0)));
      flipped = std::max(flipped, std::abs(printed_grad0 + d.gradient(0)));
    }
    log.push_back("basis derivative transcription vs chain rule: |printed - chain| = " +
                  fmt_double(same) + ", |printed + chain| = " + fmt_double(flipped) +
                  "; transcribed gradient sign is opposite, chain rule is used");
  }
  return log;
}

}  // namespace cpn

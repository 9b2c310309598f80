#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cpn/types.hpp"

namespace cpn {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct RunConfig {
  std::string command = "check";
  int dim = 3;
  double radius = std::sqrt(1.0 / kFineStructure);
  double alpha = kFineStructure;
  double hbar = 1.0;
  double tau = 0.5;
  double g = 1.0;
  int modes = 16;
  int grid_size = 200;
  double grid_max = 3.0;
  double tolerance = 1e-10;
  std::uint64_t seed = 1;
  ConnectionVariant variant = ConnectionVariant::levi_civita;
  std::string delta_form = "small_tau";
  double damping = 0.5;
  int max_iter = 40;
  double l_max = 1.2;
  int steps = 4096;
  double theta0 = 0.0;
  double dtheta0 = 1.0;
  std::string output_path;
  std::string format = "json";

  void validate() const;
  // Canonical flat key=value rendering; embedded verbatim in reports.
  std::string echo() const;
};

// One plot-ready array quantity: named real columns followed by named complex
// columns.  CSV flattens a complex column c into c_re,c_im (bare re,im when
// the name is empty); JSON keeps complex cells as [re, im] pairs.
struct QuantityTable {
  std::vector<std::string> real_columns;
  std::vector<std::string> complex_columns;
  RealMatrix reals;        // rows x real_columns
  ComplexMatrix complexes; // rows x complex_columns

  Eigen::Index rows() const {
    return real_columns.empty() ? complexes.rows() : reals.rows();
  }
};

struct RunReport {
  std::string config_echo;
  std::string version = kArtifactVersion;
  std::string rng = "mt19937_64";
  std::map<std::string, QuantityTable> results;
  std::vector<std::pair<std::string, double>> diagnostics;
  std::vector<std::string> discrepancies;
};

bool operator==(const QuantityTable& a, const QuantityTable& b);
bool operator==(const RunReport& a, const RunReport& b);

std::string serialize(const RunReport& report, const std::string& format);
RunReport parse_report(const std::string& bytes, const std::string& format);

void write_report(const RunReport& report, const std::string& path,
                  const std::string& format);

// Fixed comparison block embedded in every report: connection coefficient
// adjudication, flow generator convention, transcribed su(2) bracket check,
// and the basis-derivative sign check.
std::vector<std::string> discrepancy_log(const GeometryConfig& cfg);

}  // namespace cpn

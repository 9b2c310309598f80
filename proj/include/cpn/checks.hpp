#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpn/types.hpp"

namespace cpn {

struct CheckResult {
  std::string name;
  double value = 0.0;      // measured residual / error
  double threshold = 0.0;  // pass when value < threshold
  bool pass = false;
};

// Seeded invariant suite over the library surface: metric structure, chart
// round trips, flow unitarity and reconstruction, bracket closure, Hermite
// orthonormality, expansion projections, perturbation scaling.
std::vector<CheckResult> run_invariant_checks(int dim, std::uint64_t seed);

}  // namespace cpn

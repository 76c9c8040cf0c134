#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fracwave/spectral.hpp"

namespace fracwave::validate {

struct Check {
  std::string name;
  double value = 0.0;      // achieved error or statistic
  double tolerance = 0.0;  // pass when value <= tolerance
  bool passed = false;
  std::string detail;
};

struct Report {
  std::vector<Check> checks;
  bool ok = true;
  std::string failed;  // name of the first failing check
};

/// Runs the invariant suite in a fixed order and stops at the first failure.
/// Model-dependent checks use p; oracle checks use their own fixed constants.
Report run_suite(const spectral::ModelParams& p);

nlohmann::ordered_json report_json(const Report& r);

}  // namespace fracwave::validate

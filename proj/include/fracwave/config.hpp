#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracwave/fields.hpp"
#include "fracwave/spectral.hpp"
#include "fracwave/spectrum.hpp"

namespace fracwave::config {

/// Bad config file, unknown key or out-of-range value. key() names the
/// offending key (empty for file-level problems).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& msg)
      : std::runtime_error(key.empty() ? msg : key + ": " + msg), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

struct RunConfig {
  double c = 1.0;
  double gamma = 1.0;
  double k = 0.05;
  double alpha = 0.9;
  double tau = 0.04;
  double t = 0.4;
  int L = 64;
  int L_ref = 800;
  int n_realizations = 50;
  double kappa1 = 4.1;
  double kappa2 = 2.5;
  double c_tilde = 1.0;
  double d_tilde = 1.0;
  double a_tilde = 10.0;
  double k_tilde = 1.0;
  std::uint64_t seed = 0;
  int grid_L = 0;  // 0: use L
  std::string out_dir = "out";
  double step = 0.01;
  std::vector<int> L_list{50, 100, 200, 400};
  double beta_star = 0.15;
  int ell_min = 0;
  int ell_max = 20;
  bool share_abs_m = true;

  spectral::ModelParams params() const;
  PowerSpectrum cspec() const;
  PowerSpectrum aspec() const;
  fields::NoiseConvention convention() const;
  int grid_degree() const { return grid_L > 0 ? grid_L : L; }

  /// Throws ConfigError naming the first offending key.
  void validate() const;

  /// One `key = value` line per key in fixed order; out_dir is excluded so
  /// the hash describes the computation, not where it was written.
  std::string canonical() const;
  std::string hash() const;
};

const std::vector<std::string>& known_keys();

/// Sets one key from its text form. Throws ConfigError for unknown keys or
/// unparsable values.
void set_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Applies `key = value` lines ('#' starts a comment) on top of cfg.
void apply_text(RunConfig& cfg, const std::string& text, const std::string& origin = "config");
void apply_file(RunConfig& cfg, const std::string& path);
/// Applies a `key=value` override.
void apply_override(RunConfig& cfg, const std::string& assignment);

}  // namespace fracwave::config

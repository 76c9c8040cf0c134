#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fracwave/fields.hpp"
#include "fracwave/rng.hpp"
#include "fracwave/spectral.hpp"
#include "fracwave/spectrum.hpp"

namespace fracwave::experiments {

using Json = nlohmann::ordered_json;
using fields::NoiseConvention;
using spectral::ModelParams;

/// Named equal-length columns plus a metadata record.
struct StudyTable {
  std::string name;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  Json metadata = Json::object();

  void add(const std::string& column_name, std::vector<double> values);
  const std::vector<double>& column(const std::string& column_name) const;
  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  std::string csv() const;
  /// Writes <dir>/<name>.csv and <dir>/<name>.meta.json.
  void write(const std::string& dir, const Json& extra_meta = Json::object()) const;
};

Json params_json(const ModelParams& p);
Json spectrum_json(const PowerSpectrum& s);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Columns: L, Q_hat, Q_se, Q_expected, bound_theory, bound_fitted.
/// Metadata carries the fitted slope and the rate predicted by the bounds.
StudyTable truncation_error_study(const ModelParams& p, const PowerSpectrum& cspec,
                                  const PowerSpectrum& aspec, const std::vector<int>& L_list,
                                  int L_ref, double t, int n_realizations, const RngStream& rng,
                                  NoiseConvention conv = NoiseConvention::shared_abs_m);

/// Columns: d, geodesic, var, var_se, var_theory, ratio (= var / d^{2 beta*}).
StudyTable hoelder_study(const ModelParams& p, const PowerSpectrum& cspec,
                         const PowerSpectrum& aspec, int L, double t, int n_realizations,
                         double step, const RngStream& rng, double beta_star,
                         NoiseConvention conv = NoiseConvention::shared_abs_m);

/// (V_lhs, V_rhs): variance of the fractional integral of the noise integral,
/// by quadrature of J^a psi, against the closed form through psi^{2a}.
std::pair<double, double> fubini_variance_check(const ModelParams& p, int ell, double t,
                                                double tol);

/// Columns: ell, dt, residual. Metadata: monotone flag per degree.
StudyTable ode_residual_study(const ModelParams& p, const std::vector<int>& ell_list, double t_max,
                              const std::vector<double>& dt_list);

/// Columns: cos_angle, pairs, cov_emp, cov_theory, se, dev_se. Row 0 is the
/// coincident-point bin (the variance). Metadata: max_dev_se.
StudyTable isotropy_covariance_study(const ModelParams& p, const PowerSpectrum& cspec,
                                     const PowerSpectrum& aspec, int L, double t,
                                     int n_realizations, const RngStream& rng,
                                     NoiseConvention conv = NoiseConvention::independent,
                                     int n_bins = 20);

}  // namespace fracwave::experiments

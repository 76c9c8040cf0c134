#include "fracwave/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fracwave/error.hpp"
#include "fracwave/io.hpp"
#include "fracwave/mlf.hpp"
#include "fracwave/quadrature.hpp"
#include "fracwave/sht.hpp"

namespace fracwave::experiments {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> to_double(const std::vector<int>& v) { return {v.begin(), v.end()}; }

const char* convention_name(NoiseConvention c) {
  return c == NoiseConvention::shared_abs_m ? "shared_abs_m" : "independent";
}

}  // namespace

void StudyTable::add(const std::string& column_name, std::vector<double> values) {
  if (!columns.empty() && values.size() != rows()) {
    throw InvalidArgument("StudyTable: column length mismatch for " + column_name);
  }
  names.push_back(column_name);
  columns.push_back(std::move(values));
}

const std::vector<double>& StudyTable::column(const std::string& column_name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == column_name) return columns[i];
  }
  throw InvalidArgument("StudyTable: no column " + column_name);
}

std::string StudyTable::csv() const { return io::csv_table(names, columns); }

void StudyTable::write(const std::string& dir, const Json& extra_meta) const {
  io::ensure_dir(dir);
  io::write_file(io::join_path(dir, name + ".csv"), csv());
  Json meta = metadata;
  for (auto it = extra_meta.begin(); it != extra_meta.end(); ++it) meta[it.key()] = it.value();
  meta["columns"] = names;
  io::write_file(io::join_path(dir, name + ".meta.json"), meta.dump(2) + "\n");
}

Json params_json(const ModelParams& p) {
  return Json{{"c", p.c}, {"gamma", p.gamma}, {"k", p.k}, {"alpha", p.alpha}, {"tau", p.tau},
              {"omega", p.omega()}, {"varkappa", p.varkappa()}};
}

Json spectrum_json(const PowerSpectrum& s) {
  return Json{{"amp0", s.amp0}, {"scale", s.scale}, {"exponent", s.exponent}};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("loglog_slope: need >= 2 points");
  const std::size_t n = x.size();
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

StudyTable truncation_error_study(const ModelParams& p, const PowerSpectrum& cspec,
                                  const PowerSpectrum& aspec, const std::vector<int>& L_list,
                                  int L_ref, double t, int n_realizations, const RngStream& rng,
                                  NoiseConvention conv) {
  p.validate();
  cspec.validate();
  aspec.validate();
  if (L_list.empty()) throw InvalidArgument("truncation_error_study: empty L list");
  if (n_realizations < 2) throw InvalidArgument("truncation_error_study: need >= 2 realizations");
  std::vector<int> Ls = L_list;
  std::sort(Ls.begin(), Ls.end());
  if (Ls.front() < 0 || Ls.back() >= L_ref) {
    throw InvalidArgument("truncation_error_study: need 0 <= L < L_ref");
  }
  const int n_L = static_cast<int>(Ls.size());
  const int l_lo = Ls.front() + 1;
  const fields::SpectralTable tab = fields::make_table(p, L_ref, t);

  std::vector<double> c_sd(L_ref + 1);
  std::vector<double> a_sd(L_ref + 1);
  for (int l = 0; l <= L_ref; ++l) {
    c_sd[l] = std::sqrt(cspec.value(l)) * tab.f[l];
    a_sd[l] = std::sqrt(aspec.value(l) * tab.sigma2[l]);
  }

  // tails[j * n_L + i] = sum_{l > Ls[i]} sum_m U_lm^2 for realization j.
  std::vector<double> tails(static_cast<std::size_t>(n_realizations) * n_L, 0.0);
#pragma omp parallel
  {
    std::vector<double> energy(L_ref + 2, 0.0);
#pragma omp for schedule(dynamic)
    for (int j = 0; j < n_realizations; ++j) {
      for (int l = l_lo; l <= L_ref; ++l) {
        double e = 0.0;
        for (int m = -l; m <= l; ++m) {
          double u = 0.0;
          if (c_sd[l] != 0.0) u += c_sd[l] * rng.normal(j, l, m, DrawRole::initial);
          if (a_sd[l] != 0.0) {
            const int km = conv == NoiseConvention::shared_abs_m ? std::abs(m) : m;
            u += a_sd[l] * rng.normal(j, l, km, DrawRole::noise);
          }
          e += u * u;
        }
        energy[l] = e;
      }
      // Suffix sums from the top keep the tails monotone in L under rounding.
      double acc = 0.0;
      int i = n_L - 1;
      for (int l = L_ref; l >= l_lo; --l) {
        acc += energy[l];
        while (i >= 0 && Ls[i] == l - 1) {
          tails[static_cast<std::size_t>(j) * n_L + i] = acc;
          --i;
        }
      }
    }
  }

  const std::vector<double> w = fields::degree_variances(tab, cspec, aspec);
  std::vector<double> q_hat(n_L), q_se(n_L), q_exp(n_L), b_theory(n_L), b_fit(n_L);
  for (int i = 0; i < n_L; ++i) {
    double sum = 0.0;
    for (int j = 0; j < n_realizations; ++j) sum += tails[static_cast<std::size_t>(j) * n_L + i];
    const double mean = sum / n_realizations;
    double ss = 0.0;
    for (int j = 0; j < n_realizations; ++j) {
      const double d = tails[static_cast<std::size_t>(j) * n_L + i] - mean;
      ss += d * d;
    }
    const double se_sq = std::sqrt(ss / (n_realizations - 1) / n_realizations);
    q_hat[i] = std::sqrt(mean);
    q_se[i] = q_hat[i] > 0.0 ? se_sq / (2.0 * q_hat[i]) : 0.0;
    double ex = 0.0;
    for (int l = L_ref; l > Ls[i]; --l) ex += w[l];
    q_exp[i] = std::sqrt(ex);
  }

  const bool noise = !aspec.is_zero();
  const double kap2_margin = aspec.exponent - 2.0 / p.alpha;
  const double kt = noise ? spectral::kappa_tilde(p, cspec, aspec) : cspec.exponent;
  const double t_noise = std::max(t - p.tau, 0.0);

  const spectral::MajorantFit maj = spectral::fit_majorant(p);
  double c3_inhom = 0.0;
  if (noise && t_noise > 0.0) {
    std::vector<int> ells;
    for (int l = static_cast<int>(std::floor(p.varkappa())) + 1; l <= std::min(L_ref, 200); ++l) {
      ells.push_back(l);
    }
    c3_inhom = spectral::fit_sigma_bounds(p, ells, {t_noise}).c3_inhom;
  }
  for (int i = 0; i < n_L; ++i) {
    const int L = Ls[i];
    if (!(L > std::max(p.varkappa(), 1.0)) || t <= 0.0) {
      b_theory[i] = kNaN;
    } else if (!noise) {
      b_theory[i] = spectral::q_bound_hom(p, cspec, maj.consts, L, t);
    } else if (kap2_margin > 0.0) {
      b_theory[i] = spectral::q_bound_total(p, cspec, aspec, maj.consts, c3_inhom, L, t);
    } else {
      b_theory[i] = kNaN;
    }
    b_fit[i] = q_hat[0] * std::pow(static_cast<double>(L) / Ls[0], -kt / 2.0);
  }

  StudyTable tbl;
  tbl.name = "truncation_error";
  tbl.add("L", to_double(Ls));
  tbl.add("Q_hat", q_hat);
  tbl.add("Q_se", q_se);
  tbl.add("Q_expected", q_exp);
  tbl.add("bound_theory", b_theory);
  tbl.add("bound_fitted", b_fit);

  const bool positive = std::all_of(q_hat.begin(), q_hat.end(), [](double v) { return v > 0.0; });
  Json& m = tbl.metadata;
  m["study"] = "truncation_error";
  m["params"] = params_json(p);
  m["cspec"] = spectrum_json(cspec);
  m["aspec"] = spectrum_json(aspec);
  m["t"] = t;
  m["L_ref"] = L_ref;
  m["n_realizations"] = n_realizations;
  m["seed"] = rng.seed();
  m["noise_convention"] = convention_name(conv);
  m["slope"] = positive && n_L >= 2 ? loglog_slope(to_double(Ls), q_hat) : kNaN;
  m["slope_expected"] = positive && n_L >= 2 ? loglog_slope(to_double(Ls), q_exp) : kNaN;
  m["kappa_tilde"] = kt;
  m["target_slope"] = -kt / 2.0;
  m["majorant"] = Json{{"c0", maj.consts.c0}, {"c1", maj.consts.c1}, {"c2", maj.consts.c2},
                       {"inflation", maj.inflation}, {"lattice", maj.info.lattice}};
  m["c3_inhom"] = c3_inhom;
  return tbl;
}

StudyTable hoelder_study(const ModelParams& p, const PowerSpectrum& cspec,
                         const PowerSpectrum& aspec, int L, double t, int n_realizations,
                         double step, const RngStream& rng, double beta_star,
                         NoiseConvention conv) {
  p.validate();
  if (!(step > 0.0)) throw InvalidArgument("hoelder_study: step must be > 0");
  if (n_realizations < 2) throw InvalidArgument("hoelder_study: need >= 2 realizations");
  if (L < 0) throw InvalidArgument("hoelder_study: negative degree");
  constexpr double kTheta0 = 1e-6;
  const int n_k = static_cast<int>(std::ceil(std::numbers::pi / step)) + 1;
  const fields::SpectralTable tab = fields::make_table(p, L, t);
  const std::size_t nc = static_cast<std::size_t>(L + 1) * (L + 1);

  std::vector<double> coeffs(static_cast<std::size_t>(n_realizations) * nc);
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < n_realizations; ++j) {
    const fields::SolutionSnapshot s = fields::sample_snapshot(tab, cspec, aspec, rng, j, conv);
    std::copy(s.combined.values.begin(), s.combined.values.end(), coeffs.begin() + j * nc);
  }

  auto eval_point = [&](double theta, std::vector<double>& out) {
    // Colatitudes past pi are handled by the signed sine inside y_real_all,
    // which places the point on the opposite meridian.
    const std::vector<double> y = sht::y_real_all(L, theta, 0.0);
    for (int j = 0; j < n_realizations; ++j) {
      const double* a = &coeffs[j * nc];
      double s = 0.0;
      for (std::size_t q = 0; q < nc; ++q) s += a[q] * y[q];
      out[j] = s;
    }
  };
  std::vector<double> u0(n_realizations);
  eval_point(kTheta0, u0);

  const std::vector<double> w = fields::degree_variances(tab, cspec, aspec);
  const double k0 = fields::covariance_from_weights(w, 1.0);
  std::vector<double> d(n_k), geo(n_k), var(n_k), se(n_k), var_th(n_k), ratio(n_k);
#pragma omp parallel
  {
    std::vector<double> uk(n_realizations);
#pragma omp for schedule(dynamic)
    for (int k = 0; k < n_k; ++k) {
      d[k] = step * k;
      const double theta = kTheta0 + d[k];
      eval_point(theta, uk);
      double mean = 0.0;
      for (int j = 0; j < n_realizations; ++j) mean += u0[j] - uk[j];
      mean /= n_realizations;
      double ss = 0.0;
      for (int j = 0; j < n_realizations; ++j) {
        const double diff = u0[j] - uk[j] - mean;
        ss += diff * diff;
      }
      var[k] = ss / (n_realizations - 1);
      se[k] = var[k] * std::sqrt(2.0 / (n_realizations - 1));
      // Geodesic distance between (theta0, 0) and (theta, 0) on the sphere.
      const double cosang = std::clamp(std::cos(kTheta0) * std::cos(theta) +
                                       std::sin(kTheta0) * std::sin(theta), -1.0, 1.0);
      geo[k] = std::acos(cosang);
      var_th[k] = 2.0 * (k0 - fields::covariance_from_weights(w, cosang));
      ratio[k] = d[k] > 0.0 ? var[k] / std::pow(d[k], 2.0 * beta_star) : kNaN;
    }
  }

  std::vector<double> window;
  double w_max = 0.0;
  double w_min = std::numeric_limits<double>::infinity();
  double d_at_max = kNaN;
  for (int k = 0; k < n_k; ++k) {
    if (d[k] >= 0.01 - 1e-12 && d[k] <= 0.5 + 1e-12) {
      window.push_back(ratio[k]);
      if (ratio[k] > w_max) {
        w_max = ratio[k];
        d_at_max = d[k];
      }
      w_min = std::min(w_min, ratio[k]);
    }
  }
  const double med = median(window);

  StudyTable tbl;
  tbl.name = "hoelder";
  tbl.add("d", d);
  tbl.add("geodesic", geo);
  tbl.add("var", var);
  tbl.add("var_se", se);
  tbl.add("var_theory", var_th);
  tbl.add("ratio", ratio);
  Json& m = tbl.metadata;
  m["study"] = "hoelder";
  m["params"] = params_json(p);
  m["cspec"] = spectrum_json(cspec);
  m["aspec"] = spectrum_json(aspec);
  m["t"] = t;
  m["L"] = L;
  m["n_realizations"] = n_realizations;
  m["step"] = step;
  m["beta_star"] = beta_star;
  m["seed"] = rng.seed();
  m["noise_convention"] = convention_name(conv);
  m["reference_point"] = Json{{"theta", kTheta0}, {"phi", 0.0}};
  m["ratio_median_window"] = med;
  m["ratio_max_over_median"] = window.empty() ? kNaN : w_max / med;
  m["ratio_min_over_median"] = window.empty() ? kNaN : w_min / med;
  m["ratio_argmax_d"] = d_at_max;
  return tbl;
}

std::pair<double, double> fubini_variance_check(const ModelParams& p, int ell, double t, double tol) {
  p.validate();
  if (!(t > 0.0)) throw InvalidArgument("fubini_variance_check: t must be > 0");
  if (!(tol > 0.0)) throw InvalidArgument("fubini_variance_check: tol must be > 0");
  const double a = p.alpha;
  const double inner_tol = std::min(1e-11, tol * 1e-3);
  const double outer_tol = std::min(1e-10, tol * 1e-2);
  const double g1 = 1.0 / std::tgamma(a + 1.0);

  // (J^a psi)(v) with (v - r) = w^{1/a}, which absorbs the kernel singularity.
  auto frac_psi = [&](double v) {
    if (v <= 0.0) return 0.0;
    auto f = [&](double w) {
      const double r = v - std::pow(w, 1.0 / a);
      return r > 0.0 ? spectral::psi(p, ell, r) : 0.0;
    };
    return g1 * quad::integrate(f, 0.0, std::pow(v, a), inner_tol, 0.0, 20000).value;
  };
  const double lhs = quad::integrate([&](double v) {
    const double g = frac_psi(v);
    return g * g;
  }, 0.0, t, outer_tol, 0.0, 20000).value;
  const double rhs = quad::integrate([&](double s) {
    if (s <= 0.0) return 0.0;
    const double g = spectral::psi_b(p, ell, s, 2.0 * a);
    return g * g;
  }, 0.0, t, outer_tol, 0.0, 20000).value;
  return {lhs, rhs};
}

StudyTable ode_residual_study(const ModelParams& p, const std::vector<int>& ell_list, double t_max,
                              const std::vector<double>& dt_list) {
  p.validate();
  if (!(t_max > 0.0)) throw InvalidArgument("ode_residual_study: t_max must be > 0");
  std::vector<double> dts = dt_list;
  std::sort(dts.begin(), dts.end(), std::greater<>());
  const std::vector<double> t_grid{0.25 * t_max, 0.5 * t_max, t_max};
  const std::size_t n = ell_list.size() * dts.size();
  std::vector<double> ell_col(n), dt_col(n), res(n);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t idx = 0; idx < n; ++idx) {
    const int l = ell_list[idx / dts.size()];
    const double dt = dts[idx % dts.size()];
    ell_col[idx] = l;
    dt_col[idx] = dt;
    res[idx] = spectral::caputo_residual(p, l, t_grid, dt);
  }
  StudyTable tbl;
  tbl.name = "ode_residual";
  tbl.add("ell", ell_col);
  tbl.add("dt", dt_col);
  tbl.add("residual", res);
  Json mono = Json::object();
  for (std::size_t i = 0; i < ell_list.size(); ++i) {
    bool ok = true;
    for (std::size_t j = 1; j < dts.size(); ++j) {
      if (!(res[i * dts.size() + j] < res[i * dts.size() + j - 1])) ok = false;
    }
    mono[std::to_string(ell_list[i])] = ok;
  }
  tbl.metadata["study"] = "ode_residual";
  tbl.metadata["params"] = params_json(p);
  tbl.metadata["t_grid"] = t_grid;
  tbl.metadata["monotone"] = mono;
  return tbl;
}

StudyTable isotropy_covariance_study(const ModelParams& p, const PowerSpectrum& cspec,
                                     const PowerSpectrum& aspec, int L, double t,
                                     int n_realizations, const RngStream& rng,
                                     NoiseConvention conv, int n_bins) {
  p.validate();
  if (n_realizations < 2) throw InvalidArgument("isotropy_covariance_study: need >= 2 realizations");
  if (n_bins < 1) throw InvalidArgument("isotropy_covariance_study: need >= 1 bin");
  const sht::SphereGrid grid = sht::make_grid(L);
  const int np = grid.n_theta * grid.n_phi;
  const fields::SpectralTable tab = fields::make_table(p, L, t);
  const std::vector<double> w = fields::degree_variances(tab, cspec, aspec);

  std::vector<double> maps(static_cast<std::size_t>(n_realizations) * np);
  for (int j = 0; j < n_realizations; ++j) {
    const fields::SolutionSnapshot s = fields::sample_snapshot(tab, cspec, aspec, rng, j, conv);
    const sht::FieldMap map = sht::synthesize(s.combined, grid);
    std::copy(map.values.begin(), map.values.end(), maps.begin() + static_cast<std::size_t>(j) * np);
  }

  std::vector<double> xs(np), ys(np), zs(np);
  for (int i = 0; i < grid.n_theta; ++i) {
    for (int jj = 0; jj < grid.n_phi; ++jj) {
      const int q = i * grid.n_phi + jj;
      xs[q] = std::sin(grid.thetas[i]) * std::cos(grid.phis[jj]);
      ys[q] = std::sin(grid.thetas[i]) * std::sin(grid.phis[jj]);
      zs[q] = std::cos(grid.thetas[i]);
    }
  }

  // Bin 0: coincident points. Bins 1..n_bins: distinct pairs by cos angle.
  const int nb = n_bins + 1;
  std::vector<long long> count(nb, 0);
  std::vector<double> theory(nb, 0.0);
  std::vector<double> emp(static_cast<std::size_t>(n_realizations) * nb, 0.0);
  std::vector<int> bin_of;
  bin_of.reserve(static_cast<std::size_t>(np) * (np - 1) / 2);
  for (int a = 0; a < np; ++a) {
    for (int b = a + 1; b < np; ++b) {
      const double c = std::clamp(xs[a] * xs[b] + ys[a] * ys[b] + zs[a] * zs[b], -1.0, 1.0);
      const int bin = 1 + std::min(n_bins - 1, static_cast<int>((c + 1.0) / 2.0 * n_bins));
      bin_of.push_back(bin);
      count[bin] += 1;
      theory[bin] += fields::covariance_from_weights(w, c);
    }
  }
  count[0] = np;
  theory[0] = np * fields::covariance_from_weights(w, 1.0);

#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < n_realizations; ++j) {
    const double* u = &maps[static_cast<std::size_t>(j) * np];
    double* e = &emp[static_cast<std::size_t>(j) * nb];
    std::size_t pi = 0;
    for (int a = 0; a < np; ++a) {
      e[0] += u[a] * u[a];
      for (int b = a + 1; b < np; ++b) e[bin_of[pi++]] += u[a] * u[b];
    }
  }

  std::vector<double> cos_c(nb), pairs(nb), cov_emp(nb), cov_th(nb), se(nb), dev(nb);
  double max_dev = 0.0;
  for (int bin = 0; bin < nb; ++bin) {
    cos_c[bin] = bin == 0 ? 1.0 : -1.0 + (bin - 0.5) * 2.0 / n_bins;
    pairs[bin] = static_cast<double>(count[bin]);
    if (count[bin] == 0) {
      cov_emp[bin] = cov_th[bin] = se[bin] = dev[bin] = 0.0;
      continue;
    }
    double mean = 0.0;
    for (int j = 0; j < n_realizations; ++j) mean += emp[static_cast<std::size_t>(j) * nb + bin] / count[bin];
    mean /= n_realizations;
    double ss = 0.0;
    for (int j = 0; j < n_realizations; ++j) {
      const double dd = emp[static_cast<std::size_t>(j) * nb + bin] / count[bin] - mean;
      ss += dd * dd;
    }
    cov_emp[bin] = mean;
    cov_th[bin] = theory[bin] / count[bin];
    se[bin] = std::sqrt(ss / (n_realizations - 1) / n_realizations);
    dev[bin] = se[bin] > 0.0 ? std::abs(mean - cov_th[bin]) / se[bin] : 0.0;
    max_dev = std::max(max_dev, dev[bin]);
  }

  StudyTable tbl;
  tbl.name = "isotropy";
  tbl.add("cos_angle", cos_c);
  tbl.add("pairs", pairs);
  tbl.add("cov_emp", cov_emp);
  tbl.add("cov_theory", cov_th);
  tbl.add("se", se);
  tbl.add("dev_se", dev);
  Json& m = tbl.metadata;
  m["study"] = "isotropy";
  m["params"] = params_json(p);
  m["cspec"] = spectrum_json(cspec);
  m["aspec"] = spectrum_json(aspec);
  m["t"] = t;
  m["L"] = L;
  m["n_realizations"] = n_realizations;
  m["seed"] = rng.seed();
  m["noise_convention"] = convention_name(conv);
  m["max_dev_se"] = max_dev;
  return tbl;
}

}  // namespace fracwave::experiments

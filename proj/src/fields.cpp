#include "fracwave/fields.hpp"

#include <cmath>

#include "fracwave/error.hpp"
#include "fracwave/io.hpp"

namespace fracwave::fields {

SpectralTable make_table(const ModelParams& p, int L, double t, double rel_tol) {
  p.validate();
  if (L < 0) throw InvalidArgument("make_table: negative degree");
  if (!std::isfinite(t) || t < 0.0) throw InvalidArgument("make_table: t must be >= 0");
  SpectralTable tab;
  tab.L = L;
  tab.t = t;
  tab.f.assign(L + 1, 0.0);
  tab.sigma2.assign(L + 1, 0.0);
  const bool noise = t > p.tau;
#pragma omp parallel for schedule(dynamic)
  for (int l = 0; l <= L; ++l) {
    tab.f[l] = spectral::f_coeff(p, l, t);
    if (noise) tab.sigma2[l] = spectral::sigma2(p, l, t - p.tau, rel_tol);
  }
  return tab;
}

HarmonicCoeffs sample_initial(const PowerSpectrum& spectrum, int L, const RngStream& rng,
                              std::uint64_t realization) {
  spectrum.validate();
  HarmonicCoeffs out(L);
#pragma omp parallel for schedule(static)
  for (int l = 0; l <= L; ++l) {
    const double sd = std::sqrt(spectrum.value(l));
    for (int m = -l; m <= l; ++m) {
      out.at(l, m) = sd == 0.0 ? 0.0 : sd * rng.normal(realization, l, m, DrawRole::initial);
    }
  }
  return out;
}

HarmonicCoeffs evolve_hom(const HarmonicCoeffs& initial, const SpectralTable& table) {
  if (table.L < initial.degree) throw InvalidArgument("evolve_hom: table degree too small");
  HarmonicCoeffs out = initial;
  for (int l = 0; l <= initial.degree; ++l) {
    const double f = table.f[l];
    for (int m = -l; m <= l; ++m) out.at(l, m) *= f;
  }
  return out;
}

HarmonicCoeffs evolve_hom(const HarmonicCoeffs& initial, const ModelParams& p, double t) {
  p.validate();
  if (!std::isfinite(t) || t < 0.0) throw InvalidArgument("evolve_hom: t must be >= 0");
  SpectralTable tab;
  tab.L = initial.degree;
  tab.t = t;
  tab.f.resize(initial.degree + 1);
#pragma omp parallel for schedule(dynamic)
  for (int l = 0; l <= initial.degree; ++l) tab.f[l] = spectral::f_coeff(p, l, t);
  return evolve_hom(initial, tab);
}

HarmonicCoeffs sample_inhom(const SpectralTable& table, const PowerSpectrum& spectrum,
                            const RngStream& rng, std::uint64_t realization, NoiseConvention conv) {
  spectrum.validate();
  const int L = table.L;
  HarmonicCoeffs out(L);
#pragma omp parallel for schedule(static)
  for (int l = 0; l <= L; ++l) {
    const double var = spectrum.value(l) * table.sigma2[l];
    if (var == 0.0) continue;
    const double sd = std::sqrt(var);
    for (int m = -l; m <= l; ++m) {
      const int key_m = conv == NoiseConvention::shared_abs_m ? std::abs(m) : m;
      out.at(l, m) = sd * rng.normal(realization, l, key_m, DrawRole::noise);
    }
  }
  return out;
}

HarmonicCoeffs sample_inhom(const ModelParams& p, const PowerSpectrum& spectrum, int L, double t,
                            const RngStream& rng, std::uint64_t realization, NoiseConvention conv) {
  p.validate();
  if (!std::isfinite(t) || t < 0.0) throw InvalidArgument("sample_inhom: t must be >= 0");
  SpectralTable tab;
  tab.L = L;
  tab.t = t;
  tab.sigma2.assign(L + 1, 0.0);
  if (t > p.tau) {
#pragma omp parallel for schedule(dynamic)
    for (int l = 0; l <= L; ++l) {
      if (spectrum.value(l) > 0.0) tab.sigma2[l] = spectral::sigma2(p, l, t - p.tau);
    }
  }
  return sample_inhom(tab, spectrum, rng, realization, conv);
}

HarmonicCoeffs combine(const HarmonicCoeffs& hom, const HarmonicCoeffs& inhom) {
  if (hom.degree != inhom.degree || hom.size() != inhom.size()) {
    throw InvalidArgument("combine: degree mismatch");
  }
  HarmonicCoeffs out = hom;
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] += inhom.values[i];
  return out;
}

SolutionSnapshot sample_snapshot(const SpectralTable& table, const PowerSpectrum& cspec,
                                 const PowerSpectrum& aspec, const RngStream& rng,
                                 std::uint64_t realization, NoiseConvention conv) {
  SolutionSnapshot snap;
  snap.t = table.t;
  snap.L = table.L;
  snap.hom = evolve_hom(sample_initial(cspec, table.L, rng, realization), table);
  snap.inhom = sample_inhom(table, aspec, rng, realization, conv);
  snap.combined = combine(snap.hom, snap.inhom);
  return snap;
}

std::vector<double> degree_variances(const SpectralTable& table, const PowerSpectrum& cspec,
                                     const PowerSpectrum& aspec) {
  std::vector<double> w(table.L + 1);
  for (int l = 0; l <= table.L; ++l) {
    const double f = table.f.empty() ? 1.0 : table.f[l];
    w[l] = (2.0 * l + 1.0) * (cspec.value(l) * f * f + aspec.value(l) * table.sigma2[l]);
  }
  return w;
}

double covariance_from_weights(const std::vector<double>& weights, double cos_angle) {
  if (!(std::abs(cos_angle) <= 1.0)) throw InvalidArgument("covariance: |cos_angle| must be <= 1");
  double sum = 0.0;
  double p0 = 1.0;
  double p1 = cos_angle;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    double pl = 0.0;
    if (l == 0) {
      pl = 1.0;
    } else if (l == 1) {
      pl = cos_angle;
    } else {
      const double k = static_cast<double>(l);
      pl = ((2.0 * k - 1.0) * cos_angle * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pl;
    }
    sum += weights[l] * pl;
  }
  return sum;
}

double covariance_theoretical(const ModelParams& p, const PowerSpectrum& cspec,
                              const PowerSpectrum& aspec, int L, double t, double cos_angle) {
  const SpectralTable tab = make_table(p, L, t);
  return covariance_from_weights(degree_variances(tab, cspec, aspec), cos_angle);
}

double variance_theoretical(const ModelParams& p, const PowerSpectrum& cspec,
                            const PowerSpectrum& aspec, int L, double t) {
  return covariance_theoretical(p, cspec, aspec, L, t, 1.0);
}

std::string snapshot_csv(const SolutionSnapshot& snap) {
  std::string out = "ell,m,hom,inhom,combined\n";
  for (int l = 0; l <= snap.L; ++l) {
    for (int m = -l; m <= l; ++m) {
      out += std::to_string(l);
      out += ',';
      out += std::to_string(m);
      out += ',';
      out += io::format_double(snap.hom.at(l, m));
      out += ',';
      out += io::format_double(snap.inhom.at(l, m));
      out += ',';
      out += io::format_double(snap.combined.at(l, m));
      out += '\n';
    }
  }
  return out;
}

}  // namespace fracwave::fields

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fracwave/rng.hpp"
#include "fracwave/sht.hpp"
#include "fracwave/spectral.hpp"
#include "fracwave/spectrum.hpp"

namespace fracwave::fields {

using sht::HarmonicCoeffs;
using spectral::ModelParams;

/// How the noise integral is shared between orders +m and -m.
/// shared_abs_m: one draw per (l, |m|), reused for both signs (the printed
/// indexing). independent: one draw per (l, m).
enum class NoiseConvention { shared_abs_m, independent };

/// Per-degree F_l(t) and sigma^2_{l, t - tau} (zero when t <= tau).
struct SpectralTable {
  int L = 0;
  double t = 0.0;
  std::vector<double> f;
  std::vector<double> sigma2;
};

SpectralTable make_table(const ModelParams& p, int L, double t, double rel_tol = 1e-8);

HarmonicCoeffs sample_initial(const PowerSpectrum& spectrum, int L, const RngStream& rng,
                              std::uint64_t realization = 0);

HarmonicCoeffs evolve_hom(const HarmonicCoeffs& initial, const ModelParams& p, double t);
HarmonicCoeffs evolve_hom(const HarmonicCoeffs& initial, const SpectralTable& table);

HarmonicCoeffs sample_inhom(const ModelParams& p, const PowerSpectrum& spectrum, int L, double t,
                            const RngStream& rng, std::uint64_t realization = 0,
                            NoiseConvention conv = NoiseConvention::shared_abs_m);
HarmonicCoeffs sample_inhom(const SpectralTable& table, const PowerSpectrum& spectrum,
                            const RngStream& rng, std::uint64_t realization = 0,
                            NoiseConvention conv = NoiseConvention::shared_abs_m);

HarmonicCoeffs combine(const HarmonicCoeffs& hom, const HarmonicCoeffs& inhom);

struct SolutionSnapshot {
  double t = 0.0;
  int L = 0;
  HarmonicCoeffs hom;
  HarmonicCoeffs inhom;
  HarmonicCoeffs combined;
};

SolutionSnapshot sample_snapshot(const SpectralTable& table, const PowerSpectrum& cspec,
                                 const PowerSpectrum& aspec, const RngStream& rng,
                                 std::uint64_t realization = 0,
                                 NoiseConvention conv = NoiseConvention::shared_abs_m);

/// (2l+1) (C_l F_l(t)^2 + 1{t > tau} A_l sigma^2_{l,t-tau}) for l = 0..L.
std::vector<double> degree_variances(const SpectralTable& table, const PowerSpectrum& cspec,
                                     const PowerSpectrum& aspec);

double covariance_theoretical(const ModelParams& p, const PowerSpectrum& cspec,
                              const PowerSpectrum& aspec, int L, double t, double cos_angle);
double variance_theoretical(const ModelParams& p, const PowerSpectrum& cspec,
                            const PowerSpectrum& aspec, int L, double t);
/// sum_l w_l P_l(cos_angle) for precomputed degree variances.
double covariance_from_weights(const std::vector<double>& weights, double cos_angle);

/// CSV with header ell,m,hom,inhom,combined.
std::string snapshot_csv(const SolutionSnapshot& snap);

}  // namespace fracwave::fields

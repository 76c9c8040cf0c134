#pragma once

#include <complex>
#include <string>
#include <vector>

#include "fracwave/spectrum.hpp"

namespace fracwave::spectral {

using cplx = std::complex<double>;

/// Constants of (1/c^2) D^{2a} u + (1/gamma) D^a u = k^2 Laplacian u + noise.
struct ModelParams {
  double c = 1.0;
  double gamma = 1.0;
  double k = 0.05;
  double alpha = 0.9;
  double tau = 0.04;

  double omega() const;
  /// Positive root of l(l+1) = omega^2; degrees above it oscillate.
  double varkappa() const;
  /// Throws InvalidArgument when a constant is out of range.
  void validate() const;
};

enum class BranchRegime { below, critical, above };

const char* regime_name(BranchRegime r);

struct BranchData {
  int ell = 0;
  double lambda = 0.0;
  cplx m_ell;
  cplx z_minus;
  cplx z_plus;
  BranchRegime regime = BranchRegime::below;
};

BranchData branch(const ModelParams& p, int ell);

/// Homogeneous coefficient F_{l,a}(t), F(0) = 1.
double f_coeff(const ModelParams& p, int ell, double t);

/// Kernel psi_{l,a}(t) of the noise integral, t > 0.
double psi(const ModelParams& p, int ell, double t);

/// psi^b_{l,a}(t) = (gamma/M) t^{b-1} (E_{a,b}(-z^- t^a) - E_{a,b}(-z^+ t^a)).
double psi_b(const ModelParams& p, int ell, double t, double b);

/// Noise variance sigma^2_{l,t,a} = int_0^t psi(r)^2 dr.
double sigma2(const ModelParams& p, int ell, double t, double rel_tol = 1e-8);

/// Majorant H(t) = c0 + c1/t + c2/t^a of sqrt(lambda) |F|.
struct BoundConstants {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

double h_majorant(const BoundConstants& consts, const ModelParams& p, double t);

/// (scale (2 n^{2-kappa}/(kappa-2) + n^{1-kappa}/(kappa-1)))^{1/2}, n = floor(x).
double c_tilde_kappa(double scale, double kappa, double x);

/// (scale (2 n^{2/a-kappa}/(kappa-2/a) + n^{2/a-kappa-1}/(kappa-2/a+1)))^{1/2}.
double a_tilde_kappa(double scale, double kappa, double alpha, double x);

/// Prefactor 2^{(1-a)/(2a)} sqrt(c3) A~_{kappa2}(1) of the noise tail bound.
double e_kappa(const ModelParams& p, const PowerSpectrum& aspec, double c3_inhom);

double q_bound_hom(const ModelParams& p, const PowerSpectrum& cspec, const BoundConstants& consts,
                   int L, double t);
double q_bound_inhom(const ModelParams& p, const PowerSpectrum& aspec, double c3_inhom, int L);
double q_bound_total(const ModelParams& p, const PowerSpectrum& cspec,
                     const PowerSpectrum& aspec, const BoundConstants& consts,
                     double c3_inhom, int L, double t);
/// min(kappa1, kappa2 - 2/a).
double kappa_tilde(const ModelParams& p, const PowerSpectrum& cspec, const PowerSpectrum& aspec);

/// Max over t_grid of |(1/c^2) D^{2a}F + (1/gamma) D^a F + k^2 lambda F|, with
/// the Caputo derivatives discretized by L1-type sums on a mesh of step dt.
double caputo_residual(const ModelParams& p, int ell, const std::vector<double>& t_grid, double dt);

// Fitted constants. Each fit records the lattice it used.

struct FitInfo {
  std::string lattice;
  int points = 0;
};

struct MajorantFit {
  BoundConstants consts;
  double inflation = 1.0;  // factor applied after the least-squares fit
  FitInfo info;
};

/// (c0, c1, c2) >= 0 fitted to max_l sqrt(lambda_l)|F_l(t)| on l in [l_lo, l_hi],
/// t on a log grid of [t_lo, t_hi], then scaled up until H dominates every point.
MajorantFit fit_majorant(const ModelParams& p, int l_lo = 1, int l_hi = 200, double t_lo = 0.01,
                         double t_hi = 10.0, int n_t = 40);

/// max |E_{a,b}(-z t^a)| (1 + |z| t^a) over z = z_l^+-, l <= varkappa, t in ts.
double fit_c3(const ModelParams& p, double b, const std::vector<double>& ts);

struct SigmaBoundFit {
  double c1_inhom = 0.0;  // below: sigma^2 |M|^2 |z^-|^{2-1/a}
  double c3_inhom = 0.0;  // above: sigma^2 / lambda^{(1-a)/a}
  FitInfo info;
};

/// Fits the regime bounds of sigma^2 over the given degrees and times.
SigmaBoundFit fit_sigma_bounds(const ModelParams& p, const std::vector<int>& ells,
                               const std::vector<double>& ts);

namespace detail {
/// Generic two-root formula, without the l = 0 or near-critical shortcuts.
cplx f_generic(const ModelParams& p, int ell, double t);
cplx psi_generic(const ModelParams& p, int ell, double t);
}  // namespace detail

}  // namespace fracwave::spectral

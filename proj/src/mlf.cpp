#include "fracwave/mlf.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "fracwave/error.hpp"

namespace fracwave::mlf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSeriesRadius = 10.0;
constexpr double kAsymptoticRadius = 10.0;
constexpr int kMaxSeriesTerms = 2000;
constexpr int kMaxAsymptoticTerms = 400;
// Accept the Taylor sum only if cancellation costs at most four digits.
constexpr double kMaxSeriesCondition = 1e4;
constexpr double kContourLogEps = -34.538776394910684;  // log(1e-15)
constexpr long kMaxContourNodes = 2'000'000;

bool is_nonpositive_integer(double x) {
  return x <= 0.0 && x == std::nearbyint(x);
}

// Series indices b - a k accumulate rounding; treat those within a few ulps of
// a pole as exact zeros of 1/Gamma.
bool near_nonpositive_integer(double x) {
  return x <= 0.5 && std::abs(x - std::nearbyint(x)) <= 64.0 * DBL_EPSILON * std::max(1.0, std::abs(x));
}

// log|1/Gamma(x)| and sign of 1/Gamma(x); x must not be a pole.
void log_rgamma(double x, double& log_mag, double& sign) {
  if (x > 0.0) {
    log_mag = -std::lgamma(x);
    sign = 1.0;
    return;
  }
  // Reflection: 1/Gamma(x) = sin(pi x) Gamma(1 - x) / pi.
  const double s = std::sin(kPi * x);
  log_mag = std::lgamma(1.0 - x) + std::log(std::abs(s)) - std::log(kPi);
  sign = s < 0.0 ? -1.0 : 1.0;
}

void check_finite(double a, double b, double q, cplx z) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(q) ||
      !std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw InvalidArgument("mittag-leffler: non-finite argument");
  }
  if (!(a > 0.0) || !(a < 2.0)) {
    throw InvalidArgument("mittag-leffler: first parameter must lie in (0, 2)");
  }
  if (!(q > 0.0)) {
    throw InvalidArgument("mittag-leffler: third parameter must be positive");
  }
}

struct SeriesSum {
  cplx sum;
  double abs_sum;
  bool converged;
};

// Taylor series sum_r (q)_r / r! * z^r / Gamma(a r + b), terms built in log
// space so that large powers of |z| cannot overflow.
SeriesSum taylor(double a, double b, double q, cplx z) {
  const double log_abs_z = std::log(std::abs(z));
  const double arg_z = std::arg(z);
  const double lg_q = std::lgamma(q);
  cplx sum = 0.0;
  double abs_sum = 0.0;
  double prev_mag = std::numeric_limits<double>::infinity();
  for (int r = 0; r < kMaxSeriesTerms; ++r) {
    const double x = a * r + b;
    double mag = 0.0;
    double sign = 1.0;
    if (!near_nonpositive_integer(x)) {
      double lr = 0.0;
      log_rgamma(x, lr, sign);
      double log_poch = 0.0;
      if (q != 1.0) log_poch = std::lgamma(q + r) - lg_q - std::lgamma(r + 1.0);
      const double log_mag = log_poch + lr + r * log_abs_z;
      if (log_mag > 700.0) return {sum, abs_sum, false};
      mag = std::exp(log_mag);
    }
    if (mag > 0.0) {
      sum += sign * std::polar(mag, r * arg_z);
      abs_sum += mag;
    }
    const bool past_peak = mag <= prev_mag && x > 1.0;
    if (r > 0 && past_peak && mag <= 1e-17 * std::abs(sum)) {
      return {sum, abs_sum, true};
    }
    prev_mag = mag;
  }
  return {sum, abs_sum, false};
}

struct AsymptoticSum {
  cplx value;
  double error;
  bool usable;
};

// Poles s* of s^{a-b} / (s^a - z) on the principal sheet contribute
// (1/a) s*^{1-b} exp(s*); the remaining Hankel integral is expanded as
// -sum_k z^{-k} / Gamma(b - a k), truncated at its smallest term.
AsymptoticSum asymptotic(double a, double b, cplx z) {
  const double abs_z = std::abs(z);
  const double theta = std::arg(z);
  const double root = std::pow(abs_z, 1.0 / a);
  const bool integer_b = b == std::nearbyint(b);

  cplx exp_part = 0.0;
  bool counted_cut_pole = false;
  double cut_pole_mag = 0.0;
  const int kmin = static_cast<int>(std::ceil(-a / 2.0 - theta / (2.0 * kPi)));
  const int kmax = static_cast<int>(std::floor(a / 2.0 - theta / (2.0 * kPi)));
  for (int k = kmin; k <= kmax; ++k) {
    const double phase = (theta + 2.0 * kPi * k) / a;
    const cplx s = std::polar(root, phase);
    const double dist_to_cut = kPi - std::abs(phase);
    const double mag = std::exp(s.real()) * std::pow(root, 1.0 - b) / a;
    if (dist_to_cut > 1e-12) {
      exp_part += std::pow(s, 1.0 - b) * std::exp(s) / a;
      if (dist_to_cut < 0.05) cut_pole_mag = std::max(cut_pole_mag, mag);
    } else if (a == 1.0 && integer_b) {
      // s^{1-b} is single valued: the pole sits on a removable cut.
      if (!counted_cut_pole) {
        exp_part += std::pow(cplx(s.real(), 0.0), 1.0 - b) * std::exp(s.real()) / a;
        counted_cut_pole = true;
      }
    } else {
      cut_pole_mag = std::max(cut_pole_mag, mag);
    }
  }

  cplx alg = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  double error = 0.0;
  const double log_abs_z = std::log(abs_z);
  // At a = 1 with integer b every term past k = b - 1 vanishes.
  const int last_k = (a == 1.0 && integer_b) ? static_cast<int>(b) - 1 : kMaxAsymptoticTerms;
  for (int k = 1; k <= kMaxAsymptoticTerms; ++k) {
    if (k > last_k) {
      error = 0.0;
      break;
    }
    const double x = b - a * k;
    if (near_nonpositive_integer(x)) continue;
    double lr = 0.0;
    double sign = 1.0;
    log_rgamma(x, lr, sign);
    const double mag = std::exp(lr - k * log_abs_z);
    if (mag > prev) {
      error = prev;
      break;
    }
    alg -= sign * std::polar(mag, -k * theta);
    prev = mag;
    error = mag;
  }

  const cplx value = exp_part + alg;
  const double scale = std::abs(value);
  // A pole close to the cut makes the algebraic remainder non-uniform; only
  // accept when its contribution is negligible.
  const bool usable = scale > 0.0 && error <= 1e-15 * scale &&
                      cut_pole_mag <= 1e-17 * scale;
  return {value, error + 1e-16 * scale, usable};
}

struct ContourParams {
  double mu = 0.0;
  double h = 0.0;
  double n = std::numeric_limits<double>::infinity();
};

// Optimal parabolic contour parameters on a region bounded by two
// singularities (Garrappa, SIAM J. Numer. Anal. 53, 2015).
ContourParams optimal_bounded(double t, double phi_j, double phi_j1, double pj,
                              double qj, double log_eps) {
  const double log_mach = std::log(DBL_EPSILON);
  const double fac = 1.01;
  const double f_max = std::exp(log_eps - log_mach);
  const double sq_phi_j = std::sqrt(phi_j);
  const double threshold = 2.0 * std::sqrt((log_eps - log_mach) / t);
  const double sq_phi_j1 = std::min(std::sqrt(phi_j1), threshold - sq_phi_j);

  double sq_bar_j = 0.0;
  double sq_bar_j1 = 0.0;
  double f_bar = 1.0;
  bool admissible = false;
  if (pj < 1e-14 && qj < 1e-14) {
    sq_bar_j = sq_phi_j;
    sq_bar_j1 = sq_phi_j1;
    admissible = true;
  } else if (pj < 1e-14) {
    sq_bar_j = sq_phi_j;
    const double f_min =
        sq_phi_j > 0.0 ? fac * std::pow(sq_phi_j / (sq_phi_j1 - sq_phi_j), qj) : fac;
    if (f_min < f_max) {
      f_bar = f_min + f_min / f_max * (f_max - f_min);
      const double fq = std::pow(f_bar, -1.0 / qj);
      sq_bar_j1 = (2.0 * sq_phi_j1 - fq * sq_phi_j) / (2.0 + fq);
      admissible = true;
    }
  } else if (qj < 1e-14) {
    sq_bar_j1 = sq_phi_j1;
    const double f_min = fac * std::pow(sq_phi_j1 / (sq_phi_j1 - sq_phi_j), pj);
    if (f_min < f_max) {
      f_bar = f_min + f_min / f_max * (f_max - f_min);
      const double fp = std::pow(f_bar, -1.0 / pj);
      sq_bar_j = (2.0 * sq_phi_j + fp * sq_phi_j1) / (2.0 - fp);
      admissible = true;
    }
  } else {
    double f_min = fac * (sq_phi_j + sq_phi_j1) /
                   std::pow(sq_phi_j1 - sq_phi_j, std::max(pj, qj));
    if (f_min < f_max) {
      f_min = std::max(f_min, 1.5);
      f_bar = f_min + f_min / f_max * (f_max - f_min);
      const double fp = std::pow(f_bar, -1.0 / pj);
      const double fq = std::pow(f_bar, -1.0 / qj);
      const double w = -phi_j1 * t / log_eps;
      const double den = 2.0 + w - (1.0 + w) * fp + fq;
      sq_bar_j = ((2.0 + w + fq) * sq_phi_j + fp * sq_phi_j1) / den;
      sq_bar_j1 = (-(1.0 + w) * fq * sq_phi_j + (2.0 + w - (1.0 + w) * fp) * sq_phi_j1) / den;
      admissible = true;
    }
  }
  if (!admissible) return {};

  const double le = log_eps - std::log(f_bar);
  const double w = -sq_bar_j1 * sq_bar_j1 * t / le;
  ContourParams out;
  out.mu = std::pow(((1.0 + w) * sq_bar_j + sq_bar_j1) / (2.0 + w), 2);
  out.h = -2.0 * kPi / le * (sq_bar_j1 - sq_bar_j) / ((1.0 + w) * sq_bar_j + sq_bar_j1);
  out.n = std::ceil(std::sqrt(1.0 - le / t / out.mu) / out.h);
  if (!(out.mu > 0.0) || !(out.h > 0.0) || !std::isfinite(out.n)) return {};
  return out;
}

// Contour parameters for the unbounded region right of the last singularity.
ContourParams optimal_unbounded(double t, double phi_j, double pj, double log_eps) {
  const double sq_phi_j = std::sqrt(phi_j);
  double phibar = phi_j > 0.0 ? phi_j * 1.01 : 0.01;
  double sq_phibar = std::sqrt(phibar);
  const double f_min = 1.0;
  const double f_max = 10.0;
  const double f_tar = 5.0;

  double n = 0.0;
  double a_coef = 0.0;
  double sq_mu = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double phi_t = phibar * t;
    const double log_eps_phi_t = log_eps / phi_t;
    n = std::ceil(phi_t / kPi *
                  (1.0 - 1.5 * log_eps_phi_t + std::sqrt(1.0 - 2.0 * log_eps_phi_t)));
    a_coef = kPi * n / phi_t;
    sq_mu = sq_phibar * std::abs(4.0 - a_coef) / std::abs(7.0 - std::sqrt(1.0 + 12.0 * a_coef));
    const double fbar = std::pow((sq_phibar - sq_phi_j) / sq_mu, -pj);
    if (pj < 1e-14 || (f_min < fbar && fbar < f_max)) break;
    sq_phibar = std::pow(f_tar, -1.0 / pj) * sq_mu + sq_phi_j;
    phibar = sq_phibar * sq_phibar;
  }
  ContourParams out;
  out.mu = sq_mu * sq_mu;
  out.h = (-3.0 * a_coef - 2.0 + 2.0 * std::sqrt(1.0 + 12.0 * a_coef)) / (4.0 - a_coef) / n;
  out.n = n;

  const double log_mach = std::log(DBL_EPSILON);
  const double threshold = (log_eps - log_mach) / t;
  if (out.mu > threshold) {
    const double qq = std::abs(pj) < 1e-14 ? 0.0 : std::pow(f_tar, -1.0 / pj) * std::sqrt(out.mu);
    phibar = std::pow(qq + sq_phi_j, 2);
    if (phibar < threshold) {
      const double w = std::sqrt(log_mach / (log_mach - log_eps));
      const double u = std::sqrt(-phibar * t / log_mach);
      out.mu = threshold;
      out.n = std::ceil(w * log_eps / 2.0 / kPi / (u * w - 1.0));
      out.h = std::sqrt(log_mach / (log_mach - log_eps)) / out.n;
    } else {
      return {};
    }
  }
  if (!(out.mu > 0.0) || !(out.h > 0.0) || !std::isfinite(out.n)) return {};
  return out;
}

cplx laplace_image(double a, double b, double q, cplx z, cplx s) {
  return std::pow(s, a * q - b) / std::pow(std::pow(s, a) - z, q);
}

// Residue of exp(s) s^{aq-b} / (s^a - z)^q at a root s* of s^a = z.
cplx residue(double a, double b, double q, cplx z, cplx s_star,
             const std::vector<cplx>& others) {
  if (q == 1.0) return std::pow(s_star, 1.0 - b) * std::exp(s_star) / a;
  double radius = std::abs(s_star);
  if (s_star.real() < 0.0) radius = std::min(radius, std::abs(s_star.imag()));
  for (const cplx& o : others) {
    if (o != s_star) radius = std::min(radius, std::abs(o - s_star));
  }
  radius = std::min(0.5 * radius, 1.0);
  constexpr int kNodes = 256;
  cplx acc = 0.0;
  for (int j = 0; j < kNodes; ++j) {
    const cplx e = std::polar(1.0, 2.0 * kPi * j / kNodes);
    const cplx s = s_star + radius * e;
    acc += std::exp(s) * laplace_image(a, b, q, z, s) * radius * e;
  }
  return acc / static_cast<double>(kNodes);
}

// E^q_{a,b}(z) as the inverse Laplace transform of s^{aq-b}/(s^a - z)^q at
// t = 1, by the trapezoidal rule on an optimal parabolic contour plus the
// residues of the singularities left to its right.
MlfResult contour(double a, double b, double q, cplx z) {
  const double t = 1.0;
  const double log_eps = kContourLogEps;
  const double log_mach = std::log(DBL_EPSILON);
  const double abs_z = std::abs(z);
  const double theta = std::arg(z);

  std::vector<cplx> poles;
  const int kmin = static_cast<int>(std::ceil(-a / 2.0 - theta / (2.0 * kPi)));
  const int kmax = static_cast<int>(std::floor(a / 2.0 - theta / (2.0 * kPi)));
  for (int k = kmin; k <= kmax; ++k) {
    const cplx s = std::polar(std::pow(abs_z, 1.0 / a), (theta + 2.0 * kPi * k) / a);
    if ((s.real() + std::abs(s)) / 2.0 > 1e-15) poles.push_back(s);
  }
  auto phi_of = [](cplx s) { return (s.real() + std::abs(s)) / 2.0; };
  std::sort(poles.begin(), poles.end(),
            [&](cplx l, cplx r) { return phi_of(l) < phi_of(r); });

  std::vector<cplx> s_star{cplx(0.0)};
  s_star.insert(s_star.end(), poles.begin(), poles.end());
  const std::size_t n_sing = s_star.size();
  std::vector<double> phi(n_sing + 1);
  for (std::size_t j = 0; j < n_sing; ++j) phi[j] = phi_of(s_star[j]);
  phi[n_sing] = std::numeric_limits<double>::infinity();

  std::vector<double> p(n_sing, q);
  p[0] = std::max(0.0, -2.0 * (a * q - b + 1.0));
  std::vector<double> qv(n_sing, q);
  qv[n_sing - 1] = std::numeric_limits<double>::infinity();

  std::size_t last_admissible = 0;
  for (std::size_t j = 0; j < n_sing; ++j) {
    if (phi[j] < (log_eps - log_mach) / t && phi[j] < phi[j + 1]) last_admissible = j;
  }

  ContourParams best;
  std::size_t best_region = 0;
  for (std::size_t j = 0; j <= last_admissible; ++j) {
    const ContourParams cp = (j + 1 < n_sing)
                                 ? optimal_bounded(t, phi[j], phi[j + 1], p[j], qv[j], log_eps)
                                 : optimal_unbounded(t, phi[j], p[j], log_eps);
    if (cp.n < best.n) {
      best = cp;
      best_region = j;
    }
  }
  if (!std::isfinite(best.n) || best.n > kMaxContourNodes) {
    throw AccuracyError("mittag-leffler: no admissible integration contour",
                        std::numeric_limits<double>::infinity());
  }

  const long n = static_cast<long>(best.n);
  cplx integral = 0.0;
  double magnitude = 0.0;
  for (long k = -n; k <= n; ++k) {
    const double u = best.h * static_cast<double>(k);
    const cplx s = best.mu * std::pow(cplx(1.0, u), 2);
    const cplx ds = cplx(-2.0 * best.mu * u, 2.0 * best.mu);
    const cplx term = std::exp(s * t) * laplace_image(a, b, q, z, s) * ds;
    integral += term;
    magnitude += std::abs(term);
  }
  integral *= best.h / (2.0 * kPi * cplx(0.0, 1.0));
  magnitude *= best.h / (2.0 * kPi);

  cplx res = 0.0;
  for (std::size_t j = best_region + 1; j < n_sing; ++j) {
    res += residue(a, b, q, z, s_star[j], s_star);
  }
  const cplx value = integral + res;
  const double err = std::exp(log_eps) * std::max(1.0, std::abs(value)) + DBL_EPSILON * magnitude;
  return {value, Regime::contour, err};
}

MlfResult evaluate_upper(const MlfOrder& o, cplx z) {
  const double abs_z = std::abs(z);
  if (abs_z == 0.0) return {cplx(rgamma(o.b), 0.0), Regime::zero, 0.0};

  if (abs_z <= kSeriesRadius) {
    const SeriesSum s = taylor(o.a, o.b, o.q, z);
    const double mag = std::abs(s.sum);
    if (s.converged && mag > 0.0 && s.abs_sum <= kMaxSeriesCondition * mag) {
      return {s.sum, Regime::series, 4.0 * DBL_EPSILON * s.abs_sum};
    }
  }
  if (o.q == 1.0 && abs_z >= kAsymptoticRadius) {
    const AsymptoticSum s = asymptotic(o.a, o.b, z);
    if (s.usable) return {s.value, Regime::asymptotic, s.error};
  }
  return contour(o.a, o.b, o.q, z);
}

}  // namespace

double gamma(double x) {
  if (!std::isfinite(x)) throw InvalidArgument("gamma: non-finite argument");
  if (is_nonpositive_integer(x)) throw DomainError("gamma: pole at non-positive integer");
  return std::tgamma(x);
}

double rgamma(double x) {
  if (!std::isfinite(x)) throw InvalidArgument("rgamma: non-finite argument");
  if (is_nonpositive_integer(x)) return 0.0;
  if (x > 0.0 && x < 170.0) return 1.0 / std::tgamma(x);
  double lr = 0.0;
  double sign = 1.0;
  log_rgamma(x, lr, sign);
  return sign * std::exp(lr);
}

MlfResult evaluate(const MlfOrder& order, cplx z) {
  check_finite(order.a, order.b, order.q, z);
  // E(conj z) = conj E(z) for real parameters: evaluate in the upper half plane.
  const bool lower = z.imag() < 0.0;
  MlfResult r = evaluate_upper(order, lower ? std::conj(z) : z);
  if (z.imag() == 0.0) {
    r.value = cplx(r.value.real(), 0.0);
  } else if (lower) {
    r.value = std::conj(r.value);
  }
  return r;
}

cplx mlf_e(double a, double b, cplx z) { return evaluate({a, b, 1.0}, z).value; }

cplx mlf_e3(double a, double b, double q, cplx z) { return evaluate({a, b, q}, z).value; }

}  // namespace fracwave::mlf

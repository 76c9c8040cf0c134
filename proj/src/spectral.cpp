#include "fracwave/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "fracwave/error.hpp"
#include "fracwave/mlf.hpp"
#include "fracwave/quadrature.hpp"

namespace fracwave::spectral {

namespace {

constexpr double kCriticalTol = 1e-12;
constexpr double kNearCritical = 1e-4;
// Below this value of |z^+| t^a the power series in t^a converges without
// noticeable cancellation and is used in place of the Mittag-Leffler pair.
constexpr double kSmallTimeArg = 1.0;
constexpr int kMSeriesTerms = 10;

void check_params(const ModelParams& p) { p.validate(); }

double e_real(double a, double b, double x) { return mlf::mlf_e(a, b, cplx(x, 0.0)).real(); }

// Coefficients x_n of sum_n x_n s^n / Gamma(a n + b) obey
// x_n = S x_{n-1} - P x_{n-2} with S = -(z^+ + z^-), P = z^+ z^-.
struct SmallTime {
  double s;
  double prod;
  double radius;  // max |z^+-|
};

SmallTime small_time(const ModelParams& p, const BranchData& br) {
  return {-p.c * p.c / p.gamma, p.c * p.c * p.k * p.k * br.lambda,
          std::max(std::abs(br.z_plus), std::abs(br.z_minus))};
}

// sum_n x_n s^n / Gamma(a n + b) with x_0, x_1 given; bound_scale * (n+1) R^n
// dominates |x_n|.
double recurrence_series(const SmallTime& st, double x0, double x1, double a, double b, double s,
                         double bound_scale) {
  double prev2 = x0;
  double prev1 = x1;
  double sum = x0 * mlf::rgamma(b) + x1 * s * mlf::rgamma(a + b);
  double sn = s;
  for (int n = 2; n < 400; ++n) {
    const double xn = st.s * prev1 - st.prod * prev2;
    sn *= s;
    const double g = mlf::rgamma(a * n + b);
    sum += xn * sn * g;
    prev2 = prev1;
    prev1 = xn;
    const double bound = bound_scale * (n + 1) * std::pow(st.radius * s, n) * std::abs(g);
    if (bound <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

bool use_small_time(const SmallTime& st, double ta) { return st.radius * ta <= kSmallTimeArg; }

double mu_pow(double mu, int j) { return std::pow(mu, j / 2); }

// F expanded around the double root: sum_j x^j M^{2 floor(j/2)} E^{j+1}_{a,1+aj}(-x).
double f_m_series(const ModelParams& p, double mu, double x) {
  const double a = p.alpha;
  double sum = 0.0;
  double xj = 1.0;
  for (int j = 0; j < kMSeriesTerms; ++j) {
    const double term = xj * mu_pow(mu, j) * mlf::mlf_e3(a, 1.0 + a * j, j + 1.0, cplx(-x, 0.0)).real();
    sum += term;
    xj *= x;
  }
  return sum;
}

// psi^b expanded around the double root.
double psi_b_m_series(const ModelParams& p, double mu, double x, double t, double b) {
  const double a = p.alpha;
  double sum = 0.0;
  for (int j = 1; j < kMSeriesTerms; j += 2) {
    sum += std::pow(x, j) * mu_pow(mu, j - 1) *
           mlf::mlf_e3(a, b + a * j, j + 1.0, cplx(-x, 0.0)).real();
  }
  return 2.0 * p.gamma * std::pow(t, b - 1.0) * sum;
}

double mu_of(const ModelParams& p, const BranchData& br) {
  const double w2 = p.omega() * p.omega();
  return (w2 - br.lambda) / w2;
}

}  // namespace

double ModelParams::omega() const { return c / (2.0 * gamma * k); }

double ModelParams::varkappa() const {
  const double w2 = omega() * omega();
  return 2.0 * w2 / (std::sqrt(1.0 + 4.0 * w2) + 1.0);
}

void ModelParams::validate() const {
  auto pos = [](double v, const char* name) {
    if (!std::isfinite(v) || !(v > 0.0)) {
      throw InvalidArgument(std::string("model parameter ") + name + " must be positive and finite");
    }
  };
  pos(c, "c");
  pos(gamma, "gamma");
  pos(k, "k");
  if (!std::isfinite(alpha) || !(alpha > 0.5) || !(alpha <= 1.0)) {
    throw InvalidArgument("model parameter alpha must lie in (0.5, 1]");
  }
  if (!std::isfinite(tau) || tau < 0.0) throw InvalidArgument("model parameter tau must be >= 0");
}

const char* regime_name(BranchRegime r) {
  switch (r) {
    case BranchRegime::below:
      return "below";
    case BranchRegime::critical:
      return "critical";
    case BranchRegime::above:
      return "above";
  }
  return "unknown";
}

BranchData branch(const ModelParams& p, int ell) {
  if (ell < 0) throw InvalidArgument("branch: negative degree");
  BranchData br;
  br.ell = ell;
  br.lambda = static_cast<double>(ell) * (ell + 1.0);
  const double w2 = p.omega() * p.omega();
  const double z0 = p.c * p.c / (2.0 * p.gamma);
  const double kap = p.varkappa();
  const double kap_round = std::nearbyint(kap);
  if (std::abs(kap - kap_round) < kCriticalTol && ell == static_cast<int>(kap_round)) {
    br.regime = BranchRegime::critical;
    br.m_ell = 0.0;
    br.z_minus = z0;
    br.z_plus = z0;
    return br;
  }
  const double prod = p.c * p.c * p.k * p.k * br.lambda;
  if (br.lambda <= w2) {
    br.regime = BranchRegime::below;
    const double m = std::sqrt((w2 - br.lambda) / w2);
    br.m_ell = m;
    br.z_plus = z0 * (1.0 + m);
    // Product form avoids the cancellation in 1 - M for small degrees.
    br.z_minus = prod / br.z_plus.real();
  } else {
    br.regime = BranchRegime::above;
    const double m = std::sqrt((br.lambda - w2) / w2);
    br.m_ell = cplx(0.0, m);
    br.z_plus = cplx(z0, z0 * m);
    br.z_minus = cplx(z0, -z0 * m);
  }
  return br;
}

namespace detail {

cplx f_generic(const ModelParams& p, int ell, double t) {
  const BranchData br = branch(p, ell);
  if (br.regime == BranchRegime::critical) throw DomainError("f_generic: critical degree");
  const double ta = std::pow(t, p.alpha);
  const cplx em = mlf::mlf_e(p.alpha, 1.0, -br.z_minus * ta);
  const cplx ep = mlf::mlf_e(p.alpha, 1.0, -br.z_plus * ta);
  return 0.5 * (em + ep) + (em - ep) / (2.0 * br.m_ell);
}

cplx psi_generic(const ModelParams& p, int ell, double t) {
  const BranchData br = branch(p, ell);
  if (br.regime == BranchRegime::critical) throw DomainError("psi_generic: critical degree");
  const double ta = std::pow(t, p.alpha);
  const cplx em = mlf::mlf_e(p.alpha, p.alpha, -br.z_minus * ta);
  const cplx ep = mlf::mlf_e(p.alpha, p.alpha, -br.z_plus * ta);
  return p.gamma / br.m_ell * std::pow(t, p.alpha - 1.0) * (em - ep);
}

}  // namespace detail

double f_coeff(const ModelParams& p, int ell, double t) {
  check_params(p);
  if (!std::isfinite(t) || t < 0.0) throw InvalidArgument("f_coeff: t must be >= 0");
  if (t == 0.0) return 1.0;
  // lambda_0 = 0: the equation has the constant solution.
  if (ell == 0) return 1.0;
  const BranchData br = branch(p, ell);
  const double a = p.alpha;
  const double ta = std::pow(t, a);
  const SmallTime st = small_time(p, br);
  if (use_small_time(st, ta)) {
    const double zp = std::abs(br.z_plus);
    return recurrence_series(st, 1.0, 0.0, a, 1.0, ta, 1.0 + zp + p.c * p.c / p.gamma);
  }
  const double z0 = p.c * p.c / (2.0 * p.gamma);
  if (br.regime == BranchRegime::critical) {
    const double x = z0 * ta;
    return e_real(a, 1.0, -x) + x / a * e_real(a, a, -x);
  }
  const double m_abs = std::abs(br.m_ell);
  if (m_abs < kNearCritical) return f_m_series(p, mu_of(p, br), z0 * ta);
  if (br.regime == BranchRegime::below) {
    const double m = br.m_ell.real();
    const double em = e_real(a, 1.0, -br.z_minus.real() * ta);
    const double ep = e_real(a, 1.0, -br.z_plus.real() * ta);
    return 0.5 * (em + ep) + (em - ep) / (2.0 * m);
  }
  // Above: the two arguments are conjugate, so one evaluation suffices.
  const cplx e = mlf::mlf_e(a, 1.0, -br.z_minus * ta);
  return e.real() + e.imag() / m_abs;
}

double psi_b(const ModelParams& p, int ell, double t, double b) {
  check_params(p);
  if (!std::isfinite(t) || !(t > 0.0)) throw InvalidArgument("psi: t must be > 0");
  if (!std::isfinite(b) || !(b > 0.0)) throw InvalidArgument("psi_b: b must be > 0");
  const BranchData br = branch(p, ell);
  const double a = p.alpha;
  const double ta = std::pow(t, a);
  const double tb = std::pow(t, b - 1.0);
  const SmallTime st = small_time(p, br);
  if (use_small_time(st, ta)) {
    const double scale = p.c * p.c / p.gamma;
    return p.gamma * tb * recurrence_series(st, 0.0, scale, a, b, ta, scale * (1.0 + 2.0 / scale));
  }
  const double z0 = p.c * p.c / (2.0 * p.gamma);
  if (br.regime == BranchRegime::critical) {
    const double x = z0 * ta;
    return 2.0 * p.gamma * x / a * tb * (e_real(a, b + a - 1.0, -x) + (1.0 - b) * e_real(a, b + a, -x));
  }
  const double m_abs = std::abs(br.m_ell);
  if (m_abs < kNearCritical) return psi_b_m_series(p, mu_of(p, br), z0 * ta, t, b);
  if (br.regime == BranchRegime::below) {
    const double em = e_real(a, b, -br.z_minus.real() * ta);
    const double ep = e_real(a, b, -br.z_plus.real() * ta);
    return p.gamma / br.m_ell.real() * tb * (em - ep);
  }
  const cplx e = mlf::mlf_e(a, b, -br.z_minus * ta);
  return 2.0 * p.gamma / m_abs * tb * e.imag();
}

double psi(const ModelParams& p, int ell, double t) { return psi_b(p, ell, t, p.alpha); }

double sigma2(const ModelParams& p, int ell, double t, double rel_tol) {
  check_params(p);
  if (!std::isfinite(t) || t < 0.0) throw InvalidArgument("sigma2: t must be >= 0");
  if (!(rel_tol > 0.0) || rel_tol > 1e-4) throw InvalidArgument("sigma2: rel_tol must lie in (0, 1e-4]");
  if (t == 0.0) return 0.0;
  const double e = 2.0 * p.alpha - 1.0;
  const double pw = 1.0 / e;
  auto integrand = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double r = std::pow(u, pw);
    if (r <= 0.0) return 0.0;
    const double v = psi(p, ell, r);
    return v * v * pw * std::pow(u, pw - 1.0);
  };
  const double upper = std::pow(t, e);
  // Split where the kernel starts to oscillate so the first pass sees the structure.
  std::vector<double> breaks{0.0};
  const BranchData br = branch(p, ell);
  const double rate = std::pow(std::abs(br.z_plus), 1.0 / p.alpha);
  if (rate > 0.0) {
    double r = 1.0 / rate;
    while (r < t) {
      breaks.push_back(std::pow(r, e));
      r *= 2.0;
    }
  }
  breaks.push_back(upper);
  const quad::QuadResult res = quad::integrate(integrand, breaks, rel_tol, 0.0, 20000);
  return res.value;
}

double h_majorant(const BoundConstants& consts, const ModelParams& p, double t) {
  if (!std::isfinite(t) || !(t > 0.0)) throw InvalidArgument("h_majorant: t must be > 0");
  return consts.c0 + consts.c1 / t + consts.c2 / std::pow(t, p.alpha);
}

double c_tilde_kappa(double scale, double kappa, double x) {
  const double n = std::floor(x);
  if (n < 1.0) throw DomainError("c_tilde_kappa: floor(x) must be >= 1");
  if (!(kappa > 2.0)) throw DomainError("c_tilde_kappa: kappa must exceed 2");
  return std::sqrt(scale * (2.0 * std::pow(n, 2.0 - kappa) / (kappa - 2.0) +
                            std::pow(n, 1.0 - kappa) / (kappa - 1.0)));
}

double a_tilde_kappa(double scale, double kappa, double alpha, double x) {
  const double n = std::floor(x);
  const double ex = kappa - 2.0 / alpha;
  if (n < 1.0) throw DomainError("a_tilde_kappa: floor(x) must be >= 1");
  if (!(ex > 0.0)) throw DomainError("a_tilde_kappa: kappa must exceed 2/alpha");
  return std::sqrt(scale * (2.0 * std::pow(n, -ex) / ex + std::pow(n, -ex - 1.0) / (ex + 1.0)));
}

double e_kappa(const ModelParams& p, const PowerSpectrum& aspec, double c3_inhom) {
  const double a = p.alpha;
  return std::pow(2.0, (1.0 - a) / (2.0 * a)) * std::sqrt(c3_inhom) *
         a_tilde_kappa(aspec.scale, aspec.exponent, a, 1.0);
}

namespace {
void check_degree(const ModelParams& p, int L) {
  if (!(L > std::max(p.varkappa(), 1.0))) {
    throw DomainError("truncation bound requires L > max(varkappa, 1)");
  }
}
}  // namespace

double q_bound_hom(const ModelParams& p, const PowerSpectrum& cspec, const BoundConstants& consts,
                   int L, double t) {
  check_degree(p, L);
  return h_majorant(consts, p, t) * c_tilde_kappa(cspec.scale, cspec.exponent, 1.0) *
         std::pow(static_cast<double>(L), -cspec.exponent / 2.0);
}

double q_bound_inhom(const ModelParams& p, const PowerSpectrum& aspec, double c3_inhom, int L) {
  check_degree(p, L);
  const double ex = aspec.exponent - 2.0 / p.alpha;
  if (!(ex > 0.0)) throw DomainError("q_bound_inhom: kappa2 <= 2/alpha makes the bound vacuous");
  return e_kappa(p, aspec, c3_inhom) * std::pow(static_cast<double>(L), -ex / 2.0);
}

double kappa_tilde(const ModelParams& p, const PowerSpectrum& cspec, const PowerSpectrum& aspec) {
  return std::min(cspec.exponent, aspec.exponent - 2.0 / p.alpha);
}

double q_bound_total(const ModelParams& p, const PowerSpectrum& cspec,
                     const PowerSpectrum& aspec, const BoundConstants& consts,
                     double c3_inhom, int L, double t) {
  check_degree(p, L);
  if (!(aspec.exponent - 2.0 / p.alpha > 0.0)) {
    throw DomainError("q_bound_total: kappa2 <= 2/alpha makes the bound vacuous");
  }
  const double h = h_majorant(consts, p, t) * c_tilde_kappa(cspec.scale, cspec.exponent, 1.0);
  const double e = e_kappa(p, aspec, c3_inhom);
  return std::sqrt(h * h + e * e) * std::pow(static_cast<double>(L), -kappa_tilde(p, cspec, aspec) / 2.0);
}

double caputo_residual(const ModelParams& p, int ell, const std::vector<double>& t_grid, double dt) {
  check_params(p);
  if (!(dt > 0.0)) throw InvalidArgument("caputo_residual: dt must be > 0");
  if (t_grid.empty()) return 0.0;
  std::vector<int> idx;
  int n_max = 0;
  for (double t : t_grid) {
    const int n = static_cast<int>(std::lround(t / dt));
    if (n < 1) throw InvalidArgument("caputo_residual: grid time below one step");
    idx.push_back(n);
    n_max = std::max(n_max, n);
  }
  // f[i] = F(t_{i-1}); index 0 holds the even reflection F(-dt) = F(dt).
  std::vector<double> f(n_max + 3);
  for (int i = 0; i <= n_max + 1; ++i) f[i + 1] = f_coeff(p, ell, i * dt);
  f[0] = f[2];
  auto F = [&](int i) { return f[i + 1]; };

  const double a = p.alpha;
  const double lam = static_cast<double>(ell) * (ell + 1.0);
  const double coef = p.k * p.k * lam;
  double worst = 0.0;
  for (int n : idx) {
    double d1 = 0.0;
    double d2 = 0.0;
    if (a == 1.0) {
      d1 = (F(n + 1) - F(n - 1)) / (2.0 * dt);
      d2 = (F(n + 1) - 2.0 * F(n) + F(n - 1)) / (dt * dt);
    } else {
      // L1 scheme for the order-a derivative.
      const double w1 = std::pow(dt, -a) / std::tgamma(2.0 - a);
      for (int j = 0; j < n; ++j) {
        const double bj = std::pow(j + 1.0, 1.0 - a) - std::pow(static_cast<double>(j), 1.0 - a);
        d1 += bj * (F(n - j) - F(n - j - 1));
      }
      d1 *= w1;
      // Order 2a: J^{2-2a} of F'' with F'' piecewise constant from centred
      // second differences on each step.
      const double g = 2.0 - 2.0 * a;
      const double w2 = std::pow(dt, -2.0 * a) / std::tgamma(3.0 - 2.0 * a);
      for (int kk = 0; kk < n; ++kk) {
        const double second = 0.5 * (F(kk + 2) - F(kk + 1) - F(kk) + F(kk - 1));
        const double wk = std::pow(static_cast<double>(n - kk), g) - std::pow(n - kk - 1.0, g);
        d2 += wk * second;
      }
      d2 *= w2;
    }
    const double res = std::abs(d2 / (p.c * p.c) + d1 / p.gamma + coef * F(n));
    worst = std::max(worst, res);
  }
  return worst;
}

MajorantFit fit_majorant(const ModelParams& p, int l_lo, int l_hi, double t_lo, double t_hi, int n_t) {
  check_params(p);
  if (l_lo < 1 || l_hi < l_lo || !(t_lo > 0.0) || !(t_hi > t_lo) || n_t < 3) {
    throw InvalidArgument("fit_majorant: bad lattice");
  }
  std::vector<double> ts(n_t);
  std::vector<double> env(n_t, 0.0);
  for (int i = 0; i < n_t; ++i) {
    ts[i] = t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / (n_t - 1));
  }
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n_t; ++i) {
    double m = 0.0;
    for (int l = l_lo; l <= l_hi; ++l) {
      const double lam = static_cast<double>(l) * (l + 1.0);
      m = std::max(m, std::sqrt(lam) * std::abs(f_coeff(p, l, ts[i])));
    }
    env[i] = m;
  }

  // Relative least squares over every subset of nonnegative coefficients.
  auto basis = [&](int j, double t) {
    return j == 0 ? 1.0 : (j == 1 ? 1.0 / t : std::pow(t, -p.alpha));
  };
  std::array<double, 3> best{0.0, 0.0, 0.0};
  double best_res = std::numeric_limits<double>::infinity();
  for (int mask = 1; mask < 8; ++mask) {
    std::vector<int> cols;
    for (int j = 0; j < 3; ++j) {
      if (mask & (1 << j)) cols.push_back(j);
    }
    const int nc = static_cast<int>(cols.size());
    double ata[3][3] = {};
    double atb[3] = {};
    for (int i = 0; i < n_t; ++i) {
      const double w = 1.0 / env[i];
      for (int r = 0; r < nc; ++r) {
        const double xr = basis(cols[r], ts[i]) * w;
        atb[r] += xr;
        for (int c = 0; c < nc; ++c) ata[r][c] += xr * basis(cols[c], ts[i]) * w;
      }
    }
    // Gaussian elimination with partial pivoting.
    double m[3][4] = {};
    for (int r = 0; r < nc; ++r) {
      for (int c = 0; c < nc; ++c) m[r][c] = ata[r][c];
      m[r][3] = atb[r];
    }
    bool singular = false;
    for (int c = 0; c < nc && !singular; ++c) {
      int piv = c;
      for (int r = c + 1; r < nc; ++r) {
        if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
      }
      if (std::abs(m[piv][c]) < 1e-13 * std::abs(ata[0][0])) {
        singular = true;
        break;
      }
      for (int k2 = 0; k2 < 4; ++k2) std::swap(m[c][k2], m[piv][k2]);
      for (int r = 0; r < nc; ++r) {
        if (r == c) continue;
        const double f = m[r][c] / m[c][c];
        for (int k2 = c; k2 < 4; ++k2) m[r][k2] -= f * m[c][k2];
      }
    }
    if (singular) continue;
    std::array<double, 3> coef{0.0, 0.0, 0.0};
    bool nonneg = true;
    for (int r = 0; r < nc; ++r) {
      coef[cols[r]] = m[r][3] / m[r][r];
      if (coef[cols[r]] < 0.0) nonneg = false;
    }
    if (!nonneg) continue;
    double res = 0.0;
    for (int i = 0; i < n_t; ++i) {
      double h = 0.0;
      for (int j = 0; j < 3; ++j) h += coef[j] * basis(j, ts[i]);
      const double d = h / env[i] - 1.0;
      res += d * d;
    }
    if (res < best_res) {
      best_res = res;
      best = coef;
    }
  }
  double inflate = 0.0;
  for (int i = 0; i < n_t; ++i) {
    double h = 0.0;
    for (int j = 0; j < 3; ++j) h += best[j] * basis(j, ts[i]);
    inflate = std::max(inflate, env[i] / h);
  }
  MajorantFit fit;
  fit.consts = {best[0] * inflate, best[1] * inflate, best[2] * inflate};
  fit.inflation = inflate;
  std::ostringstream os;
  os << "l in [" << l_lo << "," << l_hi << "], " << n_t << " log-spaced t in [" << t_lo << ","
     << t_hi << "]";
  fit.info = {os.str(), (l_hi - l_lo + 1) * n_t};
  return fit;
}

double fit_c3(const ModelParams& p, double b, const std::vector<double>& ts) {
  check_params(p);
  double best = 0.0;
  const int top = static_cast<int>(std::floor(p.varkappa()));
  for (int l = 0; l <= top; ++l) {
    const BranchData br = branch(p, l);
    for (double t : ts) {
      const double ta = std::pow(t, p.alpha);
      for (double z : {br.z_minus.real(), br.z_plus.real()}) {
        const double v = std::abs(e_real(p.alpha, b, -z * ta)) * (1.0 + z * ta);
        best = std::max(best, v);
      }
    }
  }
  return best;
}

SigmaBoundFit fit_sigma_bounds(const ModelParams& p, const std::vector<int>& ells,
                               const std::vector<double>& ts) {
  check_params(p);
  SigmaBoundFit fit;
  const int n = static_cast<int>(ells.size() * ts.size());
  std::vector<double> below(n, 0.0);
  std::vector<double> above(n, 0.0);
  const int nt = static_cast<int>(ts.size());
#pragma omp parallel for schedule(dynamic)
  for (int idx = 0; idx < n; ++idx) {
    const int l = ells[idx / nt];
    const double t = ts[idx % nt];
    const BranchData br = branch(p, l);
    if (l == 0 || br.regime == BranchRegime::critical) continue;
    const double s2 = sigma2(p, l, t);
    if (br.regime == BranchRegime::below) {
      const double m = br.m_ell.real();
      below[idx] = s2 * m * m * std::pow(br.z_minus.real(), 2.0 - 1.0 / p.alpha);
    } else {
      above[idx] = s2 / std::pow(br.lambda, (1.0 - p.alpha) / p.alpha);
    }
  }
  for (int i = 0; i < n; ++i) {
    fit.c1_inhom = std::max(fit.c1_inhom, below[i]);
    fit.c3_inhom = std::max(fit.c3_inhom, above[i]);
  }
  fit.info = {"degrees x times supplied by caller", n};
  return fit;
}

}  // namespace fracwave::spectral

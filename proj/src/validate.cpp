#include "fracwave/validate.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <exception>
#include <functional>

#include "fracwave/experiments.hpp"
#include "fracwave/io.hpp"
#include "fracwave/mlf.hpp"
#include "fracwave/rng.hpp"
#include "fracwave/sht.hpp"

namespace fracwave::validate {

namespace {

using cplx = std::complex<double>;
using spectral::ModelParams;

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

// Classical damped-wave solution at a = 1:
// F'' / c^2 + F' / gamma + k^2 lambda F = 0, F(0) = 1, F'(0) = 0.
void classical(const ModelParams& p, int ell, double t, double& f, double& psi) {
  const double lam = static_cast<double>(ell) * (ell + 1.0);
  const double c2 = p.c * p.c;
  const cplx disc = std::sqrt(cplx(c2 * c2 / (p.gamma * p.gamma) - 4.0 * c2 * p.k * p.k * lam, 0.0));
  const cplx r1 = 0.5 * (-c2 / p.gamma + disc);
  const cplx r2 = 0.5 * (-c2 / p.gamma - disc);
  const cplx e1 = std::exp(r1 * t);
  const cplx e2 = std::exp(r2 * t);
  f = ((r2 * e1 - r1 * e2) / (r2 - r1)).real();
  psi = (c2 * (e1 - e2) / (r1 - r2)).real();
}

Check make(const std::string& name, double value, double tol, const std::string& detail = "") {
  return Check{name, value, tol, std::isfinite(value) && value <= tol, detail};
}

}  // namespace

Report run_suite(const ModelParams& p) {
  p.validate();
  std::vector<std::pair<std::string, std::function<Check()>>> suite;

  suite.emplace_back("philox_known_answer", [] {
    const auto out = philox4x32({0, 0, 0, 0}, {0, 0});
    const bool ok = out[0] == 0x6627e8d5u && out[1] == 0xe169c58du && out[2] == 0xbc57ac4cu &&
                    out[3] == 0x9b00dbd8u;
    return make("philox_known_answer", ok ? 0.0 : 1.0, 0.0, "Philox4x32-10, zero counter and key");
  });

  suite.emplace_back("mlf_closed_forms", [] {
    double worst = 0.0;
    for (double x : {0.1, 1.0, 5.0, 20.0}) {
      worst = std::max(worst, rel_err(mlf::mlf_e_real(1.0, 1.0, -x), std::exp(-x)));
      worst = std::max(worst, rel_err(mlf::mlf_e_real(1.0, 2.0, -x), -std::expm1(-x) / x));
      const cplx z(-x, 0.5 * x);
      worst = std::max(worst, std::abs(mlf::mlf_e(1.0, 1.0, z) - std::exp(z)) / std::abs(std::exp(z)));
      worst = std::max(worst, rel_err(mlf::mlf_e_real(0.5, 1.0, -x), std::exp(x * x) * std::erfc(x)));
    }
    return make("mlf_closed_forms", worst, 1e-10, "E_{1,1}, E_{1,2}, E_{1/2,1} against exp and erfc");
  });

  suite.emplace_back("mlf_recurrence", [] {
    double worst = 0.0;
    for (double a : {0.6, 0.75, 0.9, 1.0}) {
      for (double b : {a, 1.0, 2.0 * a}) {
        for (cplx z : {cplx(-0.5, 0.0), cplx(-7.0, 0.0), cplx(-3.0, 2.0), cplx(-40.0, 0.0)}) {
          const cplx lhs = mlf::mlf_e(a, b, z);
          const cplx rhs = mlf::rgamma(b) + z * mlf::mlf_e(a, a + b, z);
          // Residual relative to the size of the terms being balanced.
          const double term_scale =
              std::max({std::abs(lhs), std::abs(mlf::rgamma(b)), std::abs(rhs - mlf::rgamma(b))});
          worst = std::max(worst, std::abs(lhs - rhs) / term_scale);
        }
      }
    }
    return make("mlf_recurrence", worst, 1e-9, "E_{a,b}(z) = 1/Gamma(b) + z E_{a,a+b}(z)");
  });

  suite.emplace_back("f_at_zero", [p] {
    double worst = 0.0;
    for (int l = 0; l <= 200; ++l) worst = std::max(worst, std::abs(spectral::f_coeff(p, l, 0.0) - 1.0));
    return make("f_at_zero", worst, 1e-12, "F_l(0) = 1 for l <= 200");
  });

  suite.emplace_back("f_degree_zero", [p] {
    double worst = 0.0;
    for (int i = 0; i <= 100; ++i) {
      worst = std::max(worst, std::abs(spectral::f_coeff(p, 0, 0.1 * i) - 1.0));
    }
    return make("f_degree_zero", worst, 1e-10, "F_0(t) = 1 on [0, 10]");
  });

  suite.emplace_back("vieta", [p] {
    double worst = 0.0;
    const double sum = p.c * p.c / p.gamma;
    for (int l = 0; l <= 200; ++l) {
      const spectral::BranchData br = spectral::branch(p, l);
      const double prod = p.c * p.c * p.k * p.k * br.lambda;
      worst = std::max(worst, std::abs(br.z_plus + br.z_minus - sum) / sum);
      worst = std::max(worst, std::abs(br.z_plus * br.z_minus - prod) / std::max(prod, 1e-300) *
                                  (prod > 0.0 ? 1.0 : 0.0));
    }
    return make("vieta", worst, 1e-12, "z+ + z- = c^2/gamma, z+ z- = c^2 k^2 lambda");
  });

  suite.emplace_back("classical_limit", [p] {
    ModelParams q = p;
    q.alpha = 1.0;
    double worst = 0.0;
    for (int l : {0, 1, 3, 9, 10, 25, 100}) {
      for (double t : {0.05, 0.4, 1.0, 3.0}) {
        double f = 0.0;
        double ps = 0.0;
        classical(q, l, t, f, ps);
        worst = std::max(worst, std::abs(spectral::f_coeff(q, l, t) - f));
        worst = std::max(worst, std::abs(spectral::psi(q, l, t) - ps));
      }
    }
    return make("classical_limit", worst, 1e-8, "a = 1 against the damped-wave ODE solution");
  });

  suite.emplace_back("sigma2_oracle", [] {
    ModelParams q;
    q.alpha = 1.0;
    const double v = spectral::sigma2(q, 0, 1.0);
    // int_0^1 (1 - e^{-r})^2 dr
    const double exact = 1.0 - 2.0 * (1.0 - std::exp(-1.0)) + 0.5 * (1.0 - std::exp(-2.0));
    return make("sigma2_oracle", std::abs(v - exact), 1e-8, "l = 0, a = 1, t = 1");
  });

  suite.emplace_back("sigma2_monotone", [p] {
    double worst = 0.0;
    for (int l : {0, 2, 9, 10, 40}) {
      double prev = 0.0;
      for (int i = 1; i <= 12; ++i) {
        const double v = spectral::sigma2(p, l, 0.25 * i);
        worst = std::max(worst, prev - v);
        prev = v;
      }
    }
    return make("sigma2_monotone", std::max(worst, 0.0), 0.0, "sigma^2 nondecreasing in t");
  });

  suite.emplace_back("addition_theorem", [] {
    const double th1 = 0.7;
    const double ph1 = 1.9;
    const double th2 = 2.3;
    const double ph2 = -0.4;
    const int L = 64;
    const std::vector<double> y1 = sht::y_real_all(L, th1, ph1);
    const std::vector<double> y2 = sht::y_real_all(L, th2, ph2);
    const double cg = std::cos(th1) * std::cos(th2) + std::sin(th1) * std::sin(th2) * std::cos(ph1 - ph2);
    double worst = 0.0;
    for (int l = 0; l <= L; ++l) {
      double s = 0.0;
      for (int m = -l; m <= l; ++m) {
        s += y1[sht::HarmonicCoeffs::index(l, m)] * y2[sht::HarmonicCoeffs::index(l, m)];
      }
      worst = std::max(worst, std::abs(s - (2.0 * l + 1.0) * sht::legendre(l, cg)));
    }
    return make("addition_theorem", worst, 1e-10, "sum_m Y_lm(x) Y_lm(y) = (2l+1) P_l(x.y), l <= 64");
  });

  suite.emplace_back("grid_weights", [] {
    const sht::SphereGrid g = sht::make_grid(32);
    double s = 0.0;
    for (double w : g.weights) s += w;
    return make("grid_weights", std::abs(s - 1.0), 1e-15, "Gauss-Legendre weights sum to one");
  });

  suite.emplace_back("sht_round_trip", [] {
    const int L = 32;
    const RngStream rng(12345);
    sht::HarmonicCoeffs a(L);
    for (int l = 0; l <= L; ++l) {
      for (int m = -l; m <= l; ++m) a.at(l, m) = rng.normal(0, l, m, DrawRole::aux);
    }
    const sht::SphereGrid g = sht::make_grid(L);
    const sht::HarmonicCoeffs back = sht::analyze(sht::synthesize(a, g), L);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(back.values[i] - a.values[i]));
    return make("sht_round_trip", worst, 1e-10, "analyze(synthesize(a)) = a at L = 32");
  });

  suite.emplace_back("parseval", [] {
    const int L = 32;
    const RngStream rng(777);
    sht::HarmonicCoeffs a(L);
    double energy = 0.0;
    for (int l = 0; l <= L; ++l) {
      for (int m = -l; m <= l; ++m) {
        a.at(l, m) = rng.normal(0, l, m, DrawRole::aux);
        energy += a.at(l, m) * a.at(l, m);
      }
    }
    const double ms = sht::grid_mean_square(sht::synthesize(a, sht::make_grid(L)));
    return make("parseval", std::abs(ms - energy) / energy, 1e-10, "grid mean square equals coefficient energy");
  });

  suite.emplace_back("fubini_variance", [] {
    ModelParams q;
    q.alpha = 0.8;
    const auto [lhs, rhs] = experiments::fubini_variance_check(q, 3, 0.5, 1e-6);
    return make("fubini_variance", std::abs(lhs - rhs) / rhs, 1e-6, "l = 3, a = 0.8, t = 0.5");
  });

  suite.emplace_back("caputo_residual", [p] {
    std::vector<double> r;
    for (double dt : {1e-2, 5e-3, 2.5e-3}) r.push_back(spectral::caputo_residual(p, 5, {0.25, 0.5, 1.0}, dt));
    const bool mono = r[1] < r[0] && r[2] < r[1];
    return make("caputo_residual", mono ? 0.0 : 1.0, 0.0,
                "l = 5 residuals " + io::format_double(r[0]) + ", " + io::format_double(r[1]) + ", " +
                    io::format_double(r[2]) + " must decrease");
  });

  Report rep;
  for (auto& [name, fn] : suite) {
    Check c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c = Check{name, std::nan(""), 0.0, false, std::string("exception: ") + e.what()};
    }
    rep.checks.push_back(c);
    if (!c.passed) {
      rep.ok = false;
      rep.failed = c.name;
      break;
    }
  }
  return rep;
}

nlohmann::ordered_json report_json(const Report& r) {
  nlohmann::ordered_json j;
  j["ok"] = r.ok;
  j["first_failure"] = r.ok ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.failed);
  j["passed"] = std::count_if(r.checks.begin(), r.checks.end(), [](const Check& c) { return c.passed; });
  auto& arr = j["checks"] = nlohmann::ordered_json::array();
  for (const Check& c : r.checks) {
    arr.push_back({{"name", c.name},
                   {"value", io::format_double(c.value)},
                   {"tolerance", io::format_double(c.tolerance)},
                   {"passed", c.passed},
                   {"detail", c.detail}});
  }
  return j;
}

}  // namespace fracwave::validate

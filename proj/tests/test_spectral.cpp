#include <doctest.h>

#include <cmath>

#include "fracwave/error.hpp"
#include "fracwave/mlf.hpp"
#include "fracwave/quadrature.hpp"
#include "fracwave/spectral.hpp"

using namespace fracwave;
using namespace fracwave::spectral;

namespace {

// RK4 for (1/c^2) F'' + (1/gamma) F' + k^2 lambda F = 0, F(0) = 1, F'(0) = 0.
double ode_f(const ModelParams& p, int ell, double t, int steps = 40000) {
  const double lam = ell * (ell + 1.0);
  const double c2 = p.c * p.c;
  auto acc = [&](double f, double v) { return -c2 * (v / p.gamma + p.k * p.k * lam * f); };
  double f = 1.0;
  double v = 0.0;
  const double h = t / steps;
  for (int i = 0; i < steps; ++i) {
    const double k1f = v, k1v = acc(f, v);
    const double k2f = v + 0.5 * h * k1v, k2v = acc(f + 0.5 * h * k1f, v + 0.5 * h * k1v);
    const double k3f = v + 0.5 * h * k2v, k3v = acc(f + 0.5 * h * k2f, v + 0.5 * h * k2v);
    const double k4f = v + h * k3v, k4v = acc(f + h * k3f, v + h * k3v);
    f += h / 6.0 * (k1f + 2 * k2f + 2 * k3f + k4f);
    v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
  }
  return f;
}

ModelParams with_alpha(double a) {
  ModelParams p;
  p.alpha = a;
  return p;
}

// Parameters whose critical degree is exactly 1: omega^2 = 2.
ModelParams critical_one(double alpha) {
  ModelParams p;
  p.alpha = alpha;
  p.k = 1.0 / (2.0 * std::sqrt(2.0));
  return p;
}

}  // namespace

TEST_CASE("model constants") {
  const ModelParams p;
  CHECK(p.omega() == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(p.varkappa() == doctest::Approx((std::sqrt(401.0) - 1.0) / 2.0).epsilon(1e-14));
  CHECK(p.varkappa() == doctest::Approx(9.5124922).epsilon(1e-8));
  ModelParams bad;
  bad.alpha = 0.5;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = ModelParams{};
  bad.k = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("branch data") {
  const ModelParams p;
  const BranchData b0 = branch(p, 0);
  CHECK(b0.m_ell.real() == 1.0);
  CHECK(std::abs(b0.z_minus) == 0.0);
  CHECK(b0.z_plus.real() == doctest::Approx(1.0));
  CHECK(branch(p, 9).regime == BranchRegime::below);
  CHECK(branch(p, 10).regime == BranchRegime::above);
  CHECK(branch(critical_one(0.9), 1).regime == BranchRegime::critical);
  for (int l = 0; l <= 300; ++l) {
    const BranchData b = branch(p, l);
    CHECK(std::abs(b.z_plus + b.z_minus - p.c * p.c / p.gamma) <= 1e-12);
    CHECK(std::abs(b.z_plus * b.z_minus - p.c * p.c * p.k * p.k * b.lambda) <= 1e-12 * std::max(1.0, b.lambda));
  }
}

TEST_CASE("F at t = 0 and l = 0") {
  for (double a : {0.6, 0.75, 0.9, 1.0}) {
    const ModelParams p = with_alpha(a);
    for (int l = 0; l <= 200; ++l) CHECK(std::abs(f_coeff(p, l, 0.0) - 1.0) <= 1e-12);
    for (int i = 0; i <= 100; ++i) CHECK(std::abs(f_coeff(p, 0, 0.1 * i) - 1.0) <= 1e-10);
  }
}

TEST_CASE("F at a = 1 against an ODE integrator") {
  const ModelParams p = with_alpha(1.0);
  CHECK(std::abs(f_coeff(p, 20, 0.4) - ode_f(p, 20, 0.4)) <= 1e-8);
  for (int l : {1, 5, 9, 10, 11, 50, 300}) {
    for (double t : {0.01, 0.3, 1.0, 5.0}) {
      INFO("l=" << l << " t=" << t);
      CHECK(std::abs(f_coeff(p, l, t) - ode_f(p, l, t)) <= 1e-8);
    }
  }
}

TEST_CASE("psi closed forms at a = 1") {
  const ModelParams p = with_alpha(1.0);
  CHECK(psi(p, 0, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-13));
  CHECK(psi(p, 0, 1.0) == doctest::Approx(0.6321206).epsilon(1e-7));
  CHECK(psi_b(p, 0, 1.0, 2.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(psi_b(p, 0, 1.0, 2.0) == doctest::Approx(0.3678794).epsilon(1e-7));
}

TEST_CASE("psi_b with b = a reproduces psi") {
  for (double a : {0.6, 0.8, 1.0}) {
    const ModelParams p = with_alpha(a);
    for (int l : {0, 3, 9, 10, 40}) {
      for (double t : {0.02, 0.7, 3.0}) CHECK(psi_b(p, l, t, a) == doctest::Approx(psi(p, l, t)).epsilon(1e-12));
    }
  }
}

TEST_CASE("psi near the origin follows its leading term") {
  // psi ~ c^2 t^{2a-1} / Gamma(2a), psi^{2a} ~ c^2 t^{3a-1} / Gamma(3a).
  for (double a : {0.6, 0.9}) {
    const ModelParams p = with_alpha(a);
    for (int l : {0, 5, 30}) {
      const double v = std::abs(psi(p, l, 1e-6)) * std::pow(1e6, 1.0 - a);
      CHECK(std::isfinite(v));
      CHECK(psi(p, l, 1e-6) == doctest::Approx(std::pow(1e-6, 2 * a - 1) / std::tgamma(2 * a)).epsilon(1e-2));
      CHECK(psi_b(p, l, 1e-8, 2 * a) == doctest::Approx(std::pow(1e-8, 3 * a - 1) / std::tgamma(3 * a)).epsilon(1e-2));
    }
  }
}

TEST_CASE("critical degree against the three-parameter series") {
  for (double a : {0.7, 0.9, 1.0}) {
    const ModelParams p = critical_one(a);
    const double z0 = p.c * p.c / (2.0 * p.gamma);
    for (double t : {0.1, 0.5, 2.0, 3.0, 6.0}) {
      const double x = z0 * std::pow(t, a);
      const double f = mlf::mlf_e3(a, 1.0, 1.0, -x).real() + x * mlf::mlf_e3(a, 1.0 + a, 2.0, -x).real();
      const double ps = 2.0 * p.gamma * std::pow(t, a - 1.0) * x * mlf::mlf_e3(a, 2.0 * a, 2.0, -x).real();
      INFO("a=" << a << " t=" << t);
      CHECK(f_coeff(p, 1, t) == doctest::Approx(f).epsilon(1e-8));
      CHECK(psi(p, 1, t) == doctest::Approx(ps).epsilon(1e-8));
      const double ps2 = 2.0 * p.gamma * std::pow(t, 2.0 * a - 1.0) * x * mlf::mlf_e3(a, 3.0 * a, 2.0, -x).real();
      CHECK(psi_b(p, 1, t, 2.0 * a) == doctest::Approx(ps2).epsilon(1e-8));
    }
  }
}

TEST_CASE("coefficients are continuous through the critical degree") {
  for (double a : {0.75, 0.9}) {
    ModelParams p = critical_one(a);
    for (double eps : {1e-3, 1e-6, 1e-9, -1e-9, -1e-6, -1e-3}) {
      ModelParams q = p;
      q.k = p.k * (1.0 + eps);
      for (double t : {0.2, 1.5}) {
        const double tol = 10.0 * std::abs(eps) + 1e-9;
        CHECK(std::abs(f_coeff(q, 1, t) - f_coeff(p, 1, t)) <= tol);
        CHECK(std::abs(psi(q, 1, t) - psi(p, 1, t)) <= tol);
      }
    }
  }
}

TEST_CASE("critical value is the M -> 0 limit of the generic formula") {
  // Below the critical degree M^2 = 1 - lambda / omega^2 and z^+ + z^- does not
  // depend on k, so F and psi are even in M; extrapolate in M^2.
  for (double a : {0.75, 0.9, 1.0}) {
    const ModelParams p = critical_one(a);
    auto at_m = [&](double m) {
      ModelParams q = p;
      q.k = q.c / (2.0 * q.gamma * std::sqrt(2.0 / (1.0 - m * m)));
      return q;
    };
    const ModelParams q2 = at_m(1e-2);
    const ModelParams q3 = at_m(1e-3);
    REQUIRE(std::abs(branch(q2, 1).m_ell.real() - 1e-2) < 1e-12);
    REQUIRE(std::abs(branch(q3, 1).m_ell.real() - 1e-3) < 1e-12);
    for (double t : {0.2, 1.0, 3.0}) {
      INFO("a=" << a << " t=" << t);
      const double f_lim =
          (100.0 * detail::f_generic(q3, 1, t).real() - detail::f_generic(q2, 1, t).real()) / 99.0;
      const double psi_lim =
          (100.0 * detail::psi_generic(q3, 1, t).real() - detail::psi_generic(q2, 1, t).real()) / 99.0;
      CHECK(std::abs(f_coeff(p, 1, t) - f_lim) <= 1e-6);
      CHECK(std::abs(psi(p, 1, t) - psi_lim) <= 1e-6);
    }
  }
}

TEST_CASE("fast paths agree with the generic two-root formula") {
  const ModelParams p = with_alpha(0.8);
  for (int l : {1, 5, 9, 10, 20, 100, 800}) {
    for (double t : {0.05, 0.5, 4.0}) {
      CHECK(std::abs(f_coeff(p, l, t) - detail::f_generic(p, l, t).real()) <= 1e-12);
      CHECK(std::abs(psi(p, l, t) - detail::psi_generic(p, l, t).real()) <= 1e-11 * std::max(1.0, std::abs(psi(p, l, t))));
    }
  }
}

TEST_CASE("sigma2 values") {
  const ModelParams p1 = with_alpha(1.0);
  const double t = 1.0;
  const double exact = t - 2.0 * (1.0 - std::exp(-t)) + 0.5 * (1.0 - std::exp(-2.0 * t));
  CHECK(std::abs(sigma2(p1, 0, 1.0) - exact) <= 1e-8);
  CHECK(sigma2(p1, 0, 1.0) == doctest::Approx(0.1680912).epsilon(1e-6));
  CHECK(sigma2(p1, 5, 0.0) == 0.0);
  const ModelParams p = with_alpha(0.75);
  for (int l : {0, 3, 9, 10, 60}) {
    double prev = 0.0;
    for (double s : {0.1, 0.3, 0.9, 2.0, 5.0}) {
      const double v = sigma2(p, l, s);
      CHECK(v >= prev);
      prev = v;
    }
    // Against a direct quadrature of psi^2.
    const double direct =
        quad::integrate([&](double r) { return r > 0 ? psi(p, l, r) * psi(p, l, r) : 0.0; }, 0.0, 2.0, 1e-10, 0, 20000)
            .value;
    CHECK(sigma2(p, l, 2.0) == doctest::Approx(direct).epsilon(1e-7));
  }
}

TEST_CASE("sigma2 regime bounds hold off the fitting lattice") {
  const ModelParams p;
  std::vector<int> fit_l;
  std::vector<int> check_l;
  for (int l = 1; l <= 200; ++l) (l % 2 ? check_l : fit_l).push_back(l);
  // The fitting lattice covers the largest time, where sigma^2 is largest.
  const SigmaBoundFit fit = fit_sigma_bounds(p, fit_l, {0.25, 1.0, 4.0, 8.0});
  CHECK(fit.c1_inhom > 0.0);
  CHECK(fit.c3_inhom > 0.0);
  for (int l : check_l) {
    const BranchData br = branch(p, l);
    for (double t : {0.1, 0.6, 2.5, 8.0}) {
      const double s2 = sigma2(p, l, t);
      if (br.regime == BranchRegime::below) {
        const double m = br.m_ell.real();
        CHECK(s2 * m * m * std::pow(br.z_minus.real(), 2.0 - 1.0 / p.alpha) <= fit.c1_inhom);
      } else {
        CHECK(s2 <= fit.c3_inhom * std::pow(br.lambda, (1.0 - p.alpha) / p.alpha));
      }
    }
  }
}

TEST_CASE("sigma2 at l = 0 below the fitted bound") {
  const ModelParams p = with_alpha(0.9);
  const std::vector<double> ts{0.25, 0.5, 1.0};
  const double c3 = fit_c3(p, p.alpha, ts);
  for (double t : ts) {
    const double bound = p.gamma * p.gamma * (1.0 + c3 * c3) / (2 * p.alpha - 1) * std::pow(t, 2 * p.alpha - 1);
    CHECK(sigma2(p, 0, t) <= bound);
  }
}

TEST_CASE("majorant and truncation bounds") {
  const ModelParams p;
  CHECK(h_majorant({1, 0, 0}, p, 0.3) == 1.0);
  CHECK(h_majorant({1, 1, 1}, with_alpha(1.0), 1.0) == 3.0);
  CHECK(c_tilde_kappa(1.0, 4.1, 1.0) == doctest::Approx(std::sqrt(2.0 / 2.1 + 1.0 / 3.1)).epsilon(1e-15));
  CHECK(c_tilde_kappa(1.0, 4.1, 1.0) == doctest::Approx(1.1291).epsilon(1e-4));
  const PowerSpectrum cs{1.0, 1.0, 4.1};
  const PowerSpectrum as{1.0, 10.0, 2.5};
  CHECK(kappa_tilde(p, cs, as) == doctest::Approx(0.2778).epsilon(1e-4));
  const MajorantFit fit = fit_majorant(p);
  CHECK(q_bound_hom(p, cs, fit.consts, 100, 0.4) / q_bound_hom(p, cs, fit.consts, 50, 0.4) ==
        doctest::Approx(std::pow(2.0, -2.05)).epsilon(1e-12));
  CHECK_THROWS_AS(q_bound_hom(p, cs, fit.consts, 9, 0.4), DomainError);
  CHECK_THROWS_AS(q_bound_inhom(p, PowerSpectrum{1.0, 10.0, 2.2}, 1.0, 50), DomainError);
  const PowerSpectrum as1{1.0, 10.0, 2.5};
  const double r = q_bound_inhom(with_alpha(1.0), as1, 1.0, 40) / q_bound_inhom(with_alpha(1.0), as1, 1.0, 20);
  CHECK(r == doctest::Approx(std::pow(2.0, -0.25)).epsilon(1e-12));
}

TEST_CASE("fitted majorant dominates its lattice") {
  const ModelParams p;
  const MajorantFit fit = fit_majorant(p);
  CHECK(fit.inflation >= 1.0);
  for (int l = 1; l <= 200; l += 7) {
    for (double t : {0.01, 0.1, 1.0, 10.0}) {
      CHECK(std::sqrt(l * (l + 1.0)) * std::abs(f_coeff(p, l, t)) <= h_majorant(fit.consts, p, t) * (1 + 1e-12));
    }
  }
}

TEST_CASE("truncation bounds dominate brute-force tails") {
  const ModelParams p;
  const double t = 0.4;
  const PowerSpectrum cs{1.0, 1.0, 4.1};
  const MajorantFit fit = fit_majorant(p);
  std::vector<double> term(2001, 0.0);
  for (int l = 1; l <= 2000; ++l) term[l] = (2 * l + 1.0) * cs.value(l) * std::pow(f_coeff(p, l, t), 2);
  for (int L : {10, 20, 50, 100, 400}) {
    double tail = 0.0;
    for (int l = L + 1; l <= 2000; ++l) tail += term[l];
    CHECK(std::sqrt(tail) <= q_bound_hom(p, cs, fit.consts, L, t));
  }

  const PowerSpectrum as{1.0, 1.0, 4.5};
  std::vector<int> ells;
  for (int l = 10; l <= 200; ++l) ells.push_back(l);
  const double c3 = fit_sigma_bounds(p, ells, {t - p.tau}).c3_inhom;
  std::vector<double> inh(1201, 0.0);
  for (int l = 1; l <= 1200; ++l) inh[l] = (2 * l + 1.0) * as.value(l) * sigma2(p, l, t - p.tau);
  for (int L : {50, 100, 200}) {
    double tail = 0.0;
    for (int l = L + 1; l <= 1200; ++l) tail += inh[l];
    CHECK(std::sqrt(tail) <= q_bound_inhom(p, as, c3, L));
  }
}

TEST_CASE("Caputo residual") {
  const ModelParams p1 = with_alpha(1.0);
  double fmax = 0.0;
  for (double t : {0.25, 0.5, 1.0}) fmax = std::max(fmax, std::abs(f_coeff(p1, 5, t)));
  CHECK(caputo_residual(p1, 5, {0.25, 0.5, 1.0}, 1e-3) < 1e-4 * fmax);
  CHECK(caputo_residual(with_alpha(0.9), 0, {0.25, 0.5, 1.0}, 1e-2) < 1e-12);
  const ModelParams p = with_alpha(0.9);
  double prev = 1e300;
  for (double dt : {1e-2, 5e-3, 2.5e-3}) {
    const double r = caputo_residual(p, 5, {0.25, 0.5, 1.0}, dt);
    CHECK(r < prev);
    prev = r;
  }
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fracwave/error.hpp"
#include "fracwave/mlf.hpp"
#include "oracle_csv.hpp"

using namespace fracwave;
using cplx = std::complex<double>;

TEST_CASE("mlf matches the high-precision series oracle") {
  const auto rows = load_mlf_oracle(std::string(FRACWAVE_TEST_DATA) + "/mlf_oracle.csv");
  REQUIRE(rows.size() >= 200);
  for (const auto& r : rows) {
    const cplx got = mlf::mlf_e3(r.a, r.b, r.q, r.z);
    const double rel = std::abs(got - r.value) / std::abs(r.value);
    INFO("a=" << r.a << " b=" << r.b << " q=" << r.q << " z=" << r.z);
    CHECK(rel <= 1e-10);
  }
}

TEST_CASE("mlf elementary values") {
  CHECK(mlf::mlf_e_real(1.0, 1.0, 1.0) == doctest::Approx(2.718281828459045).epsilon(1e-15));
  CHECK(mlf::mlf_e_real(1.0, 1.0, -3.0) == doctest::Approx(std::exp(-3.0)).epsilon(1e-13));
  CHECK(mlf::mlf_e_real(0.7, 1.4, 0.0) == doctest::Approx(1.0 / std::tgamma(1.4)).epsilon(1e-15));
  CHECK(mlf::mlf_e_real(0.7, 1.4, 0.0) == doctest::Approx(1.1270604979860275).epsilon(1e-13));
  const double x = std::numbers::pi / 2;
  CHECK(std::abs(mlf::mlf_e_real(1.9999, 1.0, -x * x)) < 1e-3);
  for (double x : {0.3, 2.0, 9.0}) {
    CHECK(mlf::mlf_e_real(0.5, 1.0, -x) == doctest::Approx(std::exp(x * x) * std::erfc(x)).epsilon(1e-11));
  }
}

TEST_CASE("three-parameter function") {
  CHECK(mlf::mlf_e3(1.0, 1.0, 2.0, 0.5).real() == doctest::Approx(1.5 * std::exp(0.5)).epsilon(1e-13));
  for (cplx z : {cplx(-0.4, 0.0), cplx(-12.0, 3.0), cplx(-70.0, 0.0)}) {
    for (double a : {0.6, 0.9}) {
      const cplx two = mlf::mlf_e(a, 1.3, z);
      const cplx three = mlf::mlf_e3(a, 1.3, 1.0, z);
      CHECK(std::abs(two - three) <= 1e-15 * std::abs(two));
    }
  }
}

TEST_CASE("recurrence E_{a,b}(z) = 1/Gamma(b) + z E_{a,a+b}(z)") {
  for (double a : {0.6, 0.75, 0.9, 1.0}) {
    for (double b : {a, 2 * a - 1, 2 * a, 1.0}) {
      for (cplx z : {cplx(-0.2, 0.0), cplx(-5.0, 0.0), cplx(-60.0, 0.0), cplx(-8.0, 6.0), cplx(-30.0, -50.0)}) {
        const cplx lhs = mlf::mlf_e(a, b, z);
        const cplx rhs = mlf::rgamma(b) + z * mlf::mlf_e(a, a + b, z);
        const double term_scale =
            std::max({std::abs(lhs), std::abs(mlf::rgamma(b)), std::abs(rhs - mlf::rgamma(b))});
        CHECK(std::abs(lhs - rhs) <= 1e-9 * term_scale);
      }
    }
  }
}

TEST_CASE("a = 1 with integer b has elementary closed forms") {
  for (double x : {0.5, 10.0, 60.0, 300.0}) {
    CHECK(mlf::mlf_e_real(1.0, 3.0, -x) == doctest::Approx((std::exp(-x) - 1.0 + x) / (x * x)).epsilon(1e-11));
  }
}

TEST_CASE("gamma helpers") {
  CHECK(mlf::gamma(5.0) == doctest::Approx(24.0).epsilon(1e-15));
  CHECK(mlf::rgamma(0.0) == 0.0);
  CHECK(mlf::rgamma(-3.0) == 0.0);
  CHECK_THROWS_AS(mlf::gamma(-2.0), DomainError);
}

TEST_CASE("regimes are reported") {
  CHECK(mlf::evaluate({0.9, 1.0}, 0.0).regime == mlf::Regime::zero);
  CHECK(mlf::evaluate({0.9, 1.0}, -0.5).regime == mlf::Regime::series);
  const auto far = mlf::evaluate({0.9, 1.0}, -80.0);
  CHECK(far.regime != mlf::Regime::series);
  CHECK(far.error_estimate < 1e-12);
}

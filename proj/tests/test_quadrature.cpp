#include <doctest.h>

#include <cmath>

#include "fracwave/error.hpp"
#include "fracwave/quadrature.hpp"

using namespace fracwave;

TEST_CASE("gauss_legendre integrates polynomials exactly") {
  for (int n : {1, 2, 5, 17, 64}) {
    const auto [x, w] = quad::gauss_legendre(n);
    double sw = 0.0;
    for (double v : w) sw += v;
    CHECK(sw == doctest::Approx(2.0).epsilon(1e-14));
    for (int deg = 0; deg <= 2 * n - 1; deg += 2) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += w[i] * std::pow(x[i], deg);
      CHECK(s == doctest::Approx(2.0 / (deg + 1)).epsilon(1e-13));
    }
    for (int i = 1; i < n; ++i) CHECK(x[i] > x[i - 1]);
  }
}

TEST_CASE("adaptive integration") {
  const auto r = quad::integrate([](double x) { return std::exp(-x) * std::sin(3 * x); }, 0.0, 10.0, 1e-12);
  const double exact = (3.0 - std::exp(-10.0) * (std::sin(30.0) + 3.0 * std::cos(30.0))) / 10.0;
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-12));
  const auto s = quad::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-10);
  CHECK(s.value == doctest::Approx(2.0).epsilon(1e-9));
  const auto b = quad::integrate([](double x) { return std::abs(x - 0.3); }, std::vector<double>{0.0, 0.3, 1.0}, 1e-13);
  CHECK(b.value == doctest::Approx(0.045 + 0.245).epsilon(1e-13));
}

TEST_CASE("integration budget exhaustion throws") {
  CHECK_THROWS_AS(quad::integrate([](double x) { return std::sin(1.0 / x); }, 1e-9, 1.0, 1e-14, 0.0, 10),
                  AccuracyError);
}

// OpenMP vs serial harmonic transforms. Usage: bench_sht [L] [repeats]
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "fracwave/rng.hpp"
#include "fracwave/sht.hpp"

using namespace fracwave;

template <typename F>
double best_of(int repeats, F&& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

int main(int argc, char** argv) {
  const int L = argc > 1 ? std::atoi(argv[1]) : 256;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;
  const RngStream rng(1);
  sht::HarmonicCoeffs a(L);
  for (int l = 0; l <= L; ++l) {
    for (int m = -l; m <= l; ++m) a.at(l, m) = rng.normal(0, l, m, DrawRole::aux);
  }
  const sht::SphereGrid g = sht::make_grid(L);

  sht::FieldMap m_par;
  sht::FieldMap m_ser;
  sht::HarmonicCoeffs b_par;
  sht::HarmonicCoeffs b_ser;
  const double ts_par = best_of(repeats, [&] { m_par = sht::synthesize(a, g); });
  const double ts_ser = best_of(repeats, [&] { m_ser = sht::serial::synthesize(a, g); });
  const double ta_par = best_of(repeats, [&] { b_par = sht::analyze(m_par, L); });
  const double ta_ser = best_of(repeats, [&] { b_ser = sht::serial::analyze(m_ser, L); });

  double dmap = 0.0;
  for (std::size_t i = 0; i < m_par.values.size(); ++i) {
    dmap = std::max(dmap, std::abs(m_par.values[i] - m_ser.values[i]));
  }
  double dcoef = 0.0;
  for (std::size_t i = 0; i < b_par.size(); ++i) dcoef = std::max(dcoef, std::abs(b_par.values[i] - b_ser.values[i]));

  std::printf("L=%d grid=%dx%d threads=%d repeats=%d\n", L, g.n_theta, g.n_phi, omp_get_max_threads(), repeats);
  std::printf("synthesize  openmp %.4fs  serial %.4fs  speedup %.2f  max|diff| %.3g\n", ts_par, ts_ser,
              ts_ser / ts_par, dmap);
  std::printf("analyze     openmp %.4fs  serial %.4fs  speedup %.2f  max|diff| %.3g\n", ta_par, ta_ser,
              ta_ser / ta_par, dcoef);
  return 0;
}

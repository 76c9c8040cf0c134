#include "fracwave/sht.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fracwave/error.hpp"
#include "fracwave/io.hpp"
#include "fracwave/quadrature.hpp"

namespace fracwave::sht {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

// Values are carried as v * 2^e; the pair is renormalized whenever |v| leaves
// [2^-400, 2^400], so neither the sectoral start nor the recurrence can
// underflow before the result is formed.
struct Scaled {
  double v;
  int e;
};

void renormalize(double& a, double& b, int& e) {
  const double mag = std::max(std::abs(a), std::abs(b));
  if (mag == 0.0) return;
  int ex = 0;
  std::frexp(mag, &ex);
  if (ex > 400 || ex < -400) {
    a = std::ldexp(a, -ex);
    b = std::ldexp(b, -ex);
    e += ex;
  }
}

double unscale(double v, int e) {
  if (e < -1100) return 0.0;
  return std::ldexp(v, e);
}

// P~_m^m(x) for |s| = sin(theta) as a scaled value; sign carries (-1)^m when the
// supplied sine is negative.
Scaled sectoral(int m, double s) {
  // log2 of sqrt(2m+1) * sqrt(prod (2i-1)/(2i)) * |s|^m
  double log2v = 0.5 * std::log2(2.0 * m + 1.0);
  for (int i = 1; i <= m; ++i) log2v += 0.5 * std::log2((2.0 * i - 1.0) / (2.0 * i));
  const double as = std::abs(s);
  if (m > 0) {
    if (as == 0.0) return {0.0, 0};
    log2v += m * std::log2(as);
  }
  const double fl = std::floor(log2v);
  double v = std::exp2(log2v - fl);
  if (s < 0.0 && (m % 2 == 1)) v = -v;
  return {v, static_cast<int>(fl)};
}

// Fills out[l - m] = P~_l^m(x) for l = m..L.
void legendre_column(int m, int L, double x, double s, double* out) {
  Scaled start = sectoral(m, s);
  if (start.v == 0.0) {
    std::fill(out, out + (L - m + 1), 0.0);
    return;
  }
  double p2 = start.v;  // l - 2
  int e = start.e;
  out[0] = unscale(p2, e);
  if (L == m) return;
  double p1 = x * std::sqrt(2.0 * m + 3.0) * p2;  // l - 1
  out[1] = unscale(p1, e);
  double a_prev = std::sqrt(2.0 * m + 3.0);
  for (int l = m + 2; l <= L; ++l) {
    const double dl = l;
    const double a = std::sqrt((4.0 * dl * dl - 1.0) / (dl * dl - static_cast<double>(m) * m));
    const double p = a * (x * p1 - p2 / a_prev);
    p2 = p1;
    p1 = p;
    a_prev = a;
    renormalize(p1, p2, e);
    out[l - m] = unscale(p1, e);
  }
}

void check_x(double x) {
  if (!std::isfinite(x) || x < -1.0 || x > 1.0) throw InvalidArgument("legendre: |x| must be <= 1");
}

double sign_m(int m) { return (m % 2 == 0) ? 1.0 : -1.0; }

// cos/sin(m phi_j) using exact integer reduction of the angle.
struct TrigTable {
  int n_phi;
  int mmax;
  std::vector<double> c;
  std::vector<double> s;
  TrigTable(int n, int mm) : n_phi(n), mmax(mm), c(static_cast<std::size_t>(mm + 1) * n), s(c.size()) {
    for (int m = 0; m <= mm; ++m) {
      for (int j = 0; j < n; ++j) {
        const long long r = (static_cast<long long>(m) * j) % n;
        const double ang = 2.0 * std::numbers::pi * static_cast<double>(r) / n;
        c[static_cast<std::size_t>(m) * n + j] = std::cos(ang);
        s[static_cast<std::size_t>(m) * n + j] = std::sin(ang);
      }
    }
  }
};

bool equispaced(const SphereGrid& g) {
  for (int j = 0; j < g.n_phi; ++j) {
    if (std::abs(g.phis[j] - 2.0 * std::numbers::pi * j / g.n_phi) > 1e-14) return false;
  }
  return true;
}

void check_resolution(const SphereGrid& g, int L, const char* who) {
  if (L < 0) throw InvalidArgument(std::string(who) + ": negative degree");
  if (g.n_theta < L + 1 || g.n_phi < 2 * L + 2) {
    throw InvalidArgument(std::string(who) + ": grid too coarse for the requested degree");
  }
  if (static_cast<int>(g.thetas.size()) != g.n_theta || static_cast<int>(g.phis.size()) != g.n_phi ||
      static_cast<int>(g.weights.size()) != g.n_theta || !equispaced(g)) {
    throw InvalidArgument(std::string(who) + ": malformed grid");
  }
}

// One latitude of the synthesis: values for all longitudes.
void synth_row(const HarmonicCoeffs& a, const SphereGrid& g, const TrigTable& trig, int i,
               std::vector<double>& col, double* row) {
  const int L = a.degree;
  const double x = std::cos(g.thetas[i]);
  const double s = std::sin(g.thetas[i]);
  std::fill(row, row + g.n_phi, 0.0);
  for (int m = 0; m <= L; ++m) {
    legendre_column(m, L, x, s, col.data());
    double cm = 0.0;
    double sm = 0.0;
    for (int l = m; l <= L; ++l) {
      cm += a.at(l, m) * col[l - m];
      if (m > 0) sm += a.at(l, -m) * col[l - m];
    }
    if (m == 0) {
      for (int j = 0; j < g.n_phi; ++j) row[j] += cm;
    } else {
      const double f = sign_m(m) * kSqrt2;
      cm *= f;
      sm *= f;
      const double* cs = &trig.c[static_cast<std::size_t>(m) * g.n_phi];
      const double* sn = &trig.s[static_cast<std::size_t>(m) * g.n_phi];
      for (int j = 0; j < g.n_phi; ++j) row[j] += cm * cs[j] + sm * sn[j];
    }
  }
}

// Fourier sums of one latitude row: fc[m], fs[m] for m = 0..L.
void fourier_row(const FieldMap& map, const TrigTable& trig, int i, int L, double* fc, double* fs) {
  const int n = map.grid.n_phi;
  const double* row = &map.values[static_cast<std::size_t>(i) * n];
  for (int m = 0; m <= L; ++m) {
    const double* cs = &trig.c[static_cast<std::size_t>(m) * n];
    const double* sn = &trig.s[static_cast<std::size_t>(m) * n];
    double c = 0.0;
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      c += row[j] * cs[j];
      s += row[j] * sn[j];
    }
    fc[m] = c;
    fs[m] = s;
  }
}

// Legendre projection for one order m, accumulating latitudes in index order.
void project_order(const FieldMap& map, int L, int m, const std::vector<double>& fc,
                   const std::vector<double>& fs, std::vector<double>& col, HarmonicCoeffs& out) {
  const SphereGrid& g = map.grid;
  const double f = (m == 0) ? 1.0 : sign_m(m) * kSqrt2;
  for (int i = 0; i < g.n_theta; ++i) {
    const double x = std::cos(g.thetas[i]);
    const double s = std::sin(g.thetas[i]);
    legendre_column(m, L, x, s, col.data());
    const double w = g.weights[i] / g.n_phi * f;
    const double c = fc[static_cast<std::size_t>(i) * (L + 1) + m] * w;
    const double sn = fs[static_cast<std::size_t>(i) * (L + 1) + m] * w;
    for (int l = m; l <= L; ++l) {
      out.at(l, m) += c * col[l - m];
      if (m > 0) out.at(l, -m) += sn * col[l - m];
    }
  }
}

FieldMap empty_map(const SphereGrid& g) {
  FieldMap map;
  map.grid = g;
  map.values.assign(static_cast<std::size_t>(g.n_theta) * g.n_phi, 0.0);
  return map;
}

}  // namespace

HarmonicCoeffs::HarmonicCoeffs(int L) : degree(L) {
  if (L < 0) throw InvalidArgument("HarmonicCoeffs: negative degree");
  values.assign(static_cast<std::size_t>(L + 1) * (L + 1), 0.0);
}

int SphereGrid::max_degree() const { return std::min(n_theta - 1, (n_phi - 2) / 2); }

double legendre(int l, double x) {
  check_x(x);
  if (l < 0) throw InvalidArgument("legendre: negative degree");
  if (l == 0) return 1.0;
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= l; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double assoc_legendre_norm(int l, int m, double x) {
  check_x(x);
  if (m < 0 || m > l) throw InvalidArgument("assoc_legendre_norm: need 0 <= m <= l");
  std::vector<double> col(l - m + 1);
  legendre_column(m, l, x, std::sqrt((1.0 - x) * (1.0 + x)), col.data());
  return col.back();
}

double y_real(int l, int m, double theta, double phi) {
  if (l < 0 || std::abs(m) > l) throw InvalidArgument("y_real: need |m| <= l");
  if (!std::isfinite(theta) || !std::isfinite(phi)) throw InvalidArgument("y_real: non-finite angle");
  const int am = std::abs(m);
  std::vector<double> col(l - am + 1);
  legendre_column(am, l, std::cos(theta), std::sin(theta), col.data());
  const double p = col.back();
  if (m == 0) return p;
  const double f = sign_m(am) * kSqrt2 * p;
  return m > 0 ? f * std::cos(am * phi) : f * std::sin(am * phi);
}

std::vector<double> y_real_all(int L, double theta, double phi) {
  if (L < 0) throw InvalidArgument("y_real_all: negative degree");
  std::vector<double> out(static_cast<std::size_t>(L + 1) * (L + 1), 0.0);
  std::vector<double> col(L + 1);
  const double x = std::cos(theta);
  const double s = std::sin(theta);
  for (int m = 0; m <= L; ++m) {
    legendre_column(m, L, x, s, col.data());
    if (m == 0) {
      for (int l = 0; l <= L; ++l) out[HarmonicCoeffs::index(l, 0)] = col[l];
      continue;
    }
    const double f = sign_m(m) * kSqrt2;
    const double cm = f * std::cos(m * phi);
    const double sm = f * std::sin(m * phi);
    for (int l = m; l <= L; ++l) {
      out[HarmonicCoeffs::index(l, m)] = cm * col[l - m];
      out[HarmonicCoeffs::index(l, -m)] = sm * col[l - m];
    }
  }
  return out;
}

SphereGrid make_grid(int L) {
  if (L < 0) throw InvalidArgument("make_grid: negative degree");
  SphereGrid g;
  g.n_theta = L + 1;
  g.n_phi = 2 * L + 2;
  const quad::GaussLegendreRule rule = quad::gauss_legendre(g.n_theta);
  g.thetas.resize(g.n_theta);
  g.weights.resize(g.n_theta);
  // Nodes ascend in cos(theta); reverse so colatitudes ascend.
  for (int i = 0; i < g.n_theta; ++i) {
    const int r = g.n_theta - 1 - i;
    g.thetas[i] = std::acos(rule.nodes[r]);
    g.weights[i] = 0.5 * rule.weights[r];
  }
  g.phis.resize(g.n_phi);
  for (int j = 0; j < g.n_phi; ++j) g.phis[j] = 2.0 * std::numbers::pi * j / g.n_phi;
  return g;
}

FieldMap synthesize(const HarmonicCoeffs& coeffs, const SphereGrid& grid) {
  check_resolution(grid, coeffs.degree, "synthesize");
  FieldMap map = empty_map(grid);
  const TrigTable trig(grid.n_phi, coeffs.degree);
#pragma omp parallel
  {
    std::vector<double> col(coeffs.degree + 1);
#pragma omp for schedule(dynamic)
    for (int i = 0; i < grid.n_theta; ++i) {
      synth_row(coeffs, grid, trig, i, col, &map.values[static_cast<std::size_t>(i) * grid.n_phi]);
    }
  }
  return map;
}

HarmonicCoeffs analyze(const FieldMap& map, int L) {
  check_resolution(map.grid, L, "analyze");
  const SphereGrid& g = map.grid;
  const TrigTable trig(g.n_phi, L);
  std::vector<double> fc(static_cast<std::size_t>(g.n_theta) * (L + 1));
  std::vector<double> fs(fc.size());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < g.n_theta; ++i) {
    fourier_row(map, trig, i, L, &fc[static_cast<std::size_t>(i) * (L + 1)],
                &fs[static_cast<std::size_t>(i) * (L + 1)]);
  }
  HarmonicCoeffs out(L);
#pragma omp parallel
  {
    std::vector<double> col(L + 1);
#pragma omp for schedule(dynamic)
    for (int m = 0; m <= L; ++m) project_order(map, L, m, fc, fs, col, out);
  }
  return out;
}

namespace serial {

FieldMap synthesize(const HarmonicCoeffs& coeffs, const SphereGrid& grid) {
  check_resolution(grid, coeffs.degree, "synthesize");
  FieldMap map = empty_map(grid);
  const TrigTable trig(grid.n_phi, coeffs.degree);
  std::vector<double> col(coeffs.degree + 1);
  for (int i = 0; i < grid.n_theta; ++i) {
    synth_row(coeffs, grid, trig, i, col, &map.values[static_cast<std::size_t>(i) * grid.n_phi]);
  }
  return map;
}

HarmonicCoeffs analyze(const FieldMap& map, int L) {
  check_resolution(map.grid, L, "analyze");
  const SphereGrid& g = map.grid;
  const TrigTable trig(g.n_phi, L);
  std::vector<double> fc(static_cast<std::size_t>(g.n_theta) * (L + 1));
  std::vector<double> fs(fc.size());
  for (int i = 0; i < g.n_theta; ++i) {
    fourier_row(map, trig, i, L, &fc[static_cast<std::size_t>(i) * (L + 1)],
                &fs[static_cast<std::size_t>(i) * (L + 1)]);
  }
  HarmonicCoeffs out(L);
  std::vector<double> col(L + 1);
  for (int m = 0; m <= L; ++m) project_order(map, L, m, fc, fs, col, out);
  return out;
}

}  // namespace serial

double grid_mean_square(const FieldMap& map) {
  const SphereGrid& g = map.grid;
  double total = 0.0;
  for (int i = 0; i < g.n_theta; ++i) {
    double row = 0.0;
    for (int j = 0; j < g.n_phi; ++j) row += map.at(i, j) * map.at(i, j);
    total += g.weights[i] / g.n_phi * row;
  }
  return total;
}

void write_map_csv(const FieldMap& map, const std::string& path) {
  const SphereGrid& g = map.grid;
  std::string out = "theta,phi,value\n";
  out.reserve(static_cast<std::size_t>(g.n_theta) * g.n_phi * 64);
  for (int i = 0; i < g.n_theta; ++i) {
    const std::string th = io::format_double(g.thetas[i]);
    for (int j = 0; j < g.n_phi; ++j) {
      out += th;
      out += ',';
      out += io::format_double(g.phis[j]);
      out += ',';
      out += io::format_double(map.at(i, j));
      out += '\n';
    }
  }
  io::write_file(path, out);
}

void write_map_pgm(const FieldMap& map, const std::string& path, const std::string& comment) {
  const SphereGrid& g = map.grid;
  double lo = 0.0;
  double hi = 0.0;
  if (!map.values.empty()) {
    const auto [mn, mx] = std::minmax_element(map.values.begin(), map.values.end());
    lo = *mn;
    hi = *mx;
  }
  std::string out = "P5\n# min=" + io::format_double(lo) + " max=" + io::format_double(hi) + "\n";
  if (!comment.empty()) out += "# " + comment + "\n";
  out += std::to_string(g.n_phi) + " " + std::to_string(g.n_theta) + "\n255\n";
  const double span = hi - lo;
  for (double v : map.values) {
    int px = 0;
    if (span > 0.0) px = static_cast<int>(std::lround((v - lo) / span * 255.0));
    out += static_cast<char>(static_cast<unsigned char>(std::clamp(px, 0, 255)));
  }
  io::write_file(path, out);
}

}  // namespace fracwave::sht

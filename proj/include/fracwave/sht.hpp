#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace fracwave::sht {

/// Real harmonic coefficients a_{l,m}, 0 <= l <= L, -l <= m <= l, stored
/// l-major with m ascending: index(l, m) = l*l + l + m.
struct HarmonicCoeffs {
  int degree = 0;
  std::vector<double> values;

  HarmonicCoeffs() = default;
  explicit HarmonicCoeffs(int L);

  static std::size_t index(int l, int m) {
    return static_cast<std::size_t>(l) * l + l + m;
  }
  double& at(int l, int m) { return values[index(l, m)]; }
  double at(int l, int m) const { return values[index(l, m)]; }
  std::size_t size() const { return values.size(); }
};

/// Gauss-Legendre colatitudes times equispaced longitudes. weights[i] / n_phi
/// is the mass of a grid point under the probability measure on the sphere.
struct SphereGrid {
  int n_theta = 0;
  int n_phi = 0;
  std::vector<double> thetas;
  std::vector<double> phis;
  std::vector<double> weights;

  /// Largest degree analyze() resolves exactly on this grid.
  int max_degree() const;
};

struct FieldMap {
  SphereGrid grid;
  std::vector<double> values;  // row-major n_theta x n_phi

  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * grid.n_phi + j]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.n_phi + j]; }
};

/// Legendre polynomial P_l(x).
double legendre(int l, double x);

/// sqrt((2l+1)(l-m)!/(l+m)!) P_l^m(x) without the Condon-Shortley phase;
/// unit mean square on [-1, 1]. Exponent-tracked, stable to l = 4000 and beyond.
double assoc_legendre_norm(int l, int m, double x);

/// Real harmonic, orthonormal under the probability measure (Y_00 = 1):
/// m = 0: sqrt(2l+1) P_l(cos theta);
/// m > 0: (-1)^m sqrt(2) P~_l^m(cos theta) cos(m phi);
/// m < 0: (-1)^m sqrt(2) P~_l^|m|(cos theta) sin(|m| phi).
double y_real(int l, int m, double theta, double phi);

/// All harmonics of degree <= L at one point, in HarmonicCoeffs order.
std::vector<double> y_real_all(int L, double theta, double phi);

SphereGrid make_grid(int L);

FieldMap synthesize(const HarmonicCoeffs& coeffs, const SphereGrid& grid);
HarmonicCoeffs analyze(const FieldMap& map, int L);

/// Serial reference versions of the transforms, kept for testing and benchmarks.
namespace serial {
FieldMap synthesize(const HarmonicCoeffs& coeffs, const SphereGrid& grid);
HarmonicCoeffs analyze(const FieldMap& map, int L);
}  // namespace serial

/// Mean of f^2 under the grid quadrature.
double grid_mean_square(const FieldMap& map);

/// CSV with header theta,phi,value, 17 significant digits.
void write_map_csv(const FieldMap& map, const std::string& path);
/// 8-bit P5 raster, n_phi columns by n_theta rows, min-max scaled. A
/// non-empty comment is written as an extra header comment line.
void write_map_pgm(const FieldMap& map, const std::string& path, const std::string& comment = "");

}  // namespace fracwave::sht

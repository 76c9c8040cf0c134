#pragma once

#include <complex>

namespace fracwave::mlf {

using cplx = std::complex<double>;

/// Order parameters of E^q_{a,b}. q = 1 is the two-parameter function.
struct MlfOrder {
  double a;
  double b;
  double q = 1.0;
};

/// Which evaluation path produced a value.
enum class Regime { zero, series, asymptotic, contour };

struct MlfResult {
  cplx value;
  Regime regime;
  double error_estimate;  // absolute
};

/// Gamma function; throws DomainError at non-positive integers.
double gamma(double x);

/// 1/Gamma(x), entire: returns 0 at the poles of Gamma.
double rgamma(double x);

/// Two-parameter Mittag-Leffler function E_{a,b}(z), a in (0, 2).
cplx mlf_e(double a, double b, cplx z);

/// Three-parameter (Prabhakar) Mittag-Leffler function E^q_{a,b}(z).
cplx mlf_e3(double a, double b, double q, cplx z);

/// Same as mlf_e3 but reports the regime used and its error estimate.
MlfResult evaluate(const MlfOrder& order, cplx z);

/// Real-argument convenience for real-valued E_{a,b}(x).
inline double mlf_e_real(double a, double b, double x) {
  return mlf_e(a, b, cplx(x, 0.0)).real();
}

}  // namespace fracwave::mlf

#include "fracwave/spectrum.hpp"

#include <cmath>

#include "fracwave/error.hpp"

namespace fracwave {

double PowerSpectrum::value(int ell) const {
  if (ell < 0) throw InvalidArgument("PowerSpectrum: negative degree");
  if (ell == 0) return amp0;
  return scale * std::pow(static_cast<double>(ell), -exponent);
}

void PowerSpectrum::validate() const {
  if (!std::isfinite(amp0) || amp0 < 0.0) throw InvalidArgument("PowerSpectrum: amp0 must be >= 0");
  if (!std::isfinite(scale) || scale < 0.0) throw InvalidArgument("PowerSpectrum: scale must be >= 0");
  if (!std::isfinite(exponent) || exponent <= 2.0) {
    throw InvalidArgument("PowerSpectrum: exponent must exceed 2");
  }
}

std::string PowerSpectrum::decay_warning() const {
  if (scale > 0.0 && exponent <= 4.0) {
    return "spectrum exponent <= 4: the untruncated expansion is not guaranteed to converge";
  }
  return {};
}

}  // namespace fracwave

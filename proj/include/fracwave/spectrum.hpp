#pragma once

#include <string>

namespace fracwave {

/// Algebraically decaying angular power spectrum:
/// value(0) = amp0, value(l) = scale * l^(-exponent) for l >= 1.
struct PowerSpectrum {
  double amp0 = 0.0;
  double scale = 0.0;
  double exponent = 4.1;

  double value(int ell) const;
  /// Throws InvalidArgument for negative amplitudes or exponent <= 2.
  void validate() const;
  /// Exponents in (2, 4] are allowed for truncated fields but the summability
  /// conditions of the infinite expansion fail; returns a message, or empty.
  std::string decay_warning() const;
  bool is_zero() const { return amp0 == 0.0 && scale == 0.0; }
};

}  // namespace fracwave

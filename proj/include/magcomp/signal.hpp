#pragma once

#include <span>
#include <vector>

namespace magcomp::signal {

/**
 * @brief Passband description for the calibration-band filter.
 *
 * `order` is the order of the bandpass filter itself and must be a positive
 * even integer (a bandpass of order 2m is derived from a lowpass prototype
 * of order m).
 */
struct BandpassSpec {
  double pass1_hz{0.1};
  double pass2_hz{0.9};
  double fs_hz{10.0};
  int order{4};

  /// Throws ValidationError unless 0 < pass1 < pass2 < fs/2 and order is even > 0.
  void validate() const;
};

/// One second-order section, direct form II transposed, denominator normalized.
struct Biquad {
  double b0, b1, b2;
  double a1, a2;
};

/// Butterworth bandpass design via prewarped bilinear transform, as cascaded
/// second-order sections. Each section carries a zero at z=+1 and one at z=-1;
/// the overall gain is normalized to 1 at the geometric center frequency and
/// folded into the first section.
std::vector<Biquad> design_butterworth_bandpass(const BandpassSpec& spec);

/**
 * @brief Zero-phase bandpass filter.
 *
 * Extends the input by odd reflection of 3*order samples at both ends,
 * runs the section cascade forward and backward, and trims the padding.
 * Requires length(x) > 3*order and a NaN-free input.
 */
std::vector<double> bandpass(std::span<const double> x, const BandpassSpec& spec);

/**
 * @brief Central finite differences with unit sample spacing.
 *
 * Interior samples get (x[i+1] - x[i-1]) / 2; the endpoints get one-sided
 * first differences. Gradients are per sample, not per second.
 */
std::vector<double> central_fdm(std::span<const double> x);

/// Removes the least-squares affine fit over the sample index from x.
std::vector<double> detrend(std::span<const double> x);

}  // namespace magcomp::signal

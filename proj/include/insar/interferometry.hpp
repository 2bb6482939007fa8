#pragma once

#include <cmath>
#include <complex>
#include <span>

#include <Eigen/Core>

#include "insar/core_types.hpp"
#include "insar/errors.hpp"
#include "insar/sar_imager.hpp"

namespace insar {

/// Wraps an angle to (-pi, pi].
template <typename Scalar>
Scalar wrap_phase(Scalar a) {
  const Scalar two_pi = Scalar(2 * kPi);
  a = std::remainder(a, two_pi);
  if (a <= -Scalar(kPi)) a += two_pi;
  return a;
}

/// arg(s0 * conj(s1)); s0 is the lower-layer element, s1 the upper one.
template <typename Scalar>
Scalar phase_delay(const std::complex<Scalar>& s0, const std::complex<Scalar>& s1) {
  if (s0 == std::complex<Scalar>(0) || s1 == std::complex<Scalar>(0)) {
    throw DomainError("phase_delay: zero signal");
  }
  return wrap_phase(std::arg(s0 * std::conj(s1)));
}

/// Two-way phase delay 4 pi (D_v / lambda) sin(phi), unwrapped.
template <typename Scalar>
Scalar phase_from_elevation(Scalar elevation, Scalar baseline, Scalar wavelength) {
  return Scalar(4 * kPi) * (baseline / wavelength) * std::sin(elevation);
}

/// One-way plane-wave delay (D_v / c) sin(phi) across a vertical baseline.
template <typename Scalar>
Scalar tau_from_elevation(Scalar elevation, Scalar baseline) {
  return baseline / Scalar(kSpeedOfLight) * std::sin(elevation);
}

/// arcsin(lambda * dpsi / (4 pi D_v)). Baselines longer than lambda/4 are
/// ambiguous and rejected.
template <typename Scalar>
Scalar elevation_from_phase(Scalar phase, Scalar baseline, Scalar wavelength) {
  if (!(baseline > 0) || !(wavelength > 0)) {
    throw DomainError("elevation_from_phase: baseline and wavelength must be positive");
  }
  if (baseline > wavelength / 4 * (1 + Scalar(1e-12))) {
    throw DomainError("elevation_from_phase: ambiguous baseline (D_v > lambda/4)");
  }
  const Scalar arg = wavelength * phase / (Scalar(4 * kPi) * baseline);
  if (!(std::abs(arg) <= 1 + Scalar(1e-12))) {
    throw DomainError("elevation_from_phase: phase outside the arcsin domain");
  }
  return std::asin(std::clamp(arg, Scalar(-1), Scalar(1)));
}

struct BaselineCombination {
  double mean_phase = 0.0;         // arg of the summed correlations
  double circular_variance = 1.0;  // over baselines with nonzero correlation
  std::size_t used = 0;            // baselines with nonzero correlation
};

/// Complex average of c_b = lower_b * conj(upper_b) over baselines.
BaselineCombination combine_pixel(std::span<const std::complex<double>> lower,
                                  std::span<const std::complex<double>> upper);

struct Interferogram {
  ImageGrid grid;
  Eigen::MatrixXd mean_phase;         // NaN where no baseline carried signal
  Eigen::MatrixXd circular_variance;
  Eigen::MatrixXd magnitude;          // mean |S| over all virtual elements
  Eigen::MatrixXd snr_db;
};

Interferogram combine_baselines(const SarImageStack& stack);

/// 20 log10(|S| / median |S|). Throws DomainError on an empty grid or zero median.
Eigen::MatrixXd snr_map(const Eigen::MatrixXd& magnitude);

struct ElevationMap {
  ImageGrid grid;
  SarFrame frame;
  double wavelength = 0.0;
  double baseline = 0.0;        // D_v shared by every vertical baseline
  Eigen::MatrixXd elevation;    // radians; NaN where unrecoverable
  Eigen::MatrixXd phase_delay;
  Eigen::MatrixXd circular_variance;
  Eigen::MatrixXd magnitude;
  Eigen::MatrixXd snr_db;
};

ElevationMap elevation_map(const SarImageStack& stack);

/// Common D_v of the array's vertical baselines. Throws DomainError when there
/// are none or they differ.
double common_baseline(const VirtualArray& array);

}  // namespace insar

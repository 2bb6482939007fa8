#include "insar/interferometry.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace insar {

BaselineCombination combine_pixel(std::span<const std::complex<double>> lower,
                                  std::span<const std::complex<double>> upper) {
  if (lower.size() != upper.size() || lower.empty()) {
    throw DomainError("combine_pixel: need matching, non-empty baseline lists");
  }
  std::complex<double> sum(0.0, 0.0);
  std::complex<double> unit_sum(0.0, 0.0);
  BaselineCombination out;
  for (std::size_t b = 0; b < lower.size(); ++b) {
    const std::complex<double> c = lower[b] * std::conj(upper[b]);
    const double mag = std::abs(c);
    if (mag == 0.0) continue;
    sum += c;
    unit_sum += c / mag;
    ++out.used;
  }
  if (out.used == 0) {
    out.mean_phase = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.mean_phase = wrap_phase(std::arg(sum));
  out.circular_variance = std::clamp(1.0 - std::abs(unit_sum) / static_cast<double>(out.used), 0.0, 1.0);
  return out;
}

double common_baseline(const VirtualArray& array) {
  if (array.vertical_baselines.empty()) throw DomainError("interferometry: no vertical baseline");
  const double d = array.vertical_baselines.front().separation;
  for (const auto& b : array.vertical_baselines) {
    if (std::abs(b.separation - d) > kHorizontalTolerance) {
      throw DomainError("interferometry: mixed vertical baseline lengths are unsupported");
    }
  }
  return d;
}

Eigen::MatrixXd snr_map(const Eigen::MatrixXd& magnitude) {
  if (magnitude.size() == 0) throw DomainError("snr_map: empty grid");
  std::vector<double> values(magnitude.data(), magnitude.data() + magnitude.size());
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  double median = *mid;
  if (values.size() % 2 == 0) {
    median = 0.5 * (median + *std::max_element(values.begin(), mid));
  }
  if (!(median > 0.0)) throw DomainError("snr_map: zero median magnitude");
  return (magnitude.array() / median).log10() * 20.0;
}

Interferogram combine_baselines(const SarImageStack& stack) {
  common_baseline(stack.array);
  const auto& baselines = stack.array.vertical_baselines;
  const auto rows = static_cast<Eigen::Index>(stack.grid.num_v);
  const auto cols = static_cast<Eigen::Index>(stack.grid.num_u);
  if (stack.images.size() != stack.array.num_vx()) {
    throw DomainError("interferometry: image count does not match the array");
  }

  Interferogram out;
  out.grid = stack.grid;
  out.mean_phase.resize(rows, cols);
  out.circular_variance.resize(rows, cols);
  out.magnitude = Eigen::MatrixXd::Zero(rows, cols);
  for (const auto& img : stack.images) out.magnitude += img.cwiseAbs();
  out.magnitude /= static_cast<double>(stack.images.size());

  std::vector<std::complex<double>> lower(baselines.size()), upper(baselines.size());
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      for (std::size_t b = 0; b < baselines.size(); ++b) {
        lower[b] = stack.images[baselines[b].lower_vx](r, c);
        upper[b] = stack.images[baselines[b].upper_vx](r, c);
      }
      const BaselineCombination comb = combine_pixel(lower, upper);
      out.mean_phase(r, c) = comb.mean_phase;
      out.circular_variance(r, c) = comb.circular_variance;
    }
  }
  out.snr_db = snr_map(out.magnitude);
  return out;
}

ElevationMap elevation_map(const SarImageStack& stack) {
  const double baseline = common_baseline(stack.array);
  if (baseline > stack.wavelength / 4.0 * (1.0 + 1e-12)) {
    throw DomainError("interferometry: ambiguous baseline (D_v > lambda/4)");
  }
  Interferogram ifg = combine_baselines(stack);

  ElevationMap map;
  map.grid = stack.grid;
  map.frame = stack.frame;
  map.wavelength = stack.wavelength;
  map.baseline = baseline;
  map.elevation.resize(ifg.mean_phase.rows(), ifg.mean_phase.cols());
  for (Eigen::Index i = 0; i < ifg.mean_phase.size(); ++i) {
    const double dpsi = ifg.mean_phase.data()[i];
    double phi = std::numeric_limits<double>::quiet_NaN();
    if (std::isfinite(dpsi)) {
      const double arg = stack.wavelength * dpsi / (4.0 * kPi * baseline);
      if (std::abs(arg) <= 1.0 + 1e-12) phi = elevation_from_phase(dpsi, baseline, stack.wavelength);
    }
    map.elevation.data()[i] = phi;
  }
  map.phase_delay = std::move(ifg.mean_phase);
  map.circular_variance = std::move(ifg.circular_variance);
  map.magnitude = std::move(ifg.magnitude);
  map.snr_db = std::move(ifg.snr_db);
  return map;
}

}  // namespace insar

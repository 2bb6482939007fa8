#include "insar/sar_imager.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "insar/errors.hpp"
#include "insar/parallel.hpp"

namespace insar {

namespace {

std::complex<double> unit_phasor_cycles(double cycles) {
  const double frac = cycles - std::floor(cycles);
  return std::polar(1.0, 2.0 * kPi * frac);
}

double lanczos(double x, double a) {
  if (x == 0.0) return 1.0;
  if (std::abs(x) >= a) return 0.0;
  const double px = kPi * x;
  return a * std::sin(px) * std::sin(px / a) / (px * px);
}

constexpr double kSincTaps = 4.0;

// exp(-j 2 pi x) for x in [0, 1], tabulated and linearly interpolated.
// Interpolation error is below 3e-7 in magnitude and phase.
class PhasorTable {
 public:
  static constexpr int kSize = 4096;

  PhasorTable() {
    for (int i = 0; i <= kSize; ++i) {
      const double a = -2.0 * kPi * static_cast<double>(i) / kSize;
      cos_[i] = std::cos(a);
      sin_[i] = std::sin(a);
    }
  }

  /// cycles must be non-negative.
  void lookup(double cycles, double& c, double& s) const {
    const double pos = (cycles - static_cast<double>(static_cast<long long>(cycles))) * kSize;
    const int i = static_cast<int>(pos);
    const double w = pos - static_cast<double>(i);
    c = cos_[i] + w * (cos_[i + 1] - cos_[i]);
    s = sin_[i] + w * (sin_[i + 1] - sin_[i]);
  }

 private:
  double cos_[kSize + 1];
  double sin_[kSize + 1];
};

const PhasorTable& phasor_table() {
  static const PhasorTable table;
  return table;
}

}  // namespace

void ImageGrid::validate() const {
  if (!(pixel_size > 0.0) || !std::isfinite(pixel_size)) {
    throw ConfigError("image grid: pixel size must be positive");
  }
  if (num_u == 0 || num_v == 0) throw ConfigError("image grid: grid smaller than one pixel");
  if (!std::isfinite(u_min) || !std::isfinite(v_min) || !std::isfinite(height)) {
    throw ConfigError("image grid: non-finite origin");
  }
}

ImageGrid make_grid(double u_min, double v_min, double extent_u, double extent_v,
                    double pixel_size, double height) {
  if (!(pixel_size > 0.0)) throw ConfigError("image grid: pixel size must be positive");
  if (!(extent_u >= pixel_size) || !(extent_v >= pixel_size)) {
    throw ConfigError("image grid: extent is smaller than one pixel");
  }
  ImageGrid g;
  g.u_min = u_min;
  g.v_min = v_min;
  g.pixel_size = pixel_size;
  g.height = height;
  g.num_u = static_cast<std::size_t>(std::llround(extent_u / pixel_size));
  g.num_v = static_cast<std::size_t>(std::llround(extent_v / pixel_size));
  g.validate();
  return g;
}

SarFrame make_sar_frame(const Eigen::Vector3d& phase_center, const Eigen::Vector3d& along_track) {
  Eigen::Vector3d u = along_track;
  u.z() = 0.0;
  if (u.norm() < 1e-12) throw DomainError("SAR frame: along-track axis has no horizontal part");
  SarFrame f;
  f.origin = phase_center;
  f.u_axis = u.normalized();
  f.z_axis = Eigen::Vector3d::UnitZ();
  f.v_axis = f.z_axis.cross(f.u_axis);
  return f;
}

RangeProfileSet range_compress(const RawCapture& capture, const RangeCompressionOptions& options,
                               const std::vector<std::size_t>& record_ids) {
  if (options.oversample_factor < 2) {
    throw ConfigError("range_compress: oversample factor must be an integer >= 2");
  }
  const ChirpConfig& cfg = capture.chirp;
  const std::size_t n = cfg.samples_per_chirp;
  const std::size_t padded = n * options.oversample_factor;

  std::vector<std::size_t> ids = record_ids;
  if (ids.empty()) {
    ids.resize(capture.records.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  }
  for (std::size_t id : ids) {
    if (id >= capture.records.size()) throw DomainError("range_compress: record index out of range");
    if (static_cast<std::size_t>(capture.records[id].samples.size()) != n) {
      std::ostringstream os;
      os << "range_compress: record " << id << " has " << capture.records[id].samples.size()
         << " samples, expected " << n;
      throw FormatError(os.str());
    }
  }

  RangeProfileSet set;
  set.bin_spacing =
      kSpeedOfLight * cfg.sample_rate / (2.0 * cfg.ramp_slope * static_cast<double>(padded));
  set.oversample_factor = options.oversample_factor;
  set.window = options.window;
  set.record_ids = ids;
  const double centre = 0.5 * static_cast<double>(n - 1);
  set.ramp_cycles_per_bin = centre / static_cast<double>(padded);

  const double full_range = kSpeedOfLight * cfg.sample_rate / (2.0 * cfg.ramp_slope);
  const double keep_range = options.max_range > 0.0 ? std::min(options.max_range, full_range) : full_range;
  const std::size_t kept = std::min<std::size_t>(
      padded, static_cast<std::size_t>(std::floor(keep_range / set.bin_spacing)) + 1);

  std::vector<double> taper(n, 1.0);
  if (options.window == RangeWindow::Hann) {
    for (std::size_t i = 0; i < n; ++i) {
      taper[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n - 1));
    }
  }

  set.profiles.resize(static_cast<Eigen::Index>(ids.size()), static_cast<Eigen::Index>(kept));
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> in(padded), out(padded);
  for (std::size_t row = 0; row < ids.size(); ++row) {
    const auto& s = capture.records[ids[row]].samples;
    std::fill(in.begin(), in.end(), std::complex<double>(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) in[i] = s[static_cast<Eigen::Index>(i)] * taper[i];
    fft.fwd(out, in);
    for (std::size_t k = 0; k < kept; ++k) {
      set.profiles(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(k)) =
          out[k] * unit_phasor_cycles(set.ramp_cycles_per_bin * static_cast<double>(k));
    }
  }
  return set;
}

ComplexImaged backproject(const RangeProfileSet& profiles, const RawCapture& capture,
                          std::size_t vx, const ImageGrid& grid, const SarFrame& frame,
                          const BackprojectionOptions& options) {
  grid.validate();
  if (profiles.record_ids.empty()) throw DomainError("backproject: no pulses in aperture");
  if (vx >= capture.array.num_vx()) throw DomainError("backproject: virtual element not in array");
  const auto& element = capture.array.vx_elements[vx];

  struct PulseGeometry {
    double tx[3];
    double rx[3];
  };
  std::vector<PulseGeometry> pulses;
  pulses.reserve(profiles.record_ids.size());
  for (std::size_t id : profiles.record_ids) {
    const auto& rec = capture.records[id];
    if (rec.tx_index != element.tx_index || rec.rx_index != element.rx_index) {
      throw DomainError("backproject: profile row does not belong to the virtual element");
    }
    const Eigen::Vector3d tx = rec.pose.to_world(capture.array.tx_positions[rec.tx_index]);
    const Eigen::Vector3d rx = rec.pose.to_world(capture.array.rx_positions[rec.rx_index]);
    pulses.push_back({{tx.x(), tx.y(), tx.z()}, {rx.x(), rx.y(), rx.z()}});
  }

  const double inv_bin = 1.0 / profiles.bin_spacing;
  // Carrier phase plus the fast-time re-centring ramp, in cycles per meter of range.
  const double cycles_per_meter =
      2.0 * capture.chirp.center_frequency / kSpeedOfLight + profiles.ramp_cycles_per_bin * inv_bin;
  const auto bins = static_cast<std::ptrdiff_t>(profiles.profiles.cols());
  const bool sinc = options.interpolation == Interpolation::Sinc;
  const auto taps = static_cast<std::ptrdiff_t>(kSincTaps);
  const PhasorTable& table = phasor_table();

  ComplexImaged image = ComplexImaged::Zero(static_cast<Eigen::Index>(grid.num_v),
                                            static_cast<Eigen::Index>(grid.num_u));
  parallel_for(grid.num_v, options.threads, [&](std::size_t iv) {
    for (std::size_t iu = 0; iu < grid.num_u; ++iu) {
      const Eigen::Vector3d p = frame.to_world(grid.u_center(iu), grid.v_center(iv), grid.height);
      double acc_re = 0.0, acc_im = 0.0;
      for (std::size_t k = 0; k < pulses.size(); ++k) {
        const PulseGeometry& g = pulses[k];
        const double tx0 = p.x() - g.tx[0], tx1 = p.y() - g.tx[1], tx2 = p.z() - g.tx[2];
        const double rx0 = p.x() - g.rx[0], rx1 = p.y() - g.rx[1], rx2 = p.z() - g.rx[2];
        const double range = 0.5 * (std::sqrt(tx0 * tx0 + tx1 * tx1 + tx2 * tx2) +
                                    std::sqrt(rx0 * rx0 + rx1 * rx1 + rx2 * rx2));
        const double bin = range * inv_bin;
        const auto lo = static_cast<std::ptrdiff_t>(bin);
        if (lo + 1 >= bins) continue;
        const std::complex<double>* row = profiles.profiles.data() + static_cast<std::ptrdiff_t>(k) * bins;
        std::complex<double> sample;
        if (!sinc) {
          const double w = bin - static_cast<double>(lo);
          sample = {row[lo].real() + w * (row[lo + 1].real() - row[lo].real()),
                    row[lo].imag() + w * (row[lo + 1].imag() - row[lo].imag())};
        } else {
          sample = 0.0;
          for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, lo - taps + 1);
               j <= std::min(bins - 1, lo + taps); ++j) {
            sample += lanczos(bin - static_cast<double>(j), kSincTaps) * row[j];
          }
        }
        double c, s;
        table.lookup(range * cycles_per_meter, c, s);
        acc_re += sample.real() * c - sample.imag() * s;
        acc_im += sample.real() * s + sample.imag() * c;
      }
      image(static_cast<Eigen::Index>(iv), static_cast<Eigen::Index>(iu)) = {acc_re, acc_im};
    }
  });
  return image;
}

Trajectory capture_trajectory(const RawCapture& capture) {
  std::vector<Pose> poses;
  for (const auto& rec : capture.records) {
    if (poses.empty() || rec.pose.time > poses.back().time) poses.push_back(rec.pose);
  }
  return Trajectory(std::move(poses));
}

std::vector<std::size_t> aperture_records(const RawCapture& capture, const ApertureSpec& aperture,
                                          SarFrame* frame_out) {
  if (capture.empty()) throw DomainError("image: empty capture");
  if (!(aperture.length > 0.0)) throw ConfigError("aperture length must be positive");
  const Trajectory traj = capture_trajectory(capture);
  const Pose center = pose_at_time(traj, aperture.center_time);
  const Eigen::Vector3d axis = along_track_axis(traj);
  const double half = 0.5 * aperture.length;

  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < capture.records.size(); ++i) {
    const double s = (capture.records[i].pose.position - center.position).dot(axis);
    if (std::abs(s) <= half + 1e-12) ids.push_back(i);
  }
  if (frame_out != nullptr) *frame_out = make_sar_frame(center.position, axis);
  return ids;
}

SarImageStack image_stack(const RawCapture& capture, const ImageGrid& grid,
                          const ApertureSpec& aperture, const ImagingOptions& options) {
  grid.validate();
  SarImageStack stack;
  const std::vector<std::size_t> ids = aperture_records(capture, aperture, &stack.frame);
  if (ids.empty()) throw DomainError("image: no pulses inside the aperture");
  stack.grid = grid;
  stack.array = capture.array;
  stack.wavelength = kSpeedOfLight / capture.chirp.center_frequency;
  stack.aperture_length = aperture.length;

  // Only keep the profile span the grid can reach.
  double array_extent = 0.0;
  for (const auto& p : capture.array.tx_positions) array_extent = std::max(array_extent, p.norm());
  for (const auto& p : capture.array.rx_positions) array_extent = std::max(array_extent, p.norm());
  double far = 0.0;
  for (double u : {grid.u_min, grid.u_min + grid.extent_u()}) {
    for (double v : {grid.v_min, grid.v_min + grid.extent_v()}) {
      far = std::max(far, std::sqrt(u * u + v * v + grid.height * grid.height));
    }
  }
  RangeCompressionOptions range_opts = options.range;
  range_opts.max_range = far + 0.5 * aperture.length + array_extent + 1.0;

  for (std::size_t vx = 0; vx < capture.array.num_vx(); ++vx) {
    const auto& element = capture.array.vx_elements[vx];
    std::vector<std::size_t> mine;
    for (std::size_t id : ids) {
      const auto& rec = capture.records[id];
      if (rec.tx_index == element.tx_index && rec.rx_index == element.rx_index) mine.push_back(id);
    }
    if (mine.empty()) throw DomainError("image: virtual element has no pulses in the aperture");
    const RangeProfileSet profiles = range_compress(capture, range_opts, mine);
    stack.images.push_back(backproject(profiles, capture, vx, grid, stack.frame, options.backprojection));
  }
  return stack;
}

double predicted_azimuth_resolution(double aperture_length, double wavelength, double theta) {
  if (!(aperture_length > 0.0) || !(wavelength > 0.0)) {
    throw DomainError("azimuth resolution: aperture and wavelength must be positive");
  }
  const double s = std::sin(theta);
  if (std::abs(s) < 1e-12) throw DomainError("azimuth resolution: degenerate angle (sin theta = 0)");
  return wavelength / (aperture_length * s);
}

}  // namespace insar

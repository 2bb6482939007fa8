#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "insar/core_types.hpp"
#include "insar/scene_sim.hpp"

namespace insar {

template <typename Scalar>
using ComplexImage =
    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using ComplexImaged = ComplexImage<double>;

/// Regular pixel grid in the SAR frame. Rows index v (cross-track), columns
/// index u (along-track). Pixel (iv, iu) is centred at
/// (u_min + (iu + 0.5) * pixel_size, v_min + (iv + 0.5) * pixel_size, height).
struct ImageGrid {
  double u_min = -15.0;
  double v_min = 0.0;
  std::size_t num_u = 750;
  std::size_t num_v = 750;
  double pixel_size = 0.04;
  double height = 0.0;  // image plane height relative to the phase centre

  double u_center(std::size_t iu) const { return u_min + (static_cast<double>(iu) + 0.5) * pixel_size; }
  double v_center(std::size_t iv) const { return v_min + (static_cast<double>(iv) + 0.5) * pixel_size; }
  double extent_u() const { return static_cast<double>(num_u) * pixel_size; }
  double extent_v() const { return static_cast<double>(num_v) * pixel_size; }
  std::size_t pixel_count() const { return num_u * num_v; }

  void validate() const;
};

/// Grid covering [u_min, u_min + extent_u] x [v_min, v_min + extent_v].
/// Throws ConfigError if either extent is smaller than one pixel.
ImageGrid make_grid(double u_min, double v_min, double extent_u, double extent_v,
                    double pixel_size, double height = 0.0);

/// Right-handed SAR frame: u along track, v cross-track (z x u), z up.
struct SarFrame {
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();  // common phase centre, world
  Eigen::Vector3d u_axis = Eigen::Vector3d::UnitX();
  Eigen::Vector3d v_axis = Eigen::Vector3d::UnitY();
  Eigen::Vector3d z_axis = Eigen::Vector3d::UnitZ();

  Eigen::Vector3d to_world(double u, double v, double z) const {
    return origin + u * u_axis + v * v_axis + z * z_axis;
  }
  Eigen::Vector3d to_local(const Eigen::Vector3d& world) const {
    const Eigen::Vector3d d = world - origin;
    return {d.dot(u_axis), d.dot(v_axis), d.dot(z_axis)};
  }
};

SarFrame make_sar_frame(const Eigen::Vector3d& phase_center, const Eigen::Vector3d& along_track);

enum class RangeWindow { Rectangular, Hann };
enum class Interpolation { Linear, Sinc };

/// Profiles are stored with the fast-time origin at the chirp centre, which
/// keeps a point response nearly real across neighbouring bins. The DFT with
/// the origin at sample 0 is profile(b) * exp(-j 2 pi b * ramp_cycles_per_bin).
struct RangeProfileSet {
  Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
      profiles;                        // one row per pulse
  std::vector<std::size_t> record_ids; // capture record behind each row
  double bin_spacing = 0.0;            // meters of one-way range per bin
  double ramp_cycles_per_bin = 0.0;
  std::size_t oversample_factor = 0;
  RangeWindow window = RangeWindow::Rectangular;
};

struct RangeCompressionOptions {
  std::size_t oversample_factor = 8;
  RangeWindow window = RangeWindow::Rectangular;
  /// Keep bins up to this range; <= 0 keeps everything up to max_range.
  double max_range = 0.0;
};

/// Window, zero-pad to N * oversample, DFT over fast time, and map bin k to
/// range k * c * fs / (2 * slope * N_padded). Compresses the given records, or
/// every record when `record_ids` is empty.
RangeProfileSet range_compress(const RawCapture& capture, const RangeCompressionOptions& options,
                               const std::vector<std::size_t>& record_ids = {});

struct BackprojectionOptions {
  Interpolation interpolation = Interpolation::Linear;
  unsigned threads = 1;
};

/// Time-domain backprojection of one virtual element onto the grid. Every row
/// of `profiles` must come from a record of `vx`. Pixels beyond the retained
/// profile range contribute nothing.
ComplexImaged backproject(const RangeProfileSet& profiles, const RawCapture& capture,
                          std::size_t vx, const ImageGrid& grid, const SarFrame& frame,
                          const BackprojectionOptions& options = {});

struct ApertureSpec {
  double center_time;
  double length = 1.0;
};

struct ImagingOptions {
  RangeCompressionOptions range;
  BackprojectionOptions backprojection;
};

struct SarImageStack {
  ImageGrid grid;
  SarFrame frame;
  VirtualArray array;
  double wavelength = 0.0;
  double aperture_length = 0.0;
  std::vector<ComplexImaged> images;  // one per virtual element, array order
};

/// Trajectory of the capture's start-stop poses (one per TDM cycle).
Trajectory capture_trajectory(const RawCapture& capture);

/// Records whose cycle pose lies within +-length/2 along track of the aperture centre.
std::vector<std::size_t> aperture_records(const RawCapture& capture, const ApertureSpec& aperture,
                                          SarFrame* frame_out = nullptr);

/// One image per virtual element on a shared grid and phase centre.
SarImageStack image_stack(const RawCapture& capture, const ImageGrid& grid,
                          const ApertureSpec& aperture, const ImagingOptions& options = {});

/// lambda / (L sin(theta)); throws DomainError when sin(theta) == 0.
double predicted_azimuth_resolution(double aperture_length, double wavelength, double theta);

}  // namespace insar

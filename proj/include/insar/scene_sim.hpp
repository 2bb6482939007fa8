#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "insar/core_types.hpp"

namespace insar {

struct PointTarget {
  Eigen::Vector3d position;  // world frame
  double amplitude = 1.0;
};

using Scene = std::vector<PointTarget>;

/// One chirp as seen by one receiver.
struct PulseRecord {
  std::size_t tx_index = 0;
  std::size_t rx_index = 0;
  std::size_t cycle = 0;  // TDM cycle counter
  double time = 0.0;      // chirp start time
  Pose pose;              // start-stop pose of the cycle
  Eigen::VectorXcd samples;
};

struct RawCapture {
  ChirpConfig chirp;
  VirtualArray array;
  std::vector<PulseRecord> records;  // ordered by time, then RX

  bool empty() const { return records.empty(); }
};

/// Closed time interval over which chirps are emitted.
struct ApertureWindow {
  double start_time;
  double end_time;
};

struct SimulationOptions {
  /// Element amplitude pattern cos^n(angle off boresight) on both TX and RX;
  /// 0 means isotropic.
  double pattern_exponent = 0.0;
  unsigned threads = 1;
};

/// Dechirped beat samples for one TX/RX pair. The residual video phase term is
/// not modelled.
Eigen::VectorXcd synthesize_chirp(const Scene& scene, const Eigen::Vector3d& tx_world,
                                  const Eigen::Vector3d& rx_world, const ChirpConfig& cfg);

/// Horizontal unit vector along the direction of travel (first to last pose);
/// falls back to the array x axis for a stationary trajectory.
Eigen::Vector3d along_track_axis(const Trajectory& traj);

/// Time window during which the platform covers +-length/2 along track about
/// its position at center_time. Throws ConfigError if the trajectory is too short.
ApertureWindow aperture_window_for_length(const Trajectory& traj, double center_time,
                                          double length);

/// TDM capture: chirp k fires TX k mod num_tx at start + k * pri, with the pose
/// sampled once per TDM cycle at the cycle's first chirp. Only complete cycles
/// whose first chirp lies inside the window are emitted.
RawCapture synthesize_capture(const Scene& scene, const Trajectory& traj, const ChirpConfig& cfg,
                              const VirtualArray& array, const ApertureWindow& window,
                              const SimulationOptions& options = {});

inline constexpr double kNoiselessSnr = std::numeric_limits<double>::infinity();

/// Adds circular complex white Gaussian noise so that the capture's mean sample
/// power over noise power equals 10^(snr_db/10). `absolute_noise_power`
/// overrides the relative rule (required for an all-zero capture).
RawCapture add_noise(const RawCapture& capture, double per_sample_snr_db, std::uint64_t seed,
                     std::optional<double> absolute_noise_power = std::nullopt);

double mean_signal_power(const RawCapture& capture);

}  // namespace insar

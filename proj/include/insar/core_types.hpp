#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace insar {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;

/// FMCW chirp and TDM frame timing.
struct ChirpConfig {
  double center_frequency = 77.4e9;   // Hz
  double ramp_slope = 30e12;          // Hz/s
  std::size_t samples_per_chirp = 512;
  double sample_rate = 18.75e6;       // samples/s
  double pri = 63.9e-6;               // s, chirp to chirp
  std::size_t chirps_per_tx_per_frame = 256;
  std::size_t num_tx = 3;

  double pulse_length() const { return static_cast<double>(samples_per_chirp) / sample_rate; }

  /// Throws ConfigError when a field is non-positive or the pulse does not fit the PRI.
  void validate() const;
};

struct DerivedChirpParams {
  double wavelength;
  double bandwidth;
  double pulse_length;
  double range_resolution;
  double max_range;
  double effective_pri;
};

DerivedChirpParams derive_chirp_params(const ChirpConfig& cfg);

/// One TX-RX pair. `position` is the usual MIMO virtual position (tx + rx);
/// `phase_center` is the monostatic-equivalent location (tx + rx) / 2 whose
/// two-way path reproduces the bistatic one to first order.
struct VirtualElement {
  std::size_t tx_index;
  std::size_t rx_index;
  Eigen::Vector3d position;
  Eigen::Vector3d phase_center;
};

/// Pair of virtual elements sharing a horizontal offset, lower one first.
struct VerticalBaseline {
  std::size_t lower_vx;
  std::size_t upper_vx;
  double separation;  // D_v, meters, between phase centres
};

/// Antenna layout in the array frame: x horizontal (along the array face),
/// y boresight, z up.
struct VirtualArray {
  std::vector<Eigen::Vector3d> tx_positions;
  std::vector<Eigen::Vector3d> rx_positions;
  std::vector<VirtualElement> vx_elements;
  std::vector<VerticalBaseline> vertical_baselines;

  std::size_t num_tx() const { return tx_positions.size(); }
  std::size_t num_rx() const { return rx_positions.size(); }
  std::size_t num_vx() const { return vx_elements.size(); }
  /// Index into vx_elements; VX are ordered tx-major.
  std::size_t vx_index(std::size_t tx, std::size_t rx) const { return tx * num_rx() + rx; }
};

inline constexpr double kHorizontalTolerance = 1e-9;

VirtualArray build_virtual_array(const std::vector<Eigen::Vector3d>& tx_positions,
                                 const std::vector<Eigen::Vector3d>& rx_positions);

/// Two-layer 3 TX / 4 RX layout: RX pitch lambda/2, lower TX at 0 and 2*lambda,
/// elevated TX at x = 0 raised lambda/2 so the phase-centre layers sit lambda/4 apart.
VirtualArray default_virtual_array(double wavelength);

struct Pose {
  double time = 0.0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();  // world from array

  Eigen::Vector3d to_world(const Eigen::Vector3d& array_offset) const {
    return position + orientation * array_offset;
  }
  /// Throws ConfigError unless the orientation is a proper rotation.
  void validate() const;
};

class Trajectory {
 public:
  Trajectory() = default;
  /// Poses must have strictly increasing times.
  explicit Trajectory(std::vector<Pose> poses);

  const std::vector<Pose>& poses() const { return poses_; }
  bool empty() const { return poses_.empty(); }
  std::size_t size() const { return poses_.size(); }
  double start_time() const;
  double end_time() const;
  double max_speed() const;

 private:
  std::vector<Pose> poses_;
};

/// Linear position / slerp orientation between bracketing samples.
/// Throws DomainError if t lies outside the trajectory.
Pose pose_at_time(const Trajectory& traj, double t);

inline constexpr double kMaxTdmSpeed = 9.0;  // m/s

}  // namespace insar

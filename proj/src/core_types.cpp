#include "insar/core_types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "insar/errors.hpp"

namespace insar {

void ChirpConfig::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(center_frequency) || !positive(ramp_slope) || !positive(sample_rate) ||
      !positive(pri) || chirps_per_tx_per_frame == 0 || num_tx == 0) {
    throw ConfigError("chirp config: all fields must be strictly positive");
  }
  if (samples_per_chirp < 2) {
    throw ConfigError("chirp config: samples_per_chirp must be at least 2");
  }
  if (pulse_length() > pri) {
    std::ostringstream os;
    os << "chirp config: pulse length " << pulse_length() << " s exceeds pri " << pri << " s";
    throw ConfigError(os.str());
  }
}

DerivedChirpParams derive_chirp_params(const ChirpConfig& cfg) {
  cfg.validate();
  DerivedChirpParams d{};
  d.wavelength = kSpeedOfLight / cfg.center_frequency;
  d.pulse_length = cfg.pulse_length();
  d.bandwidth = cfg.ramp_slope * d.pulse_length;
  d.range_resolution = kSpeedOfLight / (2.0 * d.bandwidth);
  d.max_range = kSpeedOfLight * cfg.sample_rate / (2.0 * cfg.ramp_slope);
  d.effective_pri = static_cast<double>(cfg.num_tx) * cfg.pri;
  return d;
}

VirtualArray build_virtual_array(const std::vector<Eigen::Vector3d>& tx_positions,
                                 const std::vector<Eigen::Vector3d>& rx_positions) {
  if (tx_positions.empty() || rx_positions.empty()) {
    throw ConfigError("virtual array needs at least one TX and one RX");
  }
  auto finite = [](const Eigen::Vector3d& p) { return p.allFinite(); };
  if (!std::all_of(tx_positions.begin(), tx_positions.end(), finite) ||
      !std::all_of(rx_positions.begin(), rx_positions.end(), finite)) {
    throw ConfigError("virtual array positions must be finite");
  }

  VirtualArray array;
  array.tx_positions = tx_positions;
  array.rx_positions = rx_positions;
  for (std::size_t t = 0; t < tx_positions.size(); ++t) {
    for (std::size_t r = 0; r < rx_positions.size(); ++r) {
      const Eigen::Vector3d sum = tx_positions[t] + rx_positions[r];
      array.vx_elements.push_back({t, r, sum, 0.5 * sum});
    }
  }

  const auto& vx = array.vx_elements;
  for (std::size_t a = 0; a < vx.size(); ++a) {
    for (std::size_t b = a + 1; b < vx.size(); ++b) {
      const Eigen::Vector3d& pa = vx[a].phase_center;
      const Eigen::Vector3d& pb = vx[b].phase_center;
      if (std::abs(pa.x() - pb.x()) > kHorizontalTolerance ||
          std::abs(pa.y() - pb.y()) > kHorizontalTolerance) {
        continue;
      }
      const double dz = pb.z() - pa.z();
      if (std::abs(dz) <= kHorizontalTolerance) continue;
      if (dz > 0) {
        array.vertical_baselines.push_back({a, b, dz});
      } else {
        array.vertical_baselines.push_back({b, a, -dz});
      }
    }
  }
  return array;
}

VirtualArray default_virtual_array(double wavelength) {
  const double l = wavelength;
  std::vector<Eigen::Vector3d> tx{{0.0, 0.0, 0.0}, {0.0, 0.0, 0.5 * l}, {2.0 * l, 0.0, 0.0}};
  std::vector<Eigen::Vector3d> rx{{0.0, 0.0, 0.0}, {0.5 * l, 0.0, 0.0}, {l, 0.0, 0.0}, {1.5 * l, 0.0, 0.0}};
  return build_virtual_array(tx, rx);
}

void Pose::validate() const {
  if (!std::isfinite(time) || !position.allFinite() || !orientation.coeffs().allFinite()) {
    throw ConfigError("pose has non-finite fields");
  }
  if (std::abs(orientation.norm() - 1.0) > 1e-9) {
    throw ConfigError("pose orientation is not a unit quaternion");
  }
  const Eigen::Matrix3d r = orientation.toRotationMatrix();
  const double ortho = (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (ortho > 1e-9 || r.determinant() <= 0.0) {
    throw ConfigError("pose orientation is not a proper rotation");
  }
}

Trajectory::Trajectory(std::vector<Pose> poses) : poses_(std::move(poses)) {
  for (std::size_t i = 0; i < poses_.size(); ++i) {
    poses_[i].validate();
    if (i > 0 && !(poses_[i].time > poses_[i - 1].time)) {
      std::ostringstream os;
      os << "trajectory times must be strictly increasing (sample " << i << ")";
      throw ConfigError(os.str());
    }
  }
}

double Trajectory::start_time() const {
  if (poses_.empty()) throw DomainError("empty trajectory");
  return poses_.front().time;
}

double Trajectory::end_time() const {
  if (poses_.empty()) throw DomainError("empty trajectory");
  return poses_.back().time;
}

double Trajectory::max_speed() const {
  double best = 0.0;
  for (std::size_t i = 1; i < poses_.size(); ++i) {
    const double dt = poses_[i].time - poses_[i - 1].time;
    best = std::max(best, (poses_[i].position - poses_[i - 1].position).norm() / dt);
  }
  return best;
}

Pose pose_at_time(const Trajectory& traj, double t) {
  const auto& poses = traj.poses();
  if (poses.empty()) throw DomainError("pose_at_time: empty trajectory");
  if (!(t >= poses.front().time && t <= poses.back().time)) {
    std::ostringstream os;
    os << "pose_at_time: t = " << t << " outside [" << poses.front().time << ", "
       << poses.back().time << "]";
    throw DomainError(os.str());
  }
  auto it = std::lower_bound(poses.begin(), poses.end(), t,
                             [](const Pose& p, double time) { return p.time < time; });
  if (it->time == t) return *it;
  const Pose& end = *it;
  const Pose& start = *(it - 1);
  const double factor = (t - start.time) / (end.time - start.time);
  Pose out;
  out.time = t;
  out.position = start.position + (end.position - start.position) * factor;
  out.orientation = start.orientation.slerp(factor, end.orientation).normalized();
  return out;
}

}  // namespace insar

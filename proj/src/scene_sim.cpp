#include "insar/scene_sim.hpp"

#include <cmath>
#include <complex>
#include <random>

#include "insar/errors.hpp"
#include "insar/parallel.hpp"

namespace insar {

namespace {

double pattern_gain(const Pose& pose, const Eigen::Vector3d& element_world,
                    const Eigen::Vector3d& target, double exponent) {
  if (exponent == 0.0) return 1.0;
  const Eigen::Vector3d boresight = pose.orientation * Eigen::Vector3d::UnitY();
  const Eigen::Vector3d dir = (target - element_world).normalized();
  const double c = boresight.dot(dir);
  return c <= 0.0 ? 0.0 : std::pow(c, exponent);
}

Eigen::VectorXcd synthesize_weighted(const Scene& scene, const Eigen::Vector3d& tx,
                                     const Eigen::Vector3d& rx, const ChirpConfig& cfg,
                                     const Pose* pose, double pattern_exponent) {
  const auto n = static_cast<Eigen::Index>(cfg.samples_per_chirp);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  for (const auto& target : scene) {
    double amplitude = target.amplitude;
    if (pose != nullptr) {
      amplitude *= pattern_gain(*pose, tx, target.position, pattern_exponent) *
                   pattern_gain(*pose, rx, target.position, pattern_exponent);
    }
    if (amplitude == 0.0) continue;
    const double tau = ((target.position - tx).norm() + (target.position - rx).norm()) / kSpeedOfLight;
    const double beat = cfg.ramp_slope * tau / cfg.sample_rate;  // cycles per sample
    const double carrier = cfg.center_frequency * tau;           // cycles
    for (Eigen::Index i = 0; i < n; ++i) {
      const double cycles = beat * static_cast<double>(i) + carrier;
      const double frac = cycles - std::floor(cycles);
      out[i] += std::polar(amplitude, 2.0 * kPi * frac);
    }
  }
  return out;
}

}  // namespace

Eigen::VectorXcd synthesize_chirp(const Scene& scene, const Eigen::Vector3d& tx_world,
                                  const Eigen::Vector3d& rx_world, const ChirpConfig& cfg) {
  return synthesize_weighted(scene, tx_world, rx_world, cfg, nullptr, 0.0);
}

Eigen::Vector3d along_track_axis(const Trajectory& traj) {
  if (traj.empty()) throw DomainError("along_track_axis: empty trajectory");
  Eigen::Vector3d d = traj.poses().back().position - traj.poses().front().position;
  d.z() = 0.0;
  if (d.norm() < 1e-12) {
    d = traj.poses().front().orientation * Eigen::Vector3d::UnitX();
    d.z() = 0.0;
  }
  if (d.norm() < 1e-12) throw DomainError("along_track_axis: array x axis is vertical");
  return d.normalized();
}

ApertureWindow aperture_window_for_length(const Trajectory& traj, double center_time,
                                          double length) {
  if (!(length > 0.0)) throw ConfigError("aperture length must be positive");
  if (traj.size() < 2) throw ConfigError("trajectory-too-short: need at least two poses");
  const Pose center = pose_at_time(traj, center_time);
  const Eigen::Vector3d axis = along_track_axis(traj);
  const auto& poses = traj.poses();
  auto along = [&](const Eigen::Vector3d& p) { return (p - center.position).dot(axis); };

  // Walk outward from the centre and solve inside the first segment that crosses +-L/2.
  const double half = 0.5 * length;
  std::optional<double> start, end;
  auto it = std::lower_bound(poses.begin(), poses.end(), center_time,
                             [](const Pose& p, double t) { return p.time < t; });
  const std::size_t pivot = static_cast<std::size_t>(it - poses.begin());

  double prev_t = center_time, prev_s = 0.0;
  for (std::size_t i = pivot; i < poses.size() && !end; ++i) {
    const double s = along(poses[i].position);
    if (poses[i].time > prev_t && s >= half) {
      end = prev_t + (half - prev_s) / (s - prev_s) * (poses[i].time - prev_t);
    }
    prev_t = poses[i].time;
    prev_s = s;
  }
  prev_t = center_time;
  prev_s = 0.0;
  for (std::size_t i = pivot; i-- > 0 && !start;) {
    const double s = along(poses[i].position);
    if (poses[i].time < prev_t && s <= -half) {
      start = prev_t - (-half - prev_s) / (s - prev_s) * (prev_t - poses[i].time);
    }
    prev_t = poses[i].time;
    prev_s = s;
  }
  if (!start || !end) {
    throw ConfigError("trajectory-too-short: trajectory does not cover the aperture");
  }
  return {*start, *end};
}

RawCapture synthesize_capture(const Scene& scene, const Trajectory& traj, const ChirpConfig& cfg,
                              const VirtualArray& array, const ApertureWindow& window,
                              const SimulationOptions& options) {
  cfg.validate();
  if (scene.empty()) throw ConfigError("scene is empty");
  if (array.num_tx() != cfg.num_tx) {
    throw ConfigError("array TX count does not match chirp config num_tx");
  }
  if (traj.empty() || window.start_time < traj.start_time() || window.end_time > traj.end_time() ||
      !(window.end_time >= window.start_time)) {
    throw ConfigError("trajectory-too-short: trajectory does not span the aperture window");
  }
  const double cycle_time = static_cast<double>(cfg.num_tx) * cfg.pri;
  const auto cycles = static_cast<std::size_t>(
      std::floor((window.end_time - window.start_time) / cycle_time + 1e-9)) + 1;

  RawCapture capture;
  capture.chirp = cfg;
  capture.array = array;
  const std::size_t per_cycle = cfg.num_tx * array.num_rx();
  capture.records.resize(cycles * per_cycle);

  parallel_for(cycles, options.threads, [&](std::size_t c) {
    const double t0 = window.start_time + static_cast<double>(c) * cycle_time;
    const Pose pose = pose_at_time(traj, std::min(t0, traj.end_time()));
    for (std::size_t tx = 0; tx < cfg.num_tx; ++tx) {
      const Eigen::Vector3d tx_world = pose.to_world(array.tx_positions[tx]);
      for (std::size_t rx = 0; rx < array.num_rx(); ++rx) {
        auto& rec = capture.records[c * per_cycle + tx * array.num_rx() + rx];
        rec.tx_index = tx;
        rec.rx_index = rx;
        rec.cycle = c;
        rec.time = t0 + static_cast<double>(tx) * cfg.pri;
        rec.pose = pose;
        rec.samples = synthesize_weighted(scene, tx_world, pose.to_world(array.rx_positions[rx]),
                                          cfg, &pose, options.pattern_exponent);
      }
    }
  });
  return capture;
}

double mean_signal_power(const RawCapture& capture) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& rec : capture.records) {
    sum += rec.samples.squaredNorm();
    count += static_cast<std::size_t>(rec.samples.size());
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

RawCapture add_noise(const RawCapture& capture, double per_sample_snr_db, std::uint64_t seed,
                     std::optional<double> absolute_noise_power) {
  if (capture.empty()) throw DomainError("add_noise: empty capture");
  if (std::isinf(per_sample_snr_db) && per_sample_snr_db > 0 && !absolute_noise_power) {
    return capture;
  }
  double noise_power = 0.0;
  if (absolute_noise_power) {
    noise_power = *absolute_noise_power;
  } else {
    const double signal = mean_signal_power(capture);
    if (!(signal > 0.0)) {
      throw DomainError("add_noise: all-zero capture needs an absolute noise power");
    }
    noise_power = signal / std::pow(10.0, per_sample_snr_db / 10.0);
  }
  if (!(noise_power >= 0.0) || !std::isfinite(noise_power)) {
    throw DomainError("add_noise: invalid noise power");
  }

  RawCapture out = capture;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5 * noise_power));
  for (auto& rec : out.records) {
    for (auto& s : rec.samples) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      s += std::complex<double>(re, im);
    }
  }
  return out;
}

}  // namespace insar

#pragma once

#include <cmath>
#include <limits>
#include <random>

#include "insar/pointcloud.hpp"

namespace insar::testing {

/// Elevation map with a single pixel centred at (u, v).
inline ElevationMap single_pixel_map(double u, double v, double phi, double snr_db,
                                     double circ_var = 0.0, double magnitude = 1.0) {
  ElevationMap m;
  m.grid.num_u = m.grid.num_v = 1;
  m.grid.pixel_size = 0.04;
  m.grid.u_min = u - 0.02;
  m.grid.v_min = v - 0.02;
  m.wavelength = 3.87e-3;
  m.baseline = m.wavelength / 4;
  m.elevation = Eigen::MatrixXd::Constant(1, 1, phi);
  m.phase_delay = Eigen::MatrixXd::Constant(1, 1, kPi * std::sin(phi));
  m.circular_variance = Eigen::MatrixXd::Constant(1, 1, circ_var);
  m.magnitude = Eigen::MatrixXd::Constant(1, 1, magnitude);
  m.snr_db = Eigen::MatrixXd::Constant(1, 1, snr_db);
  return m;
}

/// Random map whose planes straddle every default threshold.
template <typename Rng>
ElevationMap random_map(Rng& rng, std::size_t num_u = 24, std::size_t num_v = 24) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ElevationMap m;
  m.grid.num_u = num_u;
  m.grid.num_v = num_v;
  m.grid.pixel_size = 0.05 + 0.4 * unit(rng);
  m.grid.u_min = -0.5 * num_u * m.grid.pixel_size * (0.5 + unit(rng));
  m.grid.v_min = 3.0 * unit(rng);
  m.wavelength = 3.87e-3;
  m.baseline = m.wavelength / 4;
  const auto r = static_cast<Eigen::Index>(num_v), c = static_cast<Eigen::Index>(num_u);
  m.elevation.resize(r, c);
  m.phase_delay.resize(r, c);
  m.circular_variance.resize(r, c);
  m.magnitude.resize(r, c);
  m.snr_db.resize(r, c);
  for (Eigen::Index i = 0; i < r * c; ++i) {
    const double phi = (unit(rng) < 0.05) ? std::numeric_limits<double>::quiet_NaN()
                                          : (unit(rng) - 0.5) * kPi;
    m.elevation.data()[i] = phi;
    m.phase_delay.data()[i] = kPi * std::sin(phi);
    m.circular_variance.data()[i] = unit(rng) * 0.2;
    m.magnitude.data()[i] = unit(rng);
    m.snr_db.data()[i] = -5.0 + 35.0 * unit(rng);
  }
  return m;
}

/// Checks a point against the filter predicates using only its Cartesian
/// coordinates and carried quality values.
inline bool satisfies(const CloudPoint& p, const FilterConfig& f) {
  const double r = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
  const double theta = std::acos(std::clamp(p.x / r, -1.0, 1.0));
  const double phi = std::atan2(p.z, p.y);  // y >= 0 for every grid used here
  const bool in_front = r < f.min_radius_m && std::abs(theta - kPi / 2) <= f.front_azimuth_halfwidth + 1e-12;
  return p.snr_db >= f.snr_threshold_db && p.circular_variance <= f.max_circular_variance &&
         std::abs(phi) <= f.max_elevation_angle + 1e-12 && !in_front && p.z >= f.min_z_m &&
         std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

}  // namespace insar::testing

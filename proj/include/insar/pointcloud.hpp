#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "insar/core_types.hpp"
#include "insar/interferometry.hpp"
#include "insar/sar_imager.hpp"

namespace insar {

template <typename Scalar>
struct Spherical {
  Scalar range;
  Scalar cone_angle;  // theta, about the aperture axis
  Scalar elevation;   // phi
};

/// Slant range and cone angle of a pixel centre relative to the phase centre.
/// The image stores a source at its slant range, so no ground projection is
/// applied here.
template <typename Scalar>
Spherical<Scalar> pixel_to_spherical(Scalar u, Scalar v, Scalar elevation) {
  return {std::hypot(u, v), std::atan2(v, u), elevation};
}

Spherical<double> pixel_to_spherical(const ImageGrid& grid, std::size_t iv, std::size_t iu,
                                     double elevation);

template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> spherical_to_cartesian(Scalar range, Scalar cone_angle, Scalar elevation) {
  const Scalar s = range * std::sin(cone_angle);
  return {range * std::cos(cone_angle), s * std::cos(elevation), s * std::sin(elevation)};
}

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

struct FilterConfig {
  double snr_threshold_db = 15.0;
  double max_elevation_angle = deg2rad(45.0);
  double min_radius_m = 2.0;
  double front_azimuth_halfwidth = deg2rad(15.0);
  double min_z_m = -0.9;
  double max_circular_variance = 0.1;

  /// Ground removal threshold for a sensor mounted `height` above ground.
  static FilterConfig for_mount_height(double height) {
    FilterConfig f;
    f.min_z_m = -height;
    return f;
  }
  void validate() const;
};

struct CloudPoint {
  double x, y, z;  // SAR Cartesian frame
  double intensity;
  double snr_db;
  double circular_variance;
  std::size_t row;  // source pixel
  std::size_t col;
};

struct ElevationPointCloud {
  std::vector<CloudPoint> points;
  std::map<std::string, std::string> provenance;
};

// In evaluation order.
enum class Rejection : std::size_t {
  Snr = 0,
  PhaseVariance,
  NoElevation,
  ElevationAngle,
  FrontCone,
  Underground,
  Count
};

const char* rejection_name(Rejection r);

struct FilterReport {
  std::size_t total = 0;
  std::size_t kept = 0;
  /// Pixels removed, attributed to the first failing predicate.
  std::array<std::size_t, static_cast<std::size_t>(Rejection::Count)> rejected{};
};

/// Applies every predicate and de-projects the surviving pixels.
ElevationPointCloud filter_points(const ElevationMap& map, const FilterConfig& config,
                                  FilterReport* report = nullptr);

/// ASCII PCD v0.7 with x y z intensity.
void write_pcd(const ElevationPointCloud& cloud, const std::filesystem::path& path);

/// Reads an ASCII PCD with at least x y z fields (intensity optional).
std::vector<std::array<double, 4>> read_pcd(const std::filesystem::path& path);

/// CSV x,y,z,intensity,snr_db,circ_var.
void write_cloud_csv(const ElevationPointCloud& cloud, const std::filesystem::path& path);

}  // namespace insar

#include "insar/pointcloud.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "insar/errors.hpp"

namespace insar {

Spherical<double> pixel_to_spherical(const ImageGrid& grid, std::size_t iv, std::size_t iu,
                                     double elevation) {
  if (iv >= grid.num_v || iu >= grid.num_u) throw DomainError("pixel_to_spherical: pixel outside grid");
  return pixel_to_spherical(grid.u_center(iu), grid.v_center(iv), elevation);
}

void FilterConfig::validate() const {
  for (double v : {snr_threshold_db, min_radius_m, min_z_m, max_circular_variance}) {
    if (std::isnan(v)) throw ConfigError("filter config: thresholds must not be NaN");
  }
  for (double a : {max_elevation_angle, front_azimuth_halfwidth}) {
    if (!(a > 0.0 && a <= kPi / 2.0 + 1e-12)) {
      throw ConfigError("filter config: angles must lie in (0, 90] degrees");
    }
  }
}

const char* rejection_name(Rejection r) {
  switch (r) {
    case Rejection::NoElevation: return "no_elevation";
    case Rejection::Snr: return "snr";
    case Rejection::PhaseVariance: return "phase_variance";
    case Rejection::ElevationAngle: return "elevation_angle";
    case Rejection::FrontCone: return "front_cone";
    case Rejection::Underground: return "underground";
    case Rejection::Count: break;
  }
  return "unknown";
}

ElevationPointCloud filter_points(const ElevationMap& map, const FilterConfig& config,
                                  FilterReport* report) {
  config.validate();
  const auto rows = static_cast<Eigen::Index>(map.grid.num_v);
  const auto cols = static_cast<Eigen::Index>(map.grid.num_u);
  if (map.elevation.rows() != rows || map.elevation.cols() != cols ||
      map.snr_db.rows() != rows || map.snr_db.cols() != cols ||
      map.circular_variance.rows() != rows || map.circular_variance.cols() != cols ||
      map.magnitude.rows() != rows || map.magnitude.cols() != cols) {
    throw DomainError("filter_points: elevation map planes do not match the grid");
  }

  FilterReport local;
  FilterReport& rep = report != nullptr ? *report : local;
  rep = FilterReport{};
  auto reject = [&](Rejection r) { ++rep.rejected[static_cast<std::size_t>(r)]; };

  ElevationPointCloud cloud;
  const double half_pi = kPi / 2.0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      ++rep.total;
      const double snr = map.snr_db(r, c);
      if (!(snr >= config.snr_threshold_db)) { reject(Rejection::Snr); continue; }
      const double var = map.circular_variance(r, c);
      if (!(var <= config.max_circular_variance)) { reject(Rejection::PhaseVariance); continue; }
      const double phi = map.elevation(r, c);
      if (!std::isfinite(phi)) { reject(Rejection::NoElevation); continue; }
      if (!(std::abs(phi) <= config.max_elevation_angle)) { reject(Rejection::ElevationAngle); continue; }
      const auto sph = pixel_to_spherical(map.grid, static_cast<std::size_t>(r),
                                          static_cast<std::size_t>(c), phi);
      if (sph.range < config.min_radius_m &&
          std::abs(sph.cone_angle - half_pi) <= config.front_azimuth_halfwidth) {
        reject(Rejection::FrontCone);
        continue;
      }
      const Eigen::Vector3d p = spherical_to_cartesian(sph.range, sph.cone_angle, sph.elevation);
      if (!(p.z() >= config.min_z_m)) { reject(Rejection::Underground); continue; }
      cloud.points.push_back({p.x(), p.y(), p.z(), map.magnitude(r, c), snr, var,
                              static_cast<std::size_t>(r), static_cast<std::size_t>(c)});
      ++rep.kept;
    }
  }
  return cloud;
}

void write_pcd(const ElevationPointCloud& cloud, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("write_pcd: cannot open " + path.string());
  out << "# .PCD v0.7 - Point Cloud Data file format\n";
  for (const auto& [key, value] : cloud.provenance) out << "# " << key << ": " << value << "\n";
  out << "VERSION 0.7\n"
      << "FIELDS x y z intensity\n"
      << "SIZE 4 4 4 4\n"
      << "TYPE F F F F\n"
      << "COUNT 1 1 1 1\n"
      << "WIDTH " << cloud.points.size() << "\n"
      << "HEIGHT 1\n"
      << "VIEWPOINT 0 0 0 1 0 0 0\n"
      << "POINTS " << cloud.points.size() << "\n"
      << "DATA ascii\n";
  out << std::setprecision(6);
  for (const auto& p : cloud.points) {
    out << p.x << ' ' << p.y << ' ' << p.z << ' ' << p.intensity << '\n';
  }
  if (!out) throw FormatError("write_pcd: write failed for " + path.string());
}

std::vector<std::array<double, 4>> read_pcd(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("read_pcd: cannot open " + path.string());
  std::vector<std::string> fields;
  std::size_t points = 0;
  bool header_done = false;
  std::string line;
  while (!header_done && std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "FIELDS") {
      for (std::string f; ls >> f;) fields.push_back(f);
    } else if (key == "POINTS") {
      ls >> points;
    } else if (key == "DATA") {
      std::string kind;
      ls >> kind;
      if (kind != "ascii") throw FormatError("read_pcd: only ascii data is supported");
      header_done = true;
    }
  }
  if (!header_done) throw FormatError("read_pcd: missing DATA line in " + path.string());
  auto index_of = [&](const std::string& name) -> int {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (fields[i] == name) return static_cast<int>(i);
    }
    return -1;
  };
  const int ix = index_of("x"), iy = index_of("y"), iz = index_of("z"), ii = index_of("intensity");
  if (ix < 0 || iy < 0 || iz < 0) throw FormatError("read_pcd: x y z fields required");

  std::vector<std::array<double, 4>> out;
  out.reserve(points);
  std::vector<double> values(fields.size());
  for (std::size_t p = 0; p < points; ++p) {
    for (auto& v : values) {
      if (!(in >> v)) throw FormatError("read_pcd: truncated data in " + path.string());
    }
    out.push_back({values[ix], values[iy], values[iz], ii >= 0 ? values[ii] : 0.0});
  }
  return out;
}

void write_cloud_csv(const ElevationPointCloud& cloud, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("write_cloud_csv: cannot open " + path.string());
  out << "x,y,z,intensity,snr_db,circ_var\n" << std::setprecision(8);
  for (const auto& p : cloud.points) {
    out << p.x << ',' << p.y << ',' << p.z << ',' << p.intensity << ',' << p.snr_db << ','
        << p.circular_variance << '\n';
  }
  if (!out) throw FormatError("write_cloud_csv: write failed for " + path.string());
}

}  // namespace insar

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "insar/core_types.hpp"
#include "insar/interferometry.hpp"
#include "insar/sar_imager.hpp"
#include "insar/scene_sim.hpp"

namespace insar {

// Binary artifacts. All multi-byte values are little-endian; see
// docs/file_formats.md for the byte layout.
inline constexpr std::uint32_t kCaptureVersion = 1;
inline constexpr std::uint32_t kImageStackVersion = 1;
inline constexpr std::uint32_t kElevationMapVersion = 1;

void write_capture(const RawCapture& capture, const std::filesystem::path& path);
RawCapture read_capture(const std::filesystem::path& path);

void write_image_stack(const SarImageStack& stack, const std::filesystem::path& path);
SarImageStack read_image_stack(const std::filesystem::path& path);

void write_elevation_map(const ElevationMap& map, const std::filesystem::path& path);
ElevationMap read_elevation_map(const std::filesystem::path& path);

/// 16-bit binary PGM of 20 log10|I|, mapping [peak - dynamic_range_db, peak] to [0, 65535].
void write_log_magnitude_pgm(const ComplexImaged& image, const std::filesystem::path& path,
                             double dynamic_range_db = 60.0);

// Text inputs.

struct ConfigEntry {
  std::string value;
  std::size_t line;
};

/// `key = value` lines; `#` starts a comment. Duplicate keys are an error.
std::map<std::string, ConfigEntry> parse_key_values(const std::filesystem::path& path);

/// Parses "[(x,y,z), (x,y,z), ...]".
std::vector<Eigen::Vector3d> parse_vector_list(const std::string& text);

/// CSV with header x,y,z,amplitude.
Scene read_scene_csv(const std::filesystem::path& path);
void write_scene_csv(const Scene& scene, const std::filesystem::path& path);

/// CSV with header t,x,y,z,qw,qx,qy,qz. Quaternions are normalised.
Trajectory read_trajectory_csv(const std::filesystem::path& path);
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);

}  // namespace insar

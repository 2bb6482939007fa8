#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "insar/core_types.hpp"
#include "insar/interferometry.hpp"
#include "insar/pointcloud.hpp"
#include "insar/sar_imager.hpp"
#include "insar/scene_sim.hpp"

namespace insar {

/// Everything a run needs, loaded from a flat `key = value` file.
struct RunConfig {
  ChirpConfig chirp;
  std::vector<Eigen::Vector3d> tx_positions;  // empty selects the default array
  std::vector<Eigen::Vector3d> rx_positions;

  double aperture_length = 1.0;
  std::optional<double> aperture_center_time;

  double grid_u_min = -15.0;
  double grid_v_min = 0.0;
  double grid_extent_u = 30.0;
  double grid_extent_v = 30.0;
  double pixel_size = 0.04;
  double image_height = 0.0;
  ImagingOptions imaging;

  double snr_db = kNoiselessSnr;
  double pattern_exponent = 0.0;

  double sensor_mount_height = 0.9;
  FilterConfig filter;

  std::uint64_t seed = 0;
  unsigned threads = 1;

  VirtualArray array() const;
  ImageGrid grid() const;
};

/// Defaults overridden by the keys in `path`. Unknown keys and malformed
/// values raise ConfigError naming the file and line.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig default_run_config();

struct SimulateSummary {
  std::size_t pulses = 0;   // chirps (one per TX firing)
  std::size_t records = 0;  // chirps x receivers
  std::size_t virtual_elements = 0;
  double duration = 0.0;
  double max_speed = 0.0;
  bool speed_warning = false;
};

struct ImageSummary {
  std::size_t num_u = 0, num_v = 0;
  std::size_t images = 0;
  std::size_t aperture_pulses = 0;
  double peak_magnitude = 0.0;
  double peak_u = 0.0, peak_v = 0.0;
};

struct ElevateSummary {
  std::size_t valid_pixels = 0;
  double baseline = 0.0;
  std::size_t baselines = 0;
};

struct PointCloudSummary {
  FilterReport report;
  std::size_t points = 0;
  double min_elevation_deg = 0.0, max_elevation_deg = 0.0, mean_elevation_deg = 0.0;
  double min_z = 0.0, max_z = 0.0;
};

RawCapture simulate(const Scene& scene, const Trajectory& traj, const RunConfig& cfg,
                    SimulateSummary* summary = nullptr);
SarImageStack form_images(const RawCapture& capture, const RunConfig& cfg,
                          ImageSummary* summary = nullptr);
ElevationPointCloud build_point_cloud(const ElevationMap& map, const RunConfig& cfg,
                                      PointCloudSummary* summary = nullptr);

// File-to-file stages used by the CLI.
SimulateSummary stage_simulate(const std::filesystem::path& scene_file,
                               const std::filesystem::path& trajectory_file, const RunConfig& cfg,
                               const std::filesystem::path& out_capture);
ImageSummary stage_image(const std::filesystem::path& capture_file, const RunConfig& cfg,
                         const std::filesystem::path& out_stack,
                         const std::optional<std::filesystem::path>& pgm_dir = std::nullopt);
ElevateSummary stage_elevate(const std::filesystem::path& stack_file,
                             const std::filesystem::path& out_map);
PointCloudSummary stage_pointcloud(const std::filesystem::path& map_file, const RunConfig& cfg,
                                   const std::filesystem::path& out_pcd,
                                   const std::optional<std::filesystem::path>& out_csv = std::nullopt);

struct PipelinePaths {
  std::filesystem::path capture, stack, elevation, pcd, csv;
  static PipelinePaths in(const std::filesystem::path& dir);
};

struct PipelineSummary {
  SimulateSummary simulate;
  ImageSummary image;
  ElevateSummary elevate;
  PointCloudSummary pointcloud;
  double seconds[4] = {0, 0, 0, 0};
};

PipelineSummary run_pipeline(const std::filesystem::path& scene_file,
                             const std::filesystem::path& trajectory_file, const RunConfig& cfg,
                             const std::filesystem::path& out_dir,
                             const std::optional<std::filesystem::path>& pgm_dir = std::nullopt);

void print_summary(std::ostream& os, const SimulateSummary& s);
void print_summary(std::ostream& os, const ImageSummary& s);
void print_summary(std::ostream& os, const ElevateSummary& s);
void print_summary(std::ostream& os, const PointCloudSummary& s);

}  // namespace insar

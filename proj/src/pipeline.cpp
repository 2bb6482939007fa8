#include "insar/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "insar/errors.hpp"
#include "insar/io.hpp"

namespace insar {

namespace {

double to_double(const std::string& v) {
  if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
  if (v == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double d = std::stod(v, &used);
  if (used != v.size()) throw std::invalid_argument(v);
  return d;
}

std::uint64_t to_count(const std::string& v) {
  std::size_t used = 0;
  const long long n = std::stoll(v, &used);
  if (used != v.size() || n < 0) throw std::invalid_argument(v);
  return static_cast<std::uint64_t>(n);
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::unordered_map<std::string, Setter>& setters() {
  static const std::unordered_map<std::string, Setter> table = {
      {"center_frequency_hz", [](RunConfig& c, const std::string& v) { c.chirp.center_frequency = to_double(v); }},
      {"ramp_slope_hz_per_s", [](RunConfig& c, const std::string& v) { c.chirp.ramp_slope = to_double(v); }},
      {"samples_per_chirp", [](RunConfig& c, const std::string& v) { c.chirp.samples_per_chirp = to_count(v); }},
      {"sample_rate_hz", [](RunConfig& c, const std::string& v) { c.chirp.sample_rate = to_double(v); }},
      {"pri_s", [](RunConfig& c, const std::string& v) { c.chirp.pri = to_double(v); }},
      {"chirps_per_tx_per_frame", [](RunConfig& c, const std::string& v) { c.chirp.chirps_per_tx_per_frame = to_count(v); }},
      {"num_tx", [](RunConfig& c, const std::string& v) { c.chirp.num_tx = to_count(v); }},
      {"tx_positions_m", [](RunConfig& c, const std::string& v) { c.tx_positions = parse_vector_list(v); }},
      {"rx_positions_m", [](RunConfig& c, const std::string& v) { c.rx_positions = parse_vector_list(v); }},
      {"aperture_length_m", [](RunConfig& c, const std::string& v) { c.aperture_length = to_double(v); }},
      {"aperture_center_s", [](RunConfig& c, const std::string& v) { c.aperture_center_time = to_double(v); }},
      {"grid_u_min_m", [](RunConfig& c, const std::string& v) { c.grid_u_min = to_double(v); }},
      {"grid_v_min_m", [](RunConfig& c, const std::string& v) { c.grid_v_min = to_double(v); }},
      {"grid_extent_u_m", [](RunConfig& c, const std::string& v) { c.grid_extent_u = to_double(v); }},
      {"grid_extent_v_m", [](RunConfig& c, const std::string& v) { c.grid_extent_v = to_double(v); }},
      {"pixel_size_m", [](RunConfig& c, const std::string& v) { c.pixel_size = to_double(v); }},
      {"image_height_m", [](RunConfig& c, const std::string& v) { c.image_height = to_double(v); }},
      {"oversample_factor", [](RunConfig& c, const std::string& v) { c.imaging.range.oversample_factor = to_count(v); }},
      {"range_window",
       [](RunConfig& c, const std::string& v) {
         if (v == "rectangular") c.imaging.range.window = RangeWindow::Rectangular;
         else if (v == "hann") c.imaging.range.window = RangeWindow::Hann;
         else throw std::invalid_argument(v);
       }},
      {"interpolation",
       [](RunConfig& c, const std::string& v) {
         if (v == "linear") c.imaging.backprojection.interpolation = Interpolation::Linear;
         else if (v == "sinc") c.imaging.backprojection.interpolation = Interpolation::Sinc;
         else throw std::invalid_argument(v);
       }},
      {"snr_db", [](RunConfig& c, const std::string& v) { c.snr_db = to_double(v); }},
      {"pattern_exponent", [](RunConfig& c, const std::string& v) { c.pattern_exponent = to_double(v); }},
      {"sensor_mount_height_m",
       [](RunConfig& c, const std::string& v) {
         c.sensor_mount_height = to_double(v);
         c.filter.min_z_m = -c.sensor_mount_height;
       }},
      {"snr_threshold_db", [](RunConfig& c, const std::string& v) { c.filter.snr_threshold_db = to_double(v); }},
      {"max_elevation_deg", [](RunConfig& c, const std::string& v) { c.filter.max_elevation_angle = deg2rad(to_double(v)); }},
      {"min_radius_m", [](RunConfig& c, const std::string& v) { c.filter.min_radius_m = to_double(v); }},
      {"front_azimuth_halfwidth_deg", [](RunConfig& c, const std::string& v) { c.filter.front_azimuth_halfwidth = deg2rad(to_double(v)); }},
      {"min_z_m", [](RunConfig& c, const std::string& v) { c.filter.min_z_m = to_double(v); }},
      {"max_circular_variance", [](RunConfig& c, const std::string& v) { c.filter.max_circular_variance = to_double(v); }},
      {"seed", [](RunConfig& c, const std::string& v) { c.seed = to_count(v); }},
      {"threads", [](RunConfig& c, const std::string& v) { c.threads = static_cast<unsigned>(std::max<std::uint64_t>(1, to_count(v))); }},
  };
  return table;
}

template <typename Fn>
double timed(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

}  // namespace

RunConfig default_run_config() {
  RunConfig c;
  c.filter = FilterConfig::for_mount_height(c.sensor_mount_height);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  RunConfig cfg = default_run_config();
  const auto entries = parse_key_values(path);
  // min_z_m must win over the mount-height default regardless of key order.
  const auto order = [&] {
    std::vector<std::pair<std::string, ConfigEntry>> v(entries.begin(), entries.end());
    std::stable_partition(v.begin(), v.end(), [](const auto& e) { return e.first != "min_z_m"; });
    return v;
  }();
  for (const auto& [key, entry] : order) {
    const auto it = setters().find(key);
    if (it == setters().end()) {
      std::ostringstream os;
      os << path.string() << ":" << entry.line << ": unknown key '" << key << "'";
      throw ConfigError(os.str());
    }
    try {
      it->second(cfg, entry.value);
    } catch (const ConfigError& e) {
      std::ostringstream os;
      os << path.string() << ":" << entry.line << ": " << e.what();
      throw ConfigError(os.str());
    } catch (const std::exception&) {
      std::ostringstream os;
      os << path.string() << ":" << entry.line << ": invalid value '" << entry.value << "' for " << key;
      throw ConfigError(os.str());
    }
  }
  cfg.chirp.validate();
  cfg.filter.validate();
  cfg.grid();
  if (!(cfg.aperture_length > 0.0)) throw ConfigError(path.string() + ": aperture_length_m must be positive");
  if (!cfg.tx_positions.empty() && cfg.tx_positions.size() != cfg.chirp.num_tx) {
    throw ConfigError(path.string() + ": num_tx does not match tx_positions_m");
  }
  if (cfg.tx_positions.empty() != cfg.rx_positions.empty()) {
    throw ConfigError(path.string() + ": give both tx_positions_m and rx_positions_m or neither");
  }
  return cfg;
}

VirtualArray RunConfig::array() const {
  if (tx_positions.empty()) {
    VirtualArray a = default_virtual_array(derive_chirp_params(chirp).wavelength);
    if (a.num_tx() != chirp.num_tx) throw ConfigError("default array has 3 TX; set num_tx = 3 or give positions");
    return a;
  }
  return build_virtual_array(tx_positions, rx_positions);
}

ImageGrid RunConfig::grid() const {
  return make_grid(grid_u_min, grid_v_min, grid_extent_u, grid_extent_v, pixel_size, image_height);
}

RawCapture simulate(const Scene& scene, const Trajectory& traj, const RunConfig& cfg,
                    SimulateSummary* summary) {
  const double center = cfg.aperture_center_time.value_or(0.5 * (traj.start_time() + traj.end_time()));
  const ApertureWindow window = aperture_window_for_length(traj, center, cfg.aperture_length);
  SimulationOptions opts;
  opts.pattern_exponent = cfg.pattern_exponent;
  opts.threads = cfg.threads;
  RawCapture cap = synthesize_capture(scene, traj, cfg.chirp, cfg.array(), window, opts);
  if (!(std::isinf(cfg.snr_db) && cfg.snr_db > 0)) cap = add_noise(cap, cfg.snr_db, cfg.seed);
  if (summary != nullptr) {
    summary->records = cap.records.size();
    summary->pulses = cap.records.size() / cap.array.num_rx();
    summary->virtual_elements = cap.array.num_vx();
    summary->duration = cap.records.back().time + cfg.chirp.pri - cap.records.front().time;
    summary->max_speed = traj.max_speed();
    summary->speed_warning = summary->max_speed > kMaxTdmSpeed;
  }
  return cap;
}

SarImageStack form_images(const RawCapture& capture, const RunConfig& cfg, ImageSummary* summary) {
  if (capture.empty()) throw DomainError("image: empty capture");
  ApertureSpec aperture;
  aperture.length = cfg.aperture_length;
  aperture.center_time = cfg.aperture_center_time.value_or(
      0.5 * (capture.records.front().pose.time + capture.records.back().pose.time));
  ImagingOptions opts = cfg.imaging;
  opts.backprojection.threads = cfg.threads;
  SarImageStack stack = image_stack(capture, cfg.grid(), aperture, opts);
  if (summary != nullptr) {
    summary->num_u = stack.grid.num_u;
    summary->num_v = stack.grid.num_v;
    summary->images = stack.images.size();
    summary->aperture_pulses = aperture_records(capture, aperture).size() / capture.array.num_rx();
    summary->peak_magnitude = 0.0;
    for (const auto& img : stack.images) {
      Eigen::Index r = 0, c = 0;
      const double peak = img.cwiseAbs().maxCoeff(&r, &c);
      if (peak > summary->peak_magnitude) {
        summary->peak_magnitude = peak;
        summary->peak_u = stack.grid.u_center(static_cast<std::size_t>(c));
        summary->peak_v = stack.grid.v_center(static_cast<std::size_t>(r));
      }
    }
  }
  return stack;
}

ElevationPointCloud build_point_cloud(const ElevationMap& map, const RunConfig& cfg,
                                      PointCloudSummary* summary) {
  FilterReport report;
  ElevationPointCloud cloud = filter_points(map, cfg.filter, &report);
  cloud.provenance["aperture_length_m"] = fmt(cfg.aperture_length);
  cloud.provenance["baseline_m"] = fmt(map.baseline);
  cloud.provenance["wavelength_m"] = fmt(map.wavelength);
  cloud.provenance["seed"] = std::to_string(cfg.seed);
  cloud.provenance["snr_threshold_db"] = fmt(cfg.filter.snr_threshold_db);
  cloud.provenance["frame"] = "SAR (x along track, y cross-track, z up; origin at phase centre)";
  if (summary != nullptr) {
    summary->report = report;
    summary->points = cloud.points.size();
    if (!cloud.points.empty()) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
      double zlo = lo, zhi = -lo;
      for (const auto& p : cloud.points) {
        const double e = rad2deg(map.elevation(static_cast<Eigen::Index>(p.row), static_cast<Eigen::Index>(p.col)));
        lo = std::min(lo, e);
        hi = std::max(hi, e);
        sum += e;
        zlo = std::min(zlo, p.z);
        zhi = std::max(zhi, p.z);
      }
      summary->min_elevation_deg = lo;
      summary->max_elevation_deg = hi;
      summary->mean_elevation_deg = sum / static_cast<double>(cloud.points.size());
      summary->min_z = zlo;
      summary->max_z = zhi;
    }
  }
  return cloud;
}

SimulateSummary stage_simulate(const std::filesystem::path& scene_file,
                               const std::filesystem::path& trajectory_file, const RunConfig& cfg,
                               const std::filesystem::path& out_capture) {
  const Scene scene = read_scene_csv(scene_file);
  const Trajectory traj = read_trajectory_csv(trajectory_file);
  SimulateSummary s;
  write_capture(simulate(scene, traj, cfg, &s), out_capture);
  return s;
}

ImageSummary stage_image(const std::filesystem::path& capture_file, const RunConfig& cfg,
                         const std::filesystem::path& out_stack,
                         const std::optional<std::filesystem::path>& pgm_dir) {
  const RawCapture capture = read_capture(capture_file);
  ImageSummary s;
  const SarImageStack stack = form_images(capture, cfg, &s);
  write_image_stack(stack, out_stack);
  if (pgm_dir) {
    std::filesystem::create_directories(*pgm_dir);
    for (std::size_t i = 0; i < stack.images.size(); ++i) {
      const auto& vx = stack.array.vx_elements[i];
      std::ostringstream name;
      name << "vx" << std::setw(2) << std::setfill('0') << i << "_tx" << vx.tx_index << "_rx"
           << vx.rx_index << ".pgm";
      write_log_magnitude_pgm(stack.images[i], *pgm_dir / name.str());
    }
  }
  return s;
}

ElevateSummary stage_elevate(const std::filesystem::path& stack_file,
                             const std::filesystem::path& out_map) {
  const SarImageStack stack = read_image_stack(stack_file);
  const ElevationMap map = elevation_map(stack);
  write_elevation_map(map, out_map);
  ElevateSummary s;
  s.baseline = map.baseline;
  s.baselines = stack.array.vertical_baselines.size();
  s.valid_pixels = static_cast<std::size_t>(map.elevation.array().isFinite().count());
  return s;
}

PointCloudSummary stage_pointcloud(const std::filesystem::path& map_file, const RunConfig& cfg,
                                   const std::filesystem::path& out_pcd,
                                   const std::optional<std::filesystem::path>& out_csv) {
  const ElevationMap map = read_elevation_map(map_file);
  PointCloudSummary s;
  const ElevationPointCloud cloud = build_point_cloud(map, cfg, &s);
  write_pcd(cloud, out_pcd);
  if (out_csv) write_cloud_csv(cloud, *out_csv);
  return s;
}

PipelinePaths PipelinePaths::in(const std::filesystem::path& dir) {
  return {dir / "capture.insarraw", dir / "stack.insarimg", dir / "elevation.insarelv",
          dir / "cloud.pcd", dir / "cloud.csv"};
}

PipelineSummary run_pipeline(const std::filesystem::path& scene_file,
                             const std::filesystem::path& trajectory_file, const RunConfig& cfg,
                             const std::filesystem::path& out_dir,
                             const std::optional<std::filesystem::path>& pgm_dir) {
  std::filesystem::create_directories(out_dir);
  const PipelinePaths paths = PipelinePaths::in(out_dir);
  PipelineSummary s;
  s.seconds[0] = timed([&] { s.simulate = stage_simulate(scene_file, trajectory_file, cfg, paths.capture); });
  s.seconds[1] = timed([&] { s.image = stage_image(paths.capture, cfg, paths.stack, pgm_dir); });
  s.seconds[2] = timed([&] { s.elevate = stage_elevate(paths.stack, paths.elevation); });
  s.seconds[3] = timed([&] { s.pointcloud = stage_pointcloud(paths.elevation, cfg, paths.pcd, paths.csv); });
  return s;
}

void print_summary(std::ostream& os, const SimulateSummary& s) {
  os << "simulate: " << s.pulses << " chirps, " << s.records << " records, " << s.virtual_elements
     << " virtual elements, duration " << s.duration << " s, max speed " << s.max_speed << " m/s\n";
  if (s.speed_warning) {
    os << "warning: trajectory speed " << s.max_speed << " m/s exceeds the " << kMaxTdmSpeed
       << " m/s TDM operating limit\n";
  }
}

void print_summary(std::ostream& os, const ImageSummary& s) {
  os << "image: " << s.images << " images of " << s.num_u << "x" << s.num_v << " pixels, "
     << s.aperture_pulses << " chirps in aperture, peak |I| = " << s.peak_magnitude << " at (u, v) = ("
     << s.peak_u << ", " << s.peak_v << ") m\n";
}

void print_summary(std::ostream& os, const ElevateSummary& s) {
  os << "elevate: " << s.baselines << " vertical baselines, D_v = " << s.baseline << " m, "
     << s.valid_pixels << " pixels with elevation\n";
}

void print_summary(std::ostream& os, const PointCloudSummary& s) {
  const auto& r = s.report;
  const double total = r.total ? static_cast<double>(r.total) : 1.0;
  os << "pointcloud: kept " << r.kept << " of " << r.total << " pixels\n";
  for (std::size_t i = 0; i < r.rejected.size(); ++i) {
    os << "  rejected by " << std::left << std::setw(16) << rejection_name(static_cast<Rejection>(i))
       << std::right << r.rejected[i] << " (" << std::fixed << std::setprecision(2)
       << 100.0 * static_cast<double>(r.rejected[i]) / total << "%)\n"
       << std::defaultfloat << std::setprecision(6);
  }
  if (s.points > 0) {
    os << "  elevation deg: min " << s.min_elevation_deg << ", max " << s.max_elevation_deg << ", mean "
       << s.mean_elevation_deg << "\n  z m: min " << s.min_z << ", max " << s.max_z << "\n";
  }
}

}  // namespace insar

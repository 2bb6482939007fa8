// Command-line front end: simulate -> image -> elevate -> pointcloud.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "insar/errors.hpp"
#include "insar/io.hpp"
#include "insar/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode : int { kOk = 0, kConfig = 2, kFormat = 3, kDomain = 4 };

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out_dir = ".";
};

insar::RunConfig load(const GlobalOptions& g) {
  insar::RunConfig cfg = g.config.empty() ? insar::default_run_config() : insar::load_run_config(g.config);
  if (g.seed) cfg.seed = *g.seed;
  if (g.threads) cfg.threads = std::max(1u, *g.threads);
  return cfg;
}

fs::path out_path(const GlobalOptions& g, const std::string& given, const fs::path& fallback) {
  if (!given.empty()) return given;
  fs::create_directories(g.out_dir);
  return fs::path(g.out_dir) / fallback;
}

std::optional<fs::path> optional_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return fs::path(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Automotive InSAR elevation mapping: simulate, image, elevate, pointcloud"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config, "Run configuration (key = value)")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Noise seed");
  app.add_option("--threads", g.threads, "Worker threads");
  app.add_option("--out-dir", g.out_dir, "Directory for default output paths");
  app.fallthrough();

  std::string scene, trajectory, capture, stack, map, output, pgm_dir, csv;

  auto* sim = app.add_subcommand("simulate", "Synthesize a raw capture for a point-target scene");
  sim->add_option("--scene", scene, "Scene CSV (x,y,z,amplitude)")->required();
  sim->add_option("--trajectory", trajectory, "Trajectory CSV (t,x,y,z,qw,qx,qy,qz)")->required();
  sim->add_option("-o,--output", output, "Capture file");

  auto* img = app.add_subcommand("image", "Backproject one SAR image per virtual element");
  img->add_option("--capture", capture, "Capture file")->required();
  img->add_option("-o,--output", output, "Image stack file");
  img->add_option("--pgm-dir", pgm_dir, "Write per-element log-magnitude PGMs here");

  auto* elev = app.add_subcommand("elevate", "Interferometric elevation map from an image stack");
  elev->add_option("--stack", stack, "Image stack file")->required();
  elev->add_option("-o,--output", output, "Elevation map file");

  auto* pc = app.add_subcommand("pointcloud", "Filter an elevation map into a PCD point cloud");
  pc->add_option("--map", map, "Elevation map file")->required();
  pc->add_option("-o,--output", output, "PCD file");
  pc->add_option("--csv", csv, "Also write a CSV export");

  auto* pipe = app.add_subcommand("pipeline", "Run all stages, materializing every artifact");
  pipe->add_option("--scene", scene, "Scene CSV")->required();
  pipe->add_option("--trajectory", trajectory, "Trajectory CSV")->required();
  pipe->add_option("--pgm-dir", pgm_dir, "Write per-element log-magnitude PGMs here");

  auto* rep = app.add_subcommand("report", "Print filter statistics for an elevation map");
  rep->add_option("--map", map, "Elevation map file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    const insar::RunConfig cfg = load(g);
    const insar::PipelinePaths defaults = insar::PipelinePaths::in(".");
    if (*sim) {
      const auto s = insar::stage_simulate(scene, trajectory, cfg,
                                           out_path(g, output, defaults.capture.filename()));
      insar::print_summary(std::cout, s);
      if (s.speed_warning) {
        std::cerr << "warning: speed exceeds " << insar::kMaxTdmSpeed << " m/s\n";
      }
    } else if (*img) {
      insar::print_summary(std::cout, insar::stage_image(capture, cfg,
                                                        out_path(g, output, defaults.stack.filename()),
                                                        optional_path(pgm_dir)));
    } else if (*elev) {
      insar::print_summary(std::cout,
                           insar::stage_elevate(stack, out_path(g, output, defaults.elevation.filename())));
    } else if (*pc) {
      insar::print_summary(std::cout, insar::stage_pointcloud(map, cfg,
                                                             out_path(g, output, defaults.pcd.filename()),
                                                             optional_path(csv)));
    } else if (*pipe) {
      const auto s = insar::run_pipeline(scene, trajectory, cfg, g.out_dir, optional_path(pgm_dir));
      insar::print_summary(std::cout, s.simulate);
      insar::print_summary(std::cout, s.image);
      insar::print_summary(std::cout, s.elevate);
      insar::print_summary(std::cout, s.pointcloud);
      std::cout << "stage seconds: simulate " << s.seconds[0] << ", image " << s.seconds[1]
                << ", elevate " << s.seconds[2] << ", pointcloud " << s.seconds[3] << "\n";
    } else if (*rep) {
      const insar::ElevationMap m = insar::read_elevation_map(map);
      insar::PointCloudSummary s;
      insar::build_point_cloud(m, cfg, &s);
      insar::print_summary(std::cout, s);
    }
  } catch (const insar::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const insar::FormatError& e) {
    std::cerr << "data format error: " << e.what() << "\n";
    return kFormat;
  } catch (const insar::DomainError& e) {
    std::cerr << "numerical domain error: " << e.what() << "\n";
    return kDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kOk;
}

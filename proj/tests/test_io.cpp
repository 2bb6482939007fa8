#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "insar/errors.hpp"
#include "insar/io.hpp"
#include "insar/pipeline.hpp"

using namespace insar;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "insar_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RawCapture small_capture() {
  ChirpConfig cfg;
  cfg.samples_per_chirp = 64;
  const auto array = default_virtual_array(kSpeedOfLight / cfg.center_frequency);
  Pose a, b;
  b.time = 0.002;
  b.position = {0.01, 0.0, 0.0};
  b.orientation = Eigen::AngleAxisd(0.01, Eigen::Vector3d::UnitZ());
  return add_noise(synthesize_capture({{{0, 3, 0.2}, 1.0}}, Trajectory({a, b}), cfg, array, {0.0, 0.002}),
                   20.0, 3);
}

}  // namespace

TEST_CASE("capture round trip") {
  const auto cap = small_capture();
  const auto path = scratch("cap.insarraw");
  write_capture(cap, path);
  CHECK(slurp(path).substr(0, 8) == "INSARRAW");
  const auto back = read_capture(path);
  CHECK(back.chirp.center_frequency == cap.chirp.center_frequency);
  CHECK(back.chirp.samples_per_chirp == 64);
  CHECK(back.array.num_vx() == 12);
  CHECK(back.array.vertical_baselines.size() == 4);
  REQUIRE(back.records.size() == cap.records.size());
  for (std::size_t i = 0; i < cap.records.size(); ++i) {
    const auto& p = cap.records[i];
    const auto& q = back.records[i];
    CHECK(p.tx_index == q.tx_index);
    CHECK(p.rx_index == q.rx_index);
    CHECK(p.cycle == q.cycle);
    CHECK(p.time == q.time);
    CHECK(p.pose.position == q.pose.position);
    CHECK(p.pose.orientation.coeffs() == q.pose.orientation.coeffs());
    CHECK((p.samples - q.samples).cwiseAbs().maxCoeff() <= 1e-6 * p.samples.cwiseAbs().maxCoeff());
  }
  // Writing what was read reproduces the file byte for byte.
  const auto again = scratch("cap2.insarraw");
  write_capture(back, again);
  CHECK(slurp(path) == slurp(again));
}

TEST_CASE("corrupt captures") {
  const auto cap = small_capture();
  const auto path = scratch("good.insarraw");
  write_capture(cap, path);
  const std::string bytes = slurp(path);

  const auto bad = scratch("bad.insarraw");
  auto write_bytes = [&](const std::string& b) {
    std::ofstream out(bad, std::ios::binary);
    out.write(b.data(), static_cast<std::streamsize>(b.size()));
  };
  for (std::size_t cut : {std::size_t{0}, std::size_t{5}, std::size_t{40}, bytes.size() / 2, bytes.size() - 1}) {
    write_bytes(bytes.substr(0, cut));
    CHECK_THROWS_AS(read_capture(bad), FormatError);
  }
  std::string wrong_magic = bytes;
  wrong_magic[0] = 'X';
  write_bytes(wrong_magic);
  CHECK_THROWS_AS(read_capture(bad), FormatError);

  std::string wrong_version = bytes;
  wrong_version[8] = 9;
  write_bytes(wrong_version);
  CHECK_THROWS_WITH_AS(read_capture(bad), doctest::Contains("version"), FormatError);

  write_bytes(bytes + "x");
  CHECK_THROWS_WITH_AS(read_capture(bad), doctest::Contains("trailing"), FormatError);
  CHECK_THROWS_AS(read_capture(scratch("does_not_exist")), FormatError);
}

TEST_CASE("image stack and elevation map round trips") {
  SarImageStack stack;
  stack.grid = make_grid(-0.1, 2.0, 0.2, 0.12, 0.04);
  stack.frame = make_sar_frame({1, 2, 3}, {1, 1, 0});
  stack.wavelength = 3.87e-3;
  stack.aperture_length = 1.0;
  stack.array = default_virtual_array(stack.wavelength);
  for (std::size_t i = 0; i < stack.array.num_vx(); ++i) {
    stack.images.push_back(ComplexImaged::Random(3, 5));
  }
  const auto path = scratch("s.insarimg");
  write_image_stack(stack, path);
  CHECK(slurp(path).substr(0, 8) == "INSARIMG");
  const auto s = read_image_stack(path);
  CHECK(s.grid.num_u == 5);
  CHECK(s.grid.num_v == 3);
  CHECK(s.grid.u_min == stack.grid.u_min);
  CHECK(s.frame.u_axis == stack.frame.u_axis);
  CHECK(s.frame.origin == stack.frame.origin);
  CHECK(s.array.num_vx() == 12);
  REQUIRE(s.images.size() == 12);
  CHECK((s.images[7] - stack.images[7]).cwiseAbs().maxCoeff() < 1e-6);

  std::string bytes = slurp(path);
  std::ofstream(scratch("t.insarimg"), std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 3));
  CHECK_THROWS_AS(read_image_stack(scratch("t.insarimg")), FormatError);

  ElevationMap m;
  m.grid = stack.grid;
  m.frame = stack.frame;
  m.wavelength = stack.wavelength;
  m.baseline = stack.wavelength / 4;
  m.elevation = Eigen::MatrixXd::Random(3, 5);
  m.elevation(1, 1) = std::nan("");
  m.phase_delay = Eigen::MatrixXd::Random(3, 5);
  m.circular_variance = Eigen::MatrixXd::Random(3, 5).cwiseAbs();
  m.magnitude = Eigen::MatrixXd::Random(3, 5).cwiseAbs();
  m.snr_db = Eigen::MatrixXd::Random(3, 5) * 30;
  const auto mp = scratch("m.insarelv");
  write_elevation_map(m, mp);
  CHECK(slurp(mp).substr(0, 8) == "INSARELV");
  const auto e = read_elevation_map(mp);
  CHECK(std::isnan(e.elevation(1, 1)));
  CHECK(e.elevation(0, 0) == doctest::Approx(m.elevation(0, 0)).epsilon(1e-6));
  CHECK(e.snr_db(2, 4) == doctest::Approx(m.snr_db(2, 4)).epsilon(1e-6));
  CHECK(e.baseline == m.baseline);
  CHECK_THROWS_AS(read_elevation_map(path), FormatError);  // an image stack is not an elevation map
}

TEST_CASE("pgm dump") {
  ComplexImaged img = ComplexImaged::Zero(2, 3);
  img(0, 0) = 1.0;   // peak
  img(0, 1) = 0.1;   // -20 dB
  img(1, 2) = 1e-9;  // below the 60 dB floor
  const auto p = scratch("x.pgm");
  write_log_magnitude_pgm(img, p);
  const std::string s = slurp(p);
  const std::string header = "P5\n3 2\n65535\n";
  REQUIRE(s.size() == header.size() + 12);
  CHECK(s.substr(0, header.size()) == header);
  auto px = [&](int i) {
    return (static_cast<unsigned char>(s[header.size() + 2 * i]) << 8) |
           static_cast<unsigned char>(s[header.size() + 2 * i + 1]);
  };
  CHECK(px(0) == 65535);
  CHECK(px(1) == 43690);  // 40/60 of full scale
  CHECK(px(5) == 0);
  CHECK(px(3) == 0);
}

TEST_CASE("key value parsing") {
  const auto p = scratch("a.cfg");
  write_text(p, "# comment\n a = 1 \n\nb=[(1,2,3), (4, 5, 6)] # trailing\n");
  const auto kv = parse_key_values(p);
  CHECK(kv.at("a").value == "1");
  CHECK(kv.at("a").line == 2);
  const auto v = parse_vector_list(kv.at("b").value);
  REQUIRE(v.size() == 2);
  CHECK(v[1] == Eigen::Vector3d(4, 5, 6));
  CHECK(parse_vector_list("[]").empty());

  write_text(p, "a = 1\na = 2\n");
  CHECK_THROWS_WITH_AS(parse_key_values(p), doctest::Contains("a.cfg:2"), ConfigError);
  write_text(p, "a 1\n");
  CHECK_THROWS_WITH_AS(parse_key_values(p), doctest::Contains("a.cfg:1"), ConfigError);
  CHECK_THROWS_AS(parse_vector_list("(1,2,3)"), ConfigError);
  CHECK_THROWS_AS(parse_vector_list("[(1,2)]"), ConfigError);
  CHECK_THROWS_AS(parse_vector_list("[(1,2,x)]"), ConfigError);
  CHECK_THROWS_AS(parse_vector_list("[(1,2,3]"), ConfigError);
}

TEST_CASE("run config loading") {
  const auto p = scratch("run.cfg");
  write_text(p,
             "sample_rate_hz = 37.5e6\n"
             "min_z_m = -0.5\n"
             "sensor_mount_height_m = 1.2\n"
             "snr_threshold_db = inf\n"
             "range_window = hann\n"
             "tx_positions_m = [(0,0,0), (0,0,0.002), (0.008,0,0)]\n"
             "rx_positions_m = [(0,0,0)]\n"
             "seed = 99\n");
  const RunConfig c = load_run_config(p);
  CHECK(derive_chirp_params(c.chirp).max_range == doctest::Approx(187.37).epsilon(1e-4));
  CHECK(c.filter.min_z_m == -0.5);  // explicit key wins over the mount height default
  CHECK(std::isinf(c.filter.snr_threshold_db));
  CHECK(c.imaging.range.window == RangeWindow::Hann);
  CHECK(c.array().num_vx() == 3);
  CHECK(c.seed == 99);

  const RunConfig d = default_run_config();
  CHECK(d.grid().num_u == 750);
  CHECK(d.filter.min_z_m == -0.9);
  CHECK(d.array().num_vx() == 12);

  write_text(p, "bogus = 1\n");
  CHECK_THROWS_WITH_AS(load_run_config(p), doctest::Contains("run.cfg:1"), ConfigError);
  write_text(p, "\nsamples_per_chirp = many\n");
  CHECK_THROWS_WITH_AS(load_run_config(p), doctest::Contains("run.cfg:2"), ConfigError);
  write_text(p, "pixel_size_m = 0.04\ngrid_extent_u_m = 0.01\n");
  CHECK_THROWS_AS(load_run_config(p), ConfigError);
  write_text(p, "samples_per_chirp = 4096\n");
  CHECK_THROWS_AS(load_run_config(p), ConfigError);
  CHECK_THROWS_AS(load_run_config(scratch("nope.cfg")), ConfigError);
}

TEST_CASE("scene and trajectory files") {
  const Scene scene{{{1.5, 2.25, -0.125}, 0.5}, {{0.1, 0.2, 0.3}, 2.0}};
  const auto sp = scratch("scene.csv");
  write_scene_csv(scene, sp);
  const auto s = read_scene_csv(sp);
  REQUIRE(s.size() == 2);
  CHECK(s[1].position == scene[1].position);
  CHECK(s[0].amplitude == 0.5);

  write_text(sp, "");
  CHECK_THROWS_WITH_AS(read_scene_csv(sp), doctest::Contains("scene.csv"), ConfigError);
  write_text(sp, "x,y,z,amplitude\n");
  CHECK_THROWS_WITH_AS(read_scene_csv(sp), doctest::Contains("scene.csv"), ConfigError);
  write_text(sp, "x,y,z,amplitude\n1,2,3,-1\n");
  CHECK_THROWS_WITH_AS(read_scene_csv(sp), doctest::Contains("scene.csv:2"), ConfigError);
  write_text(sp, "x,y,z,amplitude\n1,2,3\n");
  CHECK_THROWS_WITH_AS(read_scene_csv(sp), doctest::Contains("scene.csv:2"), ConfigError);
  write_text(sp, "x,y,z\n1,2,3\n");
  CHECK_THROWS_WITH_AS(read_scene_csv(sp), doctest::Contains("scene.csv:1"), ConfigError);

  const auto tp = scratch("traj.csv");
  write_text(tp, "t,x,y,z,qw,qx,qy,qz\n0,0,0,0,2,0,0,0\n1,4,0,0,1,0,0,0\n");
  const auto traj = read_trajectory_csv(tp);
  CHECK(traj.size() == 2);
  CHECK(traj.poses()[0].orientation.w() == 1.0);  // normalised
  write_trajectory_csv(traj, tp);
  CHECK(read_trajectory_csv(tp).poses()[1].position.x() == 4.0);
  write_text(tp, "t,x,y,z,qw,qx,qy,qz\n0,0,0,0,0,0,0,0\n");
  CHECK_THROWS_WITH_AS(read_trajectory_csv(tp), doctest::Contains("traj.csv:2"), ConfigError);
  write_text(tp, "t,x,y,z,qw,qx,qy,qz\n1,0,0,0,1,0,0,0\n0,1,0,0,1,0,0,0\n");
  CHECK_THROWS_WITH_AS(read_trajectory_csv(tp), doctest::Contains("traj.csv:3"), ConfigError);
}

#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string output;  // stdout and stderr
};

fs::path work_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "insar_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Result run(const std::string& args) {
  const fs::path log = work_dir() / "last_output.txt";
  const std::string cmd = std::string("\"") + INSAR_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write(const std::string& name, const std::string& text) {
  const fs::path p = work_dir() / name;
  std::ofstream(p) << text;
  return p;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

const std::string kSmallConfig =
    "# desk-scale test run\n"
    "aperture_length_m = 0.2\n"
    "grid_u_min_m = -0.5\n"
    "grid_v_min_m = 2.5\n"
    "grid_extent_u_m = 1.0\n"
    "grid_extent_v_m = 1.0\n"
    "snr_db = 20\n"
    "seed = 5\n";

struct Inputs {
  fs::path scene, trajectory, config;
};

Inputs inputs() {
  return {write("scene.csv", "x,y,z,amplitude\n0.02,3.0,-0.85,1.0\n0.02,3.3,-0.3,1.0\n"),
          write("traj.csv", "t,x,y,z,qw,qx,qy,qz\n0,-0.2,0,0,1,0,0,0\n0.1,0.2,0,0,1,0,0,0\n"),
          write("small.cfg", kSmallConfig)};
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run("--help").code == 0);
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("simulate").code == 2);  // missing required options
  CHECK(run("--config /no/such/file.cfg report --map x").code == 2);
}

TEST_CASE("empty scene file is a parse error naming the file") {
  const auto in = inputs();
  const auto empty = write("empty_scene.csv", "");
  const auto r = run("--config " + q(in.config) + " simulate --scene " + q(empty) + " --trajectory " +
                     q(in.trajectory) + " -o " + q(work_dir() / "x.insarraw"));
  CHECK(r.code == 2);
  CHECK(r.output.find("empty_scene.csv") != std::string::npos);
}

TEST_CASE("short trajectory and bad config lines are config errors") {
  const auto in = inputs();
  const auto shorter = write("short.csv", "t,x,y,z,qw,qx,qy,qz\n0,0,0,0,1,0,0,0\n0.01,0.04,0,0,1,0,0,0\n");
  auto r = run("--config " + q(in.config) + " simulate --scene " + q(in.scene) + " --trajectory " +
               q(shorter) + " -o " + q(work_dir() / "x.insarraw"));
  CHECK(r.code == 2);
  CHECK(r.output.find("trajectory-too-short") != std::string::npos);

  const auto bad = write("bad.cfg", kSmallConfig + "grid_extent_u_m = 0.01\n");
  r = run("--config " + q(bad) + " simulate --scene " + q(in.scene) + " --trajectory " + q(in.trajectory));
  CHECK(r.code == 2);
  CHECK(r.output.find("bad.cfg:9") != std::string::npos);  // duplicate key

  const auto tiny = write("tiny.cfg", "pixel_size_m = 0.04\ngrid_extent_u_m = 0.02\n");
  r = run("--config " + q(tiny) + " image --capture " + q(work_dir() / "x.insarraw"));
  CHECK(r.code == 2);
  CHECK(r.output.find("smaller than one pixel") != std::string::npos);
}

TEST_CASE("stages, corrupt inputs and reproducibility") {
  const auto in = inputs();
  const fs::path a = work_dir() / "run_a", b = work_dir() / "run_b", c = work_dir() / "run_c";
  const std::string common = "--config " + q(in.config) + " ";
  auto pipeline = [&](const fs::path& dir, const std::string& extra) {
    return run(common + extra + "--out-dir " + q(dir) + " pipeline --scene " + q(in.scene) +
               " --trajectory " + q(in.trajectory));
  };

  const auto ra = pipeline(a, "");
  REQUIRE(ra.code == 0);
  CHECK(ra.output.find("12 virtual elements") != std::string::npos);
  CHECK(ra.output.find("25x25 pixels") != std::string::npos);
  CHECK(ra.output.find("rejected by snr") != std::string::npos);
  CHECK(ra.output.find("elevation deg: min") != std::string::npos);
  for (const char* f : {"capture.insarraw", "stack.insarimg", "elevation.insarelv", "cloud.pcd", "cloud.csv"}) {
    CHECK(fs::exists(a / f));
  }

  SUBCASE("same seed twice gives identical files; another seed does not") {
    REQUIRE(pipeline(b, "--threads 3 ").code == 0);
    for (const char* f : {"capture.insarraw", "stack.insarimg", "elevation.insarelv", "cloud.pcd", "cloud.csv"}) {
      CHECK(slurp(a / f) == slurp(b / f));
    }
    REQUIRE(pipeline(c, "--seed 6 ").code == 0);
    CHECK(slurp(a / "capture.insarraw") != slurp(c / "capture.insarraw"));
  }

  SUBCASE("individual stages reproduce the pipeline") {
    const fs::path s = work_dir() / "stages";
    fs::create_directories(s);
    REQUIRE(run(common + "simulate --scene " + q(in.scene) + " --trajectory " + q(in.trajectory) + " -o " +
                q(s / "capture.insarraw")).code == 0);
    REQUIRE(run(common + "image --capture " + q(s / "capture.insarraw") + " -o " + q(s / "stack.insarimg") +
                " --pgm-dir " + q(s / "pgm")).code == 0);
    REQUIRE(run(common + "elevate --stack " + q(s / "stack.insarimg") + " -o " + q(s / "elevation.insarelv")).code == 0);
    REQUIRE(run(common + "pointcloud --map " + q(s / "elevation.insarelv") + " -o " + q(s / "cloud.pcd") +
                " --csv " + q(s / "cloud.csv")).code == 0);
    for (const char* f : {"capture.insarraw", "stack.insarimg", "elevation.insarelv", "cloud.pcd", "cloud.csv"}) {
      CHECK(slurp(a / f) == slurp(s / f));
    }
    CHECK(fs::exists(s / "pgm" / "vx00_tx0_rx0.pgm"));
    CHECK(slurp(s / "pgm" / "vx11_tx2_rx3.pgm").rfind("P5\n25 25\n65535\n", 0) == 0);
  }

  SUBCASE("default output names go to --out-dir") {
    const fs::path d = work_dir() / "defaults";
    REQUIRE(run(common + "--out-dir " + q(d) + " elevate --stack " + q(a / "stack.insarimg")).code == 0);
    CHECK(fs::exists(d / "elevation.insarelv"));
  }

  SUBCASE("infinite snr threshold rejects everything by snr") {
    const auto cfg = write("inf.cfg", kSmallConfig + "snr_threshold_db = inf\n");
    const auto r = run("--config " + q(cfg) + " pointcloud --map " + q(a / "elevation.insarelv") + " -o " +
                       q(work_dir() / "inf.pcd"));
    REQUIRE(r.code == 0);
    CHECK(r.output.find("kept 0 of 625") != std::string::npos);
    CHECK(r.output.find("snr             625 (100.00%)") != std::string::npos);
    CHECK(slurp(work_dir() / "inf.pcd").find("POINTS 0\n") != std::string::npos);
    const auto rep = run("--config " + q(cfg) + " report --map " + q(a / "elevation.insarelv"));
    CHECK(rep.code == 0);
    CHECK(rep.output.find("(100.00%)") != std::string::npos);
  }

  SUBCASE("truncated and mislabelled artifacts are format errors") {
    const std::string bytes = slurp(a / "capture.insarraw");
    const fs::path cut = work_dir() / "cut.insarraw";
    std::ofstream(cut, std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 3));
    auto r = run(common + "image --capture " + q(cut) + " -o " + q(work_dir() / "cut.insarimg"));
    CHECK(r.code == 3);
    CHECK(r.output.find("corrupt") != std::string::npos);
    r = run(common + "elevate --stack " + q(a / "capture.insarraw") + " -o " + q(work_dir() / "x.insarelv"));
    CHECK(r.code == 3);
    CHECK(run(common + "report --map " + q(a / "nothing.insarelv")).code == 3);
  }
}

TEST_CASE("single-layer arrays cannot be elevated") {
  const auto in = inputs();
  const auto cfg = write("flat.cfg", kSmallConfig +
                                         "num_tx = 1\n"
                                         "pri_s = 191.7e-6\n"
                                         "tx_positions_m = [(0,0,0)]\n"
                                         "rx_positions_m = [(0,0,0), (0.002,0,0)]\n");
  const fs::path d = work_dir() / "flat";
  const auto r = run("--config " + q(cfg) + " --out-dir " + q(d) + " pipeline --scene " + q(in.scene) +
                     " --trajectory " + q(in.trajectory));
  CHECK(r.code == 4);
  CHECK(r.output.find("no vertical baseline") != std::string::npos);
}

TEST_CASE("speed above the TDM limit warns but succeeds") {
  const auto in = inputs();
  const auto fast = write("fast.csv", "t,x,y,z,qw,qx,qy,qz\n0,-0.5,0,0,1,0,0,0\n0.1,0.5,0,0,1,0,0,0\n");
  const auto r = run("--config " + q(in.config) + " simulate --scene " + q(in.scene) + " --trajectory " +
                     q(fast) + " -o " + q(work_dir() / "fast.insarraw"));
  CHECK(r.code == 0);
  CHECK(r.output.find("warning") != std::string::npos);
}

TEST_CASE("default grid is 750 x 750") {
  const auto in = inputs();
  const auto cfg = write("wide.cfg", "aperture_length_m = 0.004\n");
  const fs::path d = work_dir() / "wide";
  fs::create_directories(d);
  REQUIRE(run("--config " + q(cfg) + " simulate --scene " + q(in.scene) + " --trajectory " + q(in.trajectory) +
              " -o " + q(d / "c.insarraw")).code == 0);
  const auto r = run("--config " + q(cfg) + " image --capture " + q(d / "c.insarraw") + " -o " + q(d / "s.insarimg"));
  CHECK(r.code == 0);
  CHECK(r.output.find("12 images of 750x750 pixels") != std::string::npos);
  fs::remove_all(d);
}

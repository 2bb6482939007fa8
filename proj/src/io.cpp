#include "insar/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "insar/errors.hpp"

namespace insar {

static_assert(std::endian::native == std::endian::little,
              "binary artifacts are written in host order, which must be little-endian");

namespace {

constexpr char kCaptureMagic[8] = {'I', 'N', 'S', 'A', 'R', 'R', 'A', 'W'};
constexpr char kImageMagic[8] = {'I', 'N', 'S', 'A', 'R', 'I', 'M', 'G'};
constexpr char kElevationMagic[8] = {'I', 'N', 'S', 'A', 'R', 'E', 'L', 'V'};

// Sanity bound on counts read from headers before allocating.
constexpr std::uint64_t kMaxCount = std::uint64_t{1} << 32;

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw FormatError("cannot open " + path.string() + " for writing");
  }
  template <typename T>
  void put(T v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void bytes(const char* data, std::size_t n) { out_.write(data, static_cast<std::streamsize>(n)); }
  void vec3(const Eigen::Vector3d& v) {
    put(v.x());
    put(v.y());
    put(v.z());
  }
  void finish() {
    out_.flush();
    if (!out_) throw FormatError("write failed for " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw FormatError("cannot open " + path.string());
  }
  template <typename T>
  T get() {
    T v;
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in_) throw FormatError("corrupt file " + path_.string() + ": truncated");
    return v;
  }
  void bytes(char* data, std::size_t n) {
    in_.read(data, static_cast<std::streamsize>(n));
    if (!in_) throw FormatError("corrupt file " + path_.string() + ": truncated");
  }
  Eigen::Vector3d vec3() {
    const double x = get<double>();
    const double y = get<double>();
    const double z = get<double>();
    return {x, y, z};
  }
  std::uint64_t count(const char* what) {
    const auto n = get<std::uint64_t>();
    if (n > kMaxCount) {
      throw FormatError("corrupt file " + path_.string() + ": implausible " + what + " count");
    }
    return n;
  }
  void expect_magic(const char (&magic)[8], std::uint32_t version) {
    char got[8];
    bytes(got, 8);
    if (std::memcmp(got, magic, 8) != 0) {
      throw FormatError("corrupt file " + path_.string() + ": bad magic");
    }
    const auto v = get<std::uint32_t>();
    if (v != version) {
      throw FormatError("unsupported version " + std::to_string(v) + " in " + path_.string());
    }
  }
  void expect_end() {
    in_.peek();
    if (!in_.eof()) throw FormatError("corrupt file " + path_.string() + ": trailing bytes");
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
};

void put_array(Writer& w, const VirtualArray& array) {
  w.put<std::uint64_t>(array.num_tx());
  for (const auto& p : array.tx_positions) w.vec3(p);
  w.put<std::uint64_t>(array.num_rx());
  for (const auto& p : array.rx_positions) w.vec3(p);
}

VirtualArray get_array(Reader& r) {
  std::vector<Eigen::Vector3d> tx(r.count("tx"));
  for (auto& p : tx) p = r.vec3();
  std::vector<Eigen::Vector3d> rx(r.count("rx"));
  for (auto& p : rx) p = r.vec3();
  try {
    return build_virtual_array(tx, rx);
  } catch (const ConfigError& e) {
    throw FormatError("corrupt file " + r.path().string() + ": " + e.what());
  }
}

void put_pose(Writer& w, const Pose& p) {
  w.put(p.time);
  w.vec3(p.position);
  w.put(p.orientation.w());
  w.put(p.orientation.x());
  w.put(p.orientation.y());
  w.put(p.orientation.z());
}

Pose get_pose(Reader& r) {
  Pose p;
  p.time = r.get<double>();
  p.position = r.vec3();
  const double qw = r.get<double>();
  const double qx = r.get<double>();
  const double qy = r.get<double>();
  const double qz = r.get<double>();
  p.orientation = Eigen::Quaterniond(qw, qx, qy, qz);
  return p;
}

void put_grid(Writer& w, const ImageGrid& g) {
  w.put(g.u_min);
  w.put(g.v_min);
  w.put(g.pixel_size);
  w.put(g.height);
  w.put<std::uint64_t>(g.num_u);
  w.put<std::uint64_t>(g.num_v);
}

ImageGrid get_grid(Reader& r) {
  ImageGrid g;
  g.u_min = r.get<double>();
  g.v_min = r.get<double>();
  g.pixel_size = r.get<double>();
  g.height = r.get<double>();
  g.num_u = r.count("column");
  g.num_v = r.count("row");
  try {
    g.validate();
  } catch (const ConfigError& e) {
    throw FormatError("corrupt file " + r.path().string() + ": " + e.what());
  }
  if (g.num_u * g.num_v > kMaxCount) throw FormatError("corrupt file " + r.path().string() + ": grid too large");
  return g;
}

void put_frame(Writer& w, const SarFrame& f) {
  w.vec3(f.origin);
  w.vec3(f.u_axis);
  w.vec3(f.v_axis);
  w.vec3(f.z_axis);
}

SarFrame get_frame(Reader& r) {
  SarFrame f;
  f.origin = r.vec3();
  f.u_axis = r.vec3();
  f.v_axis = r.vec3();
  f.z_axis = r.vec3();
  return f;
}

void put_plane(Writer& w, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) w.put(static_cast<float>(m(r, c)));
  }
}

Eigen::MatrixXd get_plane(Reader& r, const ImageGrid& g) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(g.num_v), static_cast<Eigen::Index>(g.num_u));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(i, c) = r.get<float>();
  }
  return m;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(trim(cell));
  return out;
}

double parse_number(const std::string& text, const std::filesystem::path& path, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    std::ostringstream os;
    os << path.string() << ":" << line << ": expected a number, got '" << text << "'";
    throw ConfigError(os.str());
  }
  return v;
}

// Reads data rows of a CSV with an exact expected header.
std::vector<std::pair<std::size_t, std::vector<double>>> read_numeric_csv(
    const std::filesystem::path& path, const std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  std::vector<std::pair<std::size_t, std::vector<double>>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto cells = split_csv(t);
    if (!have_header) {
      if (cells != header) {
        std::ostringstream os;
        os << path.string() << ":" << lineno << ": expected header '";
        for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
        os << "'";
        throw ConfigError(os.str());
      }
      have_header = true;
      continue;
    }
    if (cells.size() != header.size()) {
      std::ostringstream os;
      os << path.string() << ":" << lineno << ": expected " << header.size() << " columns, got "
         << cells.size();
      throw ConfigError(os.str());
    }
    std::vector<double> values;
    for (const auto& c : cells) values.push_back(parse_number(c, path, lineno));
    rows.emplace_back(lineno, std::move(values));
  }
  if (!have_header) throw ConfigError(path.string() + ": missing CSV header");
  return rows;
}

}  // namespace

void write_capture(const RawCapture& capture, const std::filesystem::path& path) {
  Writer w(path);
  w.bytes(kCaptureMagic, 8);
  w.put(kCaptureVersion);
  const ChirpConfig& c = capture.chirp;
  w.put(c.center_frequency);
  w.put(c.ramp_slope);
  w.put<std::uint64_t>(c.samples_per_chirp);
  w.put(c.sample_rate);
  w.put(c.pri);
  w.put<std::uint64_t>(c.chirps_per_tx_per_frame);
  w.put<std::uint64_t>(c.num_tx);
  put_array(w, capture.array);
  w.put<std::uint64_t>(capture.records.size());
  for (const auto& rec : capture.records) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(rec.tx_index));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(rec.rx_index));
    w.put<std::uint64_t>(rec.cycle);
    w.put(rec.time);
    put_pose(w, rec.pose);
    for (const auto& s : rec.samples) {
      w.put(static_cast<float>(s.real()));
      w.put(static_cast<float>(s.imag()));
    }
  }
  w.finish();
}

RawCapture read_capture(const std::filesystem::path& path) {
  Reader r(path);
  r.expect_magic(kCaptureMagic, kCaptureVersion);
  RawCapture cap;
  ChirpConfig& c = cap.chirp;
  c.center_frequency = r.get<double>();
  c.ramp_slope = r.get<double>();
  c.samples_per_chirp = r.count("sample");
  c.sample_rate = r.get<double>();
  c.pri = r.get<double>();
  c.chirps_per_tx_per_frame = r.count("chirp");
  c.num_tx = r.count("tx");
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw FormatError("corrupt capture " + path.string() + ": " + e.what());
  }
  cap.array = get_array(r);
  if (cap.array.num_tx() != c.num_tx) throw FormatError("corrupt capture " + path.string() + ": TX count mismatch");
  const auto n = r.count("record");
  cap.records.resize(n);
  const auto samples = static_cast<Eigen::Index>(c.samples_per_chirp);
  for (auto& rec : cap.records) {
    rec.tx_index = r.get<std::uint32_t>();
    rec.rx_index = r.get<std::uint32_t>();
    if (rec.tx_index >= cap.array.num_tx() || rec.rx_index >= cap.array.num_rx()) {
      throw FormatError("corrupt capture " + path.string() + ": element index out of range");
    }
    rec.cycle = r.get<std::uint64_t>();
    rec.time = r.get<double>();
    rec.pose = get_pose(r);
    rec.samples.resize(samples);
    for (Eigen::Index i = 0; i < samples; ++i) {
      const float re = r.get<float>();
      const float im = r.get<float>();
      rec.samples[i] = {re, im};
    }
  }
  r.expect_end();
  return cap;
}

void write_image_stack(const SarImageStack& stack, const std::filesystem::path& path) {
  Writer w(path);
  w.bytes(kImageMagic, 8);
  w.put(kImageStackVersion);
  put_grid(w, stack.grid);
  put_frame(w, stack.frame);
  w.put(stack.wavelength);
  w.put(stack.aperture_length);
  put_array(w, stack.array);
  w.put<std::uint64_t>(stack.array.num_vx());
  for (const auto& vx : stack.array.vx_elements) {
    w.put<std::uint64_t>(vx.tx_index);
    w.put<std::uint64_t>(vx.rx_index);
    w.vec3(vx.phase_center);
  }
  for (const auto& img : stack.images) {
    for (Eigen::Index r = 0; r < img.rows(); ++r) {
      for (Eigen::Index c = 0; c < img.cols(); ++c) {
        w.put(static_cast<float>(img(r, c).real()));
        w.put(static_cast<float>(img(r, c).imag()));
      }
    }
  }
  w.finish();
}

SarImageStack read_image_stack(const std::filesystem::path& path) {
  Reader r(path);
  r.expect_magic(kImageMagic, kImageStackVersion);
  SarImageStack s;
  s.grid = get_grid(r);
  s.frame = get_frame(r);
  s.wavelength = r.get<double>();
  s.aperture_length = r.get<double>();
  s.array = get_array(r);
  const auto nvx = r.count("vx");
  if (nvx != s.array.num_vx()) throw FormatError("corrupt image stack " + path.string() + ": VX count mismatch");
  for (std::size_t i = 0; i < nvx; ++i) {
    const auto tx = r.get<std::uint64_t>();
    const auto rx = r.get<std::uint64_t>();
    r.vec3();
    if (tx != s.array.vx_elements[i].tx_index || rx != s.array.vx_elements[i].rx_index) {
      throw FormatError("corrupt image stack " + path.string() + ": VX list mismatch");
    }
  }
  for (std::size_t i = 0; i < nvx; ++i) {
    ComplexImaged img(static_cast<Eigen::Index>(s.grid.num_v), static_cast<Eigen::Index>(s.grid.num_u));
    for (Eigen::Index row = 0; row < img.rows(); ++row) {
      for (Eigen::Index c = 0; c < img.cols(); ++c) {
        const float re = r.get<float>();
        const float im = r.get<float>();
        img(row, c) = {re, im};
      }
    }
    s.images.push_back(std::move(img));
  }
  r.expect_end();
  return s;
}

void write_elevation_map(const ElevationMap& map, const std::filesystem::path& path) {
  Writer w(path);
  w.bytes(kElevationMagic, 8);
  w.put(kElevationMapVersion);
  put_grid(w, map.grid);
  put_frame(w, map.frame);
  w.put(map.wavelength);
  w.put(map.baseline);
  put_plane(w, map.elevation);
  put_plane(w, map.phase_delay);
  put_plane(w, map.circular_variance);
  put_plane(w, map.magnitude);
  put_plane(w, map.snr_db);
  w.finish();
}

ElevationMap read_elevation_map(const std::filesystem::path& path) {
  Reader r(path);
  r.expect_magic(kElevationMagic, kElevationMapVersion);
  ElevationMap m;
  m.grid = get_grid(r);
  m.frame = get_frame(r);
  m.wavelength = r.get<double>();
  m.baseline = r.get<double>();
  m.elevation = get_plane(r, m.grid);
  m.phase_delay = get_plane(r, m.grid);
  m.circular_variance = get_plane(r, m.grid);
  m.magnitude = get_plane(r, m.grid);
  m.snr_db = get_plane(r, m.grid);
  r.expect_end();
  return m;
}

void write_log_magnitude_pgm(const ComplexImaged& image, const std::filesystem::path& path,
                             double dynamic_range_db) {
  const Eigen::MatrixXd mag = image.cwiseAbs();
  const double peak = mag.size() ? mag.maxCoeff() : 0.0;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string());
  out << "P5\n" << image.cols() << ' ' << image.rows() << "\n65535\n";
  for (Eigen::Index r = 0; r < mag.rows(); ++r) {
    for (Eigen::Index c = 0; c < mag.cols(); ++c) {
      double level = 0.0;
      if (peak > 0.0 && mag(r, c) > 0.0) {
        const double db = 20.0 * std::log10(mag(r, c) / peak);
        level = std::clamp((db + dynamic_range_db) / dynamic_range_db, 0.0, 1.0);
      }
      const auto v = static_cast<std::uint16_t>(std::lround(level * 65535.0));
      const char bytes[2] = {static_cast<char>(v >> 8), static_cast<char>(v & 0xff)};
      out.write(bytes, 2);
    }
  }
  if (!out) throw FormatError("write failed for " + path.string());
}

std::map<std::string, ConfigEntry> parse_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::map<std::string, ConfigEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << path.string() << ":" << lineno << ": expected 'key = value'";
      throw ConfigError(os.str());
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty() || value.empty()) {
      std::ostringstream os;
      os << path.string() << ":" << lineno << ": empty key or value";
      throw ConfigError(os.str());
    }
    if (out.count(key)) {
      std::ostringstream os;
      os << path.string() << ":" << lineno << ": duplicate key '" << key << "'";
      throw ConfigError(os.str());
    }
    out[key] = {value, lineno};
  }
  return out;
}

std::vector<Eigen::Vector3d> parse_vector_list(const std::string& text) {
  const std::string t = trim(text);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']') {
    throw ConfigError("vector list must look like [(x,y,z), ...]");
  }
  std::vector<Eigen::Vector3d> out;
  std::size_t pos = 1;
  while (true) {
    const auto open = t.find('(', pos);
    if (open == std::string::npos) break;
    const auto close = t.find(')', open);
    if (close == std::string::npos) throw ConfigError("vector list: unbalanced parenthesis");
    const auto parts = split_csv(t.substr(open + 1, close - open - 1));
    if (parts.size() != 3) throw ConfigError("vector list: each entry needs three components");
    Eigen::Vector3d v;
    for (int i = 0; i < 3; ++i) {
      std::size_t used = 0;
      try {
        v[i] = std::stod(parts[static_cast<std::size_t>(i)], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != parts[static_cast<std::size_t>(i)].size()) {
        throw ConfigError("vector list: bad number '" + parts[static_cast<std::size_t>(i)] + "'");
      }
    }
    out.push_back(v);
    pos = close + 1;
  }
  return out;
}

Scene read_scene_csv(const std::filesystem::path& path) {
  Scene scene;
  for (const auto& [line, v] : read_numeric_csv(path, {"x", "y", "z", "amplitude"})) {
    if (!(v[3] >= 0.0) || !std::isfinite(v[0]) || !std::isfinite(v[1]) || !std::isfinite(v[2])) {
      std::ostringstream os;
      os << path.string() << ":" << line << ": target needs finite position and amplitude >= 0";
      throw ConfigError(os.str());
    }
    scene.push_back({{v[0], v[1], v[2]}, v[3]});
  }
  if (scene.empty()) throw ConfigError(path.string() + ": scene file has no targets");
  return scene;
}

void write_scene_csv(const Scene& scene, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path.string());
  out << "x,y,z,amplitude\n" << std::setprecision(17);
  for (const auto& t : scene) {
    out << t.position.x() << ',' << t.position.y() << ',' << t.position.z() << ',' << t.amplitude << '\n';
  }
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::vector<Pose> poses;
  for (const auto& [line, v] : read_numeric_csv(path, {"t", "x", "y", "z", "qw", "qx", "qy", "qz"})) {
    Eigen::Quaterniond q(v[4], v[5], v[6], v[7]);
    if (!(q.norm() > 1e-12)) {
      std::ostringstream os;
      os << path.string() << ":" << line << ": zero quaternion";
      throw ConfigError(os.str());
    }
    Pose p;
    p.time = v[0];
    p.position = {v[1], v[2], v[3]};
    p.orientation = q.normalized();
    if (!poses.empty() && !(p.time > poses.back().time)) {
      std::ostringstream os;
      os << path.string() << ":" << line << ": times must be strictly increasing";
      throw ConfigError(os.str());
    }
    poses.push_back(p);
  }
  if (poses.empty()) throw ConfigError(path.string() + ": trajectory has no poses");
  return Trajectory(std::move(poses));
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path.string());
  out << "t,x,y,z,qw,qx,qy,qz\n" << std::setprecision(17);
  for (const auto& p : traj.poses()) {
    out << p.time << ',' << p.position.x() << ',' << p.position.y() << ',' << p.position.z() << ','
        << p.orientation.w() << ',' << p.orientation.x() << ',' << p.orientation.y() << ','
        << p.orientation.z() << '\n';
  }
}

}  // namespace insar

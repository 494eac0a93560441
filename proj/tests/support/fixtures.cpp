#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include <Eigen/Geometry>

#include "lidarsim/kitti_io.hpp"

namespace lidarsim::testing {

namespace fs = std::filesystem;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

SyntheticScan make_scan(const ScanSpec& spec, Rng& rng) {
  const PolarGridConfig& g = spec.grid;
  const std::vector<double> table = default_elevation_table(std::max(spec.lines, 1));
  // Columns ordered by descending center azimuth in (-pi, pi].
  std::vector<std::pair<double, int>> sweep;
  for (int col = 0; col < g.full_cols; ++col) {
    double az = std::remainder(g.column_center(col), 2.0 * std::numbers::pi);
    if (az <= -std::numbers::pi) az += 2.0 * std::numbers::pi;
    sweep.emplace_back(az, col);
  }
  std::sort(sweep.begin(), sweep.end(), std::greater<>());
  SyntheticScan scan;
  for (int line = 0; line < spec.lines; ++line) {
    const double el = table[static_cast<std::size_t>(line)];
    for (const auto& [az, col] : sweep) {
      if (std::numbers::pi - std::abs(az) < spec.seam_gap) continue;
      if (spec.dropout > 0.0 && uniform(rng, 0.0, 1.0) < spec.dropout) continue;
      const double r = uniform(rng, spec.min_range, spec.max_range);
      float intensity = static_cast<float>(uniform(rng, 0.0, 1.0));
      if (spec.zero_intensity > 0.0 && uniform(rng, 0.0, 1.0) < spec.zero_intensity) {
        intensity = 0.0F;
      }
      scan.cloud.points.push_back(Point{static_cast<float>(r * std::cos(el) * std::cos(az)),
                                        static_cast<float>(r * std::cos(el) * std::sin(az)),
                                        static_cast<float>(r * std::sin(el)), intensity});
      scan.row.push_back(line);
      scan.col.push_back(col);
      scan.range.push_back(r);
    }
  }
  return scan;
}

PointCloud random_cloud(Rng& rng, std::size_t n) {
  PointCloud cloud;
  cloud.points.reserve(n);
  std::uniform_real_distribution<float> coord(-120.0F, 120.0F);
  std::uniform_real_distribution<float> unit(0.0F, 1.0F);
  for (std::size_t i = 0; i < n; ++i) {
    cloud.points.push_back(Point{coord(rng), coord(rng), coord(rng), unit(rng)});
  }
  return cloud;
}

fs::path test_data_dir() { return fs::path(LIDARSIM_TEST_DATA_DIR); }

CalibrationSet kitti_calibration() {
  return kitti::parse_calib(read_text_file(test_data_dir() / "kitti_calib_000000.txt"));
}

CalibrationSet random_calibration(Rng& rng) {
  CalibrationSet calib;
  const double f = uniform(rng, 400.0, 1200.0);
  calib.cam_projection << f, 0.0, uniform(rng, 500.0, 700.0), uniform(rng, -400.0, 50.0),  //
      0.0, f * uniform(rng, 0.98, 1.02), uniform(rng, 150.0, 200.0), uniform(rng, -1.0, 1.0),
      0.0, 0.0, 1.0, uniform(rng, -0.01, 0.01);
  auto small_rotation = [&](double max_angle) {
    const Eigen::Vector3d axis =
        Eigen::Vector3d(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1))
            .normalized();
    return Eigen::AngleAxisd(uniform(rng, -max_angle, max_angle), axis).toRotationMatrix();
  };
  calib.rectification = small_rotation(0.02);
  calib.lidar_to_cam.leftCols<3>() = small_rotation(0.05) * lidar_to_camera_axes();
  calib.lidar_to_cam.col(3) =
      Eigen::Vector3d(uniform(rng, -0.1, 0.1), uniform(rng, -0.2, 0.0), uniform(rng, -0.4, 0.0));
  return calib;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  path_ = fs::temp_directory_path() /
          (tag + "_" + std::to_string(stamp) + "_" + std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::vector<std::pair<std::string, std::string>> snapshot_tree(const fs::path& root) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream body;
    body << in.rdbuf();
    files.emplace_back(fs::relative(entry.path(), root).generic_string(), body.str());
  }
  std::sort(files.begin(), files.end());
  return files;
}

IdImage random_id_image(Rng& rng, int width, int height, int max_id, double block_bias) {
  IdImage img(width, height);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      // Copying a neighbor most of the time produces blobs rather than noise.
      if (c > 0 && uniform(rng, 0.0, 1.0) < block_bias) {
        img.at(r, c) = img.at(r, c - 1);
      } else if (r > 0 && uniform(rng, 0.0, 1.0) < block_bias) {
        img.at(r, c) = img.at(r - 1, c);
      } else {
        img.at(r, c) = uniform_int(rng, 0, max_id);
      }
    }
  }
  return img;
}

}  // namespace lidarsim::testing

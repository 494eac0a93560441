#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "lidarsim/calibration.hpp"
#include "lidarsim/image.hpp"
#include "lidarsim/point_cloud.hpp"
#include "lidarsim/polar_grid.hpp"

namespace lidarsim::testing {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);
int uniform_int(Rng& rng, int lo, int hi);

/// Scan with one point per (line, column), swept like a rotating sensor:
/// every line runs clockwise from just below +pi to just above -pi.
struct ScanSpec {
  int lines = 64;
  PolarGridConfig grid;
  /// Columns whose center lies within this angle of the +-pi seam are left out.
  double seam_gap = 0.0;
  /// Probability that any other column is left out.
  double dropout = 0.0;
  double min_range = 2.0;
  double max_range = 80.0;
  /// Probability of an exact-zero intensity.
  double zero_intensity = 0.0;
};

struct SyntheticScan {
  PointCloud cloud;
  std::vector<int> row;
  std::vector<int> col;
  std::vector<double> range;
};

SyntheticScan make_scan(const ScanSpec& spec, Rng& rng);

PointCloud random_cloud(Rng& rng, std::size_t n);

/// Calibration read from tests/data.
CalibrationSet kitti_calibration();
std::filesystem::path test_data_dir();

/// KITTI-like calibration with random focal length, principal point, small
/// rectification and mounting perturbations.
CalibrationSet random_calibration(Rng& rng);

/// Removes itself on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "lidarsim");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

/// Every regular file under `root`, relative path -> contents.
std::vector<std::pair<std::string, std::string>> snapshot_tree(const std::filesystem::path& root);

IdImage random_id_image(Rng& rng, int width, int height, int max_id, double block_bias);

}  // namespace lidarsim::testing

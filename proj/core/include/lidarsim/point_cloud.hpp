#pragma once

#include <cstddef>
#include <vector>

namespace lidarsim {

struct Point {
  float x = 0.0F;
  float y = 0.0F;
  float z = 0.0F;
  /// Reflectivity in [0,1].
  float intensity = 0.0F;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Points in sensor order. The order carries the scan-line structure of
/// real Velodyne files and is preserved by every reader and writer.
struct PointCloud {
  std::vector<Point> points;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }

  friend bool operator==(const PointCloud&, const PointCloud&) = default;
};

/// A cloud whose points carry the index of the beam line they belong to.
struct LineTaggedCloud {
  PointCloud cloud;
  std::vector<int> line;
};

}  // namespace lidarsim

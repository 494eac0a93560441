#include "lidarsim/vkitti_tables.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "lidarsim/error.hpp"
#include "text_util.hpp"

namespace lidarsim::vkitti {

Table Table::parse(std::string_view text) {
  Table table;
  const auto lines = detail::split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto tokens = detail::split_whitespace(lines[n]);
    if (tokens.empty()) continue;
    std::vector<std::string> row(tokens.begin(), tokens.end());
    if (table.columns_.empty()) {
      table.columns_ = std::move(row);
      continue;
    }
    if (row.size() != table.columns_.size()) {
      throw LineParseError(n + 1, "expected " + std::to_string(table.columns_.size()) +
                                      " columns, found " + std::to_string(row.size()));
    }
    table.rows_.push_back(std::move(row));
    table.line_numbers_.push_back(n + 1);
  }
  return table;
}

std::optional<std::size_t> Table::find_column(std::string_view name) const {
  const auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - columns_.begin());
}

std::size_t Table::column(std::string_view name) const {
  if (const auto idx = find_column(name)) return *idx;
  throw MissingFieldError(std::string(name));
}

double Table::number(std::size_t row, std::size_t col) const {
  const auto v = detail::parse_double(rows_[row][col]);
  if (!v) {
    throw LineParseError(line_numbers_[row],
                         "column '" + columns_[col] + "' is not numeric: '" + rows_[row][col] + "'");
  }
  return *v;
}

namespace {

using Key = std::tuple<int, int>;  // frame, track

bool camera_matches(const Table& t, std::size_t row, int camera_id) {
  const auto col = t.find_column("cameraID");
  return !col || static_cast<int>(t.number(row, *col)) == camera_id;
}

std::size_t find_frame_row(const Table& t, int frame, int camera_id, const char* what) {
  const std::size_t frame_col = t.column("frame");
  for (std::size_t r = 0; r < t.row_count(); ++r) {
    if (static_cast<int>(t.number(r, frame_col)) == frame && camera_matches(t, r, camera_id)) {
      return r;
    }
  }
  throw Error(ErrorCode::kMissingField, std::string(what) + " has no row for frame " +
                                            std::to_string(frame) + " camera " +
                                            std::to_string(camera_id));
}

}  // namespace

std::vector<Object> join_objects(const Table& bbox, const Table& pose, const Table* info,
                                 int camera_id) {
  const std::size_t b_frame = bbox.column("frame");
  const std::size_t b_track = bbox.column("trackID");
  const std::size_t b_left = bbox.column("left");
  const std::size_t b_right = bbox.column("right");
  const std::size_t b_top = bbox.column("top");
  const std::size_t b_bottom = bbox.column("bottom");
  const std::size_t b_trunc = bbox.column("truncation_ratio");
  const std::size_t b_occ = bbox.column("occupancy_ratio");

  const std::size_t p_frame = pose.column("frame");
  const std::size_t p_track = pose.column("trackID");
  const std::size_t p_w = pose.column("width");
  const std::size_t p_h = pose.column("height");
  const std::size_t p_l = pose.column("length");
  const std::size_t p_x = pose.column("camera_space_X");
  const std::size_t p_y = pose.column("camera_space_Y");
  const std::size_t p_z = pose.column("camera_space_Z");
  const std::size_t p_ry = pose.column("rotation_camera_y");
  const auto p_alpha = pose.find_column("alpha");

  std::map<int, std::string> labels;
  if (info != nullptr) {
    const std::size_t i_track = info->column("trackID");
    const std::size_t i_label = info->column("label");
    for (std::size_t r = 0; r < info->row_count(); ++r) {
      labels[static_cast<int>(info->number(r, i_track))] = info->cell(r, i_label);
    }
  }

  std::map<Key, std::size_t> pose_rows;
  for (std::size_t r = 0; r < pose.row_count(); ++r) {
    if (!camera_matches(pose, r, camera_id)) continue;
    pose_rows[{static_cast<int>(pose.number(r, p_frame)), static_cast<int>(pose.number(r, p_track))}] = r;
  }

  std::vector<Object> objects;
  for (std::size_t r = 0; r < bbox.row_count(); ++r) {
    if (!camera_matches(bbox, r, camera_id)) continue;
    Object o;
    o.frame = static_cast<int>(bbox.number(r, b_frame));
    o.track_id = static_cast<int>(bbox.number(r, b_track));
    const auto pr = pose_rows.find({o.frame, o.track_id});
    if (pr == pose_rows.end()) continue;
    const std::size_t p = pr->second;
    if (const auto it = labels.find(o.track_id); it != labels.end()) o.label = it->second;
    o.left = bbox.number(r, b_left);
    o.right = bbox.number(r, b_right);
    o.top = bbox.number(r, b_top);
    o.bottom = bbox.number(r, b_bottom);
    o.truncation = bbox.number(r, b_trunc);
    o.occlusion_fraction = std::clamp(1.0 - bbox.number(r, b_occ), 0.0, 1.0);
    o.width = pose.number(p, p_w);
    o.height = pose.number(p, p_h);
    o.length = pose.number(p, p_l);
    o.x = pose.number(p, p_x);
    o.y = pose.number(p, p_y);
    o.z = pose.number(p, p_z);
    o.rotation_y = pose.number(p, p_ry);
    o.alpha = p_alpha ? pose.number(p, *p_alpha) : o.rotation_y - std::atan2(o.x, o.z);
    objects.push_back(std::move(o));
  }
  std::sort(objects.begin(), objects.end(), [](const Object& a, const Object& b) {
    return std::tie(a.frame, a.track_id) < std::tie(b.frame, b.track_id);
  });
  return objects;
}

CameraIntrinsics intrinsics_for(const Table& intrinsic, int frame, int camera_id) {
  const std::size_t r = find_frame_row(intrinsic, frame, camera_id, "intrinsic table");
  CameraIntrinsics k;
  k.fx = intrinsic.number(r, intrinsic.column("K[0,0]"));
  k.fy = intrinsic.number(r, intrinsic.column("K[1,1]"));
  k.cx = intrinsic.number(r, intrinsic.column("K[0,2]"));
  k.cy = intrinsic.number(r, intrinsic.column("K[1,2]"));
  return k;
}

Eigen::Matrix4d extrinsic_for(const Table& extrinsic, int frame, int camera_id) {
  const std::size_t r = find_frame_row(extrinsic, frame, camera_id, "extrinsic table");
  const std::size_t first = extrinsic.find_column("cameraID") ? 2 : 1;
  if (extrinsic.columns().size() != first + 16) {
    throw Error(ErrorCode::kArity, "extrinsic table must carry 16 matrix entries per row");
  }
  Eigen::Matrix4d m;
  for (int i = 0; i < 16; ++i) {
    m(i / 4, i % 4) = extrinsic.number(r, first + static_cast<std::size_t>(i));
  }
  return m;
}

}  // namespace lidarsim::vkitti

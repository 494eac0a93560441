#include "lidarsim/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iterator>
#include <mutex>
#include <sstream>
#include <thread>

#include <Eigen/Core>

#include "json.hpp"
#include "lidarsim/cloud_synthesis.hpp"
#include "lidarsim/frame_io.hpp"
#include "lidarsim/kitti_io.hpp"
#include "lidarsim/metrics.hpp"
#include "lidarsim/png_io.hpp"
#include "lidarsim/polar_grid.hpp"
#include "lidarsim/reprojection.hpp"
#include "lidarsim/vkitti_tables.hpp"
#include "text_util.hpp"

namespace lidarsim {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void require_dir(const fs::path& dir, const char* what) {
  if (dir.empty()) throw Error(ErrorCode::kConfig, std::string(what) + " is not set");
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::kValidation, std::string(what) + " does not exist: " + dir.string());
  }
}

void require_file(const fs::path& file) {
  if (!fs::is_regular_file(file)) {
    throw Error(ErrorCode::kValidation, "missing input: " + file.string());
  }
}

/// Writes next to the destination first so readers never see a partial file.
void write_text_atomically(const fs::path& path, std::string_view text) {
  const fs::path tmp = path.string() + ".tmp";
  write_text_file(tmp, text);
  fs::rename(tmp, path);
}

template <typename T>
Image<T> crop_image(const Image<T>& src, int u0, int v0, int width, int height) {
  if (u0 < 0 || v0 < 0 || u0 + width > src.width() || v0 + height > src.height()) {
    throw Error(ErrorCode::kShape, "depth window does not fit inside the camera image");
  }
  Image<T> out(width, height);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) out.at(r, c) = src.at(v0 + r, u0 + c);
  }
  return out;
}

/// Brings a camera layer to the depth map's window: same size passes
/// through, the full camera size is cropped, anything else is an error.
template <typename T>
Image<T> align_layer(const Image<T>& layer, const CameraFrame& frame, int full_w, int full_h,
                     const char* name) {
  if (layer.width() == frame.width() && layer.height() == frame.height()) return layer;
  if (layer.width() == full_w && layer.height() == full_h) {
    return crop_image(layer, frame.origin_u, frame.origin_v, frame.width(), frame.height());
  }
  throw Error(ErrorCode::kShape, std::string(name) + " matches neither the depth map nor the "
                                                     "camera image");
}

IdImage load_any_id_png(std::span<const std::byte> bytes) {
  const png::Raster raster = png::decode(bytes);
  if (raster.channels >= 3) return kitti::load_color_id_png(bytes);
  return kitti::load_id_png(bytes);
}

std::string split_of(const PipelineConfig& cfg, const std::string& id) {
  return cfg.val_split.count(id) != 0 ? "val" : "train";
}

std::string frame_sidecar(const PipelineConfig& cfg, const std::string& id, const char* source,
                          int origin_u, int origin_v) {
  json meta;
  meta["frame_id"] = id;
  meta["source"] = source;
  meta["config_hash"] = cfg.hash();
  meta["origin_u"] = origin_u;
  meta["origin_v"] = origin_v;
  return meta.dump(2) + "\n";
}

/// Trailing digits of a frame stem, which index the synthetic tables.
int frame_number(const std::string& id) {
  std::size_t start = id.size();
  while (start > 0 && id[start - 1] >= '0' && id[start - 1] <= '9') --start;
  const auto n = detail::parse_int(std::string_view(id).substr(start));
  if (start == id.size() || !n || *n > 1'000'000'000LL) {
    throw Error(ErrorCode::kValidation, "frame id '" + id + "' does not end in a frame number");
  }
  return static_cast<int>(*n);
}

/// Synthetic depth in meters with the renderer's far-plane value cleared, so
/// sky pixels do not turn into points.
DepthImage synthetic_geometry_depth(const DepthImage& depth, double source_max) {
  DepthImage out = depth;
  for (float& d : out.pixels()) {
    if (d >= source_max) d = 0.0F;
  }
  return out;
}

std::uint64_t frame_seed(std::uint64_t seed, const std::string& id) {
  return seed ^ std::stoull(fnv1a_hex(id), nullptr, 16);
}

enum class Status { kProduced, kExcluded, kFailed };

struct Outcome {
  Status status = Status::kFailed;
  ManifestEntry entry;
  std::string message;
  ErrorCode code = ErrorCode::kFrame;
};

/// Runs `work` per frame on the worker pool, then logs in frame order and
/// writes the manifest. Frame errors become manifest errors unless `strict`.
RunReport run_frames(const PipelineConfig& cfg, const std::vector<std::string>& ids,
                     const std::string& kind, const fs::path& manifest_path,
                     const std::function<Outcome(const std::string&)>& work, std::ostream& log) {
  std::vector<Outcome> outcomes(ids.size());
  parallel_for(ids.size(), cfg.jobs, [&](std::size_t i) {
    try {
      outcomes[i] = work(ids[i]);
    } catch (const Error& e) {
      outcomes[i].status = Status::kFailed;
      outcomes[i].message = e.what();
      outcomes[i].code = e.code();
      if (const auto* fe = dynamic_cast<const FrameError*>(&e)) outcomes[i].code = fe->cause();
    } catch (const std::exception& e) {
      outcomes[i].status = Status::kFailed;
      outcomes[i].message = e.what();
      outcomes[i].code = ErrorCode::kIo;
    }
  });

  Manifest manifest;
  manifest.kind = kind;
  manifest.config_hash = cfg.hash();
  RunReport report;
  report.manifest = manifest_path;
  bool strict_failure = false;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    Outcome& o = outcomes[i];
    switch (o.status) {
      case Status::kProduced:
        ++report.produced;
        manifest.frames.push_back(std::move(o.entry));
        break;
      case Status::kExcluded:
        ++report.excluded;
        manifest.excluded.push_back(ids[i]);
        log << "note: " << ids[i] << ": excluded (" << o.message << ")\n";
        break;
      case Status::kFailed:
        ++report.failed;
        manifest.errors[ids[i]] = o.message;
        log << (cfg.strict ? "error: " : "warning: ") << ids[i] << ": " << o.message << "\n";
        if (cfg.strict) strict_failure = true;
        break;
    }
  }
  write_text_atomically(manifest_path, manifest.to_json());
  log << kind << ": " << report.produced << " produced, " << report.excluded << " excluded, "
      << report.failed << " failed; manifest " << manifest_path.string() << "\n";
  if (strict_failure || report.produced + report.excluded == 0) {
    report.exit_code = kExitRuntime;
  }
  return report;
}

struct SyntheticTables {
  vkitti::Table intrinsic;
  std::optional<vkitti::Table> bbox;
  std::optional<vkitti::Table> pose;
  std::optional<vkitti::Table> info;
};

SyntheticTables load_synthetic_tables(const PipelineConfig& cfg, bool with_labels) {
  SyntheticTables tables;
  const fs::path root = cfg.synthetic_root;
  require_file(root / "intrinsic.txt");
  tables.intrinsic = vkitti::Table::parse(read_text_file(root / "intrinsic.txt"));
  if (with_labels) {
    require_file(root / "bbox.txt");
    require_file(root / "pose.txt");
    tables.bbox = vkitti::Table::parse(read_text_file(root / "bbox.txt"));
    tables.pose = vkitti::Table::parse(read_text_file(root / "pose.txt"));
    if (fs::is_regular_file(root / "info.txt")) {
      tables.info = vkitti::Table::parse(read_text_file(root / "info.txt"));
    }
  }
  return tables;
}

void fail_on_disjoint(const std::vector<std::string>& shared, const char* what) {
  if (shared.empty()) throw Error(ErrorCode::kValidation, std::string(what) + " share no frame id");
}

std::vector<std::string> intersect(const std::vector<std::string>& a,
                                   const std::vector<std::string>& b) {
  std::vector<std::string> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

CloudStats aggregate_cloud_stats(const fs::path& dir, const SparsifyConfig& cfg,
                                 std::size_t& files) {
  CloudStats total;
  total.per_line.assign(static_cast<std::size_t>(cfg.n_lines), 0);
  total.intensity_histogram.assign(static_cast<std::size_t>(total.spec.intensity_bins), 0);
  total.range_histogram.assign(static_cast<std::size_t>(total.spec.range_bins), 0);
  files = 0;
  for (const auto& id : list_frame_ids(dir, ".bin")) {
    const PointCloud cloud = kitti::parse_velodyne_bin(read_file(dir / (id + ".bin")));
    const CloudStats s = cloud_stats(cloud, cfg, total.spec);
    total.point_count += s.point_count;
    total.outside_lines += s.outside_lines;
    for (std::size_t i = 0; i < s.per_line.size(); ++i) total.per_line[i] += s.per_line[i];
    for (std::size_t i = 0; i < s.intensity_histogram.size(); ++i) {
      total.intensity_histogram[i] += s.intensity_histogram[i];
    }
    for (std::size_t i = 0; i < s.range_histogram.size(); ++i) {
      total.range_histogram[i] += s.range_histogram[i];
    }
    ++files;
  }
  return total;
}

}  // namespace

int exit_code_for(const Error& error) {
  switch (error.code()) {
    case ErrorCode::kConfig:
    case ErrorCode::kValidation:
      return kExitValidation;
    default:
      return kExitRuntime;
  }
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<std::string> list_frame_ids(const fs::path& dir, std::string_view extension) {
  std::vector<std::string> ids;
  if (!fs::is_directory(dir)) return ids;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    if (p.extension() == extension) ids.push_back(p.stem().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

LabeledFrame load_real_frame(const PipelineConfig& cfg, const std::string& id) {
  const fs::path root = cfg.real_root;
  LabeledFrame frame;
  frame.frame_id = id;
  try {
    frame.scan = kitti::parse_velodyne_bin(read_file(root / "velodyne" / (id + ".bin")));
    const fs::path calib_path = root / "calib" / (id + ".txt");
    if (fs::is_regular_file(calib_path)) frame.calib = kitti::parse_calib(read_text_file(calib_path));

    CameraFrame& cam = frame.camera;
    cam.depth = kitti::load_depth_png(read_file(root / "depth" / (id + ".png")),
                                      cfg.real_depth_meters_per_unit);
    RgbImage rgb;
    const fs::path rgb_path = root / "image_2" / (id + ".png");
    if (fs::is_regular_file(rgb_path)) rgb = kitti::load_rgb_png(read_file(rgb_path));
    const int full_w = rgb.empty() ? cam.depth.width() : rgb.width();
    const int full_h = rgb.empty() ? cam.depth.height() : rgb.height();
    // A completion network's output is the bottom-centered crop of the frame.
    cam.origin_u = cfg.real_depth_origin_u.value_or((full_w - cam.depth.width()) / 2);
    cam.origin_v = cfg.real_depth_origin_v.value_or(full_h - cam.depth.height());

    if (!rgb.empty()) cam.rgb = align_layer(rgb, cam, full_w, full_h, "image_2");
    const fs::path sem_path = root / "semantic" / (id + ".png");
    if (fs::is_regular_file(sem_path)) {
      cam.semantic = align_layer(kitti::load_id_png(read_file(sem_path)), cam, full_w, full_h,
                                 "semantic");
    }
    const fs::path inst_path = root / "instance" / (id + ".png");
    if (fs::is_regular_file(inst_path)) {
      cam.instance = align_layer(load_any_id_png(read_file(inst_path)), cam, full_w, full_h,
                                 "instance");
    }
    cam.validate();
  } catch (const FrameError&) {
    throw;
  } catch (const Error& e) {
    throw FrameError(id, e.code(), e.what());
  }
  return frame;
}

CalibrationSet synthetic_calibration(const PipelineConfig& cfg, const CameraIntrinsics& intrinsics) {
  Eigen::Matrix4d lidar_pose = Eigen::Matrix4d::Identity();
  lidar_pose(0, 3) = cfg.lidar_offset_x;
  lidar_pose(1, 3) = cfg.lidar_offset_y;
  lidar_pose(2, 3) = cfg.lidar_offset_z;
  return reconstruct_calibration(intrinsics, Eigen::Matrix4d::Identity(), lidar_pose);
}

RunReport prepare_real(const PipelineConfig& cfg, std::ostream& log) {
  require_dir(cfg.real_root, "real_root");
  require_dir(cfg.real_root / "velodyne", "real_root/velodyne");
  require_dir(cfg.real_root / "depth", "real_root/depth");
  if (cfg.output_root.empty()) throw Error(ErrorCode::kConfig, "output_root is not set");
  const std::vector<std::string> ids = list_frame_ids(cfg.real_root / "velodyne", ".bin");
  if (ids.empty()) throw Error(ErrorCode::kValidation, "no scans under real_root/velodyne");

  TrainingPairOptions options;
  options.grid = cfg.grid;
  options.projection.occlusion_gap = cfg.occlusion_gap;
  options.projection.elevation_table = cfg.elevation_table();
  options.dilation_radius = cfg.dilation_radius;
  options.dont_care_id = cfg.dont_care_id;
  options.denoise = cfg.denoise;

  const fs::path out = cfg.output_root / "real";
  fs::create_directories(out);
  return run_frames(
      cfg, ids, "real", out / "manifest.json",
      [&](const std::string& id) {
        const LabeledFrame frame = load_real_frame(cfg, id);
        const TrainingPair pair = build_training_pair(frame, options);
        write_projected_frame(out / "inputs" / id, pair.input,
                              frame_sidecar(cfg, id, "real", frame.camera.origin_u,
                                            frame.camera.origin_v));
        write_polar_grid(out / "targets", id, pair.target);
        Outcome o;
        o.status = Status::kProduced;
        o.entry.id = id;
        o.entry.split = split_of(cfg, id);
        o.entry.files = {{"input", "inputs/" + id},
                         {"target_intensity", "targets/" + id + "_intensity.png"},
                         {"target_valid", "targets/" + id + "_valid.png"},
                         {"target_depth", "targets/" + id + "_depth.png"}};
        return o;
      },
      log);
}

RunReport prepare_synth(const PipelineConfig& cfg, std::ostream& log) {
  require_dir(cfg.synthetic_root, "synthetic_root");
  for (const char* sub : {"rgb", "depth", "class", "instance"}) {
    require_dir(cfg.synthetic_root / sub, (std::string("synthetic_root/") + sub).c_str());
  }
  if (cfg.output_root.empty()) throw Error(ErrorCode::kConfig, "output_root is not set");
  const std::vector<std::string> ids = list_frame_ids(cfg.synthetic_root / "depth", ".png");
  if (ids.empty()) throw Error(ErrorCode::kValidation, "no depth maps under synthetic_root/depth");
  for (const auto& id : ids) frame_number(id);

  ClassMapping mapping;
  if (cfg.class_mapping_path.empty()) {
    mapping = ClassMapping::vkitti2_to_kitti(cfg.strict);
  } else {
    require_file(cfg.class_mapping_path);
    mapping = ClassMapping::from_json(read_text_file(cfg.class_mapping_path));
    if (cfg.strict) mapping.default_id.reset();
  }
  const SyntheticTables tables = load_synthetic_tables(cfg, true);
  const std::vector<vkitti::Object> objects = vkitti::join_objects(
      *tables.bbox, *tables.pose, tables.info ? &*tables.info : nullptr, cfg.synth_camera_id);

  const fs::path root = cfg.synthetic_root;
  const fs::path out = cfg.output_root / "synth";
  fs::create_directories(out);
  return run_frames(
      cfg, ids, "synthetic", out / "manifest.json",
      [&](const std::string& id) {
        try {
          const int frame_no = frame_number(id);
          const CalibrationSet calib = synthetic_calibration(
              cfg, vkitti::intrinsics_for(tables.intrinsic, frame_no, cfg.synth_camera_id));

          const std::vector<std::byte> rgb_bytes = read_file(root / "rgb" / (id + ".png"));
          CameraFrame cam;
          cam.rgb = kitti::load_rgb_png(rgb_bytes);
          const DepthImage depth = kitti::load_depth_png(read_file(root / "depth" / (id + ".png")),
                                                         cfg.synth_depth_meters_per_unit);
          cam.depth = scale_synthetic_depth(depth, cfg.synth_source_max, cfg.synth_target_max);
          cam.semantic = map_semantic_classes(
              kitti::load_color_id_png(read_file(root / "class" / (id + ".png"))), mapping);
          cam.instance =
              remap_instances(load_any_id_png(read_file(root / "instance" / (id + ".png"))));
          cam.validate();

          const ProjectedFrame input = downsample_to_grid(cam, cfg.grid);
          write_projected_frame(out / "inputs" / id, input,
                                frame_sidecar(cfg, id, "synthetic", 0, 0));

          const PointCloud dense =
              depth_to_cloud(synthetic_geometry_depth(depth, cfg.synth_source_max), calib);
          const LineTaggedCloud lines = sparsify_to_lines(dense, cfg.sparsify);
          write_file(out / "velodyne" / (id + ".bin"), kitti::write_velodyne_bin(lines.cloud));
          write_text_file(out / "calib" / (id + ".txt"), kitti::write_calib(calib));
          write_file(out / "image_2" / (id + ".png"), rgb_bytes);

          std::vector<ObjectLabel> labels;
          for (const auto& obj : objects) {
            if (obj.frame == frame_no) labels.push_back(label_from_vkitti(obj));
          }
          labels = filter_labels(labels, cfg.max_distance);
          write_text_file(out / "label_2" / (id + ".txt"), kitti::write_labels(labels));

          Outcome o;
          o.entry.id = id;
          o.entry.split = split_of(cfg, id);
          o.entry.files = {{"input", "inputs/" + id},
                           {"velodyne", "velodyne/" + id + ".bin"},
                           {"calib", "calib/" + id + ".txt"},
                           {"image_2", "image_2/" + id + ".png"},
                           {"label_2", "label_2/" + id + ".txt"}};
          if (labels.empty()) {
            o.status = Status::kExcluded;
            o.message = "no labels within " + detail::format_shortest(cfg.max_distance) + " m";
          } else {
            o.status = Status::kProduced;
          }
          return o;
        } catch (const FrameError&) {
          throw;
        } catch (const Error& e) {
          throw FrameError(id, e.code(), e.what());
        }
      },
      log);
}

RunReport synth_cloud(const PipelineConfig& cfg, std::ostream& log) {
  require_dir(cfg.synthetic_root, "synthetic_root");
  require_dir(cfg.synthetic_root / "depth", "synthetic_root/depth");
  require_dir(cfg.intensity_dir, "intensity.dir");
  if (cfg.output_root.empty()) throw Error(ErrorCode::kConfig, "output_root is not set");
  const std::vector<std::string> depth_ids = list_frame_ids(cfg.synthetic_root / "depth", ".png");
  const std::vector<std::string> ids =
      intersect(depth_ids, list_frame_ids(cfg.intensity_dir, ".png"));
  for (const auto& id : depth_ids) {
    if (!std::binary_search(ids.begin(), ids.end(), id)) {
      if (cfg.strict) {
        throw Error(ErrorCode::kValidation, "no intensity map for frame " + id);
      }
      log << "warning: " << id << ": no intensity map, skipped\n";
    }
  }
  fail_on_disjoint(ids, "synthetic depth maps and intensity maps");
  for (const auto& id : ids) frame_number(id);
  const SyntheticTables tables = load_synthetic_tables(cfg, false);

  const std::string variant = "velodyne_" + std::to_string(cfg.sparsify.n_lines) +
                              (cfg.drop_zero ? "_drop" : "");
  const fs::path out = cfg.output_root / "synth_cloud" / variant;
  fs::create_directories(out);
  std::mutex log_mutex;
  return run_frames(
      cfg, ids, "synth_cloud/" + variant, out / "manifest.json",
      [&](const std::string& id) {
        try {
          const CalibrationSet calib = synthetic_calibration(
              cfg, vkitti::intrinsics_for(tables.intrinsic, frame_number(id), cfg.synth_camera_id));
          const DepthImage depth = synthetic_geometry_depth(
              kitti::load_depth_png(read_file(cfg.synthetic_root / "depth" / (id + ".png")),
                                    cfg.synth_depth_meters_per_unit),
              cfg.synth_source_max);
          const IntensityImage intensity =
              decode_intensity_png(read_file(cfg.intensity_dir / (id + ".png")));

          PointCloud cloud =
              assign_intensity(depth_to_cloud(depth, calib), intensity, cfg.placement, calib);
          if (cfg.drop_zero) {
            DropOptions drop;
            drop.threshold = cfg.drop_threshold;
            drop.drop_probability = cfg.drop_probability;
            drop.seed = frame_seed(cfg.seed, id);
            cloud = drop_zero_intensity(cloud, drop);
            if (cloud.points.empty()) {
              const std::lock_guard lock(log_mutex);
              log << "warning: " << id << ": every point was dropped, writing an empty scan\n";
            }
          }
          const LineTaggedCloud lines = sparsify_to_lines(cloud, cfg.sparsify);
          write_file(out / (id + ".bin"), kitti::write_velodyne_bin(lines.cloud));

          Outcome o;
          o.status = Status::kProduced;
          o.entry.id = id;
          o.entry.split = split_of(cfg, id);
          o.entry.files = {{"velodyne", id + ".bin"}};
          return o;
        } catch (const FrameError&) {
          throw;
        } catch (const Error& e) {
          throw FrameError(id, e.code(), e.what());
        }
      },
      log);
}

int run_metrics(const PipelineConfig& cfg, const MetricsRequest& request, std::ostream& out,
                std::ostream& log) {
  json report = json::object();
  bool did_something = false;

  if (request.predictions || request.targets) {
    if (!request.predictions || !request.targets) {
      throw Error(ErrorCode::kConfig, "predictions and targets must be given together");
    }
    require_dir(*request.predictions, "predictions");
    require_dir(*request.targets, "targets");
    std::vector<std::string> target_ids;
    for (const auto& stem : list_frame_ids(*request.targets, ".png")) {
      constexpr std::string_view suffix = "_intensity";
      if (stem.size() > suffix.size() && stem.ends_with(suffix)) {
        target_ids.push_back(stem.substr(0, stem.size() - suffix.size()));
      }
    }
    std::sort(target_ids.begin(), target_ids.end());
    const auto ids = intersect(list_frame_ids(*request.predictions, ".png"), target_ids);
    fail_on_disjoint(ids, "predictions and targets");

    std::vector<ImageError> errors(ids.size());
    parallel_for(ids.size(), cfg.jobs, [&](std::size_t i) {
      const IntensityImage pred =
          decode_intensity_png(read_file(*request.predictions / (ids[i] + ".png")));
      errors[i] = image_error(pred, read_polar_grid(*request.targets, ids[i]));
    });

    json frames = json::object();
    double mae_sum = 0.0;
    double rmse_sum = 0.0;
    double abs_total = 0.0;
    double sq_total = 0.0;
    std::size_t cells = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const ImageError& e = errors[i];
      frames[ids[i]] = {{"mae", e.mae}, {"rmse", e.rmse}, {"count", e.count}};
      mae_sum += e.mae;
      rmse_sum += e.rmse;
      abs_total += e.mae * static_cast<double>(e.count);
      sq_total += e.rmse * e.rmse * static_cast<double>(e.count);
      cells += e.count;
    }
    const double n = static_cast<double>(ids.size());
    report["intensity"] = {
        {"frames", frames},
        {"frame_count", ids.size()},
        {"mean_mae", mae_sum / n},
        {"mean_rmse", rmse_sum / n},
        {"pooled_mae", abs_total / static_cast<double>(cells)},
        {"pooled_rmse", std::sqrt(sq_total / static_cast<double>(cells))},
    };
    did_something = true;
  }

  if (request.features_a || request.features_b) {
    if (!request.features_a || !request.features_b) {
      throw Error(ErrorCode::kConfig, "both feature files are required");
    }
    require_file(*request.features_a);
    require_file(*request.features_b);
    const GaussianSummary a = fit_gaussian(FeatureSet::parse(read_file(*request.features_a)));
    const GaussianSummary b = fit_gaussian(FeatureSet::parse(read_file(*request.features_b)));
    report["frechet_distance"] = frechet_distance(a, b);
    did_something = true;
  }

  for (const auto& [name, dir] : {std::pair{"clouds_a", request.clouds_a},
                                  std::pair{"clouds_b", request.clouds_b}}) {
    if (!dir) continue;
    require_dir(*dir, name);
    std::size_t files = 0;
    const CloudStats stats = aggregate_cloud_stats(*dir, cfg.sparsify, files);
    json entry = json::parse(stats.to_json());
    entry["files"] = files;
    report[name] = entry;
    did_something = true;
  }

  if (!did_something) throw Error(ErrorCode::kConfig, "nothing to measure");
  out << report.dump(2) << "\n";
  log << "metrics: done\n";
  return kExitSuccess;
}

int inspect_frame(const PipelineConfig& cfg, const std::string& id, const fs::path& out_dir,
                  std::ostream& log) {
  require_dir(cfg.real_root, "real_root");
  require_file(cfg.real_root / "velodyne" / (id + ".bin"));
  const LabeledFrame frame = load_real_frame(cfg, id);
  const fs::path dir = out_dir / id;

  const RowAssignment rows = assign_rows(*frame.scan, cfg.grid);
  const PolarGridImage full = rasterize_polar(*frame.scan, rows, cfg.grid);
  const PolarGridImage crop = crop_to_camera_overlap(full, cfg.grid);
  const PolarGridImage denoised = denoise_grid(crop, cfg.denoise);
  write_polar_grid(dir, "full", full);
  write_polar_grid(dir, "crop", crop);
  write_polar_grid(dir, "target", denoised);
  write_text_file(dir / "scan.ply", kitti::write_ply(*frame.scan));
  const std::vector<double> table = cfg.elevation_table();
  write_text_file(dir / "crop_cloud.ply", kitti::write_ply(grid_to_cloud(
                                              crop, cfg.grid, crop_elevation_table(table, cfg.grid))));

  json info;
  info["frame_id"] = id;
  info["points"] = frame.scan->points.size();
  info["rows_detected"] = rows.row.empty() ? 0 : rows.row.back() + 1;
  info["full_valid"] = full.valid_count();
  info["crop_valid"] = crop.valid_count();
  info["depth_origin"] = {frame.camera.origin_u, frame.camera.origin_v};

  if (frame.calib) {
    ProjectionOptions projection;
    projection.occlusion_gap = cfg.occlusion_gap;
    projection.elevation_table = table;
    const ProjectedFrame raw =
        project_camera_to_lidar_grid(frame.camera, *frame.calib, cfg.grid, projection);
    write_projected_frame(dir / "projected_raw", raw,
                          frame_sidecar(cfg, id, "real", frame.camera.origin_u,
                                        frame.camera.origin_v));
    TrainingPairOptions options;
    options.grid = cfg.grid;
    options.projection = projection;
    options.dilation_radius = cfg.dilation_radius;
    options.dont_care_id = cfg.dont_care_id;
    options.denoise = cfg.denoise;
    const TrainingPair pair = build_training_pair(frame, options);
    write_projected_frame(dir / "input", pair.input,
                          frame_sidecar(cfg, id, "real", frame.camera.origin_u,
                                        frame.camera.origin_v));
    std::size_t raw_occluded = 0;
    std::size_t dilated = 0;
    std::size_t covered = 0;
    for (auto v : raw.occlusion_mask.pixels()) raw_occluded += v != 0;
    for (auto v : pair.input.occlusion_mask.pixels()) dilated += v != 0;
    for (auto v : raw.coverage.pixels()) covered += v != 0;
    info["covered_cells"] = covered;
    info["occluded_cells_raw"] = raw_occluded;
    info["occluded_cells_dilated"] = dilated;
  } else {
    log << "warning: " << id << ": no calibration, camera layers not projected\n";
  }
  write_text_file(dir / "summary.json", info.dump(2) + "\n");
  log << "inspect: wrote " << dir.string() << "\n";
  return kExitSuccess;
}

}  // namespace lidarsim

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "lidarsim/dataset_prep.hpp"
#include "lidarsim/error.hpp"
#include "lidarsim/pipeline_config.hpp"

namespace lidarsim {

enum ExitCode : int { kExitSuccess = 0, kExitValidation = 1, kExitRuntime = 2 };

/// kConfig, kValidation and missing inputs are validation failures (1);
/// everything else is a runtime failure (2).
int exit_code_for(const Error& error);

struct RunReport {
  int exit_code = kExitSuccess;
  std::size_t produced = 0;
  std::size_t excluded = 0;
  std::size_t failed = 0;
  std::filesystem::path manifest;
};

/// Runs fn(0..n-1) on up to `jobs` threads. The first exception is rethrown
/// after all workers finish.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

/// Sorted stems of the regular files in `dir` ending in `extension`.
std::vector<std::string> list_frame_ids(const std::filesystem::path& dir,
                                        std::string_view extension);

/// Real frame `id` from cfg.real_root: velodyne/<id>.bin, calib/<id>.txt,
/// depth/<id>.png and, when present, image_2/, semantic/ and instance/.
/// Camera layers larger than the depth map are cropped to it.
LabeledFrame load_real_frame(const PipelineConfig& cfg, const std::string& id);

/// Intrinsics from the synthetic intrinsic table plus the configured LiDAR
/// offset relative to the camera.
CalibrationSet synthetic_calibration(const PipelineConfig& cfg, const CameraIntrinsics& intrinsics);

/// prepare-real: <out>/real/{inputs/<id>/, targets/<id>_*.png, manifest.json}.
/// Succeeds when at least one pair was written.
RunReport prepare_real(const PipelineConfig& cfg, std::ostream& log);

/// prepare-synth: KITTI-style velodyne/, label_2/, calib/, image_2/ plus
/// inputs/<id>/ and manifest.json under <out>/synth. Frames with no label in
/// range stay on disk but are listed as excluded.
RunReport prepare_synth(const PipelineConfig& cfg, std::ostream& log);

/// synth-cloud: depth -> points -> intensity -> optional drop -> lines, into
/// <out>/synth_cloud/velodyne_<lines>[_drop]/<id>.bin.
RunReport synth_cloud(const PipelineConfig& cfg, std::ostream& log);

struct MetricsRequest {
  /// <id>.png predicted intensities vs <id>_{intensity,valid,depth}.png targets.
  std::optional<std::filesystem::path> predictions;
  std::optional<std::filesystem::path> targets;
  std::optional<std::filesystem::path> features_a;
  std::optional<std::filesystem::path> features_b;
  std::optional<std::filesystem::path> clouds_a;
  std::optional<std::filesystem::path> clouds_b;
};

/// Writes a JSON report to `out`. Throws kValidation when predictions and
/// targets share no frame id.
int run_metrics(const PipelineConfig& cfg, const MetricsRequest& request, std::ostream& out,
                std::ostream& log);

/// Dumps every intermediate layer of one real frame into `out_dir`.
int inspect_frame(const PipelineConfig& cfg, const std::string& id,
                  const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace lidarsim

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lidarsim/cloud_synthesis.hpp"
#include "lidarsim/image.hpp"
#include "lidarsim/point_cloud.hpp"
#include "lidarsim/polar_grid.hpp"

namespace lidarsim {

struct GaussianSummary {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;

  /// Throws kShape for mismatched sizes, kNonPsd when the covariance is
  /// asymmetric beyond 1e-9 or has an eigenvalue below -1e-8.
  void validate() const;
};

/// Row-per-sample feature matrix as stored on disk: little-endian uint32
/// count, uint32 dimension, then count*dimension float32 values.
struct FeatureSet {
  std::size_t count = 0;
  std::size_t dimension = 0;
  std::vector<float> values;

  static FeatureSet parse(std::span<const std::byte> bytes);
  std::vector<std::byte> serialize() const;
};

/// Sample mean and unbiased covariance. Throws kInsufficientSamples for fewer
/// than two vectors and kShape for ragged input.
GaussianSummary fit_gaussian(std::span<const Eigen::VectorXd> features);
GaussianSummary fit_gaussian(const FeatureSet& features);

/// Squared Frechet distance between two Gaussians,
///   |mu_a - mu_b|^2 + tr(Ca + Cb - 2 (Ca^1/2 Cb Ca^1/2)^1/2).
double frechet_distance(const GaussianSummary& a, const GaussianSummary& b);

struct ImageError {
  double mae = 0.0;
  double rmse = 0.0;
  std::size_t count = 0;
};

/// Errors over truth.valid cells only. Throws kShape or kEmptyValidSet.
ImageError image_error(const IntensityImage& pred, const PolarGridImage& truth);

struct HistogramSpec {
  int intensity_bins = 10;
  int range_bins = 16;
  /// Ranges at or beyond this land in the last bin.
  double max_range = 80.0;
};

struct CloudStats {
  std::size_t point_count = 0;
  std::vector<std::size_t> per_line;
  /// Points outside the configured elevation span.
  std::size_t outside_lines = 0;
  std::vector<std::size_t> intensity_histogram;
  std::vector<std::size_t> range_histogram;
  HistogramSpec spec;

  std::string to_json() const;
};

CloudStats cloud_stats(const PointCloud& cloud, const SparsifyConfig& cfg,
                       const HistogramSpec& spec = {});

}  // namespace lidarsim

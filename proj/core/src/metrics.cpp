#include "lidarsim/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include <Eigen/Dense>

#include "json.hpp"
#include "lidarsim/error.hpp"

namespace lidarsim {

namespace {

constexpr double kSymmetryTolerance = 1e-9;
constexpr double kEigenTolerance = -1e-8;

std::uint32_t load_le_u32(const std::byte* src) {
  std::uint32_t v = 0;
  std::memcpy(&v, src, 4);
  if constexpr (std::endian::native == std::endian::big) v = __builtin_bswap32(v);
  return v;
}

void store_le_u32(std::uint32_t v, std::byte* dst) {
  if constexpr (std::endian::native == std::endian::big) v = __builtin_bswap32(v);
  std::memcpy(dst, &v, 4);
}

// Eigen-decomposes a symmetric matrix, rejecting eigenvalues below tolerance.
Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> psd_eigen(const Eigen::MatrixXd& m,
                                                        const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kNonPsd, std::string(what) + ": eigendecomposition failed");
  }
  if (m.rows() > 0 && solver.eigenvalues().minCoeff() < kEigenTolerance) {
    throw Error(ErrorCode::kNonPsd, std::string(what) + " has a negative eigenvalue");
  }
  return solver;
}

void check_shape_and_symmetry(const GaussianSummary& g) {
  if (g.covariance.rows() != g.mean.size() || g.covariance.cols() != g.mean.size()) {
    throw Error(ErrorCode::kShape, "covariance size does not match the mean");
  }
  if (g.mean.size() > 0 &&
      (g.covariance - g.covariance.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance) {
    throw Error(ErrorCode::kNonPsd, "covariance is not symmetric");
  }
}

}  // namespace

void GaussianSummary::validate() const {
  check_shape_and_symmetry(*this);
  psd_eigen(covariance, "covariance");
}

FeatureSet FeatureSet::parse(std::span<const std::byte> bytes) {
  if (bytes.size() < 8) throw Error(ErrorCode::kMalformedFile, "feature file header truncated");
  FeatureSet set;
  set.count = load_le_u32(bytes.data());
  set.dimension = load_le_u32(bytes.data() + 4);
  const std::size_t n = set.count * set.dimension;
  if (bytes.size() != 8 + n * 4) {
    throw Error(ErrorCode::kMalformedFile, "feature file size does not match its header");
  }
  set.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    set.values[i] = std::bit_cast<float>(load_le_u32(bytes.data() + 8 + 4 * i));
  }
  return set;
}

std::vector<std::byte> FeatureSet::serialize() const {
  if (values.size() != count * dimension) {
    throw Error(ErrorCode::kShape, "feature values do not match count x dimension");
  }
  std::vector<std::byte> out(8 + values.size() * 4);
  store_le_u32(static_cast<std::uint32_t>(count), out.data());
  store_le_u32(static_cast<std::uint32_t>(dimension), out.data() + 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    store_le_u32(std::bit_cast<std::uint32_t>(values[i]), out.data() + 8 + 4 * i);
  }
  return out;
}

GaussianSummary fit_gaussian(std::span<const Eigen::VectorXd> features) {
  if (features.size() < 2) {
    throw Error(ErrorCode::kInsufficientSamples, "need at least two feature vectors");
  }
  const Eigen::Index dim = features.front().size();
  for (const auto& f : features) {
    if (f.size() != dim) throw Error(ErrorCode::kShape, "feature vectors differ in dimension");
  }
  GaussianSummary g;
  g.mean = Eigen::VectorXd::Zero(dim);
  for (const auto& f : features) g.mean += f;
  g.mean /= static_cast<double>(features.size());
  g.covariance = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& f : features) {
    const Eigen::VectorXd centered = f - g.mean;
    g.covariance.noalias() += centered * centered.transpose();
  }
  g.covariance /= static_cast<double>(features.size() - 1);
  g.covariance = 0.5 * (g.covariance + g.covariance.transpose()).eval();
  return g;
}

GaussianSummary fit_gaussian(const FeatureSet& features) {
  std::vector<Eigen::VectorXd> rows;
  rows.reserve(features.count);
  for (std::size_t i = 0; i < features.count; ++i) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(features.dimension));
    for (std::size_t d = 0; d < features.dimension; ++d) {
      v(static_cast<Eigen::Index>(d)) = features.values[i * features.dimension + d];
    }
    rows.push_back(std::move(v));
  }
  return fit_gaussian(rows);
}

double frechet_distance(const GaussianSummary& a, const GaussianSummary& b) {
  if (a.mean.size() != b.mean.size()) {
    throw Error(ErrorCode::kShape, "Gaussian summaries differ in dimension");
  }
  check_shape_and_symmetry(a);
  check_shape_and_symmetry(b);
  psd_eigen(b.covariance, "covariance b");

  const auto eig_a = psd_eigen(a.covariance, "covariance a");
  const Eigen::VectorXd root_vals = eig_a.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd root_a =
      eig_a.eigenvectors() * root_vals.asDiagonal() * eig_a.eigenvectors().transpose();

  Eigen::MatrixXd inner = root_a * b.covariance * root_a;
  inner = 0.5 * (inner + inner.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_inner(inner, Eigen::EigenvaluesOnly);
  if (eig_inner.info() != Eigen::Success) {
    throw Error(ErrorCode::kNonPsd, "eigendecomposition of the covariance product failed");
  }
  const double trace_root = eig_inner.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();

  const double mean_term = (a.mean - b.mean).squaredNorm();
  const double d = mean_term + a.covariance.trace() + b.covariance.trace() - 2.0 * trace_root;
  return std::max(d, 0.0);
}

ImageError image_error(const IntensityImage& pred, const PolarGridImage& truth) {
  if (pred.width() != truth.cols() || pred.height() != truth.rows()) {
    throw Error(ErrorCode::kShape, "prediction and truth differ in size");
  }
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (truth.valid.pixels()[i] == 0) continue;
    const double diff =
        static_cast<double>(pred.pixels()[i]) - static_cast<double>(truth.intensity.pixels()[i]);
    abs_sum += std::abs(diff);
    sq_sum += diff * diff;
    ++n;
  }
  if (n == 0) throw Error(ErrorCode::kEmptyValidSet, "truth has no valid cell");
  return ImageError{abs_sum / static_cast<double>(n), std::sqrt(sq_sum / static_cast<double>(n)), n};
}

CloudStats cloud_stats(const PointCloud& cloud, const SparsifyConfig& cfg,
                       const HistogramSpec& spec) {
  cfg.validate();
  if (spec.intensity_bins < 1 || spec.range_bins < 1 || !(spec.max_range > 0.0)) {
    throw Error(ErrorCode::kConfig, "histogram bins and max_range must be positive");
  }
  CloudStats stats;
  stats.spec = spec;
  stats.point_count = cloud.size();
  stats.per_line.assign(static_cast<std::size_t>(cfg.n_lines), 0);
  stats.intensity_histogram.assign(static_cast<std::size_t>(spec.intensity_bins), 0);
  stats.range_histogram.assign(static_cast<std::size_t>(spec.range_bins), 0);
  for (const Point& p : cloud.points) {
    const int line = cfg.line_for(elevation_of(p));
    if (line < 0) {
      ++stats.outside_lines;
    } else {
      ++stats.per_line[static_cast<std::size_t>(line)];
    }
    const double intensity = std::clamp(static_cast<double>(p.intensity), 0.0, 1.0);
    const int ib = std::min(static_cast<int>(intensity * spec.intensity_bins), spec.intensity_bins - 1);
    ++stats.intensity_histogram[static_cast<std::size_t>(ib)];
    const double range = std::sqrt(static_cast<double>(p.x) * p.x + static_cast<double>(p.y) * p.y +
                                   static_cast<double>(p.z) * p.z);
    const int rb = std::min(static_cast<int>(range / spec.max_range * spec.range_bins),
                            spec.range_bins - 1);
    ++stats.range_histogram[static_cast<std::size_t>(rb)];
  }
  return stats;
}

std::string CloudStats::to_json() const {
  nlohmann::json doc;
  doc["point_count"] = point_count;
  doc["per_line"] = per_line;
  doc["outside_lines"] = outside_lines;
  doc["intensity_histogram"] = {{"bins", spec.intensity_bins}, {"counts", intensity_histogram}};
  doc["range_histogram"] = {
      {"bins", spec.range_bins}, {"max_range", spec.max_range}, {"counts", range_histogram}};
  return doc.dump(2);
}

}  // namespace lidarsim

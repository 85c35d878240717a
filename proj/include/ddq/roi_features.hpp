// RoIAlign over synthetic feature maps, the multi-level (flexible receptive
// field) variant, and query/RoI feature fusion.
#pragma once

#include <Eigen/Dense>

#include <map>
#include <span>

#include "ddq/dense_queries.hpp"
#include "ddq/geometry.hpp"

namespace ddq {

/// C-channel grid at one pyramid level. Row (y * width + x) of `data` holds
/// the feature vector of cell (y, x).
struct FeatureMap {
  int level = kMinLevel;
  int height = 0;
  int width = 0;
  Eigen::MatrixXd data;

  FeatureMap() = default;
  FeatureMap(int level, int height, int width, int channels);

  int stride() const { return 1 << level; }
  Eigen::Index channels() const { return data.cols(); }
  auto cell(int y, int x) { return data.row(static_cast<Eigen::Index>(y) * width + x); }
  auto cell(int y, int x) const { return data.row(static_cast<Eigen::Index>(y) * width + x); }

  void validate() const;
};

struct OutputSize {
  int height = 7;
  int width = 7;
};

/// Pooled features: row (ph * out.width + pw) holds bin (ph, pw).
struct RoiFeatures {
  OutputSize size;
  Eigen::MatrixXd values;
};

/// Bilinear sample at continuous cell coordinates (cell centers at integers),
/// with coordinates clamped to the map border.
Eigen::RowVectorXd bilinear_sample(const FeatureMap& fm, double y, double x);

/// Aligned RoIAlign: box corners are divided by the stride and shifted by
/// half a cell; each bin averages samples_per_bin^2 regularly placed
/// bilinear samples.
RoiFeatures roi_align(const FeatureMap& fm, const Boxd& box, OutputSize out = {},
                      int samples_per_bin = 2);

/// clamp(floor(4 + log2(sqrt(w * h) / 224)), 3, 7).
int assign_level(const Boxd& box);

using FeaturePyramidMaps = std::map<int, FeatureMap>;

/// RoIAlign at assign_level(box) and its neighbors within `radius` levels
/// (clamped to P3-P7), fused by channel-wise mean.
RoiFeatures frf_roi_align(const FeaturePyramidMaps& maps, const Boxd& box, OutputSize out = {},
                          int samples_per_bin = 2, int radius = 1);

/// Average-pools `roi` to one C-vector, appends it to `query` and applies the
/// d x (d + C) projection, returning a d-vector.
Eigen::VectorXd qde_fuse(const Eigen::VectorXd& query, const RoiFeatures& roi,
                         const Eigen::MatrixXd& projection);

}  // namespace ddq

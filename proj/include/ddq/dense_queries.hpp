// Dense query prior over a P3-P7 feature pyramid.
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ddq/geometry.hpp"

namespace ddq {

inline constexpr int kMinLevel = 3;
inline constexpr int kMaxLevel = 7;
inline constexpr int kNumLevels = kMaxLevel - kMinLevel + 1;

struct PyramidLevel {
  int level = 0;
  int stride = 0;
  int grid_w = 0;
  int grid_h = 0;
  std::size_t offset = 0;  // first flat point index of this level

  std::size_t size() const { return static_cast<std::size_t>(grid_w) * grid_h; }
};

/// Where a query came from: pyramid level and row-major grid index.
struct QueryOrigin {
  int level = 0;
  std::size_t index = 0;

  friend bool operator==(const QueryOrigin&, const QueryOrigin&) = default;
};

class FeaturePyramid {
 public:
  FeaturePyramid(int image_w, int image_h);

  int image_w() const { return image_w_; }
  int image_h() const { return image_h_; }
  ImageSize image_size() const { return {double(image_w_), double(image_h_)}; }
  const std::vector<PyramidLevel>& levels() const { return levels_; }
  const PyramidLevel& level(int l) const;

  std::size_t num_points() const { return num_points_; }

  /// Pixel position of grid cell (row, col) at level l.
  Eigen::Vector2d point(int l, int row, int col) const;
  /// Pixel position of a flat point index (level-major, row-major inside a level).
  Eigen::Vector2d point(std::size_t flat) const;
  /// All point positions, one row per flat index.
  const Eigen::Matrix<double, Eigen::Dynamic, 2>& points() const { return points_; }

  QueryOrigin origin(std::size_t flat) const;
  std::size_t flat_index(const QueryOrigin& o) const;

 private:
  int image_w_;
  int image_h_;
  std::vector<PyramidLevel> levels_;
  std::size_t num_points_ = 0;
  Eigen::Matrix<double, Eigen::Dynamic, 2> points_;
};

FeaturePyramid build_pyramid(int image_w, int image_h);

/// Total number of dense queries (sum of grid areas over P3-P7).
std::size_t count_queries(const FeaturePyramid& p);

using OffsetMatrix = Eigen::Matrix<double, Eigen::Dynamic, 4>;

/// Decodes per-point (left, top, right, bottom) pixel distances into boxes
/// clipped to the image.
std::vector<Boxd> decode_boxes(const FeaturePyramid& p, const OffsetMatrix& offsets);

/// Aligned boxes, scores, feature rows and origin tags.
struct QuerySet {
  std::vector<Boxd> boxes;
  std::vector<double> scores;
  Eigen::MatrixXd features;  // one row per query; may have zero columns
  std::vector<QueryOrigin> origins;
  std::string feature_source = "none";

  std::size_t size() const { return boxes.size(); }
  Eigen::Index feature_dim() const { return features.cols(); }
  BoxList<double> box_list() const { return {boxes, scores}; }

  /// Throws ValidationError if the parallel sequences disagree or scores
  /// leave [0, 1].
  void validate() const;

  /// Queries at the given indices, in that order.
  QuerySet select(std::span<const std::size_t> indices) const;
};

QuerySet make_query_set(const FeaturePyramid& p, std::span<const double> scores,
                        const OffsetMatrix& offsets, const Eigen::MatrixXd& features);

}  // namespace ddq

#include "ddq/dense_queries.hpp"

#include <algorithm>
#include <string>

namespace ddq {

namespace {

int ceil_div(int a, int b) { return (a + b - 1) / b; }

}  // namespace

FeaturePyramid::FeaturePyramid(int image_w, int image_h) : image_w_(image_w), image_h_(image_h) {
  if (image_w < 1 || image_h < 1) {
    throw ValidationError("build_pyramid: image size must be positive, got " +
                          std::to_string(image_w) + "x" + std::to_string(image_h));
  }
  for (int l = kMinLevel; l <= kMaxLevel; ++l) {
    PyramidLevel lv;
    lv.level = l;
    lv.stride = 1 << l;
    lv.grid_w = ceil_div(image_w, lv.stride);
    lv.grid_h = ceil_div(image_h, lv.stride);
    lv.offset = num_points_;
    num_points_ += lv.size();
    levels_.push_back(lv);
  }
  points_.resize(static_cast<Eigen::Index>(num_points_), 2);
  for (const auto& lv : levels_) {
    for (int i = 0; i < lv.grid_h; ++i) {
      for (int j = 0; j < lv.grid_w; ++j) {
        const auto row = static_cast<Eigen::Index>(lv.offset + std::size_t(i) * lv.grid_w + j);
        points_(row, 0) = (j + 0.5) * lv.stride;
        points_(row, 1) = (i + 0.5) * lv.stride;
      }
    }
  }
}

const PyramidLevel& FeaturePyramid::level(int l) const {
  if (l < kMinLevel || l > kMaxLevel) {
    throw ValidationError("pyramid level " + std::to_string(l) + " outside P3-P7");
  }
  return levels_[static_cast<std::size_t>(l - kMinLevel)];
}

Eigen::Vector2d FeaturePyramid::point(int l, int row, int col) const {
  const auto& lv = level(l);
  return {(col + 0.5) * lv.stride, (row + 0.5) * lv.stride};
}

Eigen::Vector2d FeaturePyramid::point(std::size_t flat) const {
  return points_.row(static_cast<Eigen::Index>(flat)).transpose();
}

QueryOrigin FeaturePyramid::origin(std::size_t flat) const {
  for (const auto& lv : levels_) {
    if (flat < lv.offset + lv.size()) return {lv.level, flat - lv.offset};
  }
  throw ValidationError("point index " + std::to_string(flat) + " out of range");
}

std::size_t FeaturePyramid::flat_index(const QueryOrigin& o) const {
  const auto& lv = level(o.level);
  if (o.index >= lv.size()) {
    throw ValidationError("grid index " + std::to_string(o.index) + " out of range at level " +
                          std::to_string(o.level));
  }
  return lv.offset + o.index;
}

FeaturePyramid build_pyramid(int image_w, int image_h) { return FeaturePyramid(image_w, image_h); }

std::size_t count_queries(const FeaturePyramid& p) {
  std::size_t n = 0;
  for (const auto& lv : p.levels()) n += lv.size();
  return n;
}

std::vector<Boxd> decode_boxes(const FeaturePyramid& p, const OffsetMatrix& offsets) {
  if (static_cast<std::size_t>(offsets.rows()) != p.num_points()) {
    throw ValidationError("decode_boxes: " + std::to_string(offsets.rows()) + " offsets for " +
                          std::to_string(p.num_points()) + " points");
  }
  if ((offsets.array() < 0.0).any() || offsets.hasNaN()) {
    throw ValidationError("decode_boxes: offsets must be non-negative");
  }
  const auto& pts = p.points();
  const double w = p.image_w();
  const double h = p.image_h();
  std::vector<Boxd> out;
  out.reserve(p.num_points());
  for (Eigen::Index k = 0; k < offsets.rows(); ++k) {
    const double px = pts(k, 0);
    const double py = pts(k, 1);
    const Boxd raw{px - offsets(k, 0), py - offsets(k, 1), px + offsets(k, 2), py + offsets(k, 3)};
    out.push_back(clip(raw, w, h));
  }
  return out;
}

void QuerySet::validate() const {
  const auto n = boxes.size();
  if (scores.size() != n || origins.size() != n || static_cast<std::size_t>(features.rows()) != n) {
    throw ValidationError("QuerySet: parallel sequences differ in length (boxes " +
                          std::to_string(n) + ", scores " + std::to_string(scores.size()) +
                          ", features " + std::to_string(features.rows()) + ", origins " +
                          std::to_string(origins.size()) + ")");
  }
  for (double s : scores) {
    if (!(s >= 0.0 && s <= 1.0)) throw ValidationError("QuerySet: score outside [0, 1]");
  }
}

QuerySet QuerySet::select(std::span<const std::size_t> indices) const {
  QuerySet out;
  out.feature_source = feature_source;
  out.boxes.reserve(indices.size());
  out.scores.reserve(indices.size());
  out.origins.reserve(indices.size());
  out.features.resize(static_cast<Eigen::Index>(indices.size()), features.cols());
  Eigen::Index r = 0;
  for (std::size_t i : indices) {
    out.boxes.push_back(boxes.at(i));
    out.scores.push_back(scores.at(i));
    out.origins.push_back(origins.at(i));
    if (features.cols() > 0) out.features.row(r) = features.row(static_cast<Eigen::Index>(i));
    ++r;
  }
  return out;
}

QuerySet make_query_set(const FeaturePyramid& p, std::span<const double> scores,
                        const OffsetMatrix& offsets, const Eigen::MatrixXd& features) {
  const auto n = p.num_points();
  if (scores.size() != n || static_cast<std::size_t>(features.rows()) != n) {
    throw ValidationError("make_query_set: expected " + std::to_string(n) + " scores and features, got " +
                          std::to_string(scores.size()) + " and " + std::to_string(features.rows()));
  }
  QuerySet q;
  q.boxes = decode_boxes(p, offsets);
  q.scores.assign(scores.begin(), scores.end());
  q.features = features;
  q.origins.reserve(n);
  for (const auto& lv : p.levels()) {
    for (std::size_t i = 0; i < lv.size(); ++i) q.origins.push_back({lv.level, i});
  }
  q.feature_source = "cls&reg";
  q.validate();
  return q;
}

}  // namespace ddq

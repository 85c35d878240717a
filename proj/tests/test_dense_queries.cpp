#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ddq/dense_queries.hpp"

using namespace ddq;

namespace {

std::vector<int> grid_widths(const FeaturePyramid& p) {
  std::vector<int> w;
  for (const auto& lv : p.levels()) w.push_back(lv.grid_w);
  return w;
}

}  // namespace

TEST(Pyramid, EightHundredSquare) {
  const auto p = build_pyramid(800, 800);
  EXPECT_EQ(grid_widths(p), (std::vector<int>{100, 50, 25, 13, 7}));
  for (const auto& lv : p.levels()) {
    EXPECT_EQ(lv.grid_w, lv.grid_h);
    EXPECT_EQ(lv.stride, 1 << lv.level);
  }
  EXPECT_EQ(count_queries(p), 13343u);
}

TEST(Pyramid, Minimal) {
  const auto p = build_pyramid(8, 8);
  EXPECT_EQ(grid_widths(p), (std::vector<int>{1, 1, 1, 1, 1}));
  EXPECT_EQ(count_queries(p), 5u);
}

TEST(Pyramid, Rectangular) {
  const auto p = build_pyramid(1024, 512);
  EXPECT_EQ(p.level(3).grid_w, 128);
  EXPECT_EQ(p.level(3).grid_h, 64);
}

TEST(Pyramid, ThirtyTwo) { EXPECT_EQ(count_queries(build_pyramid(32, 32)), 23u); }

TEST(Pyramid, RejectsNonPositive) {
  EXPECT_THROW(build_pyramid(0, 10), ValidationError);
  EXPECT_THROW(build_pyramid(10, -1), ValidationError);
}

TEST(Pyramid, PointPlacementAndCoverage) {
  const auto p = build_pyramid(200, 136);
  for (const auto& lv : p.levels()) {
    for (int j = 1; j < lv.grid_w; ++j) {
      EXPECT_LT(p.point(lv.level, 0, j - 1).x(), p.point(lv.level, 0, j).x());
    }
    for (int i = 1; i < lv.grid_h; ++i) {
      EXPECT_LT(p.point(lv.level, i - 1, 0).y(), p.point(lv.level, i, 0).y());
    }
  }
  EXPECT_EQ(p.point(3, 2, 1), Eigen::Vector2d(12.0, 20.0));
  // every pixel within stride/2 * sqrt(2) of a level-3 point
  const double bound = 4.0 * std::sqrt(2.0) + 1e-12;
  for (int y = 0; y < 136; ++y) {
    for (int x = 0; x < 200; ++x) {
      const int j = std::min(x / 8, p.level(3).grid_w - 1);
      const int i = std::min(y / 8, p.level(3).grid_h - 1);
      const Eigen::Vector2d c = p.point(3, i, j);
      EXPECT_LE(std::hypot(c.x() - (x + 0.5), c.y() - (y + 0.5)), bound);
    }
  }
}

TEST(Pyramid, FlatIndexRoundTrip) {
  const auto p = build_pyramid(100, 60);
  for (std::size_t k = 0; k < p.num_points(); ++k) {
    EXPECT_EQ(p.flat_index(p.origin(k)), k);
    EXPECT_EQ(p.point(k), p.points().row(static_cast<Eigen::Index>(k)).transpose());
  }
}

TEST(DecodeBoxes, Definitional) {
  const auto p = build_pyramid(64, 64);
  OffsetMatrix off = OffsetMatrix::Zero(static_cast<Eigen::Index>(p.num_points()), 4);
  // level-3 point (0, 0) sits at (4, 4); point (0, 1) at (12, 4). Find the one at (8, 8)
  // on level 4: grid cell (0, 0) with stride 16.
  const std::size_t k = p.flat_index({4, 0});
  off.row(static_cast<Eigen::Index>(k)) << 8, 8, 8, 8;
  const auto boxes = decode_boxes(p, off);
  EXPECT_EQ(boxes[k], (Boxd{0, 0, 16, 16}));
  // zero offsets: degenerate box at the point
  EXPECT_EQ(boxes[0], (Boxd{4, 4, 4, 4}));
  EXPECT_TRUE(boxes[0].is_degenerate());
}

TEST(DecodeBoxes, ClippedToImage) {
  const auto p = build_pyramid(8, 8);
  OffsetMatrix off = OffsetMatrix::Constant(5, 4, 8.0);
  const auto boxes = decode_boxes(p, off);
  EXPECT_EQ(boxes[0], (Boxd{0, 0, 8, 8}));  // point (4, 4)
  for (const auto& b : boxes) {
    EXPECT_GE(b.x1, 0.0);
    EXPECT_GE(b.y1, 0.0);
    EXPECT_LE(b.x2, 8.0);
    EXPECT_LE(b.y2, 8.0);
  }
}

TEST(DecodeBoxes, Errors) {
  const auto p = build_pyramid(8, 8);
  EXPECT_THROW(decode_boxes(p, OffsetMatrix::Zero(4, 4)), ValidationError);
  EXPECT_THROW(decode_boxes(p, OffsetMatrix::Constant(5, 4, -1.0)), ValidationError);
}

TEST(MakeQuerySet, LengthMismatch) {
  const auto p = build_pyramid(8, 8);
  std::vector<double> scores(4, 0.5);
  EXPECT_THROW(make_query_set(p, scores, OffsetMatrix::Zero(5, 4), Eigen::MatrixXd::Zero(5, 3)),
               ValidationError);
}

TEST(MakeQuerySet, ScoresPreservedInOrder) {
  const auto p = build_pyramid(32, 32);
  const auto n = static_cast<Eigen::Index>(p.num_points());
  std::vector<double> scores(p.num_points(), 1.0);
  const auto q = make_query_set(p, scores, OffsetMatrix::Constant(n, 4, 2.0), Eigen::MatrixXd::Ones(n, 16));
  EXPECT_EQ(q.scores, scores);
  EXPECT_EQ(q.origins.front(), (QueryOrigin{3, 0}));
  EXPECT_EQ(q.origins.back(), (QueryOrigin{7, 0}));
  EXPECT_EQ(q.feature_dim(), 16);
}

TEST(MakeQuerySet, FullSizeImage) {
  const auto p = build_pyramid(800, 800);
  const auto n = static_cast<Eigen::Index>(p.num_points());
  std::vector<double> scores(p.num_points(), 0.25);
  const auto q = make_query_set(p, scores, OffsetMatrix::Constant(n, 4, 10.0), Eigen::MatrixXd::Zero(n, 256));
  EXPECT_EQ(q.size(), 13343u);
  EXPECT_EQ(q.features.rows(), n);
  EXPECT_EQ(q.origins.size(), q.size());
  for (const auto& b : q.boxes) {
    EXPECT_GE(b.x1, 0.0);
    EXPECT_LE(b.x2, 800.0);
  }
}

TEST(QuerySetTest, ValidateRejectsOutOfRangeScore) {
  QuerySet q;
  q.boxes = {Boxd{0, 0, 1, 1}};
  q.scores = {1.5};
  q.origins = {{3, 0}};
  q.features.resize(1, 0);
  EXPECT_THROW(q.validate(), ValidationError);
}

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "ddq/geometry.hpp"
#include "oracles.hpp"

using namespace ddq;

TEST(Iou, IdenticalBoxes) { EXPECT_DOUBLE_EQ(iou(Boxd{0, 0, 2, 2}, Boxd{0, 0, 2, 2}), 1.0); }

TEST(Iou, Disjoint) { EXPECT_DOUBLE_EQ(iou(Boxd{0, 0, 1, 1}, Boxd{5, 5, 6, 6}), 0.0); }

TEST(Iou, QuarterOverlapMatchesRasterOracle) {
  const Boxd a{0, 0, 2, 2}, b{1, 1, 3, 3};
  // 3000 cells per unit puts every edge on a cell boundary.
  const double raster = oracle::raster_iou(a, b, 3000.0);
  EXPECT_NEAR(raster, 1.0 / 7.0, 1e-12);
  EXPECT_NEAR(iou(a, b), raster, 1e-12);
}

TEST(Iou, DegenerateGivesZero) {
  EXPECT_EQ(iou(Boxd{1, 1, 1, 3}, Boxd{0, 0, 2, 2}), 0.0);
  EXPECT_EQ(iou(Boxd{1, 1, 1, 1}, Boxd{1, 1, 1, 1}), 0.0);
}

TEST(Iou, NanRejected) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(iou(Boxd{nan, 0, 1, 1}, Boxd{0, 0, 1, 1}), ValidationError);
}

TEST(Giou, Identity) {
  EXPECT_DOUBLE_EQ(giou(Boxd{3, 4, 10, 12}, Boxd{3, 4, 10, 12}), 1.0);
}

TEST(Giou, DisjointSquares) {
  const Boxd a{0, 0, 1, 1}, b{2, 2, 3, 3};
  const double raster = oracle::raster_giou(a, b, 1000.0);
  EXPECT_NEAR(raster, -7.0 / 9.0, 1e-12);
  EXPECT_NEAR(giou(a, b), -7.0 / 9.0, 1e-12);
}

TEST(Giou, TouchingSquaresIsZero) {
  EXPECT_NEAR(giou(Boxd{0, 0, 1, 1}, Boxd{1, 0, 2, 1}), 0.0, 1e-15);
}

TEST(Giou, BothDegenerateRejected) {
  EXPECT_THROW(giou(Boxd{0, 0, 0, 1}, Boxd{1, 1, 2, 1}), ValidationError);
}

TEST(PairwiseIou, Shapes) {
  BoxList<double> one{{Boxd{0, 0, 2, 2}}, std::nullopt};
  BoxList<double> none;
  EXPECT_EQ(pairwise_iou(one, one)(0, 0), 1.0);
  const auto m = pairwise_iou(none, one);
  EXPECT_EQ(m.rows(), 0);
  EXPECT_EQ(m.cols(), 1);
}

TEST(PairwiseIou, TwoByTwo) {
  BoxList<double> a{{Boxd{0, 0, 2, 2}, Boxd{1, 1, 3, 3}}, std::nullopt};
  const auto m = pairwise_iou(a, a);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      EXPECT_NEAR(m(i, j), oracle::raster_iou(a.boxes[i], a.boxes[j], 3000.0), 1e-12);
    }
  }
  EXPECT_NEAR(m(0, 1), 1.0 / 7.0, 1e-12);
}

TEST(Convert, CornerCenterRoundTrip) {
  const Vector4<double> corner(0, 0, 2, 2);
  const auto center = convert<double>(corner, BoxFormat::kCorner, BoxFormat::kCenter);
  EXPECT_EQ(center, Vector4<double>(1, 1, 2, 2));
  EXPECT_EQ(convert<double>(center, BoxFormat::kCenter, BoxFormat::kCorner), corner);

  std::mt19937_64 rng(7);
  for (int t = 0; t < 200; ++t) {
    const Boxd b = oracle::random_box(rng, 1000.0, 0.5, 400.0);
    const auto back = convert<double>(
        convert<double>(to_vector(b), BoxFormat::kCorner, BoxFormat::kCenter), BoxFormat::kCenter,
        BoxFormat::kCorner);
    EXPECT_LE((back - to_vector(b)).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Convert, UnknownTag) {
  EXPECT_EQ(parse_box_format("xyxy"), BoxFormat::kCorner);
  EXPECT_EQ(parse_box_format("cxcywh"), BoxFormat::kCenter);
  EXPECT_THROW(parse_box_format("xywh_rotated"), ValidationError);
}

TEST(Clip, KeepsInsideImage) {
  const Boxd c = clip(Boxd{-5, -1, 20, 9}, 16.0, 8.0);
  EXPECT_EQ(c, (Boxd{0, 0, 16, 8}));
}

TEST(GeometryProperties, RandomPairs) {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 2000; ++t) {
    const Boxd a = oracle::random_box(rng, 100.0, 0.1, 60.0);
    const Boxd b = oracle::random_box(rng, 100.0, 0.1, 60.0);
    const double ab = iou(a, b);
    EXPECT_EQ(ab, iou(b, a));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    EXPECT_NEAR(iou(a, a), 1.0, 1e-15);
    const double g = giou(a, b);
    EXPECT_LE(g, ab + 1e-15);
    EXPECT_GE(g, -1.0);
    EXPECT_LE(g, 1.0);
  }
}

TEST(GeometryProperties, GiouEqualsIouWhenEnclosingIsUnion) {
  // Nested boxes: enclosing box is the outer box, which is the union.
  const Boxd outer{0, 0, 10, 10}, inner{2, 3, 5, 7};
  EXPECT_NEAR(giou(outer, inner), iou(outer, inner), 1e-15);
}

TEST(GeometryProperties, PairwiseTranspose) {
  std::mt19937_64 rng(5);
  BoxList<double> a, b;
  for (int i = 0; i < 9; ++i) a.boxes.push_back(oracle::random_box(rng, 50.0, 1.0, 30.0));
  for (int i = 0; i < 6; ++i) b.boxes.push_back(oracle::random_box(rng, 50.0, 1.0, 30.0));
  EXPECT_EQ(pairwise_iou(a, b), pairwise_iou(b, a).transpose());
}

TEST(GeometryProperties, RasterEquivalence) {
  std::mt19937_64 rng(99);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Boxd a = oracle::random_box(rng, 100.0, 1.0, 60.0);
    const Boxd b = oracle::random_box(rng, 100.0, 1.0, 60.0);
    worst = std::max(worst, std::abs(iou(a, b) - oracle::raster_iou_fitted(a, b, 1000.0)));
  }
  EXPECT_LE(worst, 2e-3) << worst;
}

TEST(Geometry, FloatScalar) {
  const Box<float> a{0, 0, 2, 2}, b{1, 1, 3, 3};
  EXPECT_NEAR(iou(a, b), 1.0f / 7.0f, 1e-6f);
}

// Small builders shared by the test binaries.
#pragma once

#include <random>
#include <vector>

#include "ddq/dense_queries.hpp"
#include "oracles.hpp"

namespace ddq::testing {

/// QuerySet with no features and placeholder origins.
inline QuerySet make_queries(std::vector<Boxd> boxes, std::vector<double> scores) {
  QuerySet q;
  q.origins.assign(boxes.size(), QueryOrigin{3, 0});
  q.features.resize(static_cast<Eigen::Index>(boxes.size()), 0);
  q.boxes = std::move(boxes);
  q.scores = std::move(scores);
  return q;
}

/// n random boxes inside [0, extent)^2 drawn in clusters, so that NMS has
/// something to suppress. Scores are quantized to force ties.
inline QuerySet random_clustered_queries(std::mt19937_64& rng, std::size_t n, double extent = 200.0) {
  std::uniform_int_distribution<int> clusters(1, 6);
  const int c = clusters(rng);
  std::vector<Boxd> centers;
  for (int i = 0; i < c; ++i) centers.push_back(oracle::random_box(rng, extent, 10.0, 80.0));
  std::uniform_int_distribution<int> pick(0, c - 1);
  std::normal_distribution<double> jitter(0.0, 4.0);
  std::uniform_int_distribution<int> level(0, 20);
  std::vector<Boxd> boxes;
  std::vector<double> scores;
  for (std::size_t i = 0; i < n; ++i) {
    Boxd b = centers[static_cast<std::size_t>(pick(rng))];
    b.x1 += jitter(rng);
    b.y1 += jitter(rng);
    b.x2 += jitter(rng);
    b.y2 += jitter(rng);
    if (b.x2 <= b.x1) b.x2 = b.x1 + 1.0;
    if (b.y2 <= b.y1) b.y2 = b.y1 + 1.0;
    boxes.push_back(b);
    scores.push_back(level(rng) / 20.0);
  }
  return make_queries(std::move(boxes), std::move(scores));
}

}  // namespace ddq::testing

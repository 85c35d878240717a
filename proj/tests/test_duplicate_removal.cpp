#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "ddq/duplicate_removal.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ddq;
using ddq::testing::make_queries;

TEST(Nms, SingleQueryKept) {
  const auto q = make_queries({Boxd{1, 2, 3, 4}}, {0.3});
  const auto r = class_agnostic_nms(q, 0.7);
  EXPECT_EQ(r.kept, (std::vector<std::size_t>{0}));
  EXPECT_EQ(r.queries.boxes, q.boxes);
}

TEST(Nms, LowOverlapBothKept) {
  const auto q = make_queries({Boxd{0, 0, 2, 2}, Boxd{1, 1, 3, 3}}, {0.9, 0.8});
  const auto r = class_agnostic_nms(q, 0.7);
  EXPECT_EQ(r.kept, oracle::reference_nms(q.boxes, q.scores, 0.7, kKeepAll));
  EXPECT_EQ(r.kept, (std::vector<std::size_t>{0, 1}));
}

TEST(Nms, HighOverlapSuppressed) {
  // [0,0,10,10] vs [0,0,10,8]: iou 0.8
  const auto q = make_queries({Boxd{0, 0, 10, 10}, Boxd{0, 0, 10, 8}}, {0.9, 0.8});
  ASSERT_NEAR(iou(q.boxes[0], q.boxes[1]), 0.8, 1e-12);
  const auto r = class_agnostic_nms(q, 0.7);
  EXPECT_EQ(r.kept, oracle::reference_nms(q.boxes, q.scores, 0.7, kKeepAll));
  EXPECT_EQ(r.kept, (std::vector<std::size_t>{0}));
}

TEST(Nms, ThresholdIsInclusive) {
  // iou exactly 0.5
  const auto q = make_queries({Boxd{0, 0, 4, 4}, Boxd{0, 0, 4, 2}}, {0.9, 0.8});
  EXPECT_EQ(class_agnostic_nms(q, 0.5).kept.size(), 1u);
  EXPECT_EQ(class_agnostic_nms(q, 0.50001).kept.size(), 2u);
}

TEST(Nms, MissingScoresOnBoxList) {
  BoxList<double> b{{Boxd{0, 0, 1, 1}}, std::nullopt};
  EXPECT_THROW(class_agnostic_nms(b, 0.7), ValidationError);
}

TEST(Nms, BadThreshold) {
  const auto q = make_queries({Boxd{0, 0, 1, 1}}, {0.3});
  EXPECT_THROW(class_agnostic_nms(q, 0.0), ValidationError);
  EXPECT_THROW(class_agnostic_nms(q, 1.5), ValidationError);
}

TEST(NmsProperties, MatchesReferenceAndInvariants) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> size(0, 64);
  std::uniform_real_distribution<double> thr(0.3, 0.9);
  for (int t = 0; t < 300; ++t) {
    const auto q = ddq::testing::random_clustered_queries(rng, size(rng));
    const double th = thr(rng);
    const auto r = class_agnostic_nms(q, th);
    ASSERT_EQ(r.kept, oracle::reference_nms(q.boxes, q.scores, th, kKeepAll));
    // survivors pairwise below threshold
    for (std::size_t i = 0; i < r.queries.size(); ++i) {
      for (std::size_t j = i + 1; j < r.queries.size(); ++j) {
        EXPECT_LT(iou(r.queries.boxes[i], r.queries.boxes[j]), th);
      }
    }
    // scores non-increasing
    EXPECT_TRUE(std::is_sorted(r.queries.scores.rbegin(), r.queries.scores.rend()));
    // idempotence
    EXPECT_EQ(class_agnostic_nms(r.queries, th).queries.boxes, r.queries.boxes);
    // max_keep truncates a prefix
    const std::size_t m = r.kept.size() / 2;
    const auto capped = class_agnostic_nms(q, th, m);
    EXPECT_EQ(capped.kept, std::vector<std::size_t>(r.kept.begin(), r.kept.begin() + m));
  }
}

TEST(NmsProperties, LoweringThresholdNeverAddsSurvivors) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 200; ++t) {
    const auto q = ddq::testing::random_clustered_queries(rng, 40);
    std::size_t prev = 0;
    for (double th : {0.2, 0.4, 0.6, 0.8, 0.95}) {
      const std::size_t n = class_agnostic_nms(q, th).kept.size();
      EXPECT_GE(n, prev);
      prev = n;
    }
  }
}

TEST(TopK, Examples) {
  const std::vector<double> s{0.5, 0.9, 0.9, 0.1};
  EXPECT_EQ(topk_indices(s, 2), (std::vector<std::size_t>{1, 2}));
  EXPECT_TRUE(topk_indices(s, 0).empty());
  EXPECT_EQ(topk_indices(s, 10), (std::vector<std::size_t>{1, 2, 0, 3}));

  const auto q = make_queries({Boxd{0, 0, 1, 1}, Boxd{0, 0, 2, 2}, Boxd{0, 0, 3, 3}, Boxd{0, 0, 4, 4}},
                              s);
  const auto top = topk_by_score(q, 2);
  EXPECT_EQ(top.boxes, (std::vector<Boxd>{Boxd{0, 0, 2, 2}, Boxd{0, 0, 3, 3}}));
  EXPECT_EQ(topk_by_score(q, 0).size(), 0u);
}

TEST(TopK, MatchesStableSortOracle) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> v(0, 5);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> s(30);
    for (auto& x : s) x = v(rng) / 5.0;
    std::vector<std::size_t> idx(s.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return s[a] > s[b]; });
    idx.resize(12);
    EXPECT_EQ(topk_indices(s, 12), idx);
  }
}

TEST(Cascade, BudgetsRespected) {
  // dense grid of distinct boxes: far more than 300 survive suppression
  std::vector<Boxd> boxes;
  std::vector<double> scores;
  for (int i = 0; i < 40; ++i) {
    for (int j = 0; j < 40; ++j) {
      boxes.push_back(Boxd{j * 20.0, i * 20.0, j * 20.0 + 15.0, i * 20.0 + 15.0});
      scores.push_back(((i * 40 + j) % 97) / 97.0);
    }
  }
  const auto q = make_queries(boxes, scores);
  DqrConfig cfg;
  EXPECT_EQ(cascade_select(q, cfg, 0).kept.size(), 300u);
  EXPECT_EQ(cascade_select(q, cfg, 1).kept.size(), 200u);
  EXPECT_THROW(cascade_select(q, cfg, 2), ValidationError);
}

TEST(Cascade, SmallDistinctInputUnchanged) {
  const auto q = make_queries({Boxd{0, 0, 1, 1}, Boxd{5, 5, 6, 6}}, {0.9, 0.8});
  const auto r = cascade_select(q, DqrConfig{}, 0);
  EXPECT_EQ(r.queries.boxes, q.boxes);
  EXPECT_EQ(r.queries.scores, q.scores);
}

TEST(Cascade, ConfigValidation) {
  DqrConfig cfg;
  cfg.stage_budgets = {200, 300};
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg.stage_budgets = {300, 0};
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg.stage_budgets = {300, 200};
  cfg.iou_threshold = 1.0;
  EXPECT_THROW(cfg.validate(), ValidationError);
}

#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "ddq/simulator.hpp"

using namespace ddq;
using namespace ddq::sim;

namespace {

ResponseModel noiseless() {
  ResponseModel m;
  m.score_noise = 0.0;
  m.box_noise = 0.0;
  m.center_noise = 0.0;
  m.duplicate_jitter = 0.0;
  return m;
}

double cell_double(const Cell& c) { return std::get<double>(c); }

}  // namespace

TEST(Scene, Determinism) {
  SceneConfig cfg;
  const auto a = generate_scene(cfg, 42);
  const auto b = generate_scene(cfg, 42);
  EXPECT_EQ(a.gts, b.gts);
  EXPECT_NE(generate_scene(cfg, 43).gts, a.gts);
}

TEST(Scene, Counts) {
  SceneConfig cfg;
  cfg.gt_count = 0;
  EXPECT_TRUE(generate_scene(cfg, 1).gts.empty());
  cfg.gt_count = 7;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto scene = generate_scene(cfg, s);
    ASSERT_EQ(scene.gts.size(), 7u);
    for (std::size_t i = 0; i < scene.gts.size(); ++i) {
      const auto& g = scene.gts[i];
      EXPECT_GE(g.x1, 0.0);
      EXPECT_GE(g.y1, 0.0);
      EXPECT_LE(g.x2, 800.0);
      EXPECT_LE(g.y2, 800.0);
      EXPECT_FALSE(g.is_degenerate());
      for (std::size_t j = i + 1; j < scene.gts.size(); ++j) EXPECT_LE(iou(g, scene.gts[j]), 0.5);
    }
  }
}

TEST(Scene, ImpossibleConstraints) {
  SceneConfig cfg;
  cfg.gt_count = 50;
  cfg.min_size = 500;
  cfg.max_size = 500;
  cfg.max_overlap = 0.0;
  cfg.max_attempts = 200;
  EXPECT_THROW(generate_scene(cfg, 3), ValidationError);
}

TEST(Responses, NoiselessScoreIsMaxIou) {
  SceneConfig sc;
  sc.image_w = 256;
  sc.image_h = 192;
  sc.gt_count = 3;
  sc.min_size = 24;
  sc.max_size = 120;
  const auto scene = generate_scene(sc, 9);
  const FeaturePyramid p(sc.image_w, sc.image_h);
  const auto q = simulate_responses(scene, p, noiseless(), 10);
  ASSERT_EQ(q.size(), p.num_points());
  for (std::size_t i = 0; i < q.size(); ++i) {
    double best = 0.0;
    for (const auto& g : scene.gts) best = std::max(best, iou(q.boxes[i], g));
    EXPECT_NEAR(q.scores[i], best, 1e-12);
  }
}

TEST(Responses, DuplicationCountAndDeterminism) {
  SceneConfig sc;
  sc.image_w = 128;
  sc.image_h = 128;
  sc.gt_count = 2;
  sc.max_size = 100;
  const auto scene = generate_scene(sc, 1);
  const FeaturePyramid p(128, 128);
  ResponseModel m;
  m.duplication = 3;
  m.feature_dim = 5;
  const auto a = simulate_responses(scene, p, m, 77);
  EXPECT_EQ(a.size(), 3 * p.num_points());
  EXPECT_EQ(a.feature_dim(), 5);
  const auto b = simulate_responses(scene, p, m, 77);
  EXPECT_EQ(a.boxes, b.boxes);
  EXPECT_EQ(a.scores, b.scores);
  EXPECT_EQ(a.features, b.features);
  EXPECT_NE(simulate_responses(scene, p, m, 78).scores, a.scores);
}

TEST(Responses, RefineShrinksError) {
  SceneConfig sc;
  sc.image_w = 200;
  sc.image_h = 200;
  sc.gt_count = 2;
  sc.max_size = 120;
  const auto scene = generate_scene(sc, 4);
  const FeaturePyramid p(200, 200);
  ResponseModel m;
  auto sim = simulate_responses_detailed(scene, p, m, 5);
  const double before = sim.error.cwiseAbs().sum();
  refine(sim, scene, m, 0.5);
  EXPECT_NEAR(sim.error.cwiseAbs().sum(), 0.5 * before, 1e-9 * before);
}

TEST(Seeds, TrialSeedsDependOnlyOnMasterAndIndex) {
  EXPECT_EQ(trial_seed(1, 5), trial_seed(1, 5));
  EXPECT_NE(trial_seed(1, 5), trial_seed(1, 6));
  EXPECT_NE(trial_seed(1, 5), trial_seed(2, 5));
}

TEST(RecallExperiment, SaturatedNoiselessBudgetsAgree) {
  RecallConfig cfg;
  cfg.scene.image_w = 96;
  cfg.scene.image_h = 96;
  cfg.scene.gt_count = 2;
  cfg.scene.min_size = 24;
  cfg.scene.max_size = 60;
  cfg.response = noiseless();
  cfg.budgets = {1000};
  const auto rep = run_recall_experiment(cfg, RunOptions{3, 10, 1});
  EXPECT_EQ(rep.find_series("topk").mean, rep.find_series("dqr").mean);
  EXPECT_EQ(rep.columns, (std::vector<std::string>{"method", "budget", "seed", "AR"}));
  EXPECT_EQ(rep.rows.size(), 20u);
}

TEST(RecallExperiment, NoDuplicatesNoNoiseGapWithinStd) {
  RecallConfig cfg;
  cfg.response.duplication = 1;
  cfg.response.score_noise = 0.0;
  cfg.budgets = {300};
  const auto rep = run_recall_experiment(cfg, RunOptions{11, 20, 4});
  const auto& t = rep.find_series("topk");
  const auto& d = rep.find_series("dqr");
  const double gap = d.mean[0] - t.mean[0];
  EXPECT_LE(std::abs(gap), std::max(t.stddev[0], d.stddev[0])) << "gap " << gap;
}

TEST(RecallExperiment, HeavyDuplicationDqrNotWorse) {
  RecallConfig cfg;
  cfg.response.duplication = 8;
  cfg.budgets = {50, 100, 300};
  const auto rep = run_recall_experiment(cfg, RunOptions{5, 8, 4});
  const auto& t = rep.find_series("topk");
  const auto& d = rep.find_series("dqr");
  for (std::size_t b = 0; b < cfg.budgets.size(); ++b) EXPECT_GE(d.mean[b], t.mean[b]);
}

TEST(RecallExperiment, ThreadCountDoesNotChangeReport) {
  RecallConfig cfg;
  cfg.response.duplication = 2;
  cfg.budgets = {100, 300};
  const auto a = run_recall_experiment(cfg, RunOptions{21, 12, 1});
  const auto b = run_recall_experiment(cfg, RunOptions{21, 12, 8});
  EXPECT_EQ(a.rows, b.rows);
  EXPECT_EQ(a.seeds, b.seeds);
  EXPECT_THROW(run_recall_experiment(RecallConfig{{}, {}, {}, 0.7, 0.5}, RunOptions{}), ValidationError);
}

TEST(GradientExperiment, RatiosFollowClosedForm) {
  GradientConfig cfg;
  cfg.steps = 20;
  const auto rep = run_gradient_experiment(cfg, RunOptions{0, 1, 2});
  bool saw_negative = false;
  for (const auto& row : rep.rows) {
    const auto& method = std::get<std::string>(row[0]);
    const double p = cell_double(row[3]);
    const double alpha = cell_double(row[5]);
    if (method == "distinct") {
      EXPECT_NEAR(alpha, 1.0, 1e-6);
      continue;
    }
    EXPECT_NEAR(alpha, 1.0 - p / (1.0 - p), 1e-4) << "p=" << p;
    if (std::get<long long>(row[2]) == 0 && cell_double(row[1]) == 0.5) EXPECT_NEAR(alpha, 0.0, 1e-6);
    if (p > 0.5 + 1e-6) {
      EXPECT_LT(alpha, 0.0);
      saw_negative = true;
    }
    if (p < 0.5 - 1e-6) EXPECT_GT(alpha, 0.0);
  }
  EXPECT_TRUE(saw_negative);
}

TEST(GradientExperiment, DuplicatedPoolStallsBelowDistinct) {
  GradientConfig cfg;
  cfg.p_grid = {0.1, 0.3};
  cfg.steps = 100;
  const auto rep = run_gradient_experiment(cfg, RunOptions{});
  const auto& dup = rep.find_series("duplicated:p");
  const auto& one = rep.find_series("distinct:p");
  EXPECT_LT(dup.mean.back(), 0.5 + 1e-9);
  EXPECT_GT(one.mean.back(), 0.9);
}

TEST(CascadeExperiment, SurvivorsWithinBudgetsAndDeterministic) {
  CascadeConfig cfg;
  cfg.response.duplication = 4;
  const auto a = run_cascade_experiment(cfg, RunOptions{8, 4, 1});
  const auto b = run_cascade_experiment(cfg, RunOptions{8, 4, 3});
  EXPECT_EQ(a.rows, b.rows);
  for (const auto& row : a.rows) {
    const auto budget = std::get<long long>(row[1]);
    const auto survivors = std::get<long long>(row[3]);
    EXPECT_LE(survivors, budget);
    EXPECT_EQ(budget, std::get<long long>(row[0]) == 0 ? 300 : 200);
  }
}

TEST(CascadeExperiment, NoRefinementOnlySelects) {
  // Without refinement the second stage re-selects from the first stage's
  // survivors, so recall cannot rise.
  CascadeConfig cfg;
  cfg.refine_shrink = 1.0;
  cfg.response.duplication = 3;
  const auto rep = run_cascade_experiment(cfg, RunOptions{2, 6, 2});
  const auto& r = rep.find_series("recall");
  ASSERT_EQ(r.mean.size(), 2u);
  EXPECT_LE(r.mean[1], r.mean[0]);
}

TEST(FeatureMaps, RenderedPerLevel) {
  SceneConfig sc;
  sc.image_w = 64;
  sc.image_h = 64;
  sc.gt_count = 1;
  sc.max_size = 40;
  const auto scene = generate_scene(sc, 2);
  const FeaturePyramid p(64, 64);
  const auto maps = render_feature_maps(scene, p, 3, 9);
  ASSERT_EQ(maps.size(), 5u);
  for (const auto& [l, fm] : maps) {
    EXPECT_EQ(fm.width, p.level(l).grid_w);
    EXPECT_EQ(fm.channels(), 3);
  }
  EXPECT_EQ(render_feature_maps(scene, p, 3, 9).at(3).data, maps.at(3).data);
}

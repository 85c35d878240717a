// Synthetic scenes and a parametric stand-in for a trained dense query head,
// plus the recall / gradient / cascade experiments built on them.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "ddq/dense_queries.hpp"
#include "ddq/duplicate_removal.hpp"
#include "ddq/geometry.hpp"
#include "ddq/roi_features.hpp"

namespace ddq::sim {

struct SceneConfig {
  int image_w = 800;
  int image_h = 800;
  int gt_count = 7;
  double min_size = 24.0;
  double max_size = 320.0;
  double max_overlap = 0.5;  // max IoU between any two gts
  int max_attempts = 10000;

  void validate() const;
};

struct Scene {
  int image_w = 0;
  int image_h = 0;
  std::vector<Boxd> gts;
  std::uint64_t seed = 0;

  ImageSize image_size() const { return {double(image_w), double(image_h)}; }
};

/// Throws ValidationError when the boxes cannot be placed within
/// cfg.max_attempts rejection rounds.
Scene generate_scene(const SceneConfig& cfg, std::uint64_t seed);

/// score = IoU(box, best gt)^gamma * q_gt + score_noise * eps, clamped to
/// [0, 1]. q_gt is drawn per gt from [quality * (1 - quality_spread), quality].
///
/// A point inside a gt (the smallest containing one) regresses that gt with
/// per-coordinate error std
///   box_noise * (1 + level_mismatch) + center_noise * d * extent,
/// where d in [0, 1] is the point's normalized distance from the gt center
/// and level_mismatch = |log2(sqrt(area) / (8 * stride))|. Other points emit
/// a 4*stride square prior. Each location emits `duplication` queries; copies
/// after the first add duplicate_jitter pixels of extra error.
struct ResponseModel {
  double gamma = 1.0;
  double quality = 1.0;
  double quality_spread = 0.0;
  double score_noise = 0.05;
  double box_noise = 4.0;
  double center_noise = 0.5;
  int duplication = 1;
  double duplicate_jitter = 2.0;
  int feature_dim = 0;

  void validate() const;
};

/// Queries plus the latent variables that generated them.
struct SimulatedQueries {
  QuerySet queries;
  std::vector<long> target;                        // gt each query regresses, or -1
  Eigen::Matrix<double, Eigen::Dynamic, 4> error;  // box error relative to target / prior
  std::vector<Boxd> anchor;                        // target gt or prior box
  Eigen::VectorXd score_eps;
  std::vector<double> gt_quality;
};

SimulatedQueries simulate_responses_detailed(const Scene& scene, const FeaturePyramid& pyramid,
                                             const ResponseModel& model, std::uint64_t seed);

QuerySet simulate_responses(const Scene& scene, const FeaturePyramid& pyramid,
                            const ResponseModel& model, std::uint64_t seed);

/// Recomputes boxes and scores of `sim` from its latents.
void rescore(SimulatedQueries& sim, const Scene& scene, const ResponseModel& model);

/// One simulated refinement stage: scales box error by `shrink` and rescores.
void refine(SimulatedQueries& sim, const Scene& scene, const ResponseModel& model, double shrink);

/// Synthetic per-level maps: channel 0 is a Gaussian objectness bump per gt,
/// remaining channels are seeded noise.
FeaturePyramidMaps render_feature_maps(const Scene& scene, const FeaturePyramid& pyramid,
                                       int channels, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Experiments

struct RunOptions {
  std::uint64_t master_seed = 0;
  int seeds = 20;   // number of trials
  int threads = 1;  // trials run concurrently; results do not depend on it
};

/// Seed of trial `index`, derived from (master_seed, index) only.
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t index);

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

struct RecallConfig {
  SceneConfig scene;
  ResponseModel response;
  std::vector<std::size_t> budgets{100, 200, 300};
  double nms_iou = 0.7;
  double match_iou = 0.5;
};

struct GradientConfig {
  std::vector<double> p_grid{0.05, 0.1,  0.15, 0.2,  0.25, 0.3,  0.35, 0.4,  0.45, 0.5,
                             0.55, 0.6,  0.65, 0.7,  0.75, 0.8,  0.85, 0.9,  0.95};
  int copies = 2;
  int gt_count = 1;
  int steps = 50;
  double learning_rate = 0.5;  // on the score logit
  double fd_step = 1e-6;
};

struct CascadeConfig {
  SceneConfig scene;
  ResponseModel response;
  DqrConfig dqr;
  double refine_shrink = 0.5;
  double match_iou = 0.5;
};

using Cell = std::variant<std::string, long long, std::uint64_t, double>;

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> stddev;
};

struct ExperimentReport {
  std::string experiment;
  std::string x_label;
  std::string y_label;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<Series> series;

  const Series& find_series(const std::string& label) const;
};

ExperimentReport run_recall_experiment(const RecallConfig& cfg, const RunOptions& opt);
ExperimentReport run_gradient_experiment(const GradientConfig& cfg, const RunOptions& opt);
ExperimentReport run_cascade_experiment(const CascadeConfig& cfg, const RunOptions& opt);

}  // namespace ddq::sim

// Versioned experiment configuration (JSON).
//
//   {
//     "schema_version": 1,
//     "experiment": "recall" | "gradient" | "cascade",
//     "master_seed": 0, "seeds": 20,
//     "scene":    {image_w, image_h, gt_count, min_size, max_size, max_overlap, max_attempts},
//     "response": {gamma, quality, quality_spread, score_noise, box_noise, center_noise,
//                  duplication, duplicate_jitter, feature_dim},
//     "recall":   {budgets, nms_iou, match_iou},
//     "gradient": {p_grid, copies, gt_count, steps, learning_rate, fd_step},
//     "cascade":  {iou_threshold, stage_budgets, refine_shrink, match_iou},
//     "output":   {svg, feature_maps, feature_channels}
//   }
//
// Every section and key is optional; omitted values keep their defaults.
// Unknown keys are rejected.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "ddq/io.hpp"
#include "ddq/simulator.hpp"

namespace ddq {

inline constexpr int kConfigSchemaVersion = 1;

struct OutputOptions {
  bool svg = true;
  bool feature_maps = false;
  int feature_channels = 4;
};

struct ExperimentConfig {
  std::string experiment = "recall";
  std::uint64_t master_seed = 0;
  int seeds = 20;
  sim::SceneConfig scene;
  sim::ResponseModel response;
  sim::RecallConfig recall;      // scene/response copied in at parse time
  sim::GradientConfig gradient;
  sim::CascadeConfig cascade;    // scene/response copied in at parse time
  OutputOptions output;
};

ExperimentConfig parse_experiment_config(const io::Json& j);
ExperimentConfig load_experiment_config(std::string_view text, const std::string& source);
io::Json experiment_config_to_json(const ExperimentConfig& cfg);

}  // namespace ddq

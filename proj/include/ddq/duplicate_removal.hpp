// Duplicate query removal (class-agnostic NMS on queries) and per-stage
// query budgets.
#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "ddq/dense_queries.hpp"
#include "ddq/geometry.hpp"

namespace ddq {

struct DqrConfig {
  double iou_threshold = 0.7;
  std::vector<std::size_t> stage_budgets{300, 200};

  void validate() const;
};

inline constexpr std::size_t kKeepAll = std::numeric_limits<std::size_t>::max();

/// Indices of `scores` sorted by descending score, ties by lower index.
std::vector<std::size_t> score_order(std::span<const double> scores);

/// Greedy highest-score-first suppression. A candidate is dropped when its IoU
/// with an already kept box is >= iou_threshold. Returns kept indices in
/// descending score order, at most max_keep of them.
std::vector<std::size_t> nms_indices(std::span<const Boxd> boxes, std::span<const double> scores,
                                     double iou_threshold, std::size_t max_keep = kKeepAll);

struct NmsResult {
  QuerySet queries;
  std::vector<std::size_t> kept;  // indices into the input set
};

NmsResult class_agnostic_nms(const QuerySet& q, double iou_threshold,
                             std::size_t max_keep = kKeepAll);

/// Same suppression on a plain BoxList; requires scores.
std::vector<std::size_t> class_agnostic_nms(const BoxList<double>& boxes, double iou_threshold,
                                            std::size_t max_keep = kKeepAll);

/// The k highest-scoring queries (ties by lower index), in score order.
QuerySet topk_by_score(const QuerySet& q, std::size_t k);
std::vector<std::size_t> topk_indices(std::span<const double> scores, std::size_t k);

/// NMS with max_keep = cfg.stage_budgets[stage].
NmsResult cascade_select(const QuerySet& q, const DqrConfig& cfg, std::size_t stage);

}  // namespace ddq

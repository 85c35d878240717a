#include "ddq/duplicate_removal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ddq {

void DqrConfig::validate() const {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw ValidationError("DqrConfig: iou_threshold must lie in (0, 1)");
  }
  if (stage_budgets.empty()) throw ValidationError("DqrConfig: no stage budgets");
  for (std::size_t s = 0; s < stage_budgets.size(); ++s) {
    if (stage_budgets[s] == 0) throw ValidationError("DqrConfig: budgets must be positive");
    if (s > 0 && stage_budgets[s] > stage_budgets[s - 1]) {
      throw ValidationError("DqrConfig: budgets must be non-increasing");
    }
  }
}

std::vector<std::size_t> score_order(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

std::vector<std::size_t> nms_indices(std::span<const Boxd> boxes, std::span<const double> scores,
                                     double iou_threshold, std::size_t max_keep) {
  if (scores.size() != boxes.size()) {
    throw ValidationError("nms: " + std::to_string(scores.size()) + " scores for " +
                          std::to_string(boxes.size()) + " boxes");
  }
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw ValidationError("nms: iou_threshold must lie in (0, 1]");
  }
  std::vector<std::size_t> kept;
  if (max_keep == 0) return kept;
  for (std::size_t i : score_order(scores)) {
    const Boxd& cand = boxes[i];
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return iou(boxes[k], cand) >= iou_threshold;
    });
    if (suppressed) continue;
    kept.push_back(i);
    if (kept.size() == max_keep) break;
  }
  return kept;
}

NmsResult class_agnostic_nms(const QuerySet& q, double iou_threshold, std::size_t max_keep) {
  if (q.scores.size() != q.boxes.size()) {
    throw ValidationError("class_agnostic_nms: query set is missing scores");
  }
  NmsResult r;
  r.kept = nms_indices(q.boxes, q.scores, iou_threshold, max_keep);
  r.queries = q.select(r.kept);
  return r;
}

std::vector<std::size_t> class_agnostic_nms(const BoxList<double>& boxes, double iou_threshold,
                                            std::size_t max_keep) {
  if (!boxes.scores) throw ValidationError("class_agnostic_nms: box list has no scores");
  boxes.validate();
  return nms_indices(boxes.boxes, *boxes.scores, iou_threshold, max_keep);
}

std::vector<std::size_t> topk_indices(std::span<const double> scores, std::size_t k) {
  auto order = score_order(scores);
  if (k < order.size()) order.resize(k);
  return order;
}

QuerySet topk_by_score(const QuerySet& q, std::size_t k) {
  const auto idx = topk_indices(q.scores, k);
  return q.select(idx);
}

NmsResult cascade_select(const QuerySet& q, const DqrConfig& cfg, std::size_t stage) {
  cfg.validate();
  if (stage >= cfg.stage_budgets.size()) {
    throw ValidationError("cascade_select: stage " + std::to_string(stage) + " but only " +
                          std::to_string(cfg.stage_budgets.size()) + " budgets");
  }
  return class_agnostic_nms(q, cfg.iou_threshold, cfg.stage_budgets[stage]);
}

}  // namespace ddq

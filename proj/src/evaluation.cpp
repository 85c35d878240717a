#include "ddq/evaluation.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "ddq/duplicate_removal.hpp"

namespace ddq {

namespace {

// Best unmatched gt with IoU >= thresh, ties by lower gt index; -1 if none.
long best_unmatched(const Boxd& det, std::span<const Boxd> gts, const std::vector<char>& taken,
                    double thresh) {
  long best = -1;
  double best_iou = thresh;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (taken[g]) continue;
    const double v = iou(det, gts[g]);
    if (v >= best_iou && (best < 0 || v > best_iou)) {
      best = static_cast<long>(g);
      best_iou = v;
    }
  }
  return best;
}

}  // namespace

std::vector<long> greedy_match(std::span<const Boxd> proposals, std::span<const double> scores,
                               std::span<const Boxd> gts, double iou_thresh) {
  std::vector<std::size_t> order;
  if (scores.empty()) {
    order.resize(proposals.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
  } else {
    if (scores.size() != proposals.size()) {
      throw ValidationError("greedy_match: scores and proposals differ in length");
    }
    order = score_order(scores);
  }
  std::vector<char> taken(gts.size(), 0);
  std::vector<long> out(proposals.size(), -1);
  for (std::size_t i : order) {
    const long g = best_unmatched(proposals[i], gts, taken, iou_thresh);
    if (g >= 0) {
      taken[static_cast<std::size_t>(g)] = 1;
      out[i] = g;
    }
  }
  return out;
}

std::size_t matched_count(const BoxList<double>& proposals, std::span<const Boxd> gts,
                          std::size_t k, double iou_thresh) {
  proposals.validate();
  std::vector<std::size_t> top;
  if (proposals.scores) {
    top = topk_indices(*proposals.scores, k);
  } else {
    top.resize(std::min(k, proposals.size()));
    std::iota(top.begin(), top.end(), std::size_t{0});
  }
  std::vector<Boxd> boxes;
  boxes.reserve(top.size());
  for (std::size_t i : top) boxes.push_back(proposals.boxes[i]);
  // `top` is already in rank order.
  const auto m = greedy_match(boxes, {}, gts, iou_thresh);
  return static_cast<std::size_t>(std::count_if(m.begin(), m.end(), [](long g) { return g >= 0; }));
}

double recall_at(const BoxList<double>& proposals, std::span<const Boxd> gts, std::size_t k,
                 double iou_thresh) {
  if (gts.empty()) return 1.0;
  return static_cast<double>(matched_count(proposals, gts, k, iou_thresh)) /
         static_cast<double>(gts.size());
}

std::vector<double> coco_iou_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back(0.5 + 0.05 * i);
  return t;
}

double average_precision_at(std::span<const DetectionRecord> dets, const GroundTruthIndex& gts,
                            double iou_thresh, std::vector<PrPoint>* curve) {
  std::size_t total_gts = 0;
  for (const auto& [id, boxes] : gts) total_gts += boxes.size();

  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (dets[a].score != dets[b].score) return dets[a].score > dets[b].score;
    return dets[a].image_id < dets[b].image_id;
  });

  std::map<long, std::vector<char>> taken;
  for (const auto& [id, boxes] : gts) taken[id].assign(boxes.size(), 0);

  std::vector<char> is_tp(order.size(), 0);
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto& d = dets[order[r]];
    const auto it = gts.find(d.image_id);
    if (it == gts.end()) continue;
    auto& flags = taken[d.image_id];
    const long g = best_unmatched(d.box, it->second, flags, iou_thresh);
    if (g >= 0) {
      flags[static_cast<std::size_t>(g)] = 1;
      is_tp[r] = 1;
    }
  }

  std::vector<double> precision(order.size());
  std::size_t tp = 0;
  if (curve) curve->clear();
  for (std::size_t r = 0; r < order.size(); ++r) {
    tp += is_tp[r];
    precision[r] = static_cast<double>(tp) / static_cast<double>(r + 1);
    if (curve && total_gts > 0) {
      curve->push_back({static_cast<double>(tp) / static_cast<double>(total_gts), precision[r]});
    }
  }
  if (total_gts == 0) return 0.0;

  // Envelope: best precision at any rank at or after r.
  std::vector<double> envelope(precision);
  for (std::size_t r = envelope.size(); r-- > 1;) {
    envelope[r - 1] = std::max(envelope[r - 1], envelope[r]);
  }
  double ap = 0.0;
  const auto g = static_cast<double>(total_gts);
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (is_tp[r]) ap += envelope[r] / g;
  }
  return ap;
}

MetricReport average_precision(std::span<const DetectionRecord> dets, const GroundTruthIndex& gts,
                               std::span<const double> iou_thresholds,
                               std::span<const std::size_t> ar_ks) {
  MetricReport rep;
  rep.iou_thresholds = iou_thresholds.empty()
                           ? coco_iou_thresholds()
                           : std::vector<double>(iou_thresholds.begin(), iou_thresholds.end());
  for (std::size_t t = 0; t < rep.iou_thresholds.size(); ++t) {
    const double th = rep.iou_thresholds[t];
    const double ap = average_precision_at(dets, gts, th, t == 0 ? &rep.pr_curve : nullptr);
    rep.ap_per_threshold.push_back(ap);
    if (std::abs(th - 0.5) < 1e-9) rep.ap50 = ap;
    if (std::abs(th - 0.75) < 1e-9) rep.ap75 = ap;
  }
  if (!rep.ap_per_threshold.empty()) {
    rep.ap = std::accumulate(rep.ap_per_threshold.begin(), rep.ap_per_threshold.end(), 0.0) /
             static_cast<double>(rep.ap_per_threshold.size());
  }

  // Per-image proposal lists for AR@k.
  std::map<long, BoxList<double>> per_image;
  for (const auto& d : dets) {
    auto& bl = per_image[d.image_id];
    if (!bl.scores) bl.scores.emplace();
    bl.boxes.push_back(d.box);
    bl.scores->push_back(d.score);
  }
  const std::vector<std::size_t> default_ks{100, 200, 300};
  const std::span<const std::size_t> ks = ar_ks.empty() ? std::span<const std::size_t>(default_ks) : ar_ks;
  std::size_t total_gts = 0;
  for (const auto& [id, boxes] : gts) total_gts += boxes.size();
  for (std::size_t k : ks) {
    std::size_t matched = 0;
    for (const auto& [id, boxes] : gts) {
      const auto it = per_image.find(id);
      if (it == per_image.end()) continue;
      matched += matched_count(it->second, boxes, k, 0.5);
    }
    rep.ar[k] = total_gts == 0 ? 1.0 : static_cast<double>(matched) / static_cast<double>(total_gts);
  }
  return rep;
}

}  // namespace ddq

// Proposal recall and COCO-style average precision.
#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "ddq/geometry.hpp"

namespace ddq {

struct DetectionRecord {
  long image_id = 0;
  Boxd box;
  double score = 0.0;
};

using GroundTruthIndex = std::map<long, std::vector<Boxd>>;

/// Greedily matches `proposals` (in descending score order) to their best
/// unmatched gt with IoU >= thresh. Returns one gt index (or -1) per
/// proposal, in the proposals' original order.
std::vector<long> greedy_match(std::span<const Boxd> proposals, std::span<const double> scores,
                               std::span<const Boxd> gts, double iou_thresh);

/// Fraction of gts recovered by the top-k proposals at IoU >= thresh; 1 when
/// there are no gts. Proposals without scores are taken in list order.
double recall_at(const BoxList<double>& proposals, std::span<const Boxd> gts, std::size_t k,
                 double iou_thresh = 0.5);

/// Number of gts matched by the top-k proposals (the numerator of recall_at).
std::size_t matched_count(const BoxList<double>& proposals, std::span<const Boxd> gts,
                          std::size_t k, double iou_thresh = 0.5);

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

struct MetricReport {
  std::map<std::size_t, double> ar;  // AR@k at IoU 0.5, pooled over images
  double ap = 0.0;                   // mean over iou_thresholds
  double ap50 = 0.0;
  double ap75 = 0.0;
  std::vector<double> iou_thresholds;
  std::vector<double> ap_per_threshold;
  std::vector<PrPoint> pr_curve;  // raw PR sweep at the first threshold
};

/// 0.50, 0.55, ..., 0.95.
std::vector<double> coco_iou_thresholds();

/// All-point (precision-envelope) AP at one IoU threshold, with its raw PR
/// sweep. Detections are ranked by score, ties by image id then input order.
double average_precision_at(std::span<const DetectionRecord> dets, const GroundTruthIndex& gts,
                            double iou_thresh, std::vector<PrPoint>* curve = nullptr);

MetricReport average_precision(std::span<const DetectionRecord> dets, const GroundTruthIndex& gts,
                               std::span<const double> iou_thresholds = {},
                               std::span<const std::size_t> ar_ks = {});

}  // namespace ddq

// One-to-one query/ground-truth matching with a center-prior candidate mask.
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

#include "ddq/dense_queries.hpp"
#include "ddq/geometry.hpp"

namespace ddq {

/// Weights of the classification, L1 and GIoU terms. Defaults follow the
/// DETR / Sparse R-CNN setting (2, 5, 2); also used as loss weights.
struct CostWeights {
  double cls = 2.0;
  double l1 = 5.0;
  double giou = 2.0;
};

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Rows are queries, columns are ground truths.
struct CostMatrix {
  Eigen::MatrixXd values;  // weighted total; forbidden entries hold forbidden_cost
  Eigen::MatrixXd cls;
  Eigen::MatrixXd l1;
  Eigen::MatrixXd giou;
  BoolMatrix feasible;
  CostWeights weights;
  double forbidden_cost = 0.0;

  Eigen::Index num_queries() const { return values.rows(); }
  Eigen::Index num_gts() const { return values.cols(); }

  /// Marks pairs outside `mask` as forbidden and refreshes the sentinel so it
  /// exceeds the cost of any matching made only of feasible pairs.
  void restrict_to(const BoolMatrix& mask);
  void refresh_sentinel();
};

/// Unweighted L1 distance of center-form boxes normalized by the image size
/// (sum over cx, cy, w, h).
double normalized_l1(const Boxd& a, const Boxd& b, const ImageSize& image);

CostMatrix build_cost_matrix(const QuerySet& q, std::span<const Boxd> gts, const ImageSize& image,
                             const CostWeights& weights = {});

/// Cost matrix from raw values, every entry feasible.
CostMatrix make_cost_matrix(const Eigen::MatrixXd& values);

struct MatchPair {
  std::size_t query = 0;
  std::size_t gt = 0;
  double cost = 0.0;
  double cls_cost = 0.0;
  double l1_cost = 0.0;
  double giou_cost = 0.0;
};

struct AssignmentResult {
  std::vector<MatchPair> pairs;  // sorted by gt index
  std::vector<std::size_t> unmatched_queries;
  std::vector<std::size_t> unmatched_gts;
  double total_cost = 0.0;  // summed in ascending query order

  /// Query matched to gt g, or -1.
  long query_for_gt(std::size_t g) const;
};

/// Minimum-cost one-to-one matching. Maximizes the number of feasible pairs
/// first, then minimizes their total cost. Forbidden pairs never appear.
AssignmentResult hungarian(const CostMatrix& c);

/// points x gts mask: per gt and level, the min(K, level size) points nearest
/// the gt center (ties by lower point index).
BoolMatrix center_prior_candidates(const FeaturePyramid& p, std::span<const Boxd> gts,
                                   int k = 9);

AssignmentResult center_prior_match(const QuerySet& q, const FeaturePyramid& p,
                                    std::span<const Boxd> gts, int k = 9,
                                    const CostWeights& weights = {});

}  // namespace ddq

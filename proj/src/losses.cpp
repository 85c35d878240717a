#include "ddq/losses.hpp"

#include <string>
#include <vector>

namespace ddq {

namespace {

using Dual1 = Eigen::AutoDiffScalar<Eigen::Matrix<double, 1, 1>>;
using Dual4 = Eigen::AutoDiffScalar<Eigen::Vector4d>;

Dual1 seed1(double v) { return Dual1(v, Eigen::Matrix<double, 1, 1>::Ones()); }

}  // namespace

double duplicate_gradient_ratio(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ValidationError("duplicate_gradient_ratio: p must lie in (0, 1)");
  }
  return 1.0 - p / (1.0 - p);
}

double bce_grad(double p, double y) { return bce(seed1(p), y).derivatives()(0); }

double qfl_grad(double sigma, double target, double beta) {
  return qfl(seed1(sigma), target, beta).derivatives()(0);
}

RegressionGradient regression_loss_grad(const Boxd& pred, const Boxd& gt, const ImageSize& image) {
  const Box<Dual4> p{Dual4(pred.x1, 4, 0), Dual4(pred.y1, 4, 1), Dual4(pred.x2, 4, 2),
                     Dual4(pred.y2, 4, 3)};
  const auto terms = regression_loss(p, gt, image);
  RegressionGradient g;
  g.l1 = terms.l1.derivatives();
  g.giou = terms.giou.derivatives();
  return g;
}

LossBreakdown set_prediction_loss(const QuerySet& q, std::span<const Boxd> gts,
                                  const AssignmentResult& match, const ImageSize& image,
                                  const LossConfig& cfg) {
  if (q.scores.size() != q.boxes.size()) {
    throw ValidationError("set_prediction_loss: query set is missing scores");
  }
  std::vector<long> gt_of_query(q.size(), -1);
  std::vector<char> gt_seen(gts.size(), 0);
  for (const auto& pr : match.pairs) {
    if (pr.query >= q.size() || pr.gt >= gts.size()) {
      throw ValidationError("set_prediction_loss: match refers to query " +
                            std::to_string(pr.query) + " / gt " + std::to_string(pr.gt) +
                            " out of range");
    }
    if (gt_of_query[pr.query] != -1 || gt_seen[pr.gt]) {
      throw ValidationError("set_prediction_loss: match is not one-to-one");
    }
    gt_of_query[pr.query] = static_cast<long>(pr.gt);
    gt_seen[pr.gt] = 1;
  }

  LossBreakdown out;
  double cls_sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double s = q.scores[i];
    const long g = gt_of_query[i];
    if (g < 0) {
      cls_sum += cfg.cls_loss == ClsLoss::kQfl ? qfl(s, 0.0, cfg.qfl_beta) : bce(s, 0.0);
      continue;
    }
    const Boxd& gt = gts[static_cast<std::size_t>(g)];
    if (cfg.cls_loss == ClsLoss::kQfl) {
      cls_sum += qfl(s, iou(q.boxes[i], gt), cfg.qfl_beta);
    } else {
      cls_sum += bce(s, 1.0);
    }
    const auto reg = regression_loss(q.boxes[i], gt, image);
    out.l1 += reg.l1;
    out.giou += reg.giou;
  }
  const auto matched = static_cast<double>(match.pairs.size());
  out.cls = cls_sum / std::max(matched, 1.0);
  if (matched > 0) {
    out.l1 /= matched;
    out.giou /= matched;
  }
  out.total = cfg.weights.cls * out.cls + cfg.weights.l1 * out.l1 + cfg.weights.giou * out.giou;
  return out;
}

}  // namespace ddq

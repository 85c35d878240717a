// Classification and regression losses, plus the duplicate-query gradient
// ratio. The scalar loss terms are templates so that gradients can be taken
// with Eigen::AutoDiffScalar.
#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/AutoDiff>

#include <cmath>
#include <span>

#include "ddq/assignment.hpp"
#include "ddq/dense_queries.hpp"
#include "ddq/geometry.hpp"

namespace ddq {

inline constexpr double kProbEps = 1e-12;

template <typename S>
S clamp_probability(const S& p) {
  if (p < S(kProbEps)) return S(kProbEps);
  if (p > S(1.0 - kProbEps)) return S(1.0 - kProbEps);
  return p;
}

/// Binary cross-entropy against a (possibly soft) target y in [0, 1].
template <typename S>
S bce(const S& p, double y) {
  using std::log;
  const S pc = clamp_probability(p);
  return -(S(y) * log(pc) + S(1.0 - y) * log(S(1.0) - pc));
}

/// Quality focal loss: |target - sigma|^beta * bce(sigma, target).
template <typename S>
S qfl(const S& sigma, double target, double beta = 2.0) {
  using std::abs;
  using std::pow;
  if (!(target >= 0.0 && target <= 1.0)) throw ValidationError("qfl: target outside [0, 1]");
  if (!(beta >= 0.0)) throw ValidationError("qfl: beta must be >= 0");
  const S sc = clamp_probability(sigma);
  const S diff = abs(S(target) - sc);
  const S modulation = beta == 0.0 ? S(1.0) : pow(diff, beta);
  return modulation * bce(sc, target);
}

template <typename S>
struct RegressionTerms {
  S l1;    // mean |center-form difference| normalized by image size
  S giou;  // 1 - giou(pred, gt)
};

template <typename S>
RegressionTerms<S> regression_loss(const Box<S>& pred, const Boxd& gt, const ImageSize& image) {
  using std::abs;
  if (gt.is_degenerate()) throw ValidationError("regression_loss: degenerate ground truth");
  if (!(image.width > 0 && image.height > 0)) {
    throw ValidationError("regression_loss: image size must be positive");
  }
  const Box<S> g = gt.cast<S>();
  const Vector4<S> dp = center_form(pred) - center_form(g);
  const S l1 = (abs(dp[0]) / S(image.width) + abs(dp[1]) / S(image.height) +
                abs(dp[2]) / S(image.width) + abs(dp[3]) / S(image.height)) /
               S(4.0);
  return {l1, S(1.0) - giou(pred, g)};
}

/// Ratio of the positive-query score gradient with a duplicated query to the
/// one without: 1 - p / (1 - p). Requires 0 < p < 1.
double duplicate_gradient_ratio(double p);

// Analytic input-space gradients (forward-mode autodiff).
double bce_grad(double p, double y);
double qfl_grad(double sigma, double target, double beta = 2.0);
struct RegressionGradient {
  Vector4<double> l1;    // d l1 / d (x1, y1, x2, y2)
  Vector4<double> giou;  // d giou_term / d (x1, y1, x2, y2)
};
RegressionGradient regression_loss_grad(const Boxd& pred, const Boxd& gt, const ImageSize& image);

enum class ClsLoss { kBce, kQfl };

struct LossConfig {
  CostWeights weights;
  ClsLoss cls_loss = ClsLoss::kBce;
  double qfl_beta = 2.0;
};

struct LossBreakdown {
  double cls = 0.0;
  double l1 = 0.0;
  double giou = 0.0;
  double total = 0.0;
};

/// Matched queries get a foreground target (1, or IoU with their gt under
/// QFL) plus regression terms; all other queries get target 0. The
/// classification sum is divided by max(num_matched, 1) and the regression
/// sums by num_matched.
LossBreakdown set_prediction_loss(const QuerySet& q, std::span<const Boxd> gts,
                                  const AssignmentResult& match, const ImageSize& image,
                                  const LossConfig& cfg = {});

}  // namespace ddq

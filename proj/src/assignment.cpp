#include "ddq/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

namespace ddq {

namespace {

// Shortest augmenting path with potentials (Kuhn-Munkres / Jonker-Volgenant
// style) for an n x m matrix with n <= m. Returns the column of each row.
std::vector<Eigen::Index> solve_rows_le_cols(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  const Eigen::Index m = a.cols();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<Eigen::Index> p(m + 1, 0), way(m + 1, 0);
  for (Eigen::Index i = 1; i <= n; ++i) {
    p[0] = i;
    Eigen::Index j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const Eigen::Index i0 = p[j0];
      double delta = kInf;
      Eigen::Index j1 = 0;
      for (Eigen::Index j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Eigen::Index j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const Eigen::Index j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<Eigen::Index> row_to_col(static_cast<std::size_t>(n), -1);
  for (Eigen::Index j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[static_cast<std::size_t>(p[j] - 1)] = j - 1;
  }
  return row_to_col;
}

}  // namespace

void CostMatrix::refresh_sentinel() {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (!feasible(i, j)) continue;
      lo = std::min(lo, values(i, j));
      hi = std::max(hi, values(i, j));
    }
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 0.0;
  }
  // Any two matchings of k feasible pairs differ by at most k * (hi - lo).
  const double k = static_cast<double>(std::min(values.rows(), values.cols())) + 1.0;
  forbidden_cost = hi + (hi - lo + 1.0) * k + std::abs(hi) + 1.0;
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (!feasible(i, j)) values(i, j) = forbidden_cost;
    }
  }
}

void CostMatrix::restrict_to(const BoolMatrix& mask) {
  if (mask.rows() != values.rows() || mask.cols() != values.cols()) {
    throw ValidationError("CostMatrix::restrict_to: mask shape mismatch");
  }
  feasible = feasible && mask;
  // Restore the weighted totals before re-deriving the sentinel.
  values = weights.cls * cls + weights.l1 * l1 + weights.giou * giou;
  refresh_sentinel();
}

double normalized_l1(const Boxd& a, const Boxd& b, const ImageSize& image) {
  const Vector4<double> scale(image.width, image.height, image.width, image.height);
  return ((center_form(a) - center_form(b)).array().abs() / scale.array()).sum();
}

CostMatrix build_cost_matrix(const QuerySet& q, std::span<const Boxd> gts, const ImageSize& image,
                             const CostWeights& weights) {
  if (gts.empty()) throw ValidationError("build_cost_matrix: no ground truths");
  if (q.scores.size() != q.boxes.size()) {
    throw ValidationError("build_cost_matrix: query set is missing scores");
  }
  if (!(image.width > 0 && image.height > 0)) {
    throw ValidationError("build_cost_matrix: image size must be positive");
  }
  const auto n = static_cast<Eigen::Index>(q.size());
  const auto m = static_cast<Eigen::Index>(gts.size());
  CostMatrix c;
  c.weights = weights;
  c.cls.resize(n, m);
  c.l1.resize(n, m);
  c.giou.resize(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Boxd& box = q.boxes[static_cast<std::size_t>(i)];
    const double s = q.scores[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m; ++j) {
      const Boxd& gt = gts[static_cast<std::size_t>(j)];
      c.cls(i, j) = -s;
      c.l1(i, j) = normalized_l1(box, gt, image);
      // giou needs at least one non-degenerate box; the gt normally is.
      c.giou(i, j) = (box.is_degenerate() && gt.is_degenerate()) ? 2.0 : 1.0 - giou(box, gt);
    }
  }
  c.values = weights.cls * c.cls + weights.l1 * c.l1 + weights.giou * c.giou;
  c.feasible = BoolMatrix::Constant(n, m, true);
  c.refresh_sentinel();
  return c;
}

CostMatrix make_cost_matrix(const Eigen::MatrixXd& values) {
  CostMatrix c;
  c.weights = {1.0, 0.0, 0.0};
  c.cls = values;
  c.l1 = Eigen::MatrixXd::Zero(values.rows(), values.cols());
  c.giou = c.l1;
  c.values = values;
  c.feasible = BoolMatrix::Constant(values.rows(), values.cols(), true);
  c.refresh_sentinel();
  return c;
}

long AssignmentResult::query_for_gt(std::size_t g) const {
  for (const auto& p : pairs) {
    if (p.gt == g) return static_cast<long>(p.query);
  }
  return -1;
}

AssignmentResult hungarian(const CostMatrix& c) {
  const Eigen::Index nq = c.values.rows();
  const Eigen::Index ng = c.values.cols();
  if (c.feasible.rows() != nq || c.feasible.cols() != ng) {
    throw ValidationError("hungarian: feasibility mask shape mismatch");
  }
  if (c.values.hasNaN()) throw ValidationError("hungarian: NaN cost");

  // Only queries and gts with at least one feasible partner take part.
  std::vector<Eigen::Index> rows, cols;
  for (Eigen::Index i = 0; i < nq; ++i) {
    if (c.feasible.row(i).any()) rows.push_back(i);
  }
  for (Eigen::Index j = 0; j < ng; ++j) {
    if (c.feasible.col(j).any()) cols.push_back(j);
  }

  std::vector<std::pair<Eigen::Index, Eigen::Index>> matched;  // (query, gt)
  if (!rows.empty() && !cols.empty()) {
    const auto nr = static_cast<Eigen::Index>(rows.size());
    const auto nc = static_cast<Eigen::Index>(cols.size());
    // The smaller side becomes the row side of the solver; gts win ties so
    // that earlier gts claim lower-indexed queries.
    const bool gts_as_rows = nc <= nr;
    Eigen::MatrixXd sub = gts_as_rows ? Eigen::MatrixXd(nc, nr) : Eigen::MatrixXd(nr, nc);
    for (Eigen::Index a = 0; a < nr; ++a) {
      for (Eigen::Index b = 0; b < nc; ++b) {
        const double v = c.values(rows[a], cols[b]);
        if (gts_as_rows) {
          sub(b, a) = v;
        } else {
          sub(a, b) = v;
        }
      }
    }
    const auto sol = solve_rows_le_cols(sub);
    for (std::size_t r = 0; r < sol.size(); ++r) {
      if (sol[r] < 0) continue;
      const Eigen::Index qi = gts_as_rows ? rows[sol[r]] : rows[r];
      const Eigen::Index gi = gts_as_rows ? cols[r] : cols[sol[r]];
      if (c.feasible(qi, gi)) matched.emplace_back(qi, gi);
    }
  }

  AssignmentResult out;
  std::sort(matched.begin(), matched.end());
  for (const auto& [qi, gi] : matched) out.total_cost += c.values(qi, gi);
  std::vector<char> q_used(static_cast<std::size_t>(nq), 0), g_used(static_cast<std::size_t>(ng), 0);
  for (const auto& [qi, gi] : matched) {
    MatchPair mp;
    mp.query = static_cast<std::size_t>(qi);
    mp.gt = static_cast<std::size_t>(gi);
    mp.cost = c.values(qi, gi);
    mp.cls_cost = c.cls(qi, gi);
    mp.l1_cost = c.l1(qi, gi);
    mp.giou_cost = c.giou(qi, gi);
    out.pairs.push_back(mp);
    q_used[mp.query] = 1;
    g_used[mp.gt] = 1;
  }
  std::sort(out.pairs.begin(), out.pairs.end(),
            [](const MatchPair& a, const MatchPair& b) { return a.gt < b.gt; });
  for (std::size_t i = 0; i < q_used.size(); ++i) {
    if (!q_used[i]) out.unmatched_queries.push_back(i);
  }
  for (std::size_t j = 0; j < g_used.size(); ++j) {
    if (!g_used[j]) out.unmatched_gts.push_back(j);
  }
  return out;
}

BoolMatrix center_prior_candidates(const FeaturePyramid& p, std::span<const Boxd> gts, int k) {
  if (k < 1) throw ValidationError("center_prior_candidates: K must be >= 1");
  BoolMatrix mask = BoolMatrix::Constant(static_cast<Eigen::Index>(p.num_points()),
                                         static_cast<Eigen::Index>(gts.size()), false);
  const auto& pts = p.points();
  std::vector<std::pair<double, std::size_t>> dist;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    const double cx = gts[g].center_x();
    const double cy = gts[g].center_y();
    for (const auto& lv : p.levels()) {
      dist.clear();
      for (std::size_t i = 0; i < lv.size(); ++i) {
        const auto row = static_cast<Eigen::Index>(lv.offset + i);
        const double dx = pts(row, 0) - cx;
        const double dy = pts(row, 1) - cy;
        dist.emplace_back(dx * dx + dy * dy, lv.offset + i);
      }
      const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), dist.size());
      std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(take), dist.end());
      for (std::size_t t = 0; t < take; ++t) {
        mask(static_cast<Eigen::Index>(dist[t].second), static_cast<Eigen::Index>(g)) = true;
      }
    }
  }
  return mask;
}

AssignmentResult center_prior_match(const QuerySet& q, const FeaturePyramid& p,
                                    std::span<const Boxd> gts, int k, const CostWeights& weights) {
  if (q.origins.size() != q.size()) {
    throw ValidationError("center_prior_match: query set lacks origin tags");
  }
  if (gts.empty()) {
    AssignmentResult empty;
    for (std::size_t i = 0; i < q.size(); ++i) empty.unmatched_queries.push_back(i);
    return empty;
  }
  const BoolMatrix point_mask = center_prior_candidates(p, gts, k);
  BoolMatrix query_mask(static_cast<Eigen::Index>(q.size()), point_mask.cols());
  for (std::size_t i = 0; i < q.size(); ++i) {
    query_mask.row(static_cast<Eigen::Index>(i)) =
        point_mask.row(static_cast<Eigen::Index>(p.flat_index(q.origins[i])));
  }
  CostMatrix c = build_cost_matrix(q, gts, p.image_size(), weights);
  c.restrict_to(query_mask);
  return hungarian(c);
}

}  // namespace ddq

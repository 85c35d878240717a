#include "ddq/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <string>
#include <thread>

#include "ddq/assignment.hpp"
#include "ddq/evaluation.hpp"
#include "ddq/losses.hpp"

namespace ddq::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Boxd ordered_box(const Boxd& b) {
  return {std::min(b.x1, b.x2), std::min(b.y1, b.y2), std::max(b.x1, b.x2), std::max(b.y1, b.y2)};
}

// Box of query i from its anchor and error, clipped to the image.
Boxd realize(const Boxd& anchor, const Eigen::Matrix<double, 1, 4>& err, const Scene& scene) {
  const Boxd raw{anchor.x1 + err(0), anchor.y1 + err(1), anchor.x2 + err(2), anchor.y2 + err(3)};
  return clip(ordered_box(raw), double(scene.image_w), double(scene.image_h));
}

double score_of(const Boxd& box, double eps, const Scene& scene, const ResponseModel& model,
                const std::vector<double>& quality) {
  double best = 0.0;
  long best_g = -1;
  for (std::size_t g = 0; g < scene.gts.size(); ++g) {
    const double v = iou(box, scene.gts[g]);
    if (best_g < 0 || v > best) {
      best = v;
      best_g = static_cast<long>(g);
    }
  }
  const double q = best_g < 0 ? 0.0 : quality[static_cast<std::size_t>(best_g)];
  const double s = std::pow(best, model.gamma) * q + model.score_noise * eps;
  return std::clamp(s, 0.0, 1.0);
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

}  // namespace

void SceneConfig::validate() const {
  if (image_w < 1 || image_h < 1) throw ValidationError("scene: image size must be positive");
  if (gt_count < 0) throw ValidationError("scene: gt_count must be >= 0");
  if (!(min_size > 0.0) || !(max_size >= min_size)) {
    throw ValidationError("scene: need 0 < min_size <= max_size");
  }
  if (min_size > image_w || min_size > image_h) {
    throw ValidationError("scene: min_size exceeds the image");
  }
  if (!(max_overlap >= 0.0 && max_overlap <= 1.0)) {
    throw ValidationError("scene: max_overlap must lie in [0, 1]");
  }
  if (max_attempts < 1) throw ValidationError("scene: max_attempts must be >= 1");
}

Scene generate_scene(const SceneConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Scene s;
  s.image_w = cfg.image_w;
  s.image_h = cfg.image_h;
  s.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double max_w = std::min(cfg.max_size, double(cfg.image_w));
  const double max_h = std::min(cfg.max_size, double(cfg.image_h));
  const double log_min = std::log(cfg.min_size);
  int attempts = 0;
  while (static_cast<int>(s.gts.size()) < cfg.gt_count) {
    if (attempts++ >= cfg.max_attempts) {
      throw ValidationError("generate_scene: placed only " + std::to_string(s.gts.size()) + " of " +
                            std::to_string(cfg.gt_count) + " boxes in " +
                            std::to_string(cfg.max_attempts) + " attempts");
    }
    const double w = std::exp(log_min + unit(rng) * (std::log(max_w) - log_min));
    const double h = std::exp(log_min + unit(rng) * (std::log(max_h) - log_min));
    const double x1 = unit(rng) * (cfg.image_w - w);
    const double y1 = unit(rng) * (cfg.image_h - h);
    const Boxd b{x1, y1, x1 + w, y1 + h};
    const bool clash = std::any_of(s.gts.begin(), s.gts.end(),
                                   [&](const Boxd& o) { return iou(b, o) > cfg.max_overlap; });
    if (!clash) s.gts.push_back(b);
  }
  return s;
}

void ResponseModel::validate() const {
  if (!(gamma > 0.0)) throw ValidationError("response: gamma must be > 0");
  if (!(quality >= 0.0 && quality <= 1.0)) throw ValidationError("response: quality outside [0, 1]");
  if (!(quality_spread >= 0.0 && quality_spread <= 1.0)) {
    throw ValidationError("response: quality_spread outside [0, 1]");
  }
  if (!(score_noise >= 0.0) || !(box_noise >= 0.0) || !(center_noise >= 0.0) ||
      !(duplicate_jitter >= 0.0)) {
    throw ValidationError("response: noise scales must be >= 0");
  }
  if (duplication < 1) throw ValidationError("response: duplication must be >= 1");
  if (feature_dim < 0) throw ValidationError("response: feature_dim must be >= 0");
}

SimulatedQueries simulate_responses_detailed(const Scene& scene, const FeaturePyramid& pyramid,
                                             const ResponseModel& model, std::uint64_t seed) {
  model.validate();
  if (pyramid.image_w() != scene.image_w || pyramid.image_h() != scene.image_h) {
    throw ValidationError("simulate_responses: pyramid and scene image sizes differ");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SimulatedQueries sim;
  for (std::size_t g = 0; g < scene.gts.size(); ++g) {
    sim.gt_quality.push_back(model.quality * (1.0 - model.quality_spread * unit(rng)));
  }

  const std::size_t dup = static_cast<std::size_t>(model.duplication);
  const std::size_t n = pyramid.num_points() * dup;
  sim.target.reserve(n);
  sim.anchor.reserve(n);
  sim.error.resize(static_cast<Eigen::Index>(n), 4);
  sim.score_eps.resize(static_cast<Eigen::Index>(n));
  auto& q = sim.queries;
  q.boxes.reserve(n);
  q.scores.reserve(n);
  q.origins.reserve(n);

  Eigen::Index row = 0;
  for (std::size_t k = 0; k < pyramid.num_points(); ++k) {
    const QueryOrigin origin = pyramid.origin(k);
    const double stride = double(1 << origin.level);
    const Eigen::Vector2d pt = pyramid.point(k);

    long target = -1;
    for (std::size_t g = 0; g < scene.gts.size(); ++g) {
      const Boxd& b = scene.gts[g];
      if (pt.x() < b.x1 || pt.x() >= b.x2 || pt.y() < b.y1 || pt.y() >= b.y2) continue;
      if (target < 0 || b.area() < scene.gts[static_cast<std::size_t>(target)].area()) {
        target = static_cast<long>(g);
      }
    }

    Boxd anchor;
    double sx = model.box_noise;
    double sy = model.box_noise;
    if (target >= 0) {
      anchor = scene.gts[static_cast<std::size_t>(target)];
      const double mismatch = std::abs(std::log2(std::sqrt(anchor.area()) / (8.0 * stride)));
      const double dx = std::abs(pt.x() - anchor.center_x()) / (anchor.width() / 2.0);
      const double dy = std::abs(pt.y() - anchor.center_y()) / (anchor.height() / 2.0);
      const double d = std::min(1.0, std::max(dx, dy));
      sx = model.box_noise * (1.0 + mismatch) + model.center_noise * d * anchor.width();
      sy = model.box_noise * (1.0 + mismatch) + model.center_noise * d * anchor.height();
    } else {
      const double half = 2.0 * stride;
      anchor = {pt.x() - half, pt.y() - half, pt.x() + half, pt.y() + half};
    }
    Eigen::Matrix<double, 1, 4> base;
    base << sx * normal(rng), sy * normal(rng), sx * normal(rng), sy * normal(rng);

    for (std::size_t c = 0; c < dup; ++c) {
      Eigen::Matrix<double, 1, 4> err = base;
      if (c > 0) {
        for (int j = 0; j < 4; ++j) err(j) += model.duplicate_jitter * normal(rng);
      }
      sim.error.row(row) = err;
      sim.score_eps(row) = normal(rng);
      sim.target.push_back(target);
      sim.anchor.push_back(anchor);
      q.origins.push_back(origin);
      ++row;
    }
  }
  q.boxes.resize(n);
  q.scores.resize(n);
  rescore(sim, scene, model);

  if (model.feature_dim > 0) {
    std::mt19937_64 frng(splitmix64(seed));
    q.features.resize(static_cast<Eigen::Index>(n), model.feature_dim);
    for (Eigen::Index i = 0; i < q.features.rows(); ++i) {
      for (Eigen::Index j = 0; j < q.features.cols(); ++j) q.features(i, j) = normal(frng);
    }
    q.feature_source = "synthetic";
  } else {
    q.features.resize(static_cast<Eigen::Index>(n), 0);
    q.feature_source = "none";
  }
  return sim;
}

QuerySet simulate_responses(const Scene& scene, const FeaturePyramid& pyramid,
                            const ResponseModel& model, std::uint64_t seed) {
  return simulate_responses_detailed(scene, pyramid, model, seed).queries;
}

void rescore(SimulatedQueries& sim, const Scene& scene, const ResponseModel& model) {
  auto& q = sim.queries;
  for (std::size_t i = 0; i < sim.target.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    q.boxes[i] = realize(sim.anchor[i], sim.error.row(r), scene);
    q.scores[i] = score_of(q.boxes[i], sim.score_eps(r), scene, model, sim.gt_quality);
  }
}

void refine(SimulatedQueries& sim, const Scene& scene, const ResponseModel& model, double shrink) {
  if (!(shrink >= 0.0 && shrink <= 1.0)) throw ValidationError("refine: shrink outside [0, 1]");
  sim.error *= shrink;
  rescore(sim, scene, model);
}

FeaturePyramidMaps render_feature_maps(const Scene& scene, const FeaturePyramid& pyramid,
                                       int channels, std::uint64_t seed) {
  if (channels < 1) throw ValidationError("render_feature_maps: channels must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.1);
  FeaturePyramidMaps maps;
  for (const auto& lv : pyramid.levels()) {
    FeatureMap fm(lv.level, lv.grid_h, lv.grid_w, channels);
    for (int y = 0; y < lv.grid_h; ++y) {
      for (int x = 0; x < lv.grid_w; ++x) {
        const Eigen::Vector2d pt = pyramid.point(lv.level, y, x);
        double heat = 0.0;
        for (const auto& g : scene.gts) {
          const double sx = std::max(g.width() / 4.0, 1.0);
          const double sy = std::max(g.height() / 4.0, 1.0);
          const double ux = (pt.x() - g.center_x()) / sx;
          const double uy = (pt.y() - g.center_y()) / sy;
          heat += std::exp(-0.5 * (ux * ux + uy * uy));
        }
        auto cell = fm.cell(y, x);
        cell(0) = heat;
        for (int c = 1; c < channels; ++c) cell(c) = noise(rng);
      }
    }
    maps.emplace(lv.level, std::move(fm));
  }
  return maps;
}

// ---------------------------------------------------------------------------

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (std::uint64_t{words[0]} << 32) | words[1];
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  const int workers = std::max(1, std::min(threads, n));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

const Series& ExperimentReport::find_series(const std::string& label) const {
  for (const auto& s : series) {
    if (s.label == label) return s;
  }
  throw ValidationError("report has no series '" + label + "'");
}

namespace {

void check_options(const RunOptions& opt) {
  if (opt.seeds < 1) throw ValidationError("experiment: need at least one seed");
}

}  // namespace

ExperimentReport run_recall_experiment(const RecallConfig& cfg, const RunOptions& opt) {
  check_options(opt);
  if (cfg.budgets.empty()) throw ValidationError("recall experiment: empty budget list");
  cfg.scene.validate();
  cfg.response.validate();
  const FeaturePyramid pyramid(cfg.scene.image_w, cfg.scene.image_h);
  const std::size_t max_budget = *std::max_element(cfg.budgets.begin(), cfg.budgets.end());

  struct TrialResult {
    std::uint64_t seed = 0;
    std::vector<double> topk, dqr;
  };
  std::vector<TrialResult> results(static_cast<std::size_t>(opt.seeds));
  parallel_for(opt.seeds, opt.threads, [&](int t) {
    auto& res = results[static_cast<std::size_t>(t)];
    res.seed = trial_seed(opt.master_seed, static_cast<std::uint64_t>(t));
    const Scene scene = generate_scene(cfg.scene, splitmix64(res.seed));
    const QuerySet q = simulate_responses(scene, pyramid, cfg.response, splitmix64(res.seed + 1));
    const auto order = score_order(q.scores);
    const auto kept = nms_indices(q.boxes, q.scores, cfg.nms_iou, max_budget);
    for (std::size_t k : cfg.budgets) {
      auto recall_of = [&](const std::vector<std::size_t>& ranked) {
        BoxList<double> bl;
        for (std::size_t r = 0; r < std::min(k, ranked.size()); ++r) bl.boxes.push_back(q.boxes[ranked[r]]);
        return recall_at(bl, scene.gts, k, cfg.match_iou);
      };
      res.topk.push_back(recall_of(order));
      res.dqr.push_back(recall_of(kept));
    }
  });

  ExperimentReport rep;
  rep.experiment = "recall";
  rep.x_label = "budget";
  rep.y_label = "AR";
  rep.columns = {"method", "budget", "seed", "AR"};
  for (const auto& r : results) {
    rep.seeds.push_back(r.seed);
    for (std::size_t b = 0; b < cfg.budgets.size(); ++b) {
      const auto budget = static_cast<long long>(cfg.budgets[b]);
      rep.rows.push_back({std::string("topk"), budget, r.seed, r.topk[b]});
      rep.rows.push_back({std::string("dqr"), budget, r.seed, r.dqr[b]});
    }
  }
  for (const std::string method : {"topk", "dqr"}) {
    Series s;
    s.label = method;
    for (std::size_t b = 0; b < cfg.budgets.size(); ++b) {
      std::vector<double> v;
      for (const auto& r : results) v.push_back(method == "topk" ? r.topk[b] : r.dqr[b]);
      const auto [m, sd] = mean_std(v);
      s.x.push_back(double(cfg.budgets[b]));
      s.mean.push_back(m);
      s.stddev.push_back(sd);
    }
    rep.series.push_back(std::move(s));
  }
  return rep;
}

namespace {

// Classification loss of a pool where each of `gts` has `copies` identical
// queries (box equal to the gt) sharing score p.
struct Pool {
  std::vector<Boxd> gts;
  QuerySet queries;
  AssignmentResult match;
  ImageSize image{800.0, 800.0};

  Pool(int gt_count, int copies, double p) {
    for (int g = 0; g < gt_count; ++g) {
      const double x = 40.0 + 90.0 * (g % 8);
      const double y = 40.0 + 90.0 * (g / 8);
      gts.push_back({x, y, x + 60.0, y + 60.0});
    }
    for (int g = 0; g < gt_count; ++g) {
      for (int c = 0; c < copies; ++c) {
        queries.boxes.push_back(gts[static_cast<std::size_t>(g)]);
        queries.origins.push_back({kMinLevel, static_cast<std::size_t>(g)});
      }
    }
    queries.features.resize(static_cast<Eigen::Index>(queries.boxes.size()), 0);
    set_score(p);
    match = hungarian(build_cost_matrix(queries, gts, image));
  }

  void set_score(double p) { queries.scores.assign(queries.boxes.size(), p); }

  double loss(double p) {
    set_score(p);
    return set_prediction_loss(queries, gts, match, image).cls;
  }

  double gradient(double p, double h) { return (loss(p + h) - loss(p - h)) / (2.0 * h); }
};

}  // namespace

ExperimentReport run_gradient_experiment(const GradientConfig& cfg, const RunOptions& opt) {
  if (cfg.p_grid.empty()) throw ValidationError("gradient experiment: empty p grid");
  if (cfg.copies < 1 || cfg.gt_count < 1 || cfg.steps < 0) {
    throw ValidationError("gradient experiment: copies, gt_count >= 1 and steps >= 0 required");
  }
  for (double p : cfg.p_grid) {
    if (!(p > cfg.fd_step && p < 1.0 - cfg.fd_step)) {
      throw ValidationError("gradient experiment: p grid values must lie strictly inside (0, 1)");
    }
  }

  struct Trace {
    std::vector<double> p, loss, alpha, expected;
  };
  const std::vector<std::pair<std::string, int>> pools{{"duplicated", cfg.copies}, {"distinct", 1}};
  // traces[pool][grid index]
  std::vector<std::vector<Trace>> traces(pools.size(), std::vector<Trace>(cfg.p_grid.size()));
  const int n_tasks = static_cast<int>(pools.size() * cfg.p_grid.size());
  parallel_for(n_tasks, opt.threads, [&](int task) {
    const std::size_t pi = static_cast<std::size_t>(task) / cfg.p_grid.size();
    const std::size_t gi = static_cast<std::size_t>(task) % cfg.p_grid.size();
    const int copies = pools[pi].second;
    Pool pool(cfg.gt_count, copies, cfg.p_grid[gi]);
    Pool reference(cfg.gt_count, 1, cfg.p_grid[gi]);
    Trace& tr = traces[pi][gi];
    double p = cfg.p_grid[gi];
    for (int step = 0; step <= cfg.steps; ++step) {
      const double h = std::min(cfg.fd_step, 0.5 * std::min(p, 1.0 - p));
      const double grad = pool.gradient(p, h);
      const double grad0 = reference.gradient(p, h);
      tr.p.push_back(p);
      tr.loss.push_back(pool.loss(p));
      tr.alpha.push_back(grad / grad0);
      tr.expected.push_back(copies == 2   ? duplicate_gradient_ratio(p)
                            : copies == 1 ? 1.0
                                          : 1.0 - (copies - 1) * p / (1.0 - p));
      // Gradient step on the logit keeps p inside (0, 1).
      double z = std::log(p / (1.0 - p));
      z -= cfg.learning_rate * grad * p * (1.0 - p);
      p = 1.0 / (1.0 + std::exp(-z));
      p = std::clamp(p, 1e-9, 1.0 - 1e-9);
    }
  });

  ExperimentReport rep;
  rep.experiment = "gradient";
  rep.x_label = "step";
  rep.y_label = "score";
  rep.columns = {"method", "p_init", "step", "p", "loss", "alpha", "alpha_expected"};
  for (std::size_t pi = 0; pi < pools.size(); ++pi) {
    for (std::size_t gi = 0; gi < cfg.p_grid.size(); ++gi) {
      const Trace& tr = traces[pi][gi];
      for (std::size_t s = 0; s < tr.p.size(); ++s) {
        rep.rows.push_back({pools[pi].first, cfg.p_grid[gi], static_cast<long long>(s), tr.p[s],
                            tr.loss[s], tr.alpha[s], tr.expected[s]});
      }
    }
    for (const char* what : {"p", "loss"}) {
      Series s;
      s.label = pools[pi].first + ":" + what;
      for (int step = 0; step <= cfg.steps; ++step) {
        std::vector<double> v;
        for (const auto& tr : traces[pi]) {
          v.push_back(std::string(what) == "p" ? tr.p[static_cast<std::size_t>(step)]
                                               : tr.loss[static_cast<std::size_t>(step)]);
        }
        const auto [m, sd] = mean_std(v);
        s.x.push_back(step);
        s.mean.push_back(m);
        s.stddev.push_back(sd);
      }
      rep.series.push_back(std::move(s));
    }
  }
  return rep;
}

ExperimentReport run_cascade_experiment(const CascadeConfig& cfg, const RunOptions& opt) {
  check_options(opt);
  cfg.scene.validate();
  cfg.response.validate();
  cfg.dqr.validate();
  if (!(cfg.refine_shrink >= 0.0 && cfg.refine_shrink <= 1.0)) {
    throw ValidationError("cascade experiment: refine_shrink outside [0, 1]");
  }
  const FeaturePyramid pyramid(cfg.scene.image_w, cfg.scene.image_h);
  const std::size_t stages = cfg.dqr.stage_budgets.size();

  struct StageResult {
    std::size_t survivors = 0;
    double recall = 0.0;
    double ap = 0.0;
  };
  struct TrialResult {
    std::uint64_t seed = 0;
    std::vector<StageResult> stages;
  };
  std::vector<TrialResult> results(static_cast<std::size_t>(opt.seeds));
  parallel_for(opt.seeds, opt.threads, [&](int t) {
    auto& res = results[static_cast<std::size_t>(t)];
    res.seed = trial_seed(opt.master_seed, static_cast<std::uint64_t>(t));
    const Scene scene = generate_scene(cfg.scene, splitmix64(res.seed));
    SimulatedQueries sim =
        simulate_responses_detailed(scene, pyramid, cfg.response, splitmix64(res.seed + 1));
    std::vector<std::size_t> alive(sim.queries.size());
    std::iota(alive.begin(), alive.end(), std::size_t{0});
    GroundTruthIndex gt_index{{0, scene.gts}};
    for (std::size_t s = 0; s < stages; ++s) {
      if (s > 0) refine(sim, scene, cfg.response, cfg.refine_shrink);
      const QuerySet current = sim.queries.select(alive);
      const NmsResult sel = cascade_select(current, cfg.dqr, s);
      std::vector<std::size_t> next;
      for (std::size_t k : sel.kept) next.push_back(alive[k]);
      alive = std::move(next);

      StageResult sr;
      sr.survivors = alive.size();
      sr.recall = recall_at(sel.queries.box_list(), scene.gts, sel.queries.size(), cfg.match_iou);
      std::vector<DetectionRecord> dets;
      for (std::size_t i = 0; i < sel.queries.size(); ++i) {
        dets.push_back({0, sel.queries.boxes[i], sel.queries.scores[i]});
      }
      sr.ap = average_precision(dets, gt_index).ap;
      res.stages.push_back(sr);
    }
  });

  ExperimentReport rep;
  rep.experiment = "cascade";
  rep.x_label = "stage";
  rep.y_label = "metric";
  rep.columns = {"stage", "budget", "seed", "survivors", "recall", "AP"};
  for (const auto& r : results) {
    rep.seeds.push_back(r.seed);
    for (std::size_t s = 0; s < stages; ++s) {
      const auto& sr = r.stages[s];
      rep.rows.push_back({static_cast<long long>(s), static_cast<long long>(cfg.dqr.stage_budgets[s]),
                          r.seed, static_cast<long long>(sr.survivors),
                          sr.recall, sr.ap});
    }
  }
  for (const std::string metric : {"recall", "AP"}) {
    Series ser;
    ser.label = metric;
    for (std::size_t s = 0; s < stages; ++s) {
      std::vector<double> v;
      for (const auto& r : results) v.push_back(metric == "recall" ? r.stages[s].recall : r.stages[s].ap);
      const auto [m, sd] = mean_std(v);
      ser.x.push_back(double(s));
      ser.mean.push_back(m);
      ser.stddev.push_back(sd);
    }
    rep.series.push_back(std::move(ser));
  }
  return rep;
}

}  // namespace ddq::sim

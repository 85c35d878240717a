#include "ddq/cli.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <thread>

#include "ddq/assignment.hpp"
#include "ddq/duplicate_removal.hpp"
#include "ddq/evaluation.hpp"
#include "ddq/experiment_config.hpp"
#include "ddq/io.hpp"
#include "ddq/simulator.hpp"

namespace ddq::cli {

namespace fs = std::filesystem;
using io::Json;

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("sha256 failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

int threads_from_env() {
  if (const char* v = std::getenv("DDQ_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (end != v && *end == '\0' && n >= 1) return static_cast<int>(n);
    throw ValidationError("DDQ_THREADS must be a positive integer, got '" + std::string(v) + "'");
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

namespace {

struct Manifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, sha256
  std::optional<std::uint64_t> master_seed;
  std::vector<std::string> outputs;
  double seconds = 0.0;

  Json to_json() const {
    Json j = Json::object();
    j["format_version"] = io::kFormatVersion;
    j["command"] = command;
    Json in = Json::array();
    for (const auto& [path, hash] : inputs) in.push_back({{"path", path}, {"sha256", hash}});
    j["inputs"] = std::move(in);
    if (inputs.size() == 1) {
      j["config_path"] = inputs[0].first;
      j["config_sha256"] = inputs[0].second;
    }
    j["master_seed"] = master_seed ? Json(*master_seed) : Json(nullptr);
    j["artifact_version"] = kVersion;
    j["outputs"] = outputs;
    j["wall_clock_seconds"] = seconds;
    return j;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Writes `doc` to `out_path` (plus a manifest next to it) or to stdout.
void emit(const Json& doc, const std::string& out_path, Manifest manifest, Clock::time_point t0,
          std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
    return;
  }
  io::write_file(out_path, text);
  manifest.outputs.push_back(out_path);
  manifest.seconds = seconds_since(t0);
  io::write_file(out_path + ".manifest.json", manifest.to_json().dump(2) + "\n");
}

std::pair<std::string, std::string> hashed_input(const std::string& path, std::string* text = nullptr) {
  std::string content = io::read_file(path);
  auto h = sha256_hex(content);
  if (text) *text = std::move(content);
  return {path, h};
}

CostWeights parse_weights(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double d = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') throw ValidationError("--weights must be three numbers: cls,l1,giou");
    v.push_back(d);
  }
  if (v.size() != 3) throw ValidationError("--weights must be three numbers: cls,l1,giou");
  return {v[0], v[1], v[2]};
}

std::pair<int, int> parse_image_size(const std::string& s) {
  int w = 0, h = 0;
  char x = 0;
  std::istringstream in(s);
  if (!(in >> w >> x >> h) || (x != 'x' && x != 'X') || w < 1 || h < 1 || !in.eof()) {
    throw ValidationError("--image-size must look like 800x800");
  }
  return {w, h};
}

int cmd_nms(const std::string& input, double thresh, long max_keep, const std::string& out_path,
            std::ostream& out) {
  const auto t0 = Clock::now();
  Manifest m{"nms", {hashed_input(input)}, std::nullopt, {}, 0.0};
  const BoxList<double> boxes = io::load_boxes(input);
  if (!boxes.scores) throw ValidationError(input + ": NMS needs a score for every box");
  const std::size_t keep = max_keep < 0 ? kKeepAll : static_cast<std::size_t>(max_keep);
  const auto kept = class_agnostic_nms(boxes, thresh, keep);
  BoxList<double> survivors;
  survivors.scores.emplace();
  for (std::size_t i : kept) {
    survivors.boxes.push_back(boxes.boxes[i]);
    survivors.scores->push_back((*boxes.scores)[i]);
  }
  Json doc = io::boxes_to_json(survivors);
  doc["kept_indices"] = kept;
  doc["iou_threshold"] = thresh;
  doc["format_version"] = io::kFormatVersion;
  emit(doc, out_path, m, t0, out);
  return kExitOk;
}

int cmd_assign(const std::string& queries_path, const std::string& gts_path, int k,
               const std::string& weights_str, const std::string& image_size,
               const std::string& out_path, std::ostream& out) {
  const auto t0 = Clock::now();
  std::string qtext;
  Manifest m{"assign", {hashed_input(queries_path, &qtext), hashed_input(gts_path)}, std::nullopt, {}, 0.0};
  const Json qj = io::parse_json(qtext, queries_path);
  QuerySet q;
  try {
    q = io::queries_from_json(qj);
  } catch (const ValidationError& e) {
    throw IoError(queries_path + ": " + e.what());
  }
  const BoxList<double> gts = io::load_boxes(gts_path);

  int w = 0, h = 0;
  if (!image_size.empty()) {
    std::tie(w, h) = parse_image_size(image_size);
  } else if (qj.is_object() && qj.contains("image_width") && qj.contains("image_height")) {
    w = qj.at("image_width").get<int>();
    h = qj.at("image_height").get<int>();
  } else {
    throw ValidationError("assign: image size unknown; pass --image-size or add image_width/image_height");
  }
  const CostWeights weights = weights_str.empty() ? CostWeights{} : parse_weights(weights_str);
  const FeaturePyramid pyramid(w, h);
  const AssignmentResult r = center_prior_match(q, pyramid, gts.boxes, k, weights);
  Json doc = io::assignment_to_json(r, weights);
  doc["k"] = k;
  emit(doc, out_path, m, t0, out);
  return kExitOk;
}

int cmd_eval(const std::string& dets_path, const std::string& gts_path, const std::string& out_path,
             std::ostream& out) {
  const auto t0 = Clock::now();
  std::string dtext, gtext;
  Manifest m{"eval", {hashed_input(dets_path, &dtext), hashed_input(gts_path, &gtext)}, std::nullopt, {}, 0.0};
  std::vector<DetectionRecord> dets;
  GroundTruthIndex gts;
  try {
    dets = io::detections_from_coco(io::parse_json(dtext, dets_path));
  } catch (const ValidationError& e) {
    throw IoError(dets_path + ": " + e.what());
  }
  try {
    gts = io::ground_truth_from_coco(io::parse_json(gtext, gts_path));
  } catch (const ValidationError& e) {
    throw IoError(gts_path + ": " + e.what());
  }
  emit(io::metrics_to_json(average_precision(dets, gts)), out_path, m, t0, out);
  return kExitOk;
}

int cmd_experiment(const std::string& config_path, const std::string& out_dir,
                   std::optional<std::uint64_t> seed, std::optional<int> seeds, bool no_svg,
                   std::ostream& out) {
  const auto t0 = Clock::now();
  std::string text;
  Manifest m{"experiment", {hashed_input(config_path, &text)}, std::nullopt, {}, 0.0};
  ExperimentConfig cfg = load_experiment_config(text, config_path);
  if (seed) cfg.master_seed = *seed;
  if (seeds) {
    if (*seeds < 1) throw ValidationError("--seeds must be >= 1");
    cfg.seeds = *seeds;
  }
  m.master_seed = cfg.master_seed;
  m.command = "experiment " + cfg.experiment;

  sim::RunOptions opt{cfg.master_seed, cfg.seeds, threads_from_env()};
  sim::ExperimentReport rep;
  if (cfg.experiment == "recall") {
    rep = sim::run_recall_experiment(cfg.recall, opt);
  } else if (cfg.experiment == "gradient") {
    rep = sim::run_gradient_experiment(cfg.gradient, opt);
  } else {
    rep = sim::run_cascade_experiment(cfg.cascade, opt);
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
  const fs::path dir(out_dir);
  auto write = [&](const std::string& name, const std::string& content) {
    const fs::path p = dir / name;
    io::write_file(p, content);
    m.outputs.push_back(p.string());
  };
  write(cfg.experiment + ".csv", io::report_csv(rep));
  Json summary = io::report_summary(rep);
  summary["config"] = experiment_config_to_json(cfg);
  write("summary.json", summary.dump(2) + "\n");
  if (cfg.output.svg && !no_svg) write(cfg.experiment + ".svg", io::report_svg(rep));
  if (cfg.output.feature_maps) {
    const sim::Scene scene = sim::generate_scene(cfg.scene, sim::trial_seed(cfg.master_seed, 0));
    const FeaturePyramid pyramid(cfg.scene.image_w, cfg.scene.image_h);
    const auto maps = sim::render_feature_maps(scene, pyramid, cfg.output.feature_channels,
                                               sim::trial_seed(cfg.master_seed, 1));
    write("feature_maps.json", io::feature_maps_to_json(maps).dump() + "\n");
  }
  m.seconds = seconds_since(t0);
  const fs::path manifest_path = dir / "manifest.json";
  io::write_file(manifest_path, m.to_json().dump(2) + "\n");
  out << "wrote " << m.outputs.size() << " files and " << manifest_path.string() << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dense distinct query toolkit: NMS, center-prior assignment, experiments, evaluation",
               "ddq"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string nms_input, nms_out;
  double nms_thresh = 0.7;
  long nms_max_keep = -1;
  auto* nms = app.add_subcommand("nms", "Class-agnostic NMS over a scored box file (JSON or CSV)");
  nms->add_option("input", nms_input, "Box file")->required();
  nms->add_option("--iou-thresh", nms_thresh, "Suppression IoU threshold")->capture_default_str();
  nms->add_option("--max-keep", nms_max_keep, "Keep at most this many boxes (-1: all)")->capture_default_str();
  nms->add_option("-o,--out", nms_out, "Output JSON (default: stdout)");

  std::string as_queries, as_gts, as_weights, as_size, as_out;
  int as_k = 9;
  auto* assign = app.add_subcommand("assign", "Center-prior one-to-one assignment");
  assign->add_option("queries", as_queries, "Query set JSON")->required();
  assign->add_option("gts", as_gts, "Ground-truth box file")->required();
  assign->add_option("--k", as_k, "Candidate points per level")->capture_default_str();
  assign->add_option("--weights", as_weights, "cls,l1,giou cost weights (default 2,5,2)");
  assign->add_option("--image-size", as_size, "WxH, if the query file does not carry it");
  assign->add_option("-o,--out", as_out, "Output JSON (default: stdout)");

  std::string ex_config, ex_out;
  std::optional<std::uint64_t> ex_seed;
  std::optional<int> ex_seeds;
  bool ex_no_svg = false;
  auto* experiment = app.add_subcommand("experiment", "Run a simulator experiment from a config file");
  experiment->add_option("config", ex_config, "Experiment config JSON")->required();
  experiment->add_option("--out", ex_out, "Output directory")->required();
  experiment->add_option("--seed", ex_seed, "Master seed (overrides the config)");
  experiment->add_option("--seeds", ex_seeds, "Number of trials (overrides the config)");
  experiment->add_flag("--no-svg", ex_no_svg, "Skip the SVG plot");

  std::string ev_dets, ev_gts, ev_out;
  auto* eval = app.add_subcommand("eval", "AP / AR metrics for COCO-style detections");
  eval->add_option("detections", ev_dets, "Detections JSON")->required();
  eval->add_option("gts", ev_gts, "Ground-truth JSON")->required();
  eval->add_option("-o,--out", ev_out, "Output JSON (default: stdout)");

  std::vector<const char*> argv;
  argv.push_back("ddq");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "ddq: " << e.what() << "\n";
    return kExitIo;
  }

  try {
    if (nms->parsed()) return cmd_nms(nms_input, nms_thresh, nms_max_keep, nms_out, out);
    if (assign->parsed()) return cmd_assign(as_queries, as_gts, as_k, as_weights, as_size, as_out, out);
    if (experiment->parsed()) return cmd_experiment(ex_config, ex_out, ex_seed, ex_seeds, ex_no_svg, out);
    if (eval->parsed()) return cmd_eval(ev_dets, ev_gts, ev_out, out);
  } catch (const IoError& e) {
    err << "ddq: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    err << "ddq: " << e.what() << "\n";
    return kExitDomain;
  } catch (const nlohmann::json::exception& e) {
    err << "ddq: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitDomain;
}

}  // namespace ddq::cli

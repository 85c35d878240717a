#include "ddq/experiment_config.hpp"

#include <initializer_list>
#include <set>

namespace ddq {

namespace {

using io::Json;

void check_keys(const Json& obj, const std::string& section, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ValidationError("config: '" + section + "' must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key)) throw ValidationError("config: unknown key '" + section + "." + key + "'");
  }
}

template <typename T>
void read(const Json& obj, const char* key, T& out, const std::string& section) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError("config: '" + section + "." + key + "' has the wrong type");
  }
}

}  // namespace

ExperimentConfig parse_experiment_config(const Json& j) {
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  if (!j.contains("schema_version")) {
    throw ValidationError("config: missing schema_version (this build reads schema_version " +
                          std::to_string(kConfigSchemaVersion) + ")");
  }
  const Json& ver = j.at("schema_version");
  if (!ver.is_number_integer() || ver.get<int>() != kConfigSchemaVersion) {
    throw ValidationError("config: schema_version " + ver.dump() + " is not supported; this build reads " +
                          "schema_version " + std::to_string(kConfigSchemaVersion) +
                          ". Migrate by setting \"schema_version\": " +
                          std::to_string(kConfigSchemaVersion) +
                          " and checking keys against the schema in README.md");
  }
  check_keys(j, "", {"schema_version", "experiment", "master_seed", "seeds", "scene", "response",
                     "recall", "gradient", "cascade", "output"});

  ExperimentConfig c;
  read(j, "experiment", c.experiment, "");
  if (c.experiment != "recall" && c.experiment != "gradient" && c.experiment != "cascade") {
    throw ValidationError("config: experiment must be recall, gradient or cascade");
  }
  read(j, "master_seed", c.master_seed, "");
  read(j, "seeds", c.seeds, "");

  if (j.contains("scene")) {
    const Json& s = j.at("scene");
    check_keys(s, "scene", {"image_w", "image_h", "gt_count", "min_size", "max_size", "max_overlap",
                            "max_attempts"});
    read(s, "image_w", c.scene.image_w, "scene");
    read(s, "image_h", c.scene.image_h, "scene");
    read(s, "gt_count", c.scene.gt_count, "scene");
    read(s, "min_size", c.scene.min_size, "scene");
    read(s, "max_size", c.scene.max_size, "scene");
    read(s, "max_overlap", c.scene.max_overlap, "scene");
    read(s, "max_attempts", c.scene.max_attempts, "scene");
  }
  if (j.contains("response")) {
    const Json& r = j.at("response");
    check_keys(r, "response", {"gamma", "quality", "quality_spread", "score_noise", "box_noise",
                               "center_noise", "duplication", "duplicate_jitter", "feature_dim"});
    read(r, "gamma", c.response.gamma, "response");
    read(r, "quality", c.response.quality, "response");
    read(r, "quality_spread", c.response.quality_spread, "response");
    read(r, "score_noise", c.response.score_noise, "response");
    read(r, "box_noise", c.response.box_noise, "response");
    read(r, "center_noise", c.response.center_noise, "response");
    read(r, "duplication", c.response.duplication, "response");
    read(r, "duplicate_jitter", c.response.duplicate_jitter, "response");
    read(r, "feature_dim", c.response.feature_dim, "response");
  }
  if (j.contains("recall")) {
    const Json& r = j.at("recall");
    check_keys(r, "recall", {"budgets", "nms_iou", "match_iou"});
    read(r, "budgets", c.recall.budgets, "recall");
    read(r, "nms_iou", c.recall.nms_iou, "recall");
    read(r, "match_iou", c.recall.match_iou, "recall");
  }
  if (j.contains("gradient")) {
    const Json& g = j.at("gradient");
    check_keys(g, "gradient", {"p_grid", "copies", "gt_count", "steps", "learning_rate", "fd_step"});
    read(g, "p_grid", c.gradient.p_grid, "gradient");
    read(g, "copies", c.gradient.copies, "gradient");
    read(g, "gt_count", c.gradient.gt_count, "gradient");
    read(g, "steps", c.gradient.steps, "gradient");
    read(g, "learning_rate", c.gradient.learning_rate, "gradient");
    read(g, "fd_step", c.gradient.fd_step, "gradient");
  }
  if (j.contains("cascade")) {
    const Json& k = j.at("cascade");
    check_keys(k, "cascade", {"iou_threshold", "stage_budgets", "refine_shrink", "match_iou"});
    read(k, "iou_threshold", c.cascade.dqr.iou_threshold, "cascade");
    read(k, "stage_budgets", c.cascade.dqr.stage_budgets, "cascade");
    read(k, "refine_shrink", c.cascade.refine_shrink, "cascade");
    read(k, "match_iou", c.cascade.match_iou, "cascade");
  }
  if (j.contains("output")) {
    const Json& o = j.at("output");
    check_keys(o, "output", {"svg", "feature_maps", "feature_channels"});
    read(o, "svg", c.output.svg, "output");
    read(o, "feature_maps", c.output.feature_maps, "output");
    read(o, "feature_channels", c.output.feature_channels, "output");
  }
  c.recall.scene = c.cascade.scene = c.scene;
  c.recall.response = c.cascade.response = c.response;
  if (c.seeds < 1) throw ValidationError("config: seeds must be >= 1");
  c.scene.validate();
  c.response.validate();
  if (c.experiment == "cascade") c.cascade.dqr.validate();
  return c;
}

ExperimentConfig load_experiment_config(std::string_view text, const std::string& source) {
  return parse_experiment_config(io::parse_json(text, source));
}

io::Json experiment_config_to_json(const ExperimentConfig& c) {
  Json j = Json::object();
  j["schema_version"] = kConfigSchemaVersion;
  j["experiment"] = c.experiment;
  j["master_seed"] = c.master_seed;
  j["seeds"] = c.seeds;
  j["scene"] = {{"image_w", c.scene.image_w},       {"image_h", c.scene.image_h},
                {"gt_count", c.scene.gt_count},     {"min_size", c.scene.min_size},
                {"max_size", c.scene.max_size},     {"max_overlap", c.scene.max_overlap},
                {"max_attempts", c.scene.max_attempts}};
  j["response"] = {{"gamma", c.response.gamma},
                   {"quality", c.response.quality},
                   {"quality_spread", c.response.quality_spread},
                   {"score_noise", c.response.score_noise},
                   {"box_noise", c.response.box_noise},
                   {"center_noise", c.response.center_noise},
                   {"duplication", c.response.duplication},
                   {"duplicate_jitter", c.response.duplicate_jitter},
                   {"feature_dim", c.response.feature_dim}};
  j["recall"] = {{"budgets", c.recall.budgets},
                 {"nms_iou", c.recall.nms_iou},
                 {"match_iou", c.recall.match_iou}};
  j["gradient"] = {{"p_grid", c.gradient.p_grid},     {"copies", c.gradient.copies},
                   {"gt_count", c.gradient.gt_count}, {"steps", c.gradient.steps},
                   {"learning_rate", c.gradient.learning_rate}, {"fd_step", c.gradient.fd_step}};
  j["cascade"] = {{"iou_threshold", c.cascade.dqr.iou_threshold},
                  {"stage_budgets", c.cascade.dqr.stage_budgets},
                  {"refine_shrink", c.cascade.refine_shrink},
                  {"match_iou", c.cascade.match_iou}};
  j["output"] = {{"svg", c.output.svg},
                 {"feature_maps", c.output.feature_maps},
                 {"feature_channels", c.output.feature_channels}};
  return j;
}

}  // namespace ddq

#include "ddq/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ddq::io {

namespace {

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

double number(const Json& j, const std::string& what) {
  if (!j.is_number()) throw ValidationError(what + ": expected a number");
  return j.get<double>();
}

const Json& field(const Json& obj, const char* key, const std::string& what) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ValidationError(what + ": missing field '" + key + "'");
  }
  return obj.at(key);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Json parse_json(std::string_view text, const std::string& source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(source + ":" + std::to_string(line_of(text, e.byte > 0 ? e.byte - 1 : 0)) +
                  ": JSON parse error: " + e.what());
  }
}

Json box_to_json(const Boxd& b) { return Json::array({b.x1, b.y1, b.x2, b.y2}); }

Boxd box_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) throw ValidationError("box must be an array of 4 numbers");
  Boxd b{number(j[0], "box"), number(j[1], "box"), number(j[2], "box"), number(j[3], "box")};
  if (b.x2 < b.x1 || b.y2 < b.y1) throw ValidationError("box must satisfy x1 <= x2 and y1 <= y2");
  return b;
}

BoxList<double> boxes_from_json(const Json& j) {
  BoxList<double> out;
  auto record_error = [](std::size_t i, const std::exception& e) {
    return ValidationError("record " + std::to_string(i) + ": " + e.what());
  };
  if (j.is_object()) {
    const Json& boxes = field(j, "boxes", "box file");
    if (!boxes.is_array()) throw ValidationError("box file: 'boxes' must be an array");
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      try {
        out.boxes.push_back(box_from_json(boxes[i]));
      } catch (const ValidationError& e) {
        throw record_error(i, e);
      }
    }
    if (j.contains("scores")) {
      out.scores.emplace();
      for (const auto& s : j.at("scores")) out.scores->push_back(number(s, "scores"));
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      const Json& rec = j[i];
      try {
        if (rec.is_array()) {
          out.boxes.push_back(box_from_json(rec));
          continue;
        }
        out.boxes.push_back(box_from_json(field(rec, "box", "box record")));
        if (rec.contains("score")) {
          if (!out.scores) {
            if (i != 0) throw ValidationError("score present on some records only");
            out.scores.emplace();
          }
          out.scores->push_back(number(rec.at("score"), "score"));
        } else if (out.scores) {
          throw ValidationError("score present on some records only");
        }
      } catch (const ValidationError& e) {
        throw record_error(i, e);
      }
    }
  } else {
    throw ValidationError("box file: expected a JSON object or array");
  }
  out.validate();
  return out;
}

BoxList<double> boxes_from_csv(std::string_view text, const std::string& source) {
  BoxList<double> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  std::size_t columns = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto cells = split(t, ',');
    std::vector<double> v;
    bool numeric = true;
    for (const auto& c : cells) {
      double d = 0.0;
      if (!parse_double(c, d)) {
        numeric = false;
        break;
      }
      v.push_back(d);
    }
    if (!numeric) {
      if (out.boxes.empty() && columns == 0 && !cells.empty() && cells[0] == "x1") {
        continue;  // header
      }
      throw IoError(source + ":" + std::to_string(lineno) + ": expected numeric x1,y1,x2,y2[,score]");
    }
    if (v.size() != 4 && v.size() != 5) {
      throw IoError(source + ":" + std::to_string(lineno) + ": expected 4 or 5 columns, got " +
                    std::to_string(v.size()));
    }
    if (columns == 0) {
      columns = v.size();
      if (columns == 5) out.scores.emplace();
    } else if (v.size() != columns) {
      throw IoError(source + ":" + std::to_string(lineno) + ": inconsistent column count");
    }
    if (v[2] < v[0] || v[3] < v[1]) {
      throw IoError(source + ":" + std::to_string(lineno) + ": box must satisfy x1 <= x2 and y1 <= y2");
    }
    out.boxes.push_back({v[0], v[1], v[2], v[3]});
    if (columns == 5) out.scores->push_back(v[4]);
  }
  return out;
}

BoxList<double> load_boxes(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  if (path.extension() == ".csv") return boxes_from_csv(text, path.string());
  const Json j = parse_json(text, path.string());
  try {
    return boxes_from_json(j);
  } catch (const ValidationError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

Json boxes_to_json(const BoxList<double>& boxes) {
  Json out = Json::object();
  Json arr = Json::array();
  for (const auto& b : boxes.boxes) arr.push_back(box_to_json(b));
  out["boxes"] = std::move(arr);
  if (boxes.scores) out["scores"] = *boxes.scores;
  return out;
}

Json queries_to_json(const QuerySet& q) {
  q.validate();
  Json arr = Json::array();
  for (std::size_t i = 0; i < q.size(); ++i) {
    Json rec = Json::object();
    rec["box"] = box_to_json(q.boxes[i]);
    rec["score"] = q.scores[i];
    rec["level"] = q.origins[i].level;
    rec["index"] = q.origins[i].index;
    Json feat = Json::array();
    for (Eigen::Index c = 0; c < q.features.cols(); ++c) {
      feat.push_back(q.features(static_cast<Eigen::Index>(i), c));
    }
    rec["feature"] = std::move(feat);
    arr.push_back(std::move(rec));
  }
  return arr;
}

QuerySet queries_from_json(const Json& j) {
  const Json& arr = j.is_object() ? field(j, "queries", "query file") : j;
  if (!arr.is_array()) throw ValidationError("query file: expected an array of query records");
  QuerySet q;
  std::size_t dim = 0;
  std::vector<std::vector<double>> feats;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const Json& rec = arr[i];
    try {
      q.boxes.push_back(box_from_json(field(rec, "box", "query")));
      q.scores.push_back(number(field(rec, "score", "query"), "score"));
      const int level = field(rec, "level", "query").get<int>();
      const auto index = field(rec, "index", "query").get<std::size_t>();
      q.origins.push_back({level, index});
      std::vector<double> f;
      if (rec.contains("feature")) {
        for (const auto& v : rec.at("feature")) f.push_back(number(v, "feature"));
      }
      if (i == 0) {
        dim = f.size();
      } else if (f.size() != dim) {
        throw ValidationError("feature dimension " + std::to_string(f.size()) + " differs from " +
                              std::to_string(dim));
      }
      feats.push_back(std::move(f));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("query record " + std::to_string(i) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("query record " + std::to_string(i) + ": " + e.what());
    }
  }
  q.features.resize(static_cast<Eigen::Index>(feats.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < feats.size(); ++i) {
    for (std::size_t c = 0; c < dim; ++c) {
      q.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = feats[i][c];
    }
  }
  q.feature_source = dim > 0 ? "file" : "none";
  q.validate();
  return q;
}

Json assignment_to_json(const AssignmentResult& r, const CostWeights& w) {
  Json out = Json::object();
  out["format_version"] = kFormatVersion;
  out["weights"] = {{"cls", w.cls}, {"l1", w.l1}, {"giou", w.giou}};
  Json pairs = Json::array();
  for (const auto& p : r.pairs) {
    pairs.push_back({{"query", p.query},
                     {"gt", p.gt},
                     {"cost", p.cost},
                     {"cls_cost", p.cls_cost},
                     {"l1_cost", p.l1_cost},
                     {"giou_cost", p.giou_cost}});
  }
  out["pairs"] = std::move(pairs);
  out["unmatched_gts"] = r.unmatched_gts;
  out["num_unmatched_queries"] = r.unmatched_queries.size();
  out["total_cost"] = r.total_cost;
  return out;
}

Json metrics_to_json(const MetricReport& m) {
  Json out = Json::object();
  out["format_version"] = kFormatVersion;
  out["AP"] = m.ap;
  out["AP50"] = m.ap50;
  out["AP75"] = m.ap75;
  Json ar = Json::object();
  for (const auto& [k, v] : m.ar) ar["AR@" + std::to_string(k)] = v;
  out["AR"] = std::move(ar);
  out["iou_thresholds"] = m.iou_thresholds;
  out["AP_per_threshold"] = m.ap_per_threshold;
  Json pr = Json::array();
  for (const auto& p : m.pr_curve) pr.push_back({p.recall, p.precision});
  out["pr_curve"] = std::move(pr);
  return out;
}

namespace {

Boxd coco_bbox(const Json& j) {
  if (!j.is_array() || j.size() != 4) throw ValidationError("bbox must be [x, y, w, h]");
  const double x = number(j[0], "bbox");
  const double y = number(j[1], "bbox");
  const double w = number(j[2], "bbox");
  const double h = number(j[3], "bbox");
  if (w < 0 || h < 0) throw ValidationError("bbox width and height must be >= 0");
  return {x, y, x + w, y + h};
}

const Json& coco_records(const Json& j) {
  if (j.is_object() && j.contains("annotations")) return j.at("annotations");
  if (!j.is_array()) throw ValidationError("expected an array of records or {\"annotations\": [...]}");
  return j;
}

}  // namespace

std::vector<DetectionRecord> detections_from_coco(const Json& j) {
  const Json& recs = coco_records(j);
  std::vector<DetectionRecord> out;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    try {
      const Json& r = recs[i];
      DetectionRecord d;
      d.image_id = field(r, "image_id", "detection").get<long>();
      d.box = coco_bbox(field(r, "bbox", "detection"));
      d.score = number(field(r, "score", "detection"), "score");
      if (!(d.score >= 0.0 && d.score <= 1.0)) throw ValidationError("score outside [0, 1]");
      out.push_back(d);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("detection record " + std::to_string(i) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("detection record " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

GroundTruthIndex ground_truth_from_coco(const Json& j) {
  GroundTruthIndex out;
  if (j.is_object() && j.contains("images")) {
    for (const auto& img : j.at("images")) {
      if (img.contains("id")) out[img.at("id").get<long>()];
    }
  }
  const Json& recs = coco_records(j);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    try {
      const Json& r = recs[i];
      const long id = field(r, "image_id", "ground truth").get<long>();
      out[id].push_back(coco_bbox(field(r, "bbox", "ground truth")));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("ground-truth record " + std::to_string(i) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("ground-truth record " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

Json feature_map_to_json(const FeatureMap& fm) {
  fm.validate();
  Json out = Json::object();
  out["format_version"] = kFormatVersion;
  out["level"] = fm.level;
  out["stride"] = fm.stride();
  out["height"] = fm.height;
  out["width"] = fm.width;
  out["channels"] = fm.channels();
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(fm.data.size()));
  for (Eigen::Index r = 0; r < fm.data.rows(); ++r) {
    for (Eigen::Index c = 0; c < fm.data.cols(); ++c) data.push_back(fm.data(r, c));
  }
  out["data"] = std::move(data);
  return out;
}

FeatureMap feature_map_from_json(const Json& j) {
  const std::string what = "feature map";
  if (field(j, "format_version", what).get<int>() != kFormatVersion) {
    throw ValidationError("feature map: unsupported format_version");
  }
  FeatureMap fm(field(j, "level", what).get<int>(), field(j, "height", what).get<int>(),
                field(j, "width", what).get<int>(), field(j, "channels", what).get<int>());
  if (j.contains("stride") && j.at("stride").get<int>() != fm.stride()) {
    throw ValidationError("feature map: stride does not match level");
  }
  const Json& data = field(j, "data", what);
  if (!data.is_array() || data.size() != static_cast<std::size_t>(fm.data.size())) {
    throw ValidationError("feature map: data length does not match height * width * channels");
  }
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < fm.data.rows(); ++r) {
    for (Eigen::Index c = 0; c < fm.data.cols(); ++c) fm.data(r, c) = number(data[k++], "data");
  }
  return fm;
}

Json feature_maps_to_json(const FeaturePyramidMaps& maps) {
  Json out = Json::object();
  out["format_version"] = kFormatVersion;
  Json levels = Json::array();
  for (const auto& [l, fm] : maps) levels.push_back(feature_map_to_json(fm));
  out["levels"] = std::move(levels);
  return out;
}

FeaturePyramidMaps feature_maps_from_json(const Json& j) {
  FeaturePyramidMaps maps;
  for (const auto& lv : field(j, "levels", "feature pyramid")) {
    FeatureMap fm = feature_map_from_json(lv);
    const int level = fm.level;
    if (!maps.emplace(level, std::move(fm)).second) {
      throw ValidationError("feature pyramid: duplicate level " + std::to_string(level));
    }
  }
  return maps;
}

// ---------------------------------------------------------------------------

std::string format_cell(const sim::Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else if constexpr (std::is_same_v<T, double>) {
          char buf[64];
          std::snprintf(buf, sizeof(buf), "%.12g", v);
          return buf;
        } else {
          return std::to_string(v);
        }
      },
      c);
}

std::string report_csv(const sim::ExperimentReport& r) {
  std::string out;
  for (std::size_t i = 0; i < r.columns.size(); ++i) {
    if (i) out += ',';
    out += r.columns[i];
  }
  out += '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_cell(row[i]);
    }
    out += '\n';
  }
  return out;
}

Json report_summary(const sim::ExperimentReport& r) {
  Json out = Json::object();
  out["format_version"] = kFormatVersion;
  out["experiment"] = r.experiment;
  out["x_label"] = r.x_label;
  out["y_label"] = r.y_label;
  out["seeds"] = r.seeds;
  Json series = Json::array();
  for (const auto& s : r.series) {
    series.push_back({{"label", s.label}, {"x", s.x}, {"mean", s.mean}, {"std", s.stddev}});
  }
  out["series"] = std::move(series);
  return out;
}

std::string report_svg(const sim::ExperimentReport& r) {
  constexpr double kW = 640, kH = 400, kPad = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : r.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.mean[i]);
      ymax = std::max(ymax, s.mean[i]);
    }
  }
  if (!(xmax > xmin)) xmax = xmin + 1;
  if (!(ymax > ymin)) ymax = ymin + 1;
  auto px = [&](double x) { return kPad + (x - xmin) / (xmax - xmin) * (kW - 2 * kPad); };
  auto py = [&](double y) { return kH - kPad - (y - ymin) / (ymax - ymin) * (kH - 2 * kPad); };
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << kPad << "\" y1=\"" << kH - kPad << "\" x2=\"" << kW - kPad << "\" y2=\""
      << kH - kPad << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kPad << "\" y1=\"" << kPad << "\" x2=\"" << kPad << "\" y2=\"" << kH - kPad
      << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 10 << "\" text-anchor=\"middle\">" << r.x_label
      << " [" << xmin << ", " << xmax << "]</text>\n";
  svg << "<text x=\"10\" y=\"20\">" << r.y_label << " [" << ymin << ", " << ymax << "]</text>\n";
  for (std::size_t k = 0; k < r.series.size(); ++k) {
    const auto& s = r.series[k];
    const char* color = kColors[k % 6];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) svg << px(s.x[i]) << ',' << py(s.mean[i]) << ' ';
    svg << "\"/>\n";
    svg << "<text x=\"" << kW - kPad + 5 << "\" y=\"" << kPad + 15 * k << "\" fill=\"" << color
        << "\" font-size=\"11\">" << s.label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace ddq::io

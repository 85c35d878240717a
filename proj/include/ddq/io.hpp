// File formats: box lists (JSON / CSV), query sets, assignment results,
// COCO-style detections, feature maps and experiment reports.
#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ddq/assignment.hpp"
#include "ddq/dense_queries.hpp"
#include "ddq/evaluation.hpp"
#include "ddq/geometry.hpp"
#include "ddq/roi_features.hpp"
#include "ddq/simulator.hpp"

namespace ddq::io {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Parses JSON, turning syntax errors into IoError with a line number.
Json parse_json(std::string_view text, const std::string& source = "<input>");

// Box lists. Accepted JSON shapes:
//   {"boxes": [[x1,y1,x2,y2], ...], "scores": [...]}
//   [{"box": [x1,y1,x2,y2], "score": s}, ...]
//   [[x1,y1,x2,y2], ...]
// CSV: one "x1,y1,x2,y2[,score]" row per line, optional header, '#' comments.
BoxList<double> boxes_from_json(const Json& j);
BoxList<double> boxes_from_csv(std::string_view text, const std::string& source = "<input>");
BoxList<double> load_boxes(const std::filesystem::path& path);
Json boxes_to_json(const BoxList<double>& boxes);

Json box_to_json(const Boxd& b);
Boxd box_from_json(const Json& j);

// Query sets: array of {box, score, level, index, feature}, or an object
// {"image_width", "image_height", "queries": [...]}.
Json queries_to_json(const QuerySet& q);
QuerySet queries_from_json(const Json& j);

Json assignment_to_json(const AssignmentResult& r, const CostWeights& w);
Json metrics_to_json(const MetricReport& m);

// COCO-style records {image_id, bbox: [x, y, w, h], score}; a top-level
// object with "annotations" is also accepted for ground truth.
std::vector<DetectionRecord> detections_from_coco(const Json& j);
GroundTruthIndex ground_truth_from_coco(const Json& j);

// Feature maps: {"format_version", "level", "stride", "height", "width",
// "channels", "data": [...]} with data in (y, x, channel) row-major order.
Json feature_map_to_json(const FeatureMap& fm);
FeatureMap feature_map_from_json(const Json& j);
Json feature_maps_to_json(const FeaturePyramidMaps& maps);
FeaturePyramidMaps feature_maps_from_json(const Json& j);

// Reports.
std::string format_cell(const sim::Cell& c);
std::string report_csv(const sim::ExperimentReport& r);
Json report_summary(const sim::ExperimentReport& r);
std::string report_svg(const sim::ExperimentReport& r);

}  // namespace ddq::io

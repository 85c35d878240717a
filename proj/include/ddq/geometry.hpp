// Axis-aligned box arithmetic.
//
// Boxes are half-open real rectangles in pixel coordinates: area is
// (x2 - x1) * (y2 - y1) with no "+1" pixel convention. Everything here is
// templated on the scalar so the same code runs on double, float and on
// Eigen::AutoDiffScalar when the loss module needs input-space gradients.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "ddq/errors.hpp"

namespace ddq {

namespace detail {

template <typename S>
double value_of(const S& s) {
  if constexpr (std::is_arithmetic_v<S>) {
    return static_cast<double>(s);
  } else {
    return value_of(s.value());
  }
}

// Branch-based min/max so derivative types pick the active argument.
template <typename S>
S min_of(const S& a, const S& b) {
  return b < a ? b : a;
}

template <typename S>
S max_of(const S& a, const S& b) {
  return a < b ? b : a;
}

template <typename S>
S clamp_non_negative(const S& a) {
  return a < S(0) ? S(0) : a;
}

}  // namespace detail

struct ImageSize {
  double width = 0.0;
  double height = 0.0;
};

template <typename Scalar = double>
struct Box {
  Scalar x1{0}, y1{0}, x2{0}, y2{0};

  Scalar width() const { return detail::clamp_non_negative(Scalar(x2 - x1)); }
  Scalar height() const { return detail::clamp_non_negative(Scalar(y2 - y1)); }
  Scalar area() const { return width() * height(); }
  Scalar center_x() const { return (x1 + x2) / Scalar(2); }
  Scalar center_y() const { return (y1 + y2) / Scalar(2); }

  bool is_degenerate() const { return !(detail::value_of(area()) > 0.0); }

  bool has_nan() const {
    return std::isnan(detail::value_of(x1)) || std::isnan(detail::value_of(y1)) ||
           std::isnan(detail::value_of(x2)) || std::isnan(detail::value_of(y2));
  }

  template <typename Other>
  Box<Other> cast() const {
    return {Other(x1), Other(y1), Other(x2), Other(y2)};
  }

  friend bool operator==(const Box&, const Box&) = default;
};

using Boxd = Box<double>;

/// Boxes with an optional parallel score sequence.
template <typename Scalar = double>
struct BoxList {
  std::vector<Box<Scalar>> boxes;
  std::optional<std::vector<Scalar>> scores;

  std::size_t size() const { return boxes.size(); }
  bool empty() const { return boxes.empty(); }
  bool has_scores() const { return scores.has_value(); }

  void validate() const {
    if (scores && scores->size() != boxes.size()) {
      throw ValidationError("BoxList: " + std::to_string(scores->size()) + " scores for " +
                            std::to_string(boxes.size()) + " boxes");
    }
  }
};

template <typename Scalar>
void require_finite(const Box<Scalar>& b, const char* what) {
  if (b.has_nan()) {
    throw ValidationError(std::string(what) + ": NaN box coordinate");
  }
}

template <typename Scalar>
Box<Scalar> clip(const Box<Scalar>& b, Scalar w, Scalar h) {
  auto c = [](const Scalar& v, const Scalar& hi) {
    return detail::min_of(detail::max_of(v, Scalar(0)), hi);
  };
  return {c(b.x1, w), c(b.y1, h), c(b.x2, w), c(b.y2, h)};
}

template <typename Scalar>
Scalar intersection_area(const Box<Scalar>& a, const Box<Scalar>& b) {
  const Scalar iw = detail::min_of(a.x2, b.x2) - detail::max_of(a.x1, b.x1);
  const Scalar ih = detail::min_of(a.y2, b.y2) - detail::max_of(a.y1, b.y1);
  return detail::clamp_non_negative(iw) * detail::clamp_non_negative(ih);
}

/// Intersection over union; 0 when the union is empty.
template <typename Scalar>
Scalar iou(const Box<Scalar>& a, const Box<Scalar>& b) {
  require_finite(a, "iou");
  require_finite(b, "iou");
  const Scalar inter = intersection_area(a, b);
  const Scalar uni = a.area() + b.area() - inter;
  if (!(detail::value_of(uni) > 0.0)) return Scalar(0);
  return inter / uni;
}

/// Generalized IoU: iou - (enclosing - union) / enclosing, in [-1, 1].
template <typename Scalar>
Scalar giou(const Box<Scalar>& a, const Box<Scalar>& b) {
  require_finite(a, "giou");
  require_finite(b, "giou");
  if (a.is_degenerate() && b.is_degenerate()) {
    throw ValidationError("giou: both boxes are degenerate");
  }
  const Scalar inter = intersection_area(a, b);
  const Scalar uni = a.area() + b.area() - inter;
  const Scalar ew = detail::max_of(a.x2, b.x2) - detail::min_of(a.x1, b.x1);
  const Scalar eh = detail::max_of(a.y2, b.y2) - detail::min_of(a.y1, b.y1);
  const Scalar enclosing = ew * eh;
  return inter / uni - (enclosing - uni) / enclosing;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> pairwise_iou(
    std::span<const Box<Scalar>> a, std::span<const Box<Scalar>> b) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      out(i, j) = iou(a[i], b[j]);
    }
  }
  return out;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> pairwise_iou(const BoxList<Scalar>& a,
                                                                   const BoxList<Scalar>& b) {
  return pairwise_iou(std::span<const Box<Scalar>>(a.boxes), std::span<const Box<Scalar>>(b.boxes));
}

// ---------------------------------------------------------------------------
// Format conversion

enum class BoxFormat { kCorner, kCenter };

/// Accepts "corner"/"xyxy" and "center"/"cxcywh".
inline BoxFormat parse_box_format(std::string_view tag) {
  if (tag == "corner" || tag == "xyxy") return BoxFormat::kCorner;
  if (tag == "center" || tag == "cxcywh") return BoxFormat::kCenter;
  throw ValidationError("unknown box format '" + std::string(tag) + "'");
}

template <typename Scalar>
using Vector4 = Eigen::Matrix<Scalar, 4, 1>;

template <typename Scalar>
Vector4<Scalar> convert(const Vector4<Scalar>& v, BoxFormat from, BoxFormat to) {
  if (from == to) return v;
  if (from == BoxFormat::kCorner) {
    return Vector4<Scalar>((v[0] + v[2]) / Scalar(2), (v[1] + v[3]) / Scalar(2), v[2] - v[0],
                           v[3] - v[1]);
  }
  const Scalar hw = v[2] / Scalar(2);
  const Scalar hh = v[3] / Scalar(2);
  return Vector4<Scalar>(v[0] - hw, v[1] - hh, v[0] + hw, v[1] + hh);
}

template <typename Scalar>
Vector4<Scalar> to_vector(const Box<Scalar>& b) {
  return Vector4<Scalar>(b.x1, b.y1, b.x2, b.y2);
}

template <typename Scalar>
Box<Scalar> from_vector(const Vector4<Scalar>& v) {
  return {v[0], v[1], v[2], v[3]};
}

/// (cx, cy, w, h) of a corner-form box.
template <typename Scalar>
Vector4<Scalar> center_form(const Box<Scalar>& b) {
  return convert<Scalar>(to_vector(b), BoxFormat::kCorner, BoxFormat::kCenter);
}

}  // namespace ddq

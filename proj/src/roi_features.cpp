#include "ddq/roi_features.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace ddq {

FeatureMap::FeatureMap(int level, int height, int width, int channels)
    : level(level), height(height), width(width) {
  if (level < kMinLevel || level > kMaxLevel || height < 1 || width < 1 || channels < 1) {
    throw ValidationError("FeatureMap: invalid level or dimensions");
  }
  data = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(height) * width, channels);
}

void FeatureMap::validate() const {
  if (level < kMinLevel || level > kMaxLevel) {
    throw ValidationError("FeatureMap: level " + std::to_string(level) + " outside P3-P7");
  }
  if (height < 1 || width < 1 || data.cols() < 1 ||
      data.rows() != static_cast<Eigen::Index>(height) * width) {
    throw ValidationError("FeatureMap: data shape does not match " + std::to_string(height) +
                          "x" + std::to_string(width));
  }
}

Eigen::RowVectorXd bilinear_sample(const FeatureMap& fm, double y, double x) {
  y = std::clamp(y, 0.0, double(fm.height - 1));
  x = std::clamp(x, 0.0, double(fm.width - 1));
  const int y0 = static_cast<int>(std::floor(y));
  const int x0 = static_cast<int>(std::floor(x));
  const int y1 = std::min(y0 + 1, fm.height - 1);
  const int x1 = std::min(x0 + 1, fm.width - 1);
  const double ly = y - y0;
  const double lx = x - x0;
  // Nested lerps reproduce a constant neighbourhood exactly.
  const Eigen::RowVectorXd top = fm.cell(y0, x0) + (fm.cell(y0, x1) - fm.cell(y0, x0)) * lx;
  const Eigen::RowVectorXd bottom = fm.cell(y1, x0) + (fm.cell(y1, x1) - fm.cell(y1, x0)) * lx;
  return top + (bottom - top) * ly;
}

RoiFeatures roi_align(const FeatureMap& fm, const Boxd& box, OutputSize out, int samples_per_bin) {
  fm.validate();
  require_finite(box, "roi_align");
  if (box.is_degenerate()) throw ValidationError("roi_align: degenerate box");
  if (out.height < 1 || out.width < 1) throw ValidationError("roi_align: empty output size");
  if (samples_per_bin < 1) throw ValidationError("roi_align: samples_per_bin must be >= 1");

  const double scale = 1.0 / fm.stride();
  const double start_x = box.x1 * scale - 0.5;
  const double start_y = box.y1 * scale - 0.5;
  const double bin_w = (box.x2 - box.x1) * scale / out.width;
  const double bin_h = (box.y2 - box.y1) * scale / out.height;
  const int g = samples_per_bin;

  RoiFeatures r;
  r.size = out;
  r.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(out.height) * out.width, fm.channels());
  for (int ph = 0; ph < out.height; ++ph) {
    for (int pw = 0; pw < out.width; ++pw) {
      Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(fm.channels());
      int count = 0;
      for (int iy = 0; iy < g; ++iy) {
        const double y = start_y + ph * bin_h + (iy + 0.5) * bin_h / g;
        for (int ix = 0; ix < g; ++ix) {
          const double x = start_x + pw * bin_w + (ix + 0.5) * bin_w / g;
          ++count;
          mean += (bilinear_sample(fm, y, x) - mean) / count;
        }
      }
      r.values.row(static_cast<Eigen::Index>(ph) * out.width + pw) = mean;
    }
  }
  return r;
}

int assign_level(const Boxd& box) {
  require_finite(box, "assign_level");
  if (box.is_degenerate()) throw ValidationError("assign_level: degenerate box");
  const double scale = std::sqrt(box.area());
  const int l = static_cast<int>(std::floor(4.0 + std::log2(scale / 224.0)));
  return std::clamp(l, kMinLevel, kMaxLevel);
}

RoiFeatures frf_roi_align(const FeaturePyramidMaps& maps, const Boxd& box, OutputSize out,
                          int samples_per_bin, int radius) {
  if (radius < 0) throw ValidationError("frf_roi_align: radius must be >= 0");
  const int base = assign_level(box);
  const int lo = std::max(kMinLevel, base - radius);
  const int hi = std::min(kMaxLevel, base + radius);
  RoiFeatures fused;
  int count = 0;
  for (int l = lo; l <= hi; ++l) {
    const auto it = maps.find(l);
    if (it == maps.end()) {
      throw ValidationError("frf_roi_align: missing feature map for level " + std::to_string(l));
    }
    RoiFeatures r = roi_align(it->second, box, out, samples_per_bin);
    ++count;
    if (count == 1) {
      fused = std::move(r);
      continue;
    }
    if (r.values.cols() != fused.values.cols()) {
      throw ValidationError("frf_roi_align: channel count differs across levels");
    }
    fused.values += (r.values - fused.values) / count;
  }
  return fused;
}

Eigen::VectorXd qde_fuse(const Eigen::VectorXd& query, const RoiFeatures& roi,
                         const Eigen::MatrixXd& projection) {
  const Eigen::Index d = query.size();
  const Eigen::Index c = roi.values.cols();
  if (roi.values.rows() == 0) throw ValidationError("qde_fuse: empty RoI features");
  if (projection.rows() != d || projection.cols() != d + c) {
    throw ValidationError("qde_fuse: projection must be " + std::to_string(d) + "x" +
                          std::to_string(d + c) + ", got " + std::to_string(projection.rows()) +
                          "x" + std::to_string(projection.cols()));
  }
  Eigen::VectorXd joined(d + c);
  joined << query, roi.values.colwise().mean().transpose();
  return projection * joined;
}

}  // namespace ddq

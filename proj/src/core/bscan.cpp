#include "gprlab/core/bscan.hpp"

#include "gprlab/core/error.hpp"
#include "gprlab/core/resample.hpp"

#include <cmath>
#include <string>

namespace gprlab {

void AScan::validate() const {
  require(!samples.empty(), ErrorCode::invalid_argument, "A-scan has no samples");
  require(dt > 0.0, ErrorCode::invalid_argument, "A-scan dt must be positive");
  for (double v : samples) {
    require(std::isfinite(v), ErrorCode::non_finite, "A-scan contains a non-finite sample");
  }
}

AScan BScan::trace(int i) const {
  require(i >= 0 && i < num_traces(), ErrorCode::invalid_argument, "trace index out of range");
  AScan a;
  a.dt = dt;
  a.samples.assign(traces.row(i).data(), traces.row(i).data() + traces.cols());
  return a;
}

void BScan::validate() const {
  require(num_traces() >= 1, ErrorCode::invalid_argument, "B-scan has no traces");
  require(num_samples() >= 1, ErrorCode::invalid_argument, "B-scan has no samples");
  require(dt > 0.0, ErrorCode::invalid_argument, "B-scan dt must be positive");
  if (!traces.allFinite()) {
    Eigen::Index r = 0, c = 0;
    for (r = 0; r < traces.rows(); ++r)
      for (c = 0; c < traces.cols(); ++c)
        if (!std::isfinite(traces(r, c)))
          fail(ErrorCode::non_finite, "B-scan value at trace " + std::to_string(r) + ", sample " +
                                          std::to_string(c) + " is not finite");
  }
}

std::string_view to_string(DomainTag tag) {
  return tag == DomainTag::time ? "time" : "frequency";
}

DomainTag domain_from_string(std::string_view name) {
  if (name == "time") return DomainTag::time;
  if (name == "frequency") return DomainTag::frequency;
  fail(ErrorCode::parse_error, "unknown domain tag '" + std::string(name) + "'");
}

void RadarImage::validate() const {
  require(rows() >= 2 && rows() == cols(), ErrorCode::shape_mismatch,
          "radar image must be square, got " + std::to_string(rows()) + "x" +
              std::to_string(cols()));
  require(pixels.allFinite(), ErrorCode::non_finite, "radar image has non-finite pixels");
  require(pixels.minCoeff() >= -1.0f && pixels.maxCoeff() <= 1.0f, ErrorCode::invalid_argument,
          "radar image pixels outside [-1, 1]");
}

std::string_view class_name(ClassLabel label) {
  switch (label) {
    case ClassLabel::concrete: return "concrete";
    case ClassLabel::metallic: return "metallic";
    case ClassLabel::pvc: return "pvc";
  }
  fail(ErrorCode::invalid_argument, "invalid class label");
}

ClassLabel class_from_name(std::string_view name) {
  if (name == "concrete") return ClassLabel::concrete;
  if (name == "metallic") return ClassLabel::metallic;
  if (name == "pvc") return ClassLabel::pvc;
  fail(ErrorCode::invalid_argument, "unknown class name '" + std::string(name) + "'");
}

ClassLabel class_from_id(int id) {
  require(id >= 0 && id < kNumClasses, ErrorCode::invalid_argument,
          "class id " + std::to_string(id) + " outside [0, " + std::to_string(kNumClasses) + ")");
  return static_cast<ClassLabel>(id);
}

BScan preprocess_bscan(const BScan& raw, const PreprocessOptions& opts) {
  raw.validate();
  require(std::isfinite(opts.gain), ErrorCode::invalid_argument, "gain must be finite");
  BScan out = raw;
  if (opts.dewow) {
    out.traces.colwise() -= out.traces.rowwise().mean();
  }
  if (opts.background_removal) {
    Eigen::RowVectorXd mean_trace = out.traces.colwise().mean();
    out.traces.rowwise() -= mean_trace;
  }
  if (opts.gain != 0.0) {
    for (int k = 0; k < out.num_samples(); ++k) {
      out.traces.col(k) *= 1.0 + opts.gain * (k * out.dt / 1e-9);
    }
  }
  return out;
}

void rescale_symmetric(MatrixRM& m) {
  if (m.size() == 0) return;
  const double lo = m.minCoeff();
  const double hi = m.maxCoeff();
  const double range = hi - lo;
  if (!(range > 1e-12 * std::max(std::abs(hi), std::abs(lo)))) {
    m.setZero();
    return;
  }
  m = ((m.array() - lo) * (2.0 / range) - 1.0).matrix();
  // Pin the extremes so float conversion cannot step outside [-1, 1].
  m = m.cwiseMax(-1.0).cwiseMin(1.0);
}

RadarImage resize_to_canvas(const BScan& b, int canvas) {
  b.validate();
  require(canvas >= 2, ErrorCode::invalid_argument, "canvas must be at least 2 pixels");
  require(b.num_samples() >= 2, ErrorCode::invalid_argument,
          "cannot resize a B-scan with a single sample per trace");
  const MatrixRM time_major = b.traces.transpose();
  MatrixRM resized = resample(time_major, canvas, canvas);
  rescale_symmetric(resized);
  RadarImage img;
  img.domain = DomainTag::time;
  img.pixels = resized.cast<float>();
  return img;
}

}  // namespace gprlab

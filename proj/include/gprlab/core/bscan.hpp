#pragma once

#include <Eigen/Core>

#include <optional>
#include <string_view>
#include <vector>

namespace gprlab {

using MatrixRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ImageRM = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Side length of the canonical square canvas every model consumes.
inline constexpr int kCanvasSize = 256;

/// One radar trace: amplitude against two-way travel time.
struct AScan {
  std::vector<double> samples;
  double dt = 0.0;  // seconds per sample

  void validate() const;
};

/// Radargram stored trace-major: row i is the i-th A-scan in acquisition
/// order, column k is time sample k.
struct BScan {
  MatrixRM traces;
  double dt = 0.0;             // seconds per sample
  double trace_spacing = 0.0;  // meters between consecutive traces

  int num_traces() const { return static_cast<int>(traces.rows()); }
  int num_samples() const { return static_cast<int>(traces.cols()); }
  AScan trace(int i) const;

  void validate() const;
};

enum class DomainTag { time, frequency };

std::string_view to_string(DomainTag tag);
DomainTag domain_from_string(std::string_view name);

/// Square image normalized to [-1, 1]. Rows are time (top = earliest),
/// columns are traces, matching the usual radargram display.
struct RadarImage {
  ImageRM pixels;
  DomainTag domain = DomainTag::time;

  int rows() const { return static_cast<int>(pixels.rows()); }
  int cols() const { return static_cast<int>(pixels.cols()); }

  void validate() const;
};

enum class ClassLabel : int { concrete = 0, metallic = 1, pvc = 2 };

inline constexpr int kNumClasses = 3;

std::string_view class_name(ClassLabel label);
ClassLabel class_from_name(std::string_view name);
ClassLabel class_from_id(int id);
inline int class_id(ClassLabel label) { return static_cast<int>(label); }

struct PreprocessOptions {
  bool dewow = false;
  bool background_removal = false;
  /// Slope of the linear time gain, per nanosecond of two-way time:
  /// sample k is multiplied by 1 + gain * (k * dt / 1 ns).
  double gain = 0.0;
};

/// Dewow (per-trace mean removal), mean-trace background removal and linear
/// time gain, applied in that order. Each step is skipped when disabled.
BScan preprocess_bscan(const BScan& raw, const PreprocessOptions& opts);

/// Resample to a canvas x canvas image (Hamming-windowed sinc, separable)
/// and rescale so min -> -1 and max -> +1. Constant input maps to zeros.
RadarImage resize_to_canvas(const BScan& b, int canvas = kCanvasSize);

/// Linear min/max rescale into [-1, 1] in place; a constant matrix becomes
/// all zeros.
void rescale_symmetric(MatrixRM& m);

}  // namespace gprlab

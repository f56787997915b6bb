#pragma once

#include <Eigen/Core>

#include <vector>

#include "gprlab/core/bscan.hpp"
#include "gprlab/freq/stft.hpp"

namespace gprlab::freq {

struct FrequencyBScan {
  RadarImage image;  // domain == frequency
  SpectrogramConfig source_config;
};

/// Time-major input (rows = samples, cols = traces) to a frames x traces
/// profile: each frame's spectrum reduced per cfg.reduction.
MatrixRM frequency_profile(const MatrixRM& time_major, const SpectrogramConfig& cfg = {});

/// Per-trace spectrogram profiles stacked as columns, resampled to
/// canvas x canvas and rescaled to [-1, 1].
FrequencyBScan frequency_bscan(const BScan& b, const SpectrogramConfig& cfg = {},
                               int canvas = kCanvasSize);

/// Same transform applied to a time-domain image; the output has the input's
/// size (columns are traces, rows are time).
FrequencyBScan frequency_bscan(const RadarImage& time_image, const SpectrogramConfig& cfg = {});

/// Differentiable transform of a fixed-size time image (row-major, rows =
/// time) into a frequency image of (out_rows x out_cols). The backward pass
/// follows the peak bin of each frame, the resampling operators and the
/// min/max of the final rescale. With Reduction::argmax_bin the profile is
/// piecewise constant and the gradient is zero.
template <typename T>
class FrequencyTransform {
 public:
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

  FrequencyTransform(int rows, int cols, const SpectrogramConfig& cfg = {});
  FrequencyTransform(int rows, int cols, int out_rows, int out_cols,
                     const SpectrogramConfig& cfg = {});

  struct Cache {
    Mat re, im, mag;               // value of the peak bin, frames x cols
    Eigen::MatrixXi bin;           // peak bin index
    Mat resized;                   // before rescale, out_rows x out_cols
    Eigen::Index min_index = 0;    // column-major linear positions in resized
    Eigen::Index max_index = 0;
    T lo = 0, hi = 0;
    bool constant = true;
  };

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int out_rows() const { return out_rows_; }
  int out_cols() const { return out_cols_; }
  const SpectrogramConfig& config() const { return cfg_; }

  /// `in` and `out` are row-major. `cache` may be null for inference.
  void forward(const T* in, T* out, Cache* cache = nullptr) const;
  /// Accumulates d loss / d in into `grad_in` (row-major, rows x cols).
  void backward(const Cache& cache, const T* grad_out, T* grad_in) const;

 private:
  int rows_, cols_, out_rows_, out_cols_;
  int frames_;
  SpectrogramConfig cfg_;
  DftBasis<T> basis_;
  Mat row_op_;  // out_rows x frames
  Mat col_op_;  // out_cols x cols
};

}  // namespace gprlab::freq

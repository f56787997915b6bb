#include "gprlab/freq/frequency_bscan.hpp"

#include <algorithm>
#include <cmath>

#include "gprlab/core/error.hpp"
#include "gprlab/core/resample.hpp"

namespace gprlab::freq {

namespace {

// Frame columns processed per GEMM, bounding the spectrum buffers.
constexpr int kChunk = 2048;

}  // namespace

template <typename T>
FrequencyTransform<T>::FrequencyTransform(int rows, int cols, const SpectrogramConfig& cfg)
    : FrequencyTransform(rows, cols, rows, cols, cfg) {}

template <typename T>
FrequencyTransform<T>::FrequencyTransform(int rows, int cols, int out_rows, int out_cols,
                                          const SpectrogramConfig& cfg)
    : rows_(rows),
      cols_(cols),
      out_rows_(out_rows),
      out_cols_(out_cols),
      frames_(cfg.num_frames(rows)),
      cfg_(cfg),
      basis_(cfg) {
  if (rows < cfg.segment_length) {
    fail(ErrorCode::invalid_argument, "frequency transform: traces have " + std::to_string(rows) +
                                          " samples, fewer than the segment length " +
                                          std::to_string(cfg.segment_length));
  }
  require(cols >= 1 && out_rows >= 1 && out_cols >= 1, ErrorCode::invalid_argument,
          "frequency transform: empty shape");
  row_op_ = resampling_matrix(frames_, out_rows).cast<T>();
  col_op_ = resampling_matrix(cols, out_cols).cast<T>();
}

template <typename T>
void FrequencyTransform<T>::forward(const T* in, T* out, Cache* cache) const {
  const int F = frames_;
  const int C = cols_;
  const int L = cfg_.segment_length;
  const int K = cfg_.num_bins();
  const bool argmax = cfg_.reduction == Reduction::argmax_bin;

  Mat profile(F, C);
  if (cache) {
    cache->re.resize(F, C);
    cache->im.resize(F, C);
    cache->mag.resize(F, C);
    cache->bin.resize(F, C);
  }

  // Column n of the frame matrix is (trace c, frame f) with n = c * F + f.
  const int total = F * C;
  Mat frames(L, std::min(kChunk, total));
  Mat re, im;
  for (int start = 0; start < total; start += kChunk) {
    const int count = std::min(kChunk, total - start);
    for (int n = 0; n < count; ++n) {
      const int c = (start + n) / F;
      const int f = (start + n) % F;
      for (int k = 0; k < L; ++k) frames(k, n) = in[static_cast<std::size_t>(f * cfg_.hop + k) * C + c];
    }
    re.noalias() = basis_.cos_basis * frames.leftCols(count);
    im.noalias() = basis_.sin_basis * frames.leftCols(count);
    for (int n = 0; n < count; ++n) {
      const int c = (start + n) / F;
      const int f = (start + n) % F;
      int best = 0;
      T best_sq = -1;
      for (int k = 0; k < K; ++k) {
        const T sq = re(k, n) * re(k, n) + im(k, n) * im(k, n);
        if (sq > best_sq) {
          best_sq = sq;
          best = k;
        }
      }
      const T mag = std::sqrt(best_sq);
      profile(f, c) = argmax ? static_cast<T>(best) : mag;
      if (cache) {
        cache->re(f, c) = re(best, n);
        cache->im(f, c) = im(best, n);
        cache->mag(f, c) = mag;
        cache->bin(f, c) = best;
      }
    }
  }

  Mat resized = row_op_ * profile * col_op_.transpose();
  Eigen::Index rmin = 0, cmin = 0, rmax = 0, cmax = 0;
  const T lo = resized.minCoeff(&rmin, &cmin);
  const T hi = resized.maxCoeff(&rmax, &cmax);
  const T range = hi - lo;
  const bool constant = !(range > T(1e-12) * std::max(std::abs(hi), std::abs(lo)));
  for (int r = 0; r < out_rows_; ++r) {
    for (int c = 0; c < out_cols_; ++c) {
      T v = constant ? T(0) : (resized(r, c) - lo) * (T(2) / range) - T(1);
      out[static_cast<std::size_t>(r) * out_cols_ + c] = std::clamp(v, T(-1), T(1));
    }
  }
  if (cache) {
    cache->resized = std::move(resized);
    cache->min_index = cmin * out_rows_ + rmin;
    cache->max_index = cmax * out_rows_ + rmax;
    cache->lo = lo;
    cache->hi = hi;
    cache->constant = constant;
  }
}

template <typename T>
void FrequencyTransform<T>::backward(const Cache& cache, const T* grad_out, T* grad_in) const {
  if (cache.constant || cfg_.reduction == Reduction::argmax_bin) return;
  const int F = frames_;
  const int C = cols_;
  const int L = cfg_.segment_length;
  const T range = cache.hi - cache.lo;

  Mat g(out_rows_, out_cols_);
  for (int r = 0; r < out_rows_; ++r)
    for (int c = 0; c < out_cols_; ++c) g(r, c) = grad_out[static_cast<std::size_t>(r) * out_cols_ + c];

  // out = 2 (Q - lo) / (hi - lo) - 1
  const T inv2 = T(1) / (range * range);
  T g_hi = 0, g_lo = 0;
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    const T q = cache.resized.data()[k];
    g_hi += g.data()[k] * (-T(2) * (q - cache.lo) * inv2);
    g_lo += g.data()[k] * (T(2) * (q - cache.hi) * inv2);
  }
  Mat dq = g * (T(2) / range);
  dq.data()[cache.max_index] += g_hi;
  dq.data()[cache.min_index] += g_lo;

  const Mat dp = row_op_.transpose() * dq * col_op_;  // frames x cols

  for (int c = 0; c < C; ++c) {
    for (int f = 0; f < F; ++f) {
      const T mag = cache.mag(f, c);
      if (!(mag > 0)) continue;
      const T d = dp(f, c) / mag;
      const int k = cache.bin(f, c);
      const T a = d * cache.re(f, c);
      const T b = d * cache.im(f, c);
      for (int n = 0; n < L; ++n) {
        grad_in[static_cast<std::size_t>(f * cfg_.hop + n) * C + c] +=
            a * basis_.cos_basis(k, n) + b * basis_.sin_basis(k, n);
      }
    }
  }
}

template class FrequencyTransform<float>;
template class FrequencyTransform<double>;

MatrixRM frequency_profile(const MatrixRM& time_major, const SpectrogramConfig& cfg) {
  cfg.validate();
  const int rows = static_cast<int>(time_major.rows());
  const int cols = static_cast<int>(time_major.cols());
  const int F = cfg.num_frames(rows);
  if (F < 1) {
    fail(ErrorCode::invalid_argument, "frequency_profile: traces have " + std::to_string(rows) +
                                          " samples, fewer than the segment length");
  }
  const DftBasis<double> basis(cfg);
  MatrixRM out(F, cols);
  Eigen::MatrixXd frames(cfg.segment_length, F);
  for (int c = 0; c < cols; ++c) {
    for (int f = 0; f < F; ++f)
      for (int k = 0; k < cfg.segment_length; ++k) frames(k, f) = time_major(f * cfg.hop + k, c);
    const Eigen::MatrixXd re = basis.cos_basis * frames;
    const Eigen::MatrixXd im = basis.sin_basis * frames;
    const Eigen::MatrixXd sq = re.array().square() + im.array().square();
    for (int f = 0; f < F; ++f) {
      Eigen::Index best = 0;
      const double m = sq.col(f).maxCoeff(&best);
      out(f, c) = cfg.reduction == Reduction::argmax_bin ? static_cast<double>(best) : std::sqrt(m);
    }
  }
  return out;
}

namespace {

FrequencyBScan run_transform(const MatrixRM& time_major, const SpectrogramConfig& cfg,
                             int out_rows, int out_cols) {
  cfg.validate();
  const int rows = static_cast<int>(time_major.rows());
  const int cols = static_cast<int>(time_major.cols());
  const FrequencyTransform<double> transform(rows, cols, out_rows, out_cols, cfg);
  MatrixRM out(out_rows, out_cols);
  transform.forward(time_major.data(), out.data());
  FrequencyBScan fb;
  fb.image.domain = DomainTag::frequency;
  fb.image.pixels = out.cast<float>();
  fb.source_config = cfg;
  return fb;
}

}  // namespace

FrequencyBScan frequency_bscan(const BScan& b, const SpectrogramConfig& cfg, int canvas) {
  b.validate();
  const MatrixRM time_major = b.traces.transpose();
  return run_transform(time_major, cfg, canvas, canvas);
}

FrequencyBScan frequency_bscan(const RadarImage& time_image, const SpectrogramConfig& cfg) {
  time_image.validate();
  require(time_image.domain == DomainTag::time, ErrorCode::invalid_argument,
          "frequency_bscan: input image must be time-domain");
  const MatrixRM time_major = time_image.pixels.cast<double>();
  return run_transform(time_major, cfg, time_image.rows(), time_image.cols());
}

}  // namespace gprlab::freq

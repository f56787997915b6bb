#pragma once

#include <Eigen/Core>

#include <string_view>
#include <vector>

#include "gprlab/core/bscan.hpp"

namespace gprlab::freq {

/// How each spectrogram frame collapses to one value.
enum class Reduction {
  max_magnitude,  // peak magnitude over bins (differentiable, default)
  argmax_bin,     // index of the peak bin
};

std::string_view to_string(Reduction r);
Reduction reduction_from_string(std::string_view name);

struct SpectrogramConfig {
  int nfft = 1024;
  int segment_length = 16;
  int hop = 8;
  Reduction reduction = Reduction::max_magnitude;

  int num_bins() const { return nfft / 2 + 1; }
  /// floor((n - segment_length) / hop) + 1
  int num_frames(int n) const;
  void validate() const;

  bool operator==(const SpectrogramConfig&) const = default;
};

/// Periodic Hann window of length n.
std::vector<double> hann_window(int n);

/// Windowed one-sided DFT basis: real part (bins x segment) and imaginary
/// part, with the analysis window folded in, so that for a raw segment s
/// Re = cos_basis * s and Im = sin_basis * s.
template <typename T>
struct DftBasis {
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> cos_basis;
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> sin_basis;

  explicit DftBasis(const SpectrogramConfig& cfg);
};

/// frames x (nfft/2 + 1) magnitude spectrogram of one trace. Frame f covers
/// samples [f*hop, f*hop + segment_length), Hann-windowed and zero-padded.
MatrixRM stft_magnitude(const AScan& a, const SpectrogramConfig& cfg = {});

}  // namespace gprlab::freq

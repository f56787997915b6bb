#include "gprlab/freq/stft.hpp"

#include <cmath>
#include <numbers>

#include "gprlab/core/error.hpp"

namespace gprlab::freq {

std::string_view to_string(Reduction r) {
  return r == Reduction::max_magnitude ? "max_magnitude" : "argmax_bin";
}

Reduction reduction_from_string(std::string_view name) {
  if (name == "max_magnitude") return Reduction::max_magnitude;
  if (name == "argmax_bin") return Reduction::argmax_bin;
  fail(ErrorCode::invalid_argument, "unknown frequency reduction '" + std::string(name) + "'");
}

int SpectrogramConfig::num_frames(int n) const {
  if (n < segment_length) return 0;
  return (n - segment_length) / hop + 1;
}

void SpectrogramConfig::validate() const {
  require(nfft >= 2, ErrorCode::invalid_argument, "spectrogram: nfft must be >= 2");
  require(segment_length >= 1 && segment_length <= nfft, ErrorCode::invalid_argument,
          "spectrogram: segment_length must lie in [1, nfft]");
  require(hop >= 1, ErrorCode::invalid_argument, "spectrogram: hop must be >= 1");
}

std::vector<double> hann_window(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  return w;
}

template <typename T>
DftBasis<T>::DftBasis(const SpectrogramConfig& cfg) {
  cfg.validate();
  const int K = cfg.num_bins();
  const int L = cfg.segment_length;
  const auto w = hann_window(L);
  cos_basis.resize(K, L);
  sin_basis.resize(K, L);
  for (int k = 0; k < K; ++k) {
    for (int n = 0; n < L; ++n) {
      // Reduce k*n mod nfft in integers to keep the phase exact.
      const long long kn = (static_cast<long long>(k) * n) % cfg.nfft;
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(kn) / cfg.nfft;
      cos_basis(k, n) = static_cast<T>(w[n] * std::cos(phase));
      sin_basis(k, n) = static_cast<T>(-w[n] * std::sin(phase));
    }
  }
}

template struct DftBasis<float>;
template struct DftBasis<double>;

MatrixRM stft_magnitude(const AScan& a, const SpectrogramConfig& cfg) {
  a.validate();
  cfg.validate();
  const int n = static_cast<int>(a.samples.size());
  if (n < cfg.segment_length) {
    fail(ErrorCode::invalid_argument, "stft_magnitude: A-scan has " + std::to_string(n) +
                                          " samples, fewer than the segment length " +
                                          std::to_string(cfg.segment_length));
  }
  const DftBasis<double> basis(cfg);
  const int F = cfg.num_frames(n);
  const int L = cfg.segment_length;
  Eigen::MatrixXd frames(L, F);
  for (int f = 0; f < F; ++f)
    for (int k = 0; k < L; ++k) frames(k, f) = a.samples[f * cfg.hop + k];
  const Eigen::MatrixXd re = basis.cos_basis * frames;
  const Eigen::MatrixXd im = basis.sin_basis * frames;
  MatrixRM mag = (re.array().square() + im.array().square()).sqrt().matrix().transpose();
  return mag;
}

}  // namespace gprlab::freq

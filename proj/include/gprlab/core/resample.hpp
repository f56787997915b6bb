#pragma once

#include "gprlab/core/bscan.hpp"

namespace gprlab {

/// Half-width of the Hamming-windowed sinc kernel, in source pixels when
/// upsampling. When downsampling the kernel is stretched by the scale factor
/// so it also acts as the anti-aliasing filter.
inline constexpr double kHammingSupport = 3.0;

/// Kernel value at offset x (in kernel units): sinc(x) * Hamming window.
double hamming_sinc(double x);

/// Dense (out x in) resampling operator. Row i holds the normalized weights
/// of output sample i; taps outside [0, in) are dropped before normalizing.
MatrixRM resampling_matrix(int in, int out);

/// Bilinear operator with the same centre mapping, used as a reference.
MatrixRM bilinear_matrix(int in, int out);

/// Separable resample of a matrix to (out_rows x out_cols).
MatrixRM resample(const MatrixRM& src, int out_rows, int out_cols);

}  // namespace gprlab

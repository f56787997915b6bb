#include "gprlab/core/resample.hpp"

#include "gprlab/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gprlab {

double hamming_sinc(double x) {
  const double ax = std::abs(x);
  if (ax >= kHammingSupport) return 0.0;
  const double window = 0.54 + 0.46 * std::cos(std::numbers::pi * x / kHammingSupport);
  if (ax < 1e-12) return window;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px * window;
}

namespace {

template <typename Kernel>
MatrixRM build_operator(int in, int out, double support, Kernel kernel) {
  require(in >= 1 && out >= 1, ErrorCode::invalid_argument, "resample sizes must be positive");
  MatrixRM op = MatrixRM::Zero(out, in);
  const double scale = static_cast<double>(in) / out;
  const double stretch = std::max(1.0, scale);
  const double reach = support * stretch;
  for (int i = 0; i < out; ++i) {
    const double centre = (i + 0.5) * scale - 0.5;
    const int first = std::max(0, static_cast<int>(std::floor(centre - reach)));
    const int last = std::min(in - 1, static_cast<int>(std::ceil(centre + reach)));
    double total = 0.0;
    for (int j = first; j <= last; ++j) {
      const double w = kernel((j - centre) / stretch);
      op(i, j) = w;
      total += w;
    }
    if (std::abs(total) < 1e-300) {
      // Only reachable when every in-range tap sits on a kernel zero.
      const int nearest = std::clamp(static_cast<int>(std::lround(centre)), 0, in - 1);
      op.row(i).setZero();
      op(i, nearest) = 1.0;
    } else {
      op.row(i) /= total;
    }
  }
  return op;
}

}  // namespace

MatrixRM resampling_matrix(int in, int out) {
  return build_operator(in, out, kHammingSupport, hamming_sinc);
}

MatrixRM bilinear_matrix(int in, int out) {
  return build_operator(in, out, 1.0, [](double x) { return std::max(0.0, 1.0 - std::abs(x)); });
}

MatrixRM resample(const MatrixRM& src, int out_rows, int out_cols) {
  const MatrixRM rows_op = resampling_matrix(static_cast<int>(src.rows()), out_rows);
  const MatrixRM cols_op = resampling_matrix(static_cast<int>(src.cols()), out_cols);
  MatrixRM tmp = rows_op * src;
  return tmp * cols_op.transpose();
}

}  // namespace gprlab

#include "gprlab/sim/random_field.hpp"

#include <cmath>

namespace gprlab::sim {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0)) return {1.0};
  const int half = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * half + 1);
  double sum = 0;
  for (int i = -half; i <= half; ++i) {
    k[i + half] = std::exp(-0.5 * (i / sigma) * (i / sigma));
    sum += k[i + half];
  }
  for (double& v : k) v /= sum;
  return k;
}

namespace {

double energy(const std::vector<double>& k) {
  double e = 0;
  for (double v : k) e += v * v;
  return e;
}

}  // namespace

MatrixRM correlated_field(int rows, int cols, const std::vector<double>& col_kernel,
                          const std::vector<double>& row_kernel, std::mt19937_64& rng) {
  const int pr = static_cast<int>(col_kernel.size()) / 2;
  const int pc = static_cast<int>(row_kernel.size()) / 2;
  const int R = rows + 2 * pr;
  const int C = cols + 2 * pc;
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixRM white(R, C);
  for (int r = 0; r < R; ++r)
    for (int c = 0; c < C; ++c) white(r, c) = normal(rng);

  MatrixRM along_rows(R, cols);
  for (int r = 0; r < R; ++r) {
    for (int c = 0; c < cols; ++c) {
      double acc = 0;
      for (std::size_t k = 0; k < row_kernel.size(); ++k) acc += row_kernel[k] * white(r, c + k);
      along_rows(r, c) = acc;
    }
  }
  MatrixRM out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double acc = 0;
      for (std::size_t k = 0; k < col_kernel.size(); ++k) acc += col_kernel[k] * along_rows(r + k, c);
      out(r, c) = acc;
    }
  }
  out /= std::sqrt(energy(col_kernel) * energy(row_kernel));
  return out;
}

}  // namespace gprlab::sim

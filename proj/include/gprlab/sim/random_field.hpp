#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "gprlab/core/bscan.hpp"

namespace gprlab::sim {

/// SplitMix64 step, used to decorrelate consecutive integer seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Normalized Gaussian smoothing kernel with standard deviation `sigma`
/// (in samples), truncated at 3 sigma. sigma <= 0 gives the unit impulse.
std::vector<double> gaussian_kernel(double sigma);

/// Stationary zero-mean Gaussian field: white noise filtered separably by
/// `row_kernel` (along rows, i.e. across columns) and `col_kernel` (down
/// columns), scaled to unit variance. The noise is drawn on a padded grid so
/// the edges are statistically identical to the interior.
MatrixRM correlated_field(int rows, int cols, const std::vector<double>& col_kernel,
                          const std::vector<double>& row_kernel, std::mt19937_64& rng);

}  // namespace gprlab::sim

#pragma once

#include <span>

namespace gprlab::stats {

/// Mean of squared elementwise differences.
double mse(std::span<const double> a, std::span<const double> b);

/// Sum of p_i ln(p_i / q_i) in nats; terms with p_i = 0 contribute nothing.
/// Both inputs must be probability vectors (sum 1 within 1e-9) on the same
/// support, and q_i = 0 requires p_i = 0.
double kl_divergence(std::span<const double> p, std::span<const double> q);

/// Exact 1-Wasserstein distance between two equal-size empirical samples:
/// mean absolute difference of the sorted values.
double wasserstein_1d(std::span<const double> a, std::span<const double> b);

}  // namespace gprlab::stats

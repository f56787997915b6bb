#include "gprlab/stats/distance.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gprlab/core/error.hpp"

namespace gprlab::stats {

namespace {

void check_distribution(std::span<const double> p, const char* name) {
  double sum = 0;
  for (double v : p) {
    require(std::isfinite(v) && v >= 0, ErrorCode::invalid_argument,
            std::string("kl_divergence: ") + name + " has a negative or non-finite entry");
    sum += v;
  }
  require(std::abs(sum - 1.0) <= 1e-9, ErrorCode::invalid_argument,
          std::string("kl_divergence: ") + name + " does not sum to 1");
}

}  // namespace

double mse(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorCode::shape_mismatch, "mse: length mismatch");
  require(!a.empty(), ErrorCode::invalid_argument, "mse: empty input");
  double sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum / static_cast<double>(a.size());
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  require(p.size() == q.size(), ErrorCode::shape_mismatch, "kl_divergence: support mismatch");
  require(!p.empty(), ErrorCode::invalid_argument, "kl_divergence: empty support");
  check_distribution(p, "p");
  check_distribution(q, "q");
  double sum = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0) continue;
    require(q[i] > 0, ErrorCode::invalid_argument,
            "kl_divergence: p is not absolutely continuous with respect to q at index " +
                std::to_string(i));
    sum += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(sum, 0.0);
}

double wasserstein_1d(std::span<const double> a, std::span<const double> b) {
  require(!a.empty() && !b.empty(), ErrorCode::invalid_argument, "wasserstein_1d: empty sample");
  require(a.size() == b.size(), ErrorCode::shape_mismatch,
          "wasserstein_1d: samples must have equal size");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  for (double v : x) require(std::isfinite(v), ErrorCode::non_finite, "wasserstein_1d: non-finite value");
  for (double v : y) require(std::isfinite(v), ErrorCode::non_finite, "wasserstein_1d: non-finite value");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  double sum = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += std::abs(x[i] - y[i]);
  return sum / static_cast<double>(x.size());
}

}  // namespace gprlab::stats

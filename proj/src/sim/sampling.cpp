#include "gprlab/sim/sampling.hpp"

#include <random>

#include "gprlab/core/error.hpp"
#include "gprlab/sim/random_field.hpp"

namespace gprlab::sim {

namespace {

[[noreturn]] void infeasible(const std::string& msg) {
  fail(ErrorCode::infeasible, "scene ranges: " + msg);
}

double draw(const Range& r, std::mt19937_64& rng) {
  // Always consume one draw so every parameter keeps its position in the
  // stream whether or not a range is degenerate.
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return r.lo == r.hi ? r.lo : r.lo + u * (r.hi - r.lo);
}

}  // namespace

void check_feasible(const SceneRanges& ranges) {
  const auto& b = ranges.base;
  for (const auto* r : {&ranges.radius, &ranges.center_depth, &ranges.center_x,
                        &ranges.soil_permittivity, &ranges.heterogeneity,
                        &ranges.correlation_length}) {
    if (!(r->lo <= r->hi)) infeasible("every range needs lo <= hi");
  }
  if (ranges.materials.empty()) infeasible("material set is empty");
  if (ranges.radius.lo < kMinCylinderRadius || ranges.radius.hi > kMaxCylinderRadius) {
    infeasible("radius range must lie in [0.002, 0.080] m");
  }
  const double rmax = ranges.radius.hi;
  if (ranges.center_x.lo - rmax < 0 || ranges.center_x.hi + rmax > b.domain_width) {
    infeasible("cylinder cannot fit horizontally for every draw");
  }
  if (ranges.center_depth.lo - rmax < 0 || ranges.center_depth.hi + rmax > b.domain_depth) {
    infeasible("cylinder cannot fit vertically for every draw");
  }
  if (ranges.soil_permittivity.lo - 3.0 * ranges.heterogeneity.hi < 1.0) {
    infeasible("soil permittivity - 3 * heterogeneity drops below 1");
  }
  if (ranges.heterogeneity.lo < 0) infeasible("heterogeneity must be >= 0");
  if (!(ranges.correlation_length.lo > 0)) infeasible("correlation length must be positive");
}

std::vector<SimulationScene> sample_scenes(const SceneRanges& ranges, int n, std::uint64_t seed) {
  require(n >= 0, ErrorCode::invalid_argument, "sample_scenes: n must be >= 0");
  check_feasible(ranges);
  std::vector<SimulationScene> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const std::uint64_t scene_seed = seed + static_cast<std::uint64_t>(i);
    std::mt19937_64 rng(splitmix64(scene_seed ^ 0x5ce7e5ULL));
    SimulationScene s = ranges.base;
    s.seed = scene_seed;
    s.cylinder.material = ranges.materials[scene_seed % ranges.materials.size()];
    s.cylinder.radius = draw(ranges.radius, rng);
    s.cylinder.center_depth = draw(ranges.center_depth, rng);
    s.cylinder.center_x = draw(ranges.center_x, rng);
    s.soil.mean_rel_permittivity = draw(ranges.soil_permittivity, rng);
    s.soil.heterogeneity = draw(ranges.heterogeneity, rng);
    s.soil.correlation_length = draw(ranges.correlation_length, rng);
    s.validate();
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace gprlab::sim

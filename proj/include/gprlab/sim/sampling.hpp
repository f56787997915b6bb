#pragma once

#include <cstdint>
#include <vector>

#include "gprlab/sim/scene.hpp"

namespace gprlab::sim {

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  bool operator==(const Range&) const = default;
};

/// Randomization of the cylinder and soil around a base scene. Everything
/// not listed here is copied from `base`.
struct SceneRanges {
  SimulationScene base;
  std::vector<ClassLabel> materials{ClassLabel::concrete, ClassLabel::metallic, ClassLabel::pvc};
  Range radius{0.005, 0.04};
  Range center_depth{0.15, 0.5};
  Range center_x{0.25, 0.35};
  Range soil_permittivity{4.0, 6.0};
  Range heterogeneity{0.1, 0.4};
  Range correlation_length{0.01, 0.04};
};

/// Checks that every scene drawable from the ranges satisfies the scene
/// invariants; throws `infeasible` otherwise.
void check_feasible(const SceneRanges& ranges);

/// n scenes; scene i has seed `seed + i` and its parameters are drawn from
/// a generator seeded with that value, so any scene can be regenerated alone.
/// The material cycles through `materials` with the scene seed, so
/// consecutive seeds give balanced classes.
std::vector<SimulationScene> sample_scenes(const SceneRanges& ranges, int n, std::uint64_t seed);

}  // namespace gprlab::sim

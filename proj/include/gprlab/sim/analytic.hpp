#pragma once

#include <utility>

#include "gprlab/core/bscan.hpp"
#include "gprlab/sim/scene.hpp"

namespace gprlab::sim {

struct AnalyticOptions {
  MaterialTable materials;
  /// Peak amplitude of the transmitter-to-receiver direct wave.
  double direct_wave_amplitude = 0.6;
};

/// Two-way travel time from the antenna midpoint at `x` to the cylinder
/// centre, in soil of the scene's mean permittivity. Depth is measured from
/// the antenna line.
double point_scatterer_travel_time(const SimulationScene& scene, double x);

/// Point-scatterer rendering: one Ricker pulse per trace at the hyperbolic
/// travel time, scaled by signed reflectivity and geometric spreading, plus
/// a direct-wave band and soil clutter (Gaussian noise correlated across
/// traces over the correlation length and shaped in time by the source
/// wavelet, scaled by heterogeneity / mean permittivity).
std::pair<BScan, ClassLabel> analytic_bscan(const SimulationScene& scene,
                                            const AnalyticOptions& opts = {});

}  // namespace gprlab::sim

#include "gprlab/sim/analytic.hpp"

#include <cmath>
#include <random>

#include "gprlab/core/error.hpp"
#include "gprlab/sim/random_field.hpp"
#include "gprlab/sim/ricker.hpp"

namespace gprlab::sim {

namespace {

double soil_velocity(const SimulationScene& scene) {
  return kSpeedOfLight / std::sqrt(scene.soil.mean_rel_permittivity);
}

double vertical_offset(const SimulationScene& scene) {
  return std::abs(scene.cylinder.center_depth - scene.traversal.antenna_depth);
}

// Adds amp * ricker(t - t0) to the row, touching only samples where the
// wavelet is non-negligible.
void add_pulse(double* row, int n, double dt, double t0, double f, double amp) {
  const double half = 2.0 / f;
  const int k0 = std::max(0, static_cast<int>(std::floor((t0 - half) / dt)));
  const int k1 = std::min(n - 1, static_cast<int>(std::ceil((t0 + half) / dt)));
  for (int k = k0; k <= k1; ++k) row[k] += amp * ricker(k * dt - t0, f);
}

}  // namespace

double point_scatterer_travel_time(const SimulationScene& scene, double x) {
  const double h = vertical_offset(scene);
  const double dx = x - scene.cylinder.center_x;
  return 2.0 * std::sqrt(h * h + dx * dx) / soil_velocity(scene);
}

std::pair<BScan, ClassLabel> analytic_bscan(const SimulationScene& scene,
                                            const AnalyticOptions& opts) {
  scene.validate();
  const auto& trav = scene.traversal;
  const double dt = scene.time_step();
  const int ns = scene.num_samples();
  const int nt = trav.num_traces;
  const double f = scene.waveform.center_frequency;
  const double amp = scene.waveform.amplitude;

  bool visible = false;
  for (int i = 0; i < nt; ++i) {
    if (point_scatterer_travel_time(scene, trav.midpoint(i)) <= scene.time_window) visible = true;
  }
  if (!visible) {
    fail(ErrorCode::target_invisible,
         "analytic_bscan: reflection arrives after the time window on every trace");
  }

  BScan out;
  out.dt = dt;
  out.trace_spacing = trav.step;
  out.traces = MatrixRM::Zero(nt, ns);

  const double refl = opts.materials.reflectivity(scene.cylinder.material,
                                                  scene.soil.mean_rel_permittivity);
  const double h = vertical_offset(scene);
  const double v = soil_velocity(scene);
  for (int i = 0; i < nt; ++i) {
    double* row = out.traces.row(i).data();
    const double x = trav.midpoint(i);
    const double r = std::hypot(h, x - scene.cylinder.center_x);
    const double spreading = r > 0 ? h / r : 1.0;
    add_pulse(row, ns, dt, point_scatterer_travel_time(scene, x), f, amp * refl * spreading);
    if (scene.direct_wave) {
      add_pulse(row, ns, dt, std::abs(trav.tx_rx_offset()) / v, f,
                amp * opts.direct_wave_amplitude);
    }
  }

  if (scene.soil.heterogeneity > 0) {
    std::mt19937_64 rng(splitmix64(scene.seed));
    const int half = static_cast<int>(std::ceil(1.5 / (f * dt)));
    std::vector<double> wavelet(2 * half + 1);
    for (int k = -half; k <= half; ++k) wavelet[k + half] = ricker(k * dt, f);
    const auto across = gaussian_kernel(scene.soil.correlation_length / trav.step);
    MatrixRM clutter = correlated_field(nt, ns, across, wavelet, rng);
    out.traces += (amp * scene.soil.heterogeneity / scene.soil.mean_rel_permittivity) * clutter;
  }
  return {std::move(out), scene.cylinder.material};
}

}  // namespace gprlab::sim

#include "gprlab/sim/scene.hpp"

#include "gprlab/core/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace gprlab::sim {

double SimulationScene::time_step() const {
  return kDefaultCourant * cell_size / (kSpeedOfLight * std::numbers::sqrt2);
}

int SimulationScene::num_samples() const {
  return static_cast<int>(std::ceil(time_window / time_step() - 1e-9));
}

void SimulationScene::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorCode::invalid_argument, "scene: " + what); };
  if (!(domain_width > 0 && domain_depth > 0)) bad("domain size must be positive");
  if (!(cell_size > 0)) bad("cell_size must be positive");
  if (!(time_window > 0)) bad("time_window must be positive");
  if (waveform.kind != "ricker") bad("unsupported waveform kind '" + waveform.kind + "'");
  if (!(waveform.center_frequency > 0)) bad("waveform center frequency must be positive");
  if (!std::isfinite(waveform.amplitude)) bad("waveform amplitude must be finite");
  if (!(soil.mean_rel_permittivity >= 1.0)) bad("soil permittivity must be >= 1");
  if (!(soil.heterogeneity >= 0.0)) bad("soil heterogeneity must be >= 0");
  if (soil.mean_rel_permittivity - 3.0 * soil.heterogeneity < 1.0) {
    bad("soil mean permittivity - 3 * heterogeneity must be >= 1");
  }
  if (!(soil.correlation_length > 0)) bad("soil correlation length must be positive");
  if (!(soil.conductivity >= 0)) bad("soil conductivity must be >= 0");
  const auto& c = cylinder;
  if (!(c.radius >= kMinCylinderRadius && c.radius <= kMaxCylinderRadius)) {
    bad("cylinder radius must lie in [0.002, 0.080] m");
  }
  if (c.center_x - c.radius < 0 || c.center_x + c.radius > domain_width ||
      c.center_depth - c.radius < 0 || c.center_depth + c.radius > domain_depth) {
    bad("cylinder must lie fully inside the domain");
  }
  const auto& t = traversal;
  if (t.num_traces < 1) bad("num_traces must be >= 1");
  if (!(t.step > 0)) bad("traversal step must be positive");
  const int last = t.num_traces - 1;
  for (double x : {t.tx_position(0), t.rx_position(0), t.tx_position(last), t.rx_position(last)}) {
    if (x < 0 || x > domain_width) bad("antenna positions must stay inside the domain");
  }
  if (t.antenna_depth < 0 || t.antenna_depth >= domain_depth) {
    bad("antenna depth must lie inside the domain");
  }
}

double MaterialTable::permittivity(ClassLabel material) const {
  switch (material) {
    case ClassLabel::pvc: return pvc_permittivity;
    case ClassLabel::concrete: return concrete_permittivity;
    case ClassLabel::metallic: return std::numeric_limits<double>::infinity();
  }
  return 1.0;
}

double MaterialTable::reflectivity(ClassLabel material, double soil_permittivity) const {
  switch (material) {
    case ClassLabel::metallic: return -metallic_reflectivity;
    case ClassLabel::pvc:
    case ClassLabel::concrete: {
      const double magnitude =
          material == ClassLabel::pvc ? pvc_reflectivity : concrete_reflectivity;
      const double contrast = std::sqrt(soil_permittivity) - std::sqrt(permittivity(material));
      return contrast >= 0 ? magnitude : -magnitude;
    }
  }
  return 0.0;
}

SimulationScene reference_scene() {
  SimulationScene s;
  s.soil.peplinski_params =
      std::array<std::string, 7>{"0.5", "0.5", "2.0", "2.66", "0.001", "0.25", "my_soil"};
  return s;
}

}  // namespace gprlab::sim

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gprlab/core/bscan.hpp"

namespace gprlab::sim {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;
inline constexpr double kVacuumPermeability = 1.25663706212e-6;

/// Fraction of the 2-D Courant limit used to derive the time step.
inline constexpr double kDefaultCourant = 0.99;

inline constexpr double kMinCylinderRadius = 0.002;
inline constexpr double kMaxCylinderRadius = 0.080;

struct Waveform {
  std::string kind = "ricker";
  double center_frequency = 1.5e9;  // Hz
  double amplitude = 1.0;
  std::string id = "my_ricker";

  bool operator==(const Waveform&) const = default;
};

/// Soil background. Permittivity is mean + heterogeneity * (unit-variance
/// correlated Gaussian field). The Peplinski tuple is carried only so it can
/// be written back into gprMax configs.
struct SoilSpec {
  double mean_rel_permittivity = 5.0;
  double heterogeneity = 0.3;
  double correlation_length = 0.02;  // meters
  double conductivity = 0.001;       // S/m
  std::optional<std::array<std::string, 7>> peplinski_params;

  bool operator==(const SoilSpec&) const = default;
};

struct CylinderSpec {
  ClassLabel material = ClassLabel::metallic;
  double center_x = 0.33;      // meters from the left edge of the domain
  double center_depth = 0.33;  // meters below the top of the domain
  double radius = 0.01;        // meters

  bool operator==(const CylinderSpec&) const = default;
};

/// Common-offset traversal along the surface. Trace i has the transmitter at
/// tx_start + i * step and the receiver at rx_start + i * step, both at
/// antenna_depth below the top of the domain.
struct AntennaTraversal {
  double tx_start = 0.150;
  double rx_start = 0.1125;
  double step = 0.002;
  int num_traces = 150;
  double antenna_depth = 0.01;

  double tx_rx_offset() const { return rx_start - tx_start; }
  double tx_position(int i) const { return tx_start + i * step; }
  double rx_position(int i) const { return rx_start + i * step; }
  /// Midpoint between transmitter and receiver for trace i.
  double midpoint(int i) const { return 0.5 * (tx_position(i) + rx_position(i)); }

  bool operator==(const AntennaTraversal&) const = default;
};

struct SimulationScene {
  double domain_width = 1.0;   // meters
  double domain_depth = 1.0;   // meters
  double cell_size = 0.002;    // meters
  double time_window = 12e-9;  // seconds
  Waveform waveform;
  SoilSpec soil;
  CylinderSpec cylinder;
  AntennaTraversal traversal;
  bool direct_wave = true;
  std::uint64_t seed = 0;

  // gprMax interop carry-over: directives we do not model and free-text
  // comment lines, both reproduced verbatim on emission.
  std::vector<std::string> passthrough_directives;
  std::vector<std::string> comments;
  bool messages = true;

  /// Time step used by both simulators: kDefaultCourant of the 2-D limit.
  double time_step() const;
  /// ceil(time_window / time_step()).
  int num_samples() const;

  void validate() const;

  bool operator==(const SimulationScene&) const = default;
};

/// Electromagnetic stand-ins per material. Metallic targets are perfect
/// electric conductors in the FDTD model.
struct MaterialTable {
  double pvc_permittivity = 3.0;
  double concrete_permittivity = 6.0;
  double metallic_reflectivity = 1.0;
  double pvc_reflectivity = 0.25;
  double concrete_reflectivity = 0.5;

  double permittivity(ClassLabel material) const;
  /// Signed reflection strength against a soil of the given permittivity:
  /// metal inverts polarity, dielectrics follow the Fresnel sign.
  double reflectivity(ClassLabel material, double soil_permittivity) const;
};

/// Scene matching the single-cylinder configuration used throughout the
/// gprMax example: 1 m x 1 m, 2 mm cells, 12 ns, 1.5 GHz Ricker, 150 traces.
SimulationScene reference_scene();

}  // namespace gprlab::sim

#pragma once

#include <string>
#include <string_view>

#include "gprlab/sim/scene.hpp"

namespace gprlab::sim {

/// Shortest round-trip decimal, switched to engineering notation outside
/// [1e-3, 1e6): 1.2e-08 -> "12e-9", 1.5e9 -> "1.5e9", 0.002 -> "0.002".
std::string format_number(double value);

/// gprMax input text for the scene. gprMax's y axis points up, so depth d
/// maps to y = domain_depth - d. Fields the format cannot express (soil
/// statistics, trace count, seed) and the exact scene values are written as
/// `gprlab <key> = <value>` comment lines, which gprMax ignores.
std::string emit_gprmax_config(const SimulationScene& scene, const MaterialTable& materials = {});

/// Parses gprMax text. Unknown directives and wrong argument counts raise a
/// parse_error naming the line. `#fractal_box`, `#add_surface_roughness` and
/// `#title` are kept verbatim; a fractal box seed becomes the scene seed.
SimulationScene parse_gprmax_config(std::string_view text);

}  // namespace gprlab::sim

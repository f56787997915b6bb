#include "gprlab/sim/ricker.hpp"

#include <cmath>
#include <numbers>

namespace gprlab::sim {

double ricker(double t, double f) {
  const double a = std::numbers::pi * std::numbers::pi * f * f * t * t;
  return (1.0 - 2.0 * a) * std::exp(-a);
}

}  // namespace gprlab::sim

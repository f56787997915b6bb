#pragma once

namespace gprlab::sim {

/// Normalized Ricker wavelet centred at t = 0:
/// (1 - 2 pi^2 f^2 t^2) exp(-pi^2 f^2 t^2). Peak value 1 at t = 0.
double ricker(double t, double f);

}  // namespace gprlab::sim

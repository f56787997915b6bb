#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "gprlab/core/bscan.hpp"
#include "gprlab/sim/scene.hpp"

namespace gprlab::sim {

inline constexpr int kMaxGridCells = 1024;

/// Material grid for the 2-D TMz solver. Index (i, j) is column i (x) and
/// row j (depth); storage is row-major, j * nx + i.
struct FdtdGrid {
  int nx = 0;
  int nz = 0;
  double dx = 0.0;
  double dt = 0.0;
  std::vector<double> eps_r;
  std::vector<double> sigma;
  std::vector<std::uint8_t> pec;

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
};

struct FdtdOptions {
  MaterialTable materials;
  double courant = kDefaultCourant;  // fraction of the 2-D stability limit
  bool include_target = true;
  int threads = 1;  // traces are independent runs
};

struct GridPoint {
  int i = 0;
  int j = 0;
};

/// Uniform grid filled with `eps_r` and `sigma`, no target.
FdtdGrid uniform_grid(int nx, int nz, double dx, double eps_r, double sigma,
                      double courant = kDefaultCourant);

/// Soil field (mean + heterogeneity * correlated Gaussian, clamped at 1)
/// plus the cylinder: PEC for metal, a uniform disk otherwise.
FdtdGrid scene_grid(const SimulationScene& scene, const FdtdOptions& opts = {});

/// Runs `steps` Yee updates with a soft additive Ricker line source at
/// `source` (delayed by sqrt(2)/f so the pulse starts from rest) and returns
/// Ez recorded at each receiver after every step. First-order Mur boundaries
/// on all four sides.
std::vector<std::vector<double>> run_fdtd(const FdtdGrid& grid, GridPoint source,
                                          std::span<const GridPoint> receivers, int steps,
                                          const Waveform& waveform);

/// Source delay used by run_fdtd.
double fdtd_source_delay(const Waveform& waveform);

/// One independent run per trace, receivers recorded at the scene's time
/// step. Time zero of the returned B-scan is the start of the simulation
/// (the source peak sits at fdtd_source_delay).
std::pair<BScan, ClassLabel> fdtd_bscan(const SimulationScene& scene,
                                        const FdtdOptions& opts = {});

}  // namespace gprlab::sim

#include "gprlab/sim/fdtd.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "gprlab/core/error.hpp"
#include "gprlab/sim/random_field.hpp"
#include "gprlab/sim/ricker.hpp"

namespace gprlab::sim {

namespace {

void check_courant(double courant) {
  if (!(courant > 0.0 && courant <= 1.0)) {
    fail(ErrorCode::courant_violation,
         "fdtd: time step exceeds the stability limit dx/(c*sqrt(2)) (courant factor " +
             std::to_string(courant) + ")");
  }
}

void check_size(int nx, int nz) {
  if (nx < 3 || nz < 3 || nx > kMaxGridCells || nz > kMaxGridCells) {
    fail(ErrorCode::invalid_argument, "fdtd: grid must be between 3x3 and 1024x1024 cells, got " +
                                          std::to_string(nx) + "x" + std::to_string(nz));
  }
}

double stable_dt(double dx, double courant) {
  return courant * dx / (kSpeedOfLight * std::numbers::sqrt2);
}

}  // namespace

double fdtd_source_delay(const Waveform& waveform) {
  return std::numbers::sqrt2 / waveform.center_frequency;
}

FdtdGrid uniform_grid(int nx, int nz, double dx, double eps_r, double sigma, double courant) {
  check_courant(courant);
  check_size(nx, nz);
  FdtdGrid g;
  g.nx = nx;
  g.nz = nz;
  g.dx = dx;
  g.dt = stable_dt(dx, courant);
  const std::size_t n = static_cast<std::size_t>(nx) * nz;
  g.eps_r.assign(n, eps_r);
  g.sigma.assign(n, sigma);
  g.pec.assign(n, 0);
  return g;
}

FdtdGrid scene_grid(const SimulationScene& scene, const FdtdOptions& opts) {
  scene.validate();
  const int nx = static_cast<int>(std::lround(scene.domain_width / scene.cell_size));
  const int nz = static_cast<int>(std::lround(scene.domain_depth / scene.cell_size));
  FdtdGrid g = uniform_grid(nx, nz, scene.cell_size, scene.soil.mean_rel_permittivity,
                            scene.soil.conductivity, opts.courant);
  const auto& soil = scene.soil;
  if (soil.heterogeneity > 0) {
    std::mt19937_64 rng(splitmix64(scene.seed));
    const auto k = gaussian_kernel(soil.correlation_length / scene.cell_size);
    MatrixRM field = correlated_field(nz, nx, k, k, rng);
    for (int j = 0; j < nz; ++j)
      for (int i = 0; i < nx; ++i)
        g.eps_r[g.index(i, j)] =
            std::max(1.0, soil.mean_rel_permittivity + soil.heterogeneity * field(j, i));
  }
  if (opts.include_target) {
    const auto& cyl = scene.cylinder;
    const double eps = opts.materials.permittivity(cyl.material);
    for (int j = 0; j < nz; ++j) {
      for (int i = 0; i < nx; ++i) {
        const double x = (i + 0.5) * g.dx - cyl.center_x;
        const double z = (j + 0.5) * g.dx - cyl.center_depth;
        if (x * x + z * z > cyl.radius * cyl.radius) continue;
        if (cyl.material == ClassLabel::metallic) {
          g.pec[g.index(i, j)] = 1;
        } else {
          g.eps_r[g.index(i, j)] = eps;
          g.sigma[g.index(i, j)] = 0.0;
        }
      }
    }
  }
  return g;
}

std::vector<std::vector<double>> run_fdtd(const FdtdGrid& grid, GridPoint source,
                                          std::span<const GridPoint> receivers, int steps,
                                          const Waveform& waveform) {
  check_size(grid.nx, grid.nz);
  if (grid.dt > grid.dx / (kSpeedOfLight * std::numbers::sqrt2) * (1 + 1e-12)) {
    fail(ErrorCode::courant_violation, "fdtd: grid time step violates the Courant limit");
  }
  const int nx = grid.nx;
  const int nz = grid.nz;
  auto inside = [&](GridPoint p) { return p.i >= 0 && p.i < nx && p.j >= 0 && p.j < nz; };
  require(inside(source), ErrorCode::invalid_argument, "fdtd: source outside the grid");
  for (const auto& r : receivers)
    require(inside(r), ErrorCode::invalid_argument, "fdtd: receiver outside the grid");

  const std::size_t n = static_cast<std::size_t>(nx) * nz;
  const double dt = grid.dt;
  const double dx = grid.dx;
  std::vector<double> ez(n, 0.0), hx(n, 0.0), hy(n, 0.0);
  std::vector<double> ca(n), cb(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double eps = grid.eps_r[k] * kVacuumPermittivity;
    const double loss = grid.sigma[k] * dt / (2.0 * eps);
    ca[k] = grid.pec[k] ? 0.0 : (1.0 - loss) / (1.0 + loss);
    cb[k] = grid.pec[k] ? 0.0 : (dt / (eps * dx)) / (1.0 + loss);
  }
  const double ch = dt / (kVacuumPermeability * dx);

  // Mur coefficients per boundary cell, using the local wave speed.
  auto mur = [&](std::size_t k) {
    const double v = kSpeedOfLight / std::sqrt(grid.eps_r[k]);
    return (v * dt - dx) / (v * dt + dx);
  };
  std::vector<double> left(nz), right(nz), top(nx), bottom(nx);
  for (int j = 0; j < nz; ++j) {
    left[j] = mur(grid.index(0, j));
    right[j] = mur(grid.index(nx - 1, j));
  }
  for (int i = 0; i < nx; ++i) {
    top[i] = mur(grid.index(i, 0));
    bottom[i] = mur(grid.index(i, nz - 1));
  }
  std::vector<double> old_left(nz * 2), old_right(nz * 2), old_top(nx * 2), old_bottom(nx * 2);

  const double delay = fdtd_source_delay(waveform);
  const std::size_t src = grid.index(source.i, source.j);
  std::vector<std::vector<double>> out(receivers.size(), std::vector<double>(steps, 0.0));

  for (int step = 0; step < steps; ++step) {
    // Magnetic field: Hx lives between rows j and j+1, Hy between columns.
    for (int j = 0; j + 1 < nz; ++j) {
      const double* e0 = ez.data() + static_cast<std::size_t>(j) * nx;
      const double* e1 = e0 + nx;
      double* h = hx.data() + static_cast<std::size_t>(j) * nx;
      for (int i = 0; i < nx; ++i) h[i] -= ch * (e1[i] - e0[i]);
    }
    for (int j = 0; j < nz; ++j) {
      const double* e = ez.data() + static_cast<std::size_t>(j) * nx;
      double* h = hy.data() + static_cast<std::size_t>(j) * nx;
      for (int i = 0; i + 1 < nx; ++i) h[i] += ch * (e[i + 1] - e[i]);
    }

    // Remember the values next to each edge for the Mur update.
    for (int j = 0; j < nz; ++j) {
      old_left[2 * j] = ez[grid.index(0, j)];
      old_left[2 * j + 1] = ez[grid.index(1, j)];
      old_right[2 * j] = ez[grid.index(nx - 1, j)];
      old_right[2 * j + 1] = ez[grid.index(nx - 2, j)];
    }
    for (int i = 0; i < nx; ++i) {
      old_top[2 * i] = ez[grid.index(i, 0)];
      old_top[2 * i + 1] = ez[grid.index(i, 1)];
      old_bottom[2 * i] = ez[grid.index(i, nz - 1)];
      old_bottom[2 * i + 1] = ez[grid.index(i, nz - 2)];
    }

    for (int j = 1; j + 1 < nz; ++j) {
      const std::size_t row = static_cast<std::size_t>(j) * nx;
      for (int i = 1; i + 1 < nx; ++i) {
        const std::size_t k = row + i;
        const double curl = (hy[k] - hy[k - 1]) - (hx[k] - hx[k - nx]);
        ez[k] = ca[k] * ez[k] + cb[k] * curl;
      }
    }

    const double t = (step + 1) * dt;
    ez[src] += waveform.amplitude * ricker(t - delay, waveform.center_frequency);

    for (int j = 0; j < nz; ++j) {
      ez[grid.index(0, j)] = old_left[2 * j + 1] + left[j] * (ez[grid.index(1, j)] - old_left[2 * j]);
      ez[grid.index(nx - 1, j)] =
          old_right[2 * j + 1] + right[j] * (ez[grid.index(nx - 2, j)] - old_right[2 * j]);
    }
    for (int i = 0; i < nx; ++i) {
      ez[grid.index(i, 0)] = old_top[2 * i + 1] + top[i] * (ez[grid.index(i, 1)] - old_top[2 * i]);
      ez[grid.index(i, nz - 1)] =
          old_bottom[2 * i + 1] + bottom[i] * (ez[grid.index(i, nz - 2)] - old_bottom[2 * i]);
    }
    for (std::size_t k = 0; k < n; ++k)
      if (grid.pec[k]) ez[k] = 0.0;

    for (std::size_t r = 0; r < receivers.size(); ++r) {
      const double v = ez[grid.index(receivers[r].i, receivers[r].j)];
      if (!std::isfinite(v)) {
        fail(ErrorCode::numerical_abort, "fdtd: field diverged at step " + std::to_string(step));
      }
      out[r][step] = v;
    }
  }
  return out;
}

std::pair<BScan, ClassLabel> fdtd_bscan(const SimulationScene& scene, const FdtdOptions& opts) {
  check_courant(opts.courant);
  const FdtdGrid grid = scene_grid(scene, opts);
  const auto& trav = scene.traversal;
  const int steps = static_cast<int>(std::ceil(scene.time_window / grid.dt - 1e-9));
  auto cell = [&](double x) {
    return std::clamp(static_cast<int>(std::floor(x / grid.dx)), 1, grid.nx - 2);
  };
  const int row = std::clamp(static_cast<int>(std::floor(trav.antenna_depth / grid.dx)), 1,
                             grid.nz - 2);

  BScan out;
  out.dt = grid.dt;
  out.trace_spacing = trav.step;
  out.traces = MatrixRM::Zero(trav.num_traces, steps);

  auto run_trace = [&](int i) {
    const GridPoint rx{cell(trav.rx_position(i)), row};
    const auto rec = run_fdtd(grid, {cell(trav.tx_position(i)), row}, std::span(&rx, 1), steps,
                              scene.waveform);
    for (int k = 0; k < steps; ++k) out.traces(i, k) = rec[0][k];
  };

  const int threads = std::max(1, std::min(opts.threads, trav.num_traces));
  if (threads == 1) {
    for (int i = 0; i < trav.num_traces; ++i) run_trace(i);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (int i = t; i < trav.num_traces; i += threads) run_trace(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return {std::move(out), scene.cylinder.material};
}

}  // namespace gprlab::sim

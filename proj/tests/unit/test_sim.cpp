#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "gprlab/core/error.hpp"
#include "gprlab/sim/analytic.hpp"
#include "gprlab/sim/fdtd.hpp"
#include "gprlab/sim/gprmax.hpp"
#include "gprlab/sim/random_field.hpp"
#include "gprlab/sim/ricker.hpp"
#include "gprlab/sim/sampling.hpp"

using namespace gprlab;
using namespace gprlab::sim;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::invalid_argument;
}

SimulationScene quiet_scene() {
  SimulationScene s;
  s.soil.heterogeneity = 0.0;
  s.direct_wave = false;
  return s;
}

int argmax_abs(const MatrixRM& m, int row) {
  int best = 0;
  for (int k = 1; k < m.cols(); ++k)
    if (std::abs(m(row, k)) > std::abs(m(row, best))) best = k;
  return best;
}

constexpr const char* kExampleConfig = R"(#soil_peplinski: 0.5 0.5 2.0 2.66 0.001 0.25 my_soil
-----
#domain: 1.0 1.0 0.1
#dx_dy_dz: 0.002 0.002 0.002
#time_window: 12e-9
-----
#fractal_box: 0 0 0 1 0.75 0.1 1.5 1 1 1 50 my_soil my_soil_box 42 n
#add_surface_roughness: 0 0 0.1 0.1 0.1 0.1 1.5 1 1 0.065 0.080 my_soil_box
#cylinder: 0.33 0.33 0 0.33 0.33 0.002 0.01 pec y
-----
-----
#rx: 0.1125 0.1525 0
#src_steps: 0.002 0.0 0
#rx_steps: 0.002 0.0 0
-----
#waveform: ricker 1 1.5e9 my_ricker
#hertzian_dipole: z 0.150 0.170 0 my_ricker
#messages: y
)";

}  // namespace

TEST(Ricker, ClosedFormPoints) {
  const double f = 1.5e9;
  EXPECT_DOUBLE_EQ(ricker(0.0, f), 1.0);
  const double zero = 1.0 / (std::numbers::pi * f * std::numbers::sqrt2);
  EXPECT_NEAR(ricker(zero, f), 0.0, 1e-12);
  EXPECT_NEAR(ricker(-zero, f), 0.0, 1e-12);
  const double trough = std::sqrt(1.5) / (std::numbers::pi * f);
  EXPECT_NEAR(ricker(trough, f), -2.0 * std::exp(-1.5), 1e-12);
  for (double t : {1e-11, 3e-10, 7e-10}) EXPECT_DOUBLE_EQ(ricker(t, f), ricker(-t, f));
}

TEST(Scene, TimeStepAndSamples) {
  const SimulationScene s = reference_scene();
  const double dt = 0.99 * 0.002 / (kSpeedOfLight * std::numbers::sqrt2);
  EXPECT_NEAR(s.time_step(), dt, 1e-24);
  EXPECT_EQ(s.num_samples(), static_cast<int>(std::ceil(12e-9 / dt)));
  EXPECT_NO_THROW(s.validate());
}

TEST(Scene, ValidationRejectsBadGeometry) {
  SimulationScene s;
  s.cylinder.radius = 0.1;
  EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::invalid_argument);
  s = SimulationScene{};
  s.cylinder.center_depth = 0.995;
  EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::invalid_argument);
  s = SimulationScene{};
  s.soil.mean_rel_permittivity = 1.5;
  s.soil.heterogeneity = 0.3;
  EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::invalid_argument);
}

TEST(Analytic, TravelTimeOracle) {
  SimulationScene s = quiet_scene();
  s.soil.mean_rel_permittivity = 6.0;
  s.traversal.antenna_depth = 0.01;
  s.cylinder.center_depth = 0.34;
  s.cylinder.center_x = 0.33;
  const double expected = 2.0 * std::sqrt(0.33 * 0.33 + 0.1 * 0.1) * std::sqrt(6.0) / kSpeedOfLight;
  EXPECT_NEAR(point_scatterer_travel_time(s, 0.43), expected, 1e-20);
  EXPECT_NEAR(point_scatterer_travel_time(s, 0.23), expected, 1e-20);
}

TEST(Analytic, ApexAtMinimumTravelTime) {
  SimulationScene s = quiet_scene();
  s.cylinder.material = ClassLabel::metallic;
  s.cylinder.center_x = s.traversal.midpoint(100);
  s.cylinder.center_depth = 0.2;
  const auto [b, label] = analytic_bscan(s);
  EXPECT_EQ(label, ClassLabel::metallic);
  const double v = kSpeedOfLight / std::sqrt(s.soil.mean_rel_permittivity);
  const double h = 0.2 - s.traversal.antenna_depth;
  const int apex = static_cast<int>(std::lround(2.0 * h / (v * b.dt)));
  EXPECT_NEAR(argmax_abs(b.traces, 100), apex, 1);
  for (int i = 0; i < b.num_traces(); ++i) {
    EXPECT_GE(argmax_abs(b.traces, i), argmax_abs(b.traces, 100) - 1);
  }
  // Metal inverts polarity.
  EXPECT_LT(b.traces(100, argmax_abs(b.traces, 100)), 0.0);
}

TEST(Analytic, DeterministicPerSeed) {
  SimulationScene s;
  s.seed = 17;
  const auto a = analytic_bscan(s).first;
  const auto b = analytic_bscan(s).first;
  EXPECT_TRUE(a.traces == b.traces);
  s.seed = 18;
  const auto c = analytic_bscan(s).first;
  EXPECT_FALSE(a.traces == c.traces);
}

TEST(Analytic, TargetOutsideWindowIsInvisible) {
  SimulationScene s = quiet_scene();
  s.time_window = 1e-9;
  s.cylinder.center_depth = 0.6;
  EXPECT_EQ(code_of([&] { analytic_bscan(s); }), ErrorCode::target_invisible);
}

TEST(Fdtd, CourantViolation) {
  EXPECT_EQ(code_of([] { uniform_grid(10, 10, 0.01, 1.0, 0.0, 1.2); }),
            ErrorCode::courant_violation);
  FdtdGrid g = uniform_grid(10, 10, 0.01, 1.0, 0.0);
  g.dt *= 1.5;
  const GridPoint rx{5, 5};
  EXPECT_EQ(code_of([&] { run_fdtd(g, {2, 2}, std::span(&rx, 1), 5, Waveform{}); }),
            ErrorCode::courant_violation);
  FdtdOptions opts;
  opts.courant = 1.01;
  EXPECT_EQ(code_of([&] { fdtd_bscan(SimulationScene{}, opts); }), ErrorCode::courant_violation);
}

TEST(Fdtd, GridSizeLimits) {
  EXPECT_THROW(uniform_grid(2, 10, 0.01, 1.0, 0.0), Error);
  EXPECT_THROW(uniform_grid(10, kMaxGridCells + 1, 0.01, 1.0, 0.0), Error);
}

TEST(Fdtd, ZeroAmplitudeGivesZeroField) {
  const FdtdGrid g = uniform_grid(40, 40, 0.005, 4.0, 0.0);
  Waveform w;
  w.amplitude = 0.0;
  const std::vector<GridPoint> rx{{10, 20}, {30, 20}};
  const auto rec = run_fdtd(g, {20, 20}, rx, 200, w);
  for (const auto& r : rec)
    for (double v : r) EXPECT_EQ(v, 0.0);
}

TEST(Fdtd, FreeSpacePulseSpeed) {
  const double dx = 0.002;
  const FdtdGrid g = uniform_grid(220, 220, dx, 1.0, 0.0);
  Waveform w;
  const std::vector<GridPoint> rx{{140, 110}, {180, 110}};
  const auto rec = run_fdtd(g, {110, 110}, rx, 500, w);
  auto peak = [](const std::vector<double>& r) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < r.size(); ++k)
      if (std::abs(r[k]) > std::abs(r[best])) best = k;
    return static_cast<double>(best);
  };
  const double speed = 40 * dx / ((peak(rec[1]) - peak(rec[0])) * g.dt);
  EXPECT_NEAR(speed / kSpeedOfLight, 1.0, 0.03);
}

TEST(Fdtd, SceneGridMarksMetalAsPec) {
  SimulationScene s;
  s.domain_width = 0.2;
  s.domain_depth = 0.2;
  s.cell_size = 0.004;
  s.cylinder = {ClassLabel::metallic, 0.1, 0.1, 0.02};
  s.traversal = {0.05, 0.06, 0.004, 10, 0.01};
  const FdtdGrid g = scene_grid(s);
  EXPECT_TRUE(g.pec[g.index(25, 25)]);
  EXPECT_FALSE(g.pec[g.index(2, 2)]);
  s.cylinder.material = ClassLabel::pvc;
  const FdtdGrid p = scene_grid(s);
  EXPECT_FALSE(p.pec[p.index(25, 25)]);
  EXPECT_DOUBLE_EQ(p.eps_r[p.index(25, 25)], MaterialTable{}.pvc_permittivity);
}

TEST(GprMax, FormatNumber) {
  EXPECT_EQ(format_number(1.2e-08), "12e-9");
  EXPECT_EQ(format_number(1.5e9), "1.5e9");
  EXPECT_EQ(format_number(0.002), "0.002");
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(1.0), "1");
}

TEST(GprMax, ParsesExampleConfig) {
  const SimulationScene s = parse_gprmax_config(kExampleConfig);
  EXPECT_DOUBLE_EQ(s.domain_width, 1.0);
  EXPECT_DOUBLE_EQ(s.cell_size, 0.002);
  EXPECT_DOUBLE_EQ(s.time_window, 12e-9);
  EXPECT_EQ(s.cylinder.material, ClassLabel::metallic);
  EXPECT_DOUBLE_EQ(s.cylinder.center_x, 0.33);
  EXPECT_NEAR(s.cylinder.center_depth, 0.67, 1e-12);
  EXPECT_DOUBLE_EQ(s.cylinder.radius, 0.01);
  EXPECT_DOUBLE_EQ(s.traversal.tx_start, 0.150);
  EXPECT_DOUBLE_EQ(s.traversal.rx_start, 0.1125);
  EXPECT_DOUBLE_EQ(s.traversal.step, 0.002);
  EXPECT_NEAR(s.traversal.antenna_depth, 0.83, 1e-12);
  EXPECT_DOUBLE_EQ(s.waveform.center_frequency, 1.5e9);
  EXPECT_EQ(s.waveform.id, "my_ricker");
  EXPECT_EQ(s.seed, 42u);
  ASSERT_TRUE(s.soil.peplinski_params.has_value());
  EXPECT_EQ((*s.soil.peplinski_params)[6], "my_soil");
  ASSERT_EQ(s.passthrough_directives.size(), 2u);
  EXPECT_TRUE(s.passthrough_directives[0].starts_with("#fractal_box:"));
}

TEST(GprMax, RoundTripIsExact) {
  SceneRanges ranges;
  for (const auto& s : sample_scenes(ranges, 12, 100)) {
    const std::string text = emit_gprmax_config(s);
    EXPECT_EQ(parse_gprmax_config(text), s);
  }
  const SimulationScene d = reference_scene();
  EXPECT_EQ(parse_gprmax_config(emit_gprmax_config(d)), d);
}

TEST(GprMax, EmittedDirectives) {
  const std::string text = emit_gprmax_config(reference_scene());
  EXPECT_NE(text.find("#waveform: ricker 1 1.5e9 my_ricker"), std::string::npos);
  EXPECT_NE(text.find("#time_window: 12e-9"), std::string::npos);
  EXPECT_NE(text.find("#dx_dy_dz: 0.002 0.002 0.002"), std::string::npos);
  EXPECT_NE(text.find(" pec y"), std::string::npos);
}

TEST(GprMax, ParseErrorsNameTheLine) {
  const std::string bad = std::string(kExampleConfig) + "#bogus: 1 2\n";
  try {
    parse_gprmax_config(bad);
    FAIL() << "expected parse_error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::parse_error);
    EXPECT_NE(std::string(e.what()).find("line 19"), std::string::npos) << e.what();
  }
  EXPECT_EQ(code_of([] { parse_gprmax_config("#domain: 1 1\n"); }), ErrorCode::parse_error);
  EXPECT_EQ(code_of([] { parse_gprmax_config("#domain: 1 1 0.1\n"); }), ErrorCode::parse_error);
  EXPECT_EQ(code_of([] { parse_gprmax_config("#domain: 1 x 0.1\n"); }), ErrorCode::parse_error);
}

TEST(Sampling, DeterministicAndRegenerable) {
  SceneRanges r;
  const auto a = sample_scenes(r, 10, 5);
  const auto b = sample_scenes(r, 10, 5);
  EXPECT_EQ(a, b);
  EXPECT_EQ(sample_scenes(r, 1, 9)[0], a[4]);
  EXPECT_NE(a[0], a[3]);
}

TEST(Sampling, BalancedAndInsideRanges) {
  SceneRanges r;
  const auto scenes = sample_scenes(r, 30, 0);
  int counts[3] = {0, 0, 0};
  for (const auto& s : scenes) {
    ++counts[class_id(s.cylinder.material)];
    EXPECT_GE(s.cylinder.radius, r.radius.lo);
    EXPECT_LE(s.cylinder.radius, r.radius.hi);
    EXPECT_GE(s.cylinder.center_depth, r.center_depth.lo);
    EXPECT_LE(s.cylinder.center_depth, r.center_depth.hi);
    EXPECT_GE(s.soil.mean_rel_permittivity, r.soil_permittivity.lo);
    EXPECT_LE(s.soil.mean_rel_permittivity, r.soil_permittivity.hi);
    EXPECT_NO_THROW(s.validate());
  }
  EXPECT_EQ(counts[0], 10);
  EXPECT_EQ(counts[1], 10);
  EXPECT_EQ(counts[2], 10);
  EXPECT_TRUE(sample_scenes(r, 0, 0).empty());
}

TEST(Sampling, InfeasibleRanges) {
  SceneRanges r;
  r.center_depth = {0.9, 0.99};
  EXPECT_EQ(code_of([&] { sample_scenes(r, 1, 0); }), ErrorCode::infeasible);
  r = SceneRanges{};
  r.radius = {0.001, 0.01};
  EXPECT_EQ(code_of([&] { sample_scenes(r, 1, 0); }), ErrorCode::infeasible);
  r = SceneRanges{};
  r.soil_permittivity = {1.2, 2.0};
  EXPECT_EQ(code_of([&] { sample_scenes(r, 1, 0); }), ErrorCode::infeasible);
  r = SceneRanges{};
  r.materials.clear();
  EXPECT_EQ(code_of([&] { sample_scenes(r, 1, 0); }), ErrorCode::infeasible);
}

TEST(RandomField, UnitVarianceAndKernel) {
  const auto k = gaussian_kernel(2.0);
  double sum = 0;
  for (double v : k) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_EQ(gaussian_kernel(0.0), std::vector<double>{1.0});
  std::mt19937_64 rng(3);
  const MatrixRM f = correlated_field(64, 64, k, k, rng);
  const double mean = f.mean();
  const double var = (f.array() - mean).square().mean();
  EXPECT_NEAR(var, 1.0, 0.35);
  EXPECT_NE(splitmix64(1), splitmix64(2));
}

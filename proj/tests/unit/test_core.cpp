#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>

#include "gprlab/core/bscan.hpp"
#include "gprlab/core/dataset.hpp"
#include "gprlab/core/error.hpp"
#include "gprlab/core/hash.hpp"
#include "gprlab/core/resample.hpp"

using namespace gprlab;
namespace fs = std::filesystem;

namespace {

BScan make_bscan(int traces, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  BScan b;
  b.traces = MatrixRM(traces, samples);
  for (int i = 0; i < traces; ++i)
    for (int k = 0; k < samples; ++k) b.traces(i, k) = nd(rng);
  b.dt = 1e-11;
  b.trace_spacing = 0.002;
  return b;
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gprlab_core_" + name);
  fs::remove_all(p);
  return p;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST(Preprocess, ConstantWithDewowIsZero) {
  BScan b;
  b.traces = MatrixRM::Constant(4, 10, 3.5);
  b.dt = 1e-11;
  PreprocessOptions o;
  o.dewow = true;
  EXPECT_EQ(preprocess_bscan(b, o).traces.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Preprocess, IdenticalTracesBackgroundRemovalIsZero) {
  BScan b;
  b.traces = MatrixRM(5, 8);
  for (int i = 0; i < 5; ++i)
    for (int k = 0; k < 8; ++k) b.traces(i, k) = std::sin(0.7 * k);
  b.dt = 1e-11;
  PreprocessOptions o;
  o.background_removal = true;
  EXPECT_LT(preprocess_bscan(b, o).traces.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Preprocess, TwoTraceDewowToy) {
  BScan b;
  b.traces = MatrixRM(2, 2);
  b.traces << 1, 3, 3, 5;
  b.dt = 1e-11;
  PreprocessOptions o;
  o.dewow = true;
  MatrixRM want(2, 2);
  want << -1, 1, -1, 1;
  EXPECT_EQ(preprocess_bscan(b, o).traces, want);
}

TEST(Preprocess, AllDisabledIsIdentity) {
  const BScan b = make_bscan(6, 20, 1);
  EXPECT_EQ(preprocess_bscan(b, {}).traces, b.traces);
}

TEST(Preprocess, GainRampIsLinearInTime) {
  BScan b;
  b.traces = MatrixRM::Ones(1, 4);
  b.dt = 0.5e-9;
  PreprocessOptions o;
  o.gain = 2.0;
  const BScan g = preprocess_bscan(b, o);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(g.traces(0, k), 1.0 + 2.0 * 0.5 * k, 1e-12);
}

TEST(Preprocess, NonFiniteRejected) {
  BScan b = make_bscan(2, 4, 2);
  b.traces(1, 2) = std::nan("");
  EXPECT_EQ(code_of([&] { preprocess_bscan(b, {}); }), ErrorCode::non_finite);
}

TEST(Resize, SimulatedShapeToCanvas) {
  const RadarImage img = resize_to_canvas(make_bscan(150, 620, 3));
  EXPECT_EQ(img.rows(), 256);
  EXPECT_EQ(img.cols(), 256);
  EXPECT_FLOAT_EQ(img.pixels.minCoeff(), -1.0f);
  EXPECT_FLOAT_EQ(img.pixels.maxCoeff(), 1.0f);
  EXPECT_EQ(img.domain, DomainTag::time);
}

TEST(Resize, ConstantInputIsAllZero) {
  BScan b;
  b.traces = MatrixRM::Constant(150, 620, 7.0);
  b.dt = 1e-11;
  const RadarImage img = resize_to_canvas(b);
  EXPECT_EQ(img.pixels.cwiseAbs().maxCoeff(), 0.0f);
}

TEST(Resize, Deterministic) {
  const BScan b = make_bscan(40, 90, 4);
  EXPECT_EQ(resize_to_canvas(b).pixels, resize_to_canvas(b).pixels);
}

TEST(Resize, SingleSampleRejected) {
  BScan b;
  b.traces = MatrixRM::Ones(10, 1);
  b.dt = 1e-11;
  EXPECT_THROW(resize_to_canvas(b), Error);
}

TEST(Resize, RampStaysMonotoneUnderBothKernels) {
  const int in = 37, out = 256;
  std::vector<double> ramp(in);
  for (int i = 0; i < in; ++i) ramp[i] = i;
  for (const MatrixRM& op : {resampling_matrix(in, out), bilinear_matrix(in, out)}) {
    double prev = -1e9;
    for (int r = 0; r < out; ++r) {
      double v = 0;
      for (int c = 0; c < in; ++c) v += op(r, c) * ramp[c];
      EXPECT_GE(v, prev - 1e-9) << "row " << r;
      prev = v;
    }
  }
}

TEST(Resize, OperatorRowsSumToOne) {
  for (auto [in, out] : {std::pair{150, 256}, std::pair{620, 256}, std::pair{64, 64}}) {
    const MatrixRM m = resampling_matrix(in, out);
    for (int r = 0; r < out; ++r) EXPECT_NEAR(m.row(r).sum(), 1.0, 1e-12);
  }
}

TEST(Resize, HammingSincKernel) {
  EXPECT_DOUBLE_EQ(hamming_sinc(0.0), 1.0);
  EXPECT_NEAR(hamming_sinc(1.0), 0.0, 1e-15);
  EXPECT_NEAR(hamming_sinc(2.0), 0.0, 1e-15);
  EXPECT_EQ(hamming_sinc(kHammingSupport + 0.1), 0.0);
  const double x = 0.5;
  const double want = std::sin(M_PI * x) / (M_PI * x) *
                      (0.54 + 0.46 * std::cos(M_PI * x / kHammingSupport));
  EXPECT_NEAR(hamming_sinc(x), want, 1e-15);
}

TEST(Resize, PixelRangeProperty) {
  for (std::uint64_t s = 10; s < 30; ++s) {
    const RadarImage img = resize_to_canvas(make_bscan(3 + s, 5 + 7 * s, s), 64);
    EXPECT_GE(img.pixels.minCoeff(), -1.0f);
    EXPECT_LE(img.pixels.maxCoeff(), 1.0f);
  }
}

TEST(Labels, AlphabeticalBijection) {
  EXPECT_EQ(class_id(ClassLabel::concrete), 0);
  EXPECT_EQ(class_id(ClassLabel::metallic), 1);
  EXPECT_EQ(class_id(ClassLabel::pvc), 2);
  for (int i = 0; i < kNumClasses; ++i) {
    EXPECT_EQ(class_id(class_from_name(class_name(class_from_id(i)))), i);
  }
  EXPECT_THROW(class_from_id(3), Error);
  EXPECT_THROW(class_from_name("wood"), Error);
}

TEST(Dataset, RoundTripIsBitExact) {
  const fs::path dir = temp_dir("roundtrip");
  std::vector<LabeledImage> items;
  for (int i = 0; i < 10; ++i) {
    LabeledImage li;
    li.image = resize_to_canvas(make_bscan(20, 30, 100 + i), 32);
    li.image.domain = i % 2 ? DomainTag::frequency : DomainTag::time;
    if (i != 3) li.label = class_from_id(i % 3);
    if (i % 4 == 0) li.scene_seed = 1000 + i;
    items.push_back(li);
  }
  const DatasetManifest written = save_dataset(items, dir);
  auto [loaded, manifest] = load_dataset(dir);
  ASSERT_EQ(loaded.size(), items.size());
  EXPECT_EQ(manifest.items.size(), written.items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    EXPECT_EQ(loaded[i].image.pixels, items[i].image.pixels);
    EXPECT_EQ(loaded[i].image.domain, items[i].image.domain);
    EXPECT_EQ(loaded[i].label, items[i].label);
    EXPECT_EQ(loaded[i].scene_seed, items[i].scene_seed);
  }
  EXPECT_EQ(manifest.class_map.at(0), "concrete");
  EXPECT_EQ(manifest.class_map.at(2), "pvc");
  fs::remove_all(dir);
}

TEST(Dataset, SampleFilesAreHeaderlessFloat32) {
  const fs::path dir = temp_dir("layout");
  LabeledImage li;
  li.image = resize_to_canvas(make_bscan(10, 10, 7), 16);
  li.label = ClassLabel::pvc;
  const auto m = save_dataset(std::vector<LabeledImage>{li}, dir);
  EXPECT_EQ(fs::file_size(dir / m.items[0].sample_path), 16u * 16u * 4u);
  EXPECT_EQ(m.items[0].rows, 16);
  fs::remove_all(dir);
}

TEST(Dataset, EmptyListGivesValidManifest) {
  const fs::path dir = temp_dir("empty");
  save_dataset(std::vector<LabeledImage>{}, dir);
  auto [loaded, manifest] = load_dataset(dir);
  EXPECT_TRUE(loaded.empty());
  EXPECT_EQ(manifest.version, kDatasetVersion);
  fs::remove_all(dir);
}

TEST(Dataset, DistinctErrors) {
  const fs::path dir = temp_dir("errors");
  LabeledImage li;
  li.image = resize_to_canvas(make_bscan(10, 10, 8), 16);
  const auto m = save_dataset(std::vector<LabeledImage>{li, li}, dir);

  fs::remove(dir / m.items[1].sample_path);
  EXPECT_EQ(code_of([&] { load_dataset(dir); }), ErrorCode::missing_sample);

  save_dataset(std::vector<LabeledImage>{li}, dir);
  {
    std::ofstream f(dir / m.items[0].sample_path, std::ios::binary | std::ios::trunc);
    f << "abcd";
  }
  EXPECT_EQ(code_of([&] { load_dataset(dir); }), ErrorCode::shape_mismatch);

  DatasetManifest bad = m;
  bad.version = 99;
  bad.items.resize(1);
  {
    std::ofstream f(dir / "manifest.json", std::ios::trunc);
    f << manifest_to_json(bad);
  }
  EXPECT_EQ(code_of([&] { load_dataset(dir); }), ErrorCode::unknown_version);
  fs::remove_all(dir);
}

TEST(Hash, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex(std::string_view("abc")),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Hash, ImageHashTracksPixels) {
  RadarImage a = resize_to_canvas(make_bscan(10, 10, 9), 16);
  RadarImage b = a;
  EXPECT_EQ(image_hash(a), image_hash(b));
  b.pixels(3, 4) = std::nextafter(b.pixels(3, 4), 2.0f);
  EXPECT_NE(image_hash(a), image_hash(b));
}

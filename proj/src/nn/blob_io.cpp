#include "gprlab/nn/blob_io.hpp"

#include "gprlab/core/dataset.hpp"
#include "gprlab/core/error.hpp"

namespace gprlab::nn {

template <typename T>
void save_params(const std::filesystem::path& dir, const std::vector<Param<T>*>& params) {
  std::filesystem::create_directories(dir);
  std::vector<float> buf;
  for (const auto* p : params) {
    buf.assign(p->value.begin(), p->value.end());
    write_f32_file(dir / (p->name + ".bin"), buf);
  }
}

template <typename T>
void load_params(const std::filesystem::path& dir, const std::vector<Param<T>*>& params) {
  for (auto* p : params) {
    const auto path = dir / (p->name + ".bin");
    if (!std::filesystem::exists(path)) {
      fail(ErrorCode::missing_sample, "checkpoint tensor missing: " + path.string());
    }
    const auto values = read_f32_file(path, p->size());
    for (std::size_t i = 0; i < values.size(); ++i) p->value[i] = static_cast<T>(values[i]);
  }
}

template void save_params<float>(const std::filesystem::path&, const std::vector<Param<float>*>&);
template void save_params<double>(const std::filesystem::path&, const std::vector<Param<double>*>&);
template void load_params<float>(const std::filesystem::path&, const std::vector<Param<float>*>&);
template void load_params<double>(const std::filesystem::path&, const std::vector<Param<double>*>&);

}  // namespace gprlab::nn

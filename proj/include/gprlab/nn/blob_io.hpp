#pragma once

#include <filesystem>
#include <vector>

#include "gprlab/nn/tensor.hpp"

namespace gprlab::nn {

/// One headerless float32 little-endian file per tensor, named
/// "<param name>.bin" inside `dir`.
template <typename T>
void save_params(const std::filesystem::path& dir, const std::vector<Param<T>*>& params);

/// Loads every listed tensor; a missing file or wrong size is an error.
template <typename T>
void load_params(const std::filesystem::path& dir, const std::vector<Param<T>*>& params);

}  // namespace gprlab::nn

#include "gprlab/nn/conv.hpp"

#include <algorithm>

namespace gprlab::nn {

ConvGeometry same_geometry(int channels, int height, int width, int kernel, int stride) {
  ConvGeometry g;
  g.channels = channels;
  g.height = height;
  g.width = width;
  g.kernel = kernel;
  g.stride = stride;
  g.out_h = (height + stride - 1) / stride;
  g.out_w = (width + stride - 1) / stride;
  const int pad_h = std::max((g.out_h - 1) * stride + kernel - height, 0);
  const int pad_w = std::max((g.out_w - 1) * stride + kernel - width, 0);
  g.pad_top = pad_h / 2;
  g.pad_left = pad_w / 2;
  return g;
}

template <typename T>
void im2col(const T* image, const ConvGeometry& g, T* cols) {
  const int k = g.kernel;
  const int plane = g.out_h * g.out_w;
  for (int c = 0; c < g.channels; ++c) {
    const T* src = image + static_cast<std::size_t>(c) * g.height * g.width;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        T* dst = cols + static_cast<std::size_t>((c * k + ky) * k + kx) * plane;
        for (int oy = 0; oy < g.out_h; ++oy) {
          const int y = oy * g.stride + ky - g.pad_top;
          T* row = dst + oy * g.out_w;
          if (y < 0 || y >= g.height) {
            std::fill(row, row + g.out_w, T(0));
            continue;
          }
          const T* line = src + static_cast<std::size_t>(y) * g.width;
          for (int ox = 0; ox < g.out_w; ++ox) {
            const int x = ox * g.stride + kx - g.pad_left;
            row[ox] = (x >= 0 && x < g.width) ? line[x] : T(0);
          }
        }
      }
    }
  }
}

template <typename T>
void col2im(const T* cols, const ConvGeometry& g, T* image) {
  const int k = g.kernel;
  const int plane = g.out_h * g.out_w;
  for (int c = 0; c < g.channels; ++c) {
    T* dst = image + static_cast<std::size_t>(c) * g.height * g.width;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const T* src = cols + static_cast<std::size_t>((c * k + ky) * k + kx) * plane;
        for (int oy = 0; oy < g.out_h; ++oy) {
          const int y = oy * g.stride + ky - g.pad_top;
          if (y < 0 || y >= g.height) continue;
          T* line = dst + static_cast<std::size_t>(y) * g.width;
          const T* row = src + oy * g.out_w;
          for (int ox = 0; ox < g.out_w; ++ox) {
            const int x = ox * g.stride + kx - g.pad_left;
            if (x >= 0 && x < g.width) line[x] += row[ox];
          }
        }
      }
    }
  }
}

template void im2col<float>(const float*, const ConvGeometry&, float*);
template void im2col<double>(const double*, const ConvGeometry&, double*);
template void col2im<float>(const float*, const ConvGeometry&, float*);
template void col2im<double>(const double*, const ConvGeometry&, double*);

}  // namespace gprlab::nn

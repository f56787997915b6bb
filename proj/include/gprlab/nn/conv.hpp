#pragma once

namespace gprlab::nn {

/// Geometry of a 2-D convolution over a (channels, height, width) input.
/// Padding follows the 'same' rule: out = ceil(in / stride), with the odd
/// padding pixel on the bottom/right.
struct ConvGeometry {
  int channels = 0;
  int height = 0;
  int width = 0;
  int kernel = 1;
  int stride = 1;
  int pad_top = 0;
  int pad_left = 0;
  int out_h = 0;
  int out_w = 0;

  int col_rows() const { return channels * kernel * kernel; }
  int col_cols() const { return out_h * out_w; }
};

ConvGeometry same_geometry(int channels, int height, int width, int kernel, int stride);

/// (channels*k*k) x (out_h*out_w) row-major patch matrix; padding reads 0.
template <typename T>
void im2col(const T* image, const ConvGeometry& g, T* cols);

/// Adjoint of im2col: scatters (accumulates) patches back into `image`.
template <typename T>
void col2im(const T* cols, const ConvGeometry& g, T* image);

}  // namespace gprlab::nn

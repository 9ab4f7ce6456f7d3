#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "blastomere/image.hpp"

namespace blastomere {

// Smallest size >= n whose only prime factors are 2, 3, 5 and 7, rounded to a multiple
// of 8 above 32 and of 2 below (n itself when n <= 2).
int smooth_fft_size(int n);

// Cross-correlation of a fixed binary image with sparse binary kernels:
//   C(x, y) = sum over kernel offsets d of I((x, y) + d).
// The image is zero padded to at least (min_width, min_height) and the
// correlation is circular over the padded domain, so it equals the linear
// correlation wherever (x, y) + d never leaves the padded frame.
class FftCorrelator {
 public:
  // `measure` selects measured FFT plans: slower to create, faster to run.
  // Plans are cached per padded size for the life of the process.
  FftCorrelator(const Grid<std::uint8_t>& image, int min_width, int min_height, bool measure = false);
  ~FftCorrelator();
  FftCorrelator(const FftCorrelator&) = delete;
  FftCorrelator& operator=(const FftCorrelator&) = delete;

  int padded_width() const { return pw_; }
  int padded_height() const { return ph_; }

  // Values for every image pixel, rounded to the nearest integer when
  // `round_to_int` is set (kernels and image are binary so the exact result is integral).
  Grid<double> correlate(std::span<const Pixel> offsets, bool round_to_int = true);

  // Unrounded, unnormalized result in the internal buffer (valid until the
  // next call); multiply by scale() to get correlation values.
  struct View {
    const double* data;
    int stride;
    double scale;
    long long rounded(int x, int y) const { return std::llround(data[static_cast<std::size_t>(y) * stride + x] * scale); }
  };
  View correlate_view(std::span<const Pixel> offsets);

 private:
  struct Impl;
  int w_, h_, pw_, ph_;
  std::unique_ptr<Impl> impl_;
};

// Linear correlation over the full image with zero outside; offsets of any extent.
Grid<double> correlate_fft(const Grid<std::uint8_t>& image, std::span<const Pixel> offsets);

// Brute-force spatial evaluation of the same quantity.
Grid<double> correlate_direct(const Grid<std::uint8_t>& image, std::span<const Pixel> offsets);

// Offsets of the nonzero cells of a kernel mask relative to `anchor`.
std::vector<Pixel> mask_offsets(const Grid<std::uint8_t>& kernel, Pixel anchor);

}  // namespace blastomere

#include "blastomere/correlation.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <tuple>

#include "blastomere/error.hpp"

namespace blastomere {

int smooth_fft_size(int n) {
  if (n < 1) n = 1;
  if (n <= 2) return n;
  // multiples of 8 keep FFTW on its fastest radix paths
  const int step = n > 32 ? 8 : 2;
  for (int m = (n + step - 1) / step * step;; m += step) {
    int r = m;
    for (int p : {2, 3, 5, 7})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

namespace {

// Plans are created once per padded size and reused with the new-array execute API.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

PlanPair plans_for(int pw, int ph, bool measure) {
  static std::map<std::tuple<int, int, bool>, PlanPair> cache;
  auto it = cache.find({pw, ph, measure});
  if (it != cache.end()) return it->second;
  const int cw = pw / 2 + 1;
  double* real = fftw_alloc_real(static_cast<std::size_t>(pw) * ph);
  fftw_complex* spec = fftw_alloc_complex(static_cast<std::size_t>(cw) * ph);
  PlanPair p;
  p.forward = fftw_plan_dft_r2c_2d(ph, pw, real, spec, measure ? FFTW_MEASURE : FFTW_ESTIMATE);
  p.backward = fftw_plan_dft_c2r_2d(ph, pw, spec, real, measure ? FFTW_MEASURE : FFTW_ESTIMATE);
  fftw_free(real);
  fftw_free(spec);
  cache.emplace(std::make_tuple(pw, ph, measure), p);
  return p;
}

}  // namespace

struct FftCorrelator::Impl {
  double* real = nullptr;
  double* kernel = nullptr;  // only the cells listed in `kernel_cells` are nonzero
  std::vector<std::size_t> kernel_cells;
  fftw_complex* image_spec = nullptr;
  fftw_complex* work_spec = nullptr;
  PlanPair plans;

  ~Impl() {
    fftw_free(real);
    fftw_free(kernel);
    fftw_free(image_spec);
    fftw_free(work_spec);
  }
};

FftCorrelator::FftCorrelator(const Grid<std::uint8_t>& image, int min_width, int min_height, bool measure)
    : w_(image.width()), h_(image.height()), impl_(std::make_unique<Impl>()) {
  if (image.empty()) throw InvalidArgument("correlation image is empty");
  pw_ = smooth_fft_size(std::max(w_, min_width));
  ph_ = smooth_fft_size(std::max(h_, min_height));
  const std::size_t nreal = static_cast<std::size_t>(pw_) * ph_;
  const std::size_t nspec = static_cast<std::size_t>(pw_ / 2 + 1) * ph_;
  impl_->real = fftw_alloc_real(nreal);
  impl_->kernel = fftw_alloc_real(nreal);
  std::fill(impl_->kernel, impl_->kernel + nreal, 0.0);
  impl_->image_spec = fftw_alloc_complex(nspec);
  impl_->work_spec = fftw_alloc_complex(nspec);
  impl_->plans = plans_for(pw_, ph_, measure);

  std::fill(impl_->real, impl_->real + nreal, 0.0);
  for (int y = 0; y < h_; ++y)
    for (int x = 0; x < w_; ++x) impl_->real[static_cast<std::size_t>(y) * pw_ + x] = image(x, y) ? 1.0 : 0.0;
  fftw_execute_dft_r2c(impl_->plans.forward, impl_->real, impl_->image_spec);
}

FftCorrelator::~FftCorrelator() = default;

FftCorrelator::View FftCorrelator::correlate_view(std::span<const Pixel> offsets) {
  const std::size_t nreal = static_cast<std::size_t>(pw_) * ph_;
  const std::size_t nspec = static_cast<std::size_t>(pw_ / 2 + 1) * ph_;
  double* kernel = impl_->kernel;
  for (std::size_t i : impl_->kernel_cells) kernel[i] = 0.0;
  impl_->kernel_cells.clear();
  for (Pixel d : offsets) {
    const int x = ((d.x % pw_) + pw_) % pw_;
    const int y = ((d.y % ph_) + ph_) % ph_;
    const std::size_t i = static_cast<std::size_t>(y) * pw_ + x;
    kernel[i] += 1.0;
    impl_->kernel_cells.push_back(i);
  }
  fftw_complex* ks = impl_->work_spec;
  fftw_execute_dft_r2c(impl_->plans.forward, kernel, ks);
  double* real = impl_->real;
  const fftw_complex* is = impl_->image_spec;
  for (std::size_t i = 0; i < nspec; ++i) {
    // I * conj(K)
    const double re = is[i][0] * ks[i][0] + is[i][1] * ks[i][1];
    const double im = is[i][1] * ks[i][0] - is[i][0] * ks[i][1];
    ks[i][0] = re;
    ks[i][1] = im;
  }
  fftw_execute_dft_c2r(impl_->plans.backward, ks, real);
  return {real, pw_, 1.0 / static_cast<double>(nreal)};
}

Grid<double> FftCorrelator::correlate(std::span<const Pixel> offsets, bool round_to_int) {
  const View v = correlate_view(offsets);
  Grid<double> out(w_, h_, 0.0);
  for (int y = 0; y < h_; ++y)
    for (int x = 0; x < w_; ++x) {
      const double c = v.data[static_cast<std::size_t>(y) * v.stride + x] * v.scale;
      out(x, y) = round_to_int ? std::round(c) : c;
    }
  return out;
}

Grid<double> correlate_fft(const Grid<std::uint8_t>& image, std::span<const Pixel> offsets) {
  int ext_x = 0, ext_y = 0;
  for (Pixel d : offsets) {
    ext_x = std::max(ext_x, std::abs(d.x));
    ext_y = std::max(ext_y, std::abs(d.y));
  }
  FftCorrelator corr(image, image.width() + ext_x, image.height() + ext_y);
  return corr.correlate(offsets, false);
}

Grid<double> correlate_direct(const Grid<std::uint8_t>& image, std::span<const Pixel> offsets) {
  Grid<double> out(image.width(), image.height(), 0.0);
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x) {
      double s = 0.0;
      for (Pixel d : offsets) {
        const int u = x + d.x;
        const int v = y + d.y;
        if (image.contains(u, v) && image(u, v)) s += 1.0;
      }
      out(x, y) = s;
    }
  return out;
}

std::vector<Pixel> mask_offsets(const Grid<std::uint8_t>& kernel, Pixel anchor) {
  std::vector<Pixel> out;
  for (int y = 0; y < kernel.height(); ++y)
    for (int x = 0; x < kernel.width(); ++x)
      if (kernel(x, y)) out.push_back({x - anchor.x, y - anchor.y});
  return out;
}

}  // namespace blastomere

#include <doctest.h>

#include <cmath>
#include <numeric>

#include "blastomere/error.hpp"
#include "blastomere/image.hpp"
#include "temp_dir.hpp"

using namespace blastomere;

TEST_CASE("gaussian kernel is normalized, symmetric and truncated at 3 sigma") {
  for (double sigma : {0.5, 1.0, 1.7, 3.0}) {
    const auto k = gaussian_kernel(sigma);
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    REQUIRE(k.size() == static_cast<std::size_t>(2 * r + 1));
    CHECK(std::accumulate(k.begin(), k.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 0; i < r; ++i) CHECK(k[i] == doctest::Approx(k[2 * r - i]));
    // ratio of neighbouring taps follows the continuous Gaussian
    CHECK(k[r + 1] / k[r] == doctest::Approx(std::exp(-1.0 / (2.0 * sigma * sigma))).epsilon(1e-12));
  }
  CHECK_THROWS_AS(gaussian_kernel(0.0), InvalidArgument);
}

TEST_CASE("smoothing keeps constants and linear ramps away from the border") {
  GrayImage c(20, 15, 0.4);
  const GrayImage sc = gaussian_smooth(c, 2.0);
  for (double v : sc.values()) CHECK(v == doctest::Approx(0.4).epsilon(1e-12));

  GrayImage ramp(40, 30);
  for (int y = 0; y < 30; ++y)
    for (int x = 0; x < 40; ++x) ramp(x, y) = 0.01 * x + 0.02 * y;
  const GrayImage sr = gaussian_smooth(ramp, 1.5);
  for (int y = 6; y < 24; ++y)
    for (int x = 6; x < 34; ++x) CHECK(sr(x, y) == doctest::Approx(ramp(x, y)).epsilon(1e-12));
}

TEST_CASE("gradient of a ramp is constant") {
  GrayImage img(16, 12);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 16; ++x) img(x, y) = static_cast<double>(x) / 16.0;
  const GradientField g = gradient(img);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 16; ++x) {
      CHECK(g.gx(x, y) == doctest::Approx(1.0 / 16.0));
      CHECK(g.gy(x, y) == doctest::Approx(0.0));
      CHECK(g.magnitude(x, y) == doctest::Approx(1.0 / 16.0));
    }
  CHECK_THROWS_AS(gradient(GrayImage(2, 5)), InvalidArgument);
}

TEST_CASE("png and pgm round trip on the 8-bit grid") {
  TempDir dir("image");
  GrayImage img(7, 5);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 7; ++x) img(x, y) = ((x * 37 + y * 11) % 256) / 255.0;
  save_png(img, dir / "a.png");
  save_pgm(img, dir / "a.pgm");
  for (const char* name : {"a.png", "a.pgm"}) {
    const GrayImage back = load_grayscale(dir / name);
    REQUIRE(back.same_shape(img));
    for (std::size_t i = 0; i < img.size(); ++i) CHECK(back.values()[i] == doctest::Approx(img.values()[i]).epsilon(1e-12));
  }
}

TEST_CASE("loading reports missing or malformed files as I/O errors") {
  TempDir dir("image_bad");
  CHECK_THROWS_AS(load_grayscale(dir / "missing.png"), IoError);
  {
    std::FILE* f = std::fopen((dir / "junk.png").c_str(), "wb");
    std::fputs("not an image", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_grayscale(dir / "junk.png"), IoError);
}

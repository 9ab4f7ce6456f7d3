#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include "blastomere/error.hpp"
#include "blastomere/image.hpp"

namespace blastomere {

namespace {

std::string read_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {}
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

int parse_header_int(std::istream& in, const std::filesystem::path& path) {
  const std::string tok = read_token(in);
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](unsigned char c) { return std::isdigit(c); }))
    throw IoError("malformed PGM header: " + path.string());
  return std::stoi(tok);
}

GrayImage load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  if (read_token(in) != "P5") throw IoError("not a binary PGM: " + path.string());
  const int w = parse_header_int(in, path);
  const int h = parse_header_int(in, path);
  const int maxval = parse_header_int(in, path);
  // read_token consumed exactly one whitespace byte after maxval
  if (w <= 0 || h <= 0) throw IoError("zero-area image: " + path.string());
  if (maxval <= 0 || maxval > 65535) throw IoError("bad PGM maxval: " + path.string());

  const int bytes = maxval < 256 ? 1 : 2;
  std::vector<unsigned char> raw(static_cast<std::size_t>(w) * h * bytes);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw IoError("truncated PGM: " + path.string());

  GrayImage img(w, h);
  auto px = img.values();
  for (std::size_t i = 0; i < px.size(); ++i) {
    const int v = bytes == 1 ? raw[i] : (raw[2 * i] << 8 | raw[2 * i + 1]);
    px[i] = std::min(1.0, static_cast<double>(v) / maxval);
  }
  return img;
}

struct PngImageGuard {
  png_image* image;
  ~PngImageGuard() { png_image_free(image); }
};

GrayImage load_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  PngImageGuard guard{&image};
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw IoError("cannot decode PNG " + path.string() + ": " + image.message);
  if (image.width == 0 || image.height == 0) throw IoError("zero-area image: " + path.string());

  const int w = static_cast<int>(image.width);
  const int h = static_cast<int>(image.height);
  GrayImage img(w, h);
  auto px = img.values();
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  const bool wide = (image.format & PNG_FORMAT_FLAG_LINEAR) != 0;

  if (wide && !color) {
    image.format = PNG_FORMAT_LINEAR_Y;
    std::vector<png_uint_16> buf(PNG_IMAGE_SIZE(image) / sizeof(png_uint_16));
    if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr))
      throw IoError("cannot decode PNG " + path.string() + ": " + image.message);
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = buf[i] / 65535.0;
  } else if (color) {
    image.format = PNG_FORMAT_RGB;
    std::vector<png_byte> buf(PNG_IMAGE_SIZE(image));
    png_color background{0, 0, 0};
    if (!png_image_finish_read(&image, &background, buf.data(), 0, nullptr))
      throw IoError("cannot decode PNG " + path.string() + ": " + image.message);
    for (std::size_t i = 0; i < px.size(); ++i) {
      const double luma = 0.299 * buf[3 * i] + 0.587 * buf[3 * i + 1] + 0.114 * buf[3 * i + 2];
      px[i] = std::clamp(luma / 255.0, 0.0, 1.0);
    }
  } else {
    image.format = PNG_FORMAT_GRAY;
    std::vector<png_byte> buf(PNG_IMAGE_SIZE(image));
    png_color background{0, 0, 0};
    if (!png_image_finish_read(&image, &background, buf.data(), 0, nullptr))
      throw IoError("cannot decode PNG " + path.string() + ": " + image.message);
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = buf[i] / 255.0;
  }
  return img;
}

bool has_png_signature(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  unsigned char sig[8] = {};
  in.read(reinterpret_cast<char*>(sig), 8);
  return in.gcount() == 8 && png_sig_cmp(sig, 0, 8) == 0;
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

void write_png(const std::filesystem::path& path, int w, int h, png_uint_32 format, const void* data) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = format;
  PngImageGuard guard{&image};
  if (!png_image_write_to_file(&image, path.c_str(), 0, data, 0, nullptr))
    throw IoError("cannot write PNG " + path.string() + ": " + image.message);
}

}  // namespace

GrayImage load_grayscale(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("no such file: " + path.string());
  if (has_png_signature(path)) return load_png(path);

  std::ifstream in(path, std::ios::binary);
  char magic[2] = {};
  in.read(magic, 2);
  if (in.gcount() == 2 && magic[0] == 'P' && magic[1] == '5') return load_pgm(path);
  throw IoError("unsupported image format: " + path.string());
}

void save_png(const GrayImage& img, const std::filesystem::path& path) {
  std::vector<std::uint8_t> buf(img.size());
  std::transform(img.values().begin(), img.values().end(), buf.begin(), to_byte);
  write_png(path, img.width(), img.height(), PNG_FORMAT_GRAY, buf.data());
}

void save_png(const RgbImage& img, const std::filesystem::path& path) {
  std::vector<std::uint8_t> buf;
  buf.reserve(img.size() * 3);
  for (const Rgb& c : img.values()) {
    buf.push_back(c.r);
    buf.push_back(c.g);
    buf.push_back(c.b);
  }
  write_png(path, img.width(), img.height(), PNG_FORMAT_RGB, buf.data());
}

void save_pgm(const GrayImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  for (double v : img.values()) out.put(static_cast<char>(to_byte(v)));
  if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace blastomere

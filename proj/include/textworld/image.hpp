#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace textworld {

// Row-major 2D grid.
template <typename T>
struct Grid {
  int width = 0;
  int height = 0;
  std::vector<T> data;

  Grid() = default;
  Grid(int w, int h, T fill = T{}) : width(w), height(h), data(std::size_t(w) * h, fill) {}

  T& at(int x, int y) { return data[std::size_t(y) * width + x]; }
  const T& at(int x, int y) const { return data[std::size_t(y) * width + x]; }
  bool inside(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
};

// 8-bit interleaved image with 1, 3 or 4 channels.
struct Image8 {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<std::uint8_t> pixels;

  Image8() = default;
  Image8(int w, int h, int c) : width(w), height(h), channels(c), pixels(std::size_t(w) * h * c, 0) {}

  std::uint8_t* at(int x, int y) { return &pixels[(std::size_t(y) * width + x) * channels]; }
  const std::uint8_t* at(int x, int y) const {
    return &pixels[(std::size_t(y) * width + x) * channels];
  }
};

void write_png(const std::filesystem::path& path, const Image8& image);
Image8 read_png(const std::filesystem::path& path);

Image8 crop(const Image8& image, int x0, int y0, int x1, int y1);

// Debug dump of a float grid: "TWRAW1\n<width> <height> <channels>\n" then
// little-endian float32 samples, row-major, channels interleaved.
void write_raw_floats(const std::filesystem::path& path, int width, int height, int channels,
    const std::vector<float>& samples);

}  // namespace textworld

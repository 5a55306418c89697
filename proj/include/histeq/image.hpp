#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace histeq {

/// Number of representable gray levels (8-bit samples, values 0..255).
inline constexpr int kLevels = 256;
inline constexpr int kMaxIntensity = kLevels - 1;

/// Rectangular grid of 8-bit intensity samples, stored row-major.
class GrayImage {
 public:
  GrayImage(int width, int height, std::uint8_t fill = 0)
      : width_(width), height_(height) {
    check_dimensions(width, height);
    pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    check_dimensions(width, height);
    if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw std::invalid_argument("pixel buffer does not match image dimensions");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return pixels_.size(); }

  std::uint8_t at(int x, int y) const { return pixels_[index(x, y)]; }
  std::uint8_t& at(int x, int y) { return pixels_[index(x, y)]; }

  std::span<const std::uint8_t> pixels() const { return pixels_; }
  std::span<std::uint8_t> pixels() { return pixels_; }

  bool operator==(const GrayImage&) const = default;

 private:
  static void check_dimensions(int width, int height) {
    if (width < 1 || height < 1) {
      throw std::invalid_argument("image dimensions must be at least 1x1");
    }
  }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;
};

/// 256-bin occurrence counts of an image, with a derived probability view.
struct Histogram {
  std::array<std::uint64_t, kLevels> counts{};
  std::uint64_t total = 0;

  /// Fraction of the population at `level`; 0 for an empty histogram.
  double probability(int level) const {
    return total == 0 ? 0.0
                      : static_cast<double>(counts[static_cast<std::size_t>(level)]) /
                            static_cast<double>(total);
  }
};

/// Cumulative distribution over an intensity range [range_low, range_high].
/// values(i) is 0 below the range and 1 at and above range_high.
struct Cdf {
  std::array<double, kLevels> values{};
  int range_low = 0;
  int range_high = kMaxIntensity;
};

/// 256-entry lookup table realizing a pixel transform. Equalization
/// transforms produced by this library are always monotone non-decreasing;
/// the table itself accepts arbitrary mappings.
struct IntensityMap {
  std::array<std::uint8_t, kLevels> table{};

  static IntensityMap identity() {
    IntensityMap map;
    for (int i = 0; i < kLevels; ++i) map.table[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
    return map;
  }

  bool is_monotone() const {
    for (int i = 1; i < kLevels; ++i) {
      if (table[static_cast<std::size_t>(i - 1)] > table[static_cast<std::size_t>(i)]) return false;
    }
    return true;
  }
};

/// Decomposition of an image into a rows x cols grid of sub-images.
/// Tiles are stored row-major; per-column widths and per-row heights sum to
/// the source dimensions, so the tiles partition the source exactly.
struct TileGrid {
  int rows = 0;
  int cols = 0;
  std::vector<GrayImage> tiles;
  std::vector<int> tile_widths;
  std::vector<int> tile_heights;
  int source_width = 0;
  int source_height = 0;

  const GrayImage& tile(int r, int c) const {
    return tiles[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                 static_cast<std::size_t>(c)];
  }
  GrayImage& tile(int r, int c) {
    return tiles[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                 static_cast<std::size_t>(c)];
  }
};

inline Histogram compute_histogram(const GrayImage& img) {
  Histogram h;
  for (std::uint8_t p : img.pixels()) ++h.counts[p];
  h.total = img.pixel_count();
  return h;
}

/// Empirical CDF of `h` restricted to [range_low, range_high]. Counts
/// outside the range are ignored; the caller guarantees there are none.
inline Cdf compute_cdf(const Histogram& h, int range_low, int range_high) {
  if (range_low < 0 || range_high > kMaxIntensity || range_low > range_high) {
    throw std::invalid_argument("invalid intensity range");
  }
  std::uint64_t in_range = 0;
  for (int i = range_low; i <= range_high; ++i) in_range += h.counts[static_cast<std::size_t>(i)];
  if (in_range == 0) throw std::invalid_argument("empty histogram range");

  Cdf cdf;
  cdf.range_low = range_low;
  cdf.range_high = range_high;
  std::uint64_t cum = 0;
  for (int i = range_low; i <= range_high; ++i) {
    cum += h.counts[static_cast<std::size_t>(i)];
    cdf.values[static_cast<std::size_t>(i)] = static_cast<double>(cum) / static_cast<double>(in_range);
  }
  for (int i = range_high + 1; i < kLevels; ++i) cdf.values[static_cast<std::size_t>(i)] = 1.0;
  return cdf;
}

inline GrayImage apply_map(const GrayImage& img, const IntensityMap& map) {
  GrayImage out = img;
  for (std::uint8_t& p : out.pixels()) p = map.table[p];
  return out;
}

inline double mean_intensity(const GrayImage& img) {
  std::uint64_t sum = 0;
  for (std::uint8_t p : img.pixels()) sum += p;
  return static_cast<double>(sum) / static_cast<double>(img.pixel_count());
}

/// Splits `img` into rows x cols tiles. When a dimension is not divisible,
/// the remainder pixels go to the last row/column of tiles.
inline TileGrid decompose(const GrayImage& img, int rows, int cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("tile grid must be at least 1x1");
  if (rows > img.height() || cols > img.width()) {
    throw std::invalid_argument("grid exceeds image dimensions");
  }

  TileGrid grid;
  grid.rows = rows;
  grid.cols = cols;
  grid.source_width = img.width();
  grid.source_height = img.height();

  const int base_w = img.width() / cols;
  const int base_h = img.height() / rows;
  grid.tile_widths.assign(static_cast<std::size_t>(cols), base_w);
  grid.tile_heights.assign(static_cast<std::size_t>(rows), base_h);
  grid.tile_widths.back() = img.width() - base_w * (cols - 1);
  grid.tile_heights.back() = img.height() - base_h * (rows - 1);

  grid.tiles.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  int y0 = 0;
  for (int r = 0; r < rows; ++r) {
    const int th = grid.tile_heights[static_cast<std::size_t>(r)];
    int x0 = 0;
    for (int c = 0; c < cols; ++c) {
      const int tw = grid.tile_widths[static_cast<std::size_t>(c)];
      GrayImage tile(tw, th);
      for (int y = 0; y < th; ++y) {
        for (int x = 0; x < tw; ++x) tile.at(x, y) = img.at(x0 + x, y0 + y);
      }
      grid.tiles.push_back(std::move(tile));
      x0 += tw;
    }
    y0 += th;
  }
  return grid;
}

/// Places every tile back at its grid position. Inverse of decompose.
inline GrayImage reassemble(const TileGrid& grid) {
  const auto expected =
      static_cast<std::size_t>(grid.rows) * static_cast<std::size_t>(grid.cols);
  const bool shape_ok =
      grid.rows >= 1 && grid.cols >= 1 && grid.tiles.size() == expected &&
      grid.tile_widths.size() == static_cast<std::size_t>(grid.cols) &&
      grid.tile_heights.size() == static_cast<std::size_t>(grid.rows) &&
      std::accumulate(grid.tile_widths.begin(), grid.tile_widths.end(), std::int64_t{0}) ==
          grid.source_width &&
      std::accumulate(grid.tile_heights.begin(), grid.tile_heights.end(), std::int64_t{0}) ==
          grid.source_height;
  if (!shape_ok) throw std::invalid_argument("malformed tile grid");
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      const GrayImage& t = grid.tile(r, c);
      if (t.width() != grid.tile_widths[static_cast<std::size_t>(c)] ||
          t.height() != grid.tile_heights[static_cast<std::size_t>(r)]) {
        throw std::invalid_argument("malformed tile grid");
      }
    }
  }

  GrayImage out(grid.source_width, grid.source_height);
  int y0 = 0;
  for (int r = 0; r < grid.rows; ++r) {
    int x0 = 0;
    for (int c = 0; c < grid.cols; ++c) {
      const GrayImage& t = grid.tile(r, c);
      for (int y = 0; y < t.height(); ++y) {
        for (int x = 0; x < t.width(); ++x) out.at(x0 + x, y0 + y) = t.at(x, y);
      }
      x0 += t.width();
    }
    y0 += grid.tile_heights[static_cast<std::size_t>(r)];
  }
  return out;
}

}  // namespace histeq

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "histeq/image.hpp"

namespace histeq {

/// Recursion depth for rmshe. Depth r yields up to 2^r intensity sub-ranges;
/// values above 7 would split past the 256 available gray levels.
struct RmsheDepth {
  int r;

  explicit RmsheDepth(int depth) : r(depth) {
    if (depth < 0 || depth > 7) throw std::invalid_argument("rmshe depth must be in [0, 7]");
  }
};

struct AheConfig {
  int tile_rows = 8;
  int tile_cols = 8;
  /// When present, each tile histogram is clipped at clip_limit times the
  /// uniform bin height before the CDF is computed. Must exceed 1.0.
  std::optional<double> clip_limit{};
};

struct MdheConfig {
  int grid_rows = 8;
  int grid_cols = 8;
  /// Maximum tolerated drift of the output mean from the input mean, in
  /// intensity units.
  double brightness_limit = 10.0;
  /// Blend per-tile transforms bilinearly between tile centers instead of
  /// applying each transform only inside its own tile. Softens tile seams.
  bool blend_tiles = false;
};

namespace detail {

using LevelWeights = std::array<double, kLevels>;

inline LevelWeights to_weights(const Histogram& h) {
  LevelWeights w{};
  for (int i = 0; i < kLevels; ++i) {
    w[static_cast<std::size_t>(i)] = static_cast<double>(h.counts[static_cast<std::size_t>(i)]);
  }
  return w;
}

// Equalization transform over [lo, hi]:
//   T(i) = lo + max(0, round(width * C(i) - 1)),  width = hi - lo + 1,
// where C is the cumulative mass within the range. Rounding is
// half-away-from-zero (project-wide rule). A range carrying no mass is left
// untouched, so callers that start from an identity table get the identity
// fallback.
//
// A population whose histogram already matches the uniform target
// C(i) = (i - lo + 1) / width is an exact fixed point of this transform.
inline void fill_equalization_segment(std::array<std::uint8_t, kLevels>& table,
                                      const LevelWeights& weights, int lo, int hi) {
  double total = 0.0;
  for (int i = lo; i <= hi; ++i) total += weights[static_cast<std::size_t>(i)];
  if (total <= 0.0) return;

  const int width = hi - lo + 1;
  double cum = 0.0;
  for (int i = lo; i <= hi; ++i) {
    cum += weights[static_cast<std::size_t>(i)];
    const long t = std::lround(width * (cum / total) - 1.0);
    table[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(lo + std::max(0L, t));
  }
}

// Recursive mean split: divide [lo, hi] at the floor of the population mean,
// recurse on both halves, and equalize each leaf population within its own
// sub-range. An empty branch keeps the identity mapping.
inline void fill_rmshe_segment(std::array<std::uint8_t, kLevels>& table,
                               const LevelWeights& weights, int lo, int hi, int depth) {
  double population = 0.0;
  double weighted = 0.0;
  for (int i = lo; i <= hi; ++i) {
    population += weights[static_cast<std::size_t>(i)];
    weighted += static_cast<double>(i) * weights[static_cast<std::size_t>(i)];
  }
  if (population <= 0.0) return;
  if (depth == 0) {
    fill_equalization_segment(table, weights, lo, hi);
    return;
  }
  const int split = static_cast<int>(std::floor(weighted / population));
  fill_rmshe_segment(table, weights, lo, split, depth - 1);
  if (split < hi) fill_rmshe_segment(table, weights, split + 1, hi, depth - 1);
}

// Clip each bin at clip_limit times the uniform bin height and hand the
// clipped mass back uniformly to all 256 bins (single pass).
inline void clip_histogram(LevelWeights& weights, double clip_limit) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double ceiling = clip_limit * total / kLevels;
  double excess = 0.0;
  for (double& w : weights) {
    if (w > ceiling) {
      excess += w - ceiling;
      w = ceiling;
    }
  }
  const double share = excess / kLevels;
  for (double& w : weights) w += share;
}

inline IntensityMap full_range_map(const GrayImage& tile, const std::optional<double>& clip_limit) {
  LevelWeights weights = to_weights(compute_histogram(tile));
  if (clip_limit) clip_histogram(weights, *clip_limit);
  IntensityMap map = IntensityMap::identity();
  fill_equalization_segment(map.table, weights, 0, kMaxIntensity);
  return map;
}

struct BlendBand {
  int lo = 0;
  int hi = 0;
  double frac = 0.0;  // weight toward the hi tile
};

// For each coordinate along one axis, the two tile centers it sits between
// and the interpolation fraction. Coordinates outside the first/last center
// take that tile's transform unblended.
inline std::vector<BlendBand> blend_bands(const std::vector<int>& tile_sizes, int extent) {
  std::vector<double> centers;
  centers.reserve(tile_sizes.size());
  int offset = 0;
  for (int size : tile_sizes) {
    centers.push_back(offset + (size - 1) / 2.0);
    offset += size;
  }

  std::vector<BlendBand> bands(static_cast<std::size_t>(extent));
  int k = 0;
  for (int p = 0; p < extent; ++p) {
    BlendBand& band = bands[static_cast<std::size_t>(p)];
    if (p <= centers.front()) {
      band = {0, 0, 0.0};
    } else if (p >= centers.back()) {
      const int last = static_cast<int>(centers.size()) - 1;
      band = {last, last, 0.0};
    } else {
      while (centers[static_cast<std::size_t>(k + 1)] < p) ++k;
      band.lo = k;
      band.hi = k + 1;
      band.frac = (p - centers[static_cast<std::size_t>(k)]) /
                  (centers[static_cast<std::size_t>(k + 1)] - centers[static_cast<std::size_t>(k)]);
    }
  }
  return bands;
}

inline GrayImage blend_tile_maps(const GrayImage& img, const TileGrid& grid,
                                 const std::vector<IntensityMap>& maps) {
  const std::vector<BlendBand> col_bands = blend_bands(grid.tile_widths, img.width());
  const std::vector<BlendBand> row_bands = blend_bands(grid.tile_heights, img.height());

  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    const BlendBand& by = row_bands[static_cast<std::size_t>(y)];
    for (int x = 0; x < img.width(); ++x) {
      const BlendBand& bx = col_bands[static_cast<std::size_t>(x)];
      const std::uint8_t v = img.at(x, y);
      const auto lut = [&](int r, int c) {
        return static_cast<double>(
            maps[static_cast<std::size_t>(r) * static_cast<std::size_t>(grid.cols) +
                 static_cast<std::size_t>(c)]
                .table[v]);
      };
      const double top = lut(by.lo, bx.lo) * (1.0 - bx.frac) + lut(by.lo, bx.hi) * bx.frac;
      const double bottom = lut(by.hi, bx.lo) * (1.0 - bx.frac) + lut(by.hi, bx.hi) * bx.frac;
      const double blended = top * (1.0 - by.frac) + bottom * by.frac;
      out.at(x, y) = static_cast<std::uint8_t>(
          std::clamp(std::lround(blended), 0L, static_cast<long>(kMaxIntensity)));
    }
  }
  return out;
}

}  // namespace detail

/// Equalizes the in-range population of `img` over [range_low, range_high].
/// Pixels outside the range (the caller promises there are none) and ranges
/// carrying no population pass through unchanged.
inline GrayImage range_equalize(const GrayImage& img, int range_low, int range_high) {
  if (range_low < 0 || range_high > kMaxIntensity || range_low > range_high) {
    throw std::invalid_argument("invalid intensity range");
  }
  const Histogram h = compute_histogram(img);
  IntensityMap map = IntensityMap::identity();
  detail::fill_equalization_segment(map.table, detail::to_weights(h), range_low, range_high);
  return apply_map(img, map);
}

/// Classical histogram equalization: one global CDF over the full range.
inline GrayImage che(const GrayImage& img) { return range_equalize(img, 0, kMaxIntensity); }

/// Bi-histogram equalization: split the population at the floor of the mean
/// gray level, equalize pixels <= m over [0, m] and pixels > m over
/// [m+1, 255], each with its own CDF. Pixel classes never cross the split.
inline GrayImage bhe(const GrayImage& img) {
  const int split = static_cast<int>(std::floor(mean_intensity(img)));
  const Histogram h = compute_histogram(img);
  const detail::LevelWeights weights = detail::to_weights(h);
  IntensityMap map = IntensityMap::identity();
  detail::fill_equalization_segment(map.table, weights, 0, split);
  if (split < kMaxIntensity) {
    detail::fill_equalization_segment(map.table, weights, split + 1, kMaxIntensity);
  }
  return apply_map(img, map);
}

/// Recursive mean-separate equalization: depth 0 is che, depth 1 is bhe,
/// depth r splits the range at population means r times into up to 2^r
/// sub-ranges before equalizing each.
inline GrayImage rmshe(const GrayImage& img, RmsheDepth depth) {
  const Histogram h = compute_histogram(img);
  IntensityMap map = IntensityMap::identity();
  detail::fill_rmshe_segment(map.table, detail::to_weights(h), 0, kMaxIntensity, depth.r);
  return apply_map(img, map);
}

/// Adaptive equalization: each tile of the grid is equalized over the full
/// range with its own histogram, then the tiles are reassembled in place.
/// An optional clip limit bounds per-tile histogram peaks (noise control).
inline GrayImage ahe(const GrayImage& img, const AheConfig& cfg = {}) {
  if (cfg.clip_limit && !(*cfg.clip_limit > 1.0)) {
    throw std::invalid_argument("clip limit must exceed 1.0");
  }
  TileGrid grid = decompose(img, cfg.tile_rows, cfg.tile_cols);
  for (GrayImage& tile : grid.tiles) {
    tile = apply_map(tile, detail::full_range_map(tile, cfg.clip_limit));
  }
  return reassemble(grid);
}

/// Shifts `enhanced` toward the mean of `original` whenever the mean drift
/// exceeds `limit`: the whole image moves by round(|drift| - limit) in the
/// correcting direction, clamped to [0, 255].
inline GrayImage preserve_brightness(const GrayImage& enhanced, const GrayImage& original,
                                     double limit) {
  if (enhanced.width() != original.width() || enhanced.height() != original.height()) {
    throw std::invalid_argument("image dimension mismatch");
  }
  if (limit < 0.0 || limit > 255.0) {
    throw std::invalid_argument("brightness limit must be in [0, 255]");
  }
  const double drift = mean_intensity(enhanced) - mean_intensity(original);
  if (std::abs(drift) <= limit) return enhanced;

  const long shift = std::lround(drift > 0.0 ? drift - limit : drift + limit);
  GrayImage out = enhanced;
  for (std::uint8_t& p : out.pixels()) {
    p = static_cast<std::uint8_t>(std::clamp(static_cast<long>(p) - shift, 0L,
                                             static_cast<long>(kMaxIntensity)));
  }
  return out;
}

/// Multi-decomposition equalization: decompose into a tile grid, equalize
/// every tile over the full range, reassemble (optionally blending the tile
/// transforms), then correct global brightness toward the input mean.
inline GrayImage mdhe(const GrayImage& img, const MdheConfig& cfg = {}) {
  if (cfg.brightness_limit < 0.0 || cfg.brightness_limit > 255.0) {
    throw std::invalid_argument("brightness limit must be in [0, 255]");
  }
  TileGrid grid = decompose(img, cfg.grid_rows, cfg.grid_cols);
  std::vector<IntensityMap> maps;
  maps.reserve(grid.tiles.size());
  for (const GrayImage& tile : grid.tiles) {
    maps.push_back(detail::full_range_map(tile, std::nullopt));
  }

  GrayImage enhanced = [&] {
    if (cfg.blend_tiles) return detail::blend_tile_maps(img, grid, maps);
    for (std::size_t i = 0; i < grid.tiles.size(); ++i) {
      grid.tiles[i] = apply_map(grid.tiles[i], maps[i]);
    }
    return reassemble(grid);
  }();
  return preserve_brightness(enhanced, img, cfg.brightness_limit);
}

}  // namespace histeq

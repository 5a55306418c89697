#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include <unistd.h>

#include "histeq/image.hpp"

namespace testsupport {

// Small deterministic xorshift so fixed-seed corpora are stable everywhere.
class Rng {
 public:
  explicit Rng(std::uint32_t seed) : state_(seed == 0 ? 0x9e3779b9u : seed) {}

  std::uint32_t next() {
    std::uint32_t x = state_;
    x ^= x << 13;
    x ^= x >> 17;
    x ^= x << 5;
    return state_ = x;
  }

  std::uint8_t next_byte() { return static_cast<std::uint8_t>(next() >> 24); }

  // inclusive bounds
  int next_int(int lo, int hi) {
    return lo + static_cast<int>(next() % static_cast<std::uint32_t>(hi - lo + 1));
  }

  double unit() { return (static_cast<double>(next()) + 0.5) / 4294967296.0; }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(unit()));
    const double theta = 2.0 * std::numbers::pi * unit();
    spare_ = radius * std::sin(theta);
    has_spare_ = true;
    return radius * std::cos(theta);
  }

 private:
  std::uint32_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline histeq::GrayImage random_image(int width, int height, Rng& rng) {
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) *
                                   static_cast<std::size_t>(height));
  for (auto& p : pixels) p = rng.next_byte();
  return {width, height, std::move(pixels)};
}

inline histeq::GrayImage gaussian_image(int width, int height, double mean, double sigma,
                                        Rng& rng) {
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) *
                                   static_cast<std::size_t>(height));
  for (auto& p : pixels) {
    const long v = std::lround(mean + sigma * rng.gaussian());
    p = static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
  }
  return {width, height, std::move(pixels)};
}

/// Image populated level-by-level: `spec` lists (level, count) pairs.
inline histeq::GrayImage image_from_counts(int width, int height,
                                           const std::vector<std::pair<int, int>>& spec) {
  std::vector<std::uint8_t> pixels;
  pixels.reserve(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  for (const auto& [level, count] : spec) {
    for (int i = 0; i < count; ++i) pixels.push_back(static_cast<std::uint8_t>(level));
  }
  return {width, height, std::move(pixels)};
}

/// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("histeq_" + tag + "_" + std::to_string(++counter) + "_" +
             std::to_string(static_cast<std::uint64_t>(::getpid())));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testsupport

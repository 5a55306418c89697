#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>

#include "histeq/image.hpp"

namespace histeq {

/// One row of a method-comparison table: the seven full-reference measures
/// for an (original, enhanced) pair. psnr and, when present, snr may be
/// (+/-) infinity; pcc, uiq and snr are absent when undefined for the pair.
/// Lower is better for mse, rmse and mae; higher for the rest.
struct MetricReport {
  double psnr = 0.0;
  double mse = 0.0;
  double rmse = 0.0;
  std::optional<double> uiq{};
  std::optional<double> pcc{};
  std::optional<double> snr{};
  double mae = 0.0;
};

namespace detail {

inline void require_same_dimensions(const GrayImage& a, const GrayImage& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw std::invalid_argument("image dimension mismatch");
  }
}

struct ErrorSums {
  std::uint64_t squared = 0;   // sum of (a - b)^2
  std::uint64_t absolute = 0;  // sum of |a - b|
  std::uint64_t signal = 0;    // sum of a^2
};

inline ErrorSums error_sums(const GrayImage& a, const GrayImage& b) {
  ErrorSums sums;
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const long d = static_cast<long>(pa[i]) - static_cast<long>(pb[i]);
    sums.squared += static_cast<std::uint64_t>(d * d);
    sums.absolute += static_cast<std::uint64_t>(d < 0 ? -d : d);
    sums.signal += static_cast<std::uint64_t>(pa[i]) * static_cast<std::uint64_t>(pa[i]);
  }
  return sums;
}

}  // namespace detail

inline double mse(const GrayImage& a, const GrayImage& b) {
  detail::require_same_dimensions(a, b);
  return static_cast<double>(detail::error_sums(a, b).squared) /
         static_cast<double>(a.pixel_count());
}

inline double rmse(const GrayImage& a, const GrayImage& b) { return std::sqrt(mse(a, b)); }

inline double mae(const GrayImage& a, const GrayImage& b) {
  detail::require_same_dimensions(a, b);
  return static_cast<double>(detail::error_sums(a, b).absolute) /
         static_cast<double>(a.pixel_count());
}

/// Peak signal-to-noise ratio in dB against a fixed 8-bit peak of 255.
/// Identical images yield +infinity.
inline double psnr(const GrayImage& a, const GrayImage& b) {
  const double err = mse(a, b);
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / err);
}

/// Signal-to-noise ratio in dB. The first argument is the reference signal;
/// noise is the difference image. Zero noise yields +infinity, a zero signal
/// against nonzero noise yields -infinity, and the all-zero/all-zero case is
/// undefined.
inline double snr(const GrayImage& a, const GrayImage& b) {
  detail::require_same_dimensions(a, b);
  const detail::ErrorSums sums = detail::error_sums(a, b);
  if (sums.signal == 0 && sums.squared == 0) throw std::invalid_argument("undefined SNR");
  if (sums.squared == 0) return std::numeric_limits<double>::infinity();
  if (sums.signal == 0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(static_cast<double>(sums.signal) / static_cast<double>(sums.squared));
}

/// Sample Pearson correlation of the two pixel sequences, clamped to [-1, 1].
inline double pcc(const GrayImage& a, const GrayImage& b) {
  detail::require_same_dimensions(a, b);
  const double mean_a = mean_intensity(a);
  const double mean_b = mean_intensity(b);
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const double dx = static_cast<double>(pa[i]) - mean_a;
    const double dy = static_cast<double>(pb[i]) - mean_b;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("undefined correlation");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Universal image quality index: the mean over all window x window sliding
/// positions (stride 1) of
///   Q = 4 * cov * mean_a * mean_b / ((var_a + var_b) * (mean_a^2 + mean_b^2)),
/// skipping windows whose denominator vanishes. Result is in [-1, 1];
/// every-window-degenerate pairs are undefined.
inline double uiq(const GrayImage& a, const GrayImage& b, int window = 8) {
  detail::require_same_dimensions(a, b);
  // The integer moment sums below stay exact for any window up to 1024.
  if (window < 1 || window > 1024) throw std::invalid_argument("window must be in [1, 1024]");
  if (a.width() < window || a.height() < window) {
    throw std::invalid_argument("image smaller than window");
  }

  const std::uint64_t n = static_cast<std::uint64_t>(window) * static_cast<std::uint64_t>(window);
  const double n_d = static_cast<double>(n);
  double q_sum = 0.0;
  std::uint64_t windows = 0;

  for (int y0 = 0; y0 + window <= a.height(); ++y0) {
    for (int x0 = 0; x0 + window <= a.width(); ++x0) {
      std::uint64_t sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
      for (int y = y0; y < y0 + window; ++y) {
        for (int x = x0; x < x0 + window; ++x) {
          const std::uint64_t va = a.at(x, y);
          const std::uint64_t vb = b.at(x, y);
          sa += va;
          sb += vb;
          saa += va * va;
          sbb += vb * vb;
          sab += va * vb;
        }
      }
      // Integer numerators of n^2 * variance / covariance; exact, so the
      // window-skip test is deterministic.
      const std::uint64_t var_num = (n * saa - sa * sa) + (n * sbb - sb * sb);
      if (var_num == 0 || (sa == 0 && sb == 0)) continue;
      const double mean_a = static_cast<double>(sa) / n_d;
      const double mean_b = static_cast<double>(sb) / n_d;
      const double var_a = static_cast<double>(n * saa - sa * sa) / (n_d * n_d);
      const double var_b = static_cast<double>(n * sbb - sb * sb) / (n_d * n_d);
      const double cov = (static_cast<double>(n) * static_cast<double>(sab) -
                          static_cast<double>(sa) * static_cast<double>(sb)) /
                         (n_d * n_d);
      const double numerator = 4.0 * cov * mean_a * mean_b;
      const double denominator = (var_a + var_b) * (mean_a * mean_a + mean_b * mean_b);
      q_sum += numerator / denominator;
      ++windows;
    }
  }
  if (windows == 0) throw std::invalid_argument("UIQ undefined");
  return std::clamp(q_sum / static_cast<double>(windows), -1.0, 1.0);
}

/// All seven measures for one (original, enhanced) pair. Measures that are
/// undefined for the pair (constant images, all-zero SNR, image smaller than
/// the UIQ window) are reported as absent rather than as silent zeros.
inline MetricReport full_report(const GrayImage& original, const GrayImage& enhanced) {
  detail::require_same_dimensions(original, enhanced);
  MetricReport report;
  report.mse = mse(original, enhanced);
  report.rmse = std::sqrt(report.mse);
  report.mae = mae(original, enhanced);
  report.psnr = psnr(original, enhanced);
  try {
    report.snr = snr(original, enhanced);
  } catch (const std::invalid_argument&) {
  }
  try {
    report.pcc = pcc(original, enhanced);
  } catch (const std::invalid_argument&) {
  }
  try {
    report.uiq = uiq(original, enhanced);
  } catch (const std::invalid_argument&) {
  }
  return report;
}

}  // namespace histeq

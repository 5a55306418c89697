#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "histeq/metrics.hpp"
#include "support.hpp"

using histeq::GrayImage;
using testsupport::Rng;

namespace {

GrayImage gradient_8x8() {
  std::vector<std::uint8_t> pixels(64);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      pixels[static_cast<std::size_t>(y * 8 + x)] = static_cast<std::uint8_t>(16 * (x + y) + 10);
    }
  }
  return {8, 8, std::move(pixels)};
}

GrayImage negated(const GrayImage& img) {
  GrayImage out = img;
  for (std::uint8_t& p : out.pixels()) p = static_cast<std::uint8_t>(255 - p);
  return out;
}

}  // namespace

TEST_CASE("mse") {
  const GrayImage x(2, 1, {40, 90});
  CHECK(histeq::mse(x, x) == 0.0);
  CHECK(histeq::mse(GrayImage(2, 1, {0, 0}), GrayImage(2, 1, {10, 10})) == 100.0);
  CHECK(histeq::mse(GrayImage(2, 1, {0, 255}), GrayImage(2, 1, {255, 0})) == 65025.0);
  CHECK_THROWS_WITH(histeq::mse(x, GrayImage(1, 2, {0, 0})), "image dimension mismatch");
}

TEST_CASE("rmse") {
  const GrayImage x(2, 1, {40, 90});
  CHECK(histeq::rmse(x, x) == 0.0);
  CHECK(histeq::rmse(GrayImage(2, 1, {0, 0}), GrayImage(2, 1, {10, 10})) == 10.0);
  CHECK(histeq::rmse(GrayImage(2, 1, {3, 4}), GrayImage(2, 1, {0, 0})) ==
        Catch::Approx(std::sqrt(12.5)).margin(1e-12));
}

TEST_CASE("psnr") {
  const GrayImage x(2, 1, {40, 90});
  CHECK(std::isinf(histeq::psnr(x, x)));
  CHECK(histeq::psnr(x, x) > 0);
  CHECK(histeq::psnr(GrayImage(1, 1, {0}), GrayImage(1, 1, {255})) == 0.0);
  CHECK(histeq::psnr(GrayImage(2, 1, {0, 0}), GrayImage(2, 1, {10, 10})) ==
        Catch::Approx(10.0 * std::log10(650.25)).margin(1e-12));
}

TEST_CASE("snr") {
  const GrayImage signal(1, 1, {100});
  CHECK(std::isinf(histeq::snr(signal, signal)));
  CHECK(histeq::snr(GrayImage(1, 1, {100}), GrayImage(1, 1, {110})) ==
        Catch::Approx(20.0).margin(1e-9));
  const double negative_inf = histeq::snr(GrayImage(1, 1, {0}), GrayImage(1, 1, {10}));
  CHECK(std::isinf(negative_inf));
  CHECK(negative_inf < 0);
  CHECK_THROWS_WITH(histeq::snr(GrayImage(2, 2, 0), GrayImage(2, 2, 0)), "undefined SNR");
}

TEST_CASE("mae") {
  const GrayImage x(2, 1, {40, 90});
  CHECK(histeq::mae(x, x) == 0.0);
  CHECK(histeq::mae(GrayImage(2, 1, {40, 90}), GrayImage(2, 1, {47, 97})) == 7.0);
  CHECK(histeq::mae(GrayImage(2, 1, {0, 10}), GrayImage(2, 1, {5, 0})) == 7.5);
}

TEST_CASE("pcc") {
  const GrayImage x(3, 1, {0, 50, 100});
  CHECK(histeq::pcc(x, x) == Catch::Approx(1.0).margin(1e-12));
  CHECK(histeq::pcc(x, negated(x)) == Catch::Approx(-1.0).margin(1e-12));
  CHECK(histeq::pcc(x, GrayImage(3, 1, {3, 103, 203})) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("pcc is undefined for constant images") {
  const GrayImage flat(2, 2, 9);
  const GrayImage varied(2, 2, {1, 2, 3, 4});
  CHECK_THROWS_WITH(histeq::pcc(flat, varied), "undefined correlation");
  CHECK_THROWS_WITH(histeq::pcc(varied, flat), "undefined correlation");
}

TEST_CASE("uiq of an image with itself is one") {
  const GrayImage img = gradient_8x8();
  CHECK(histeq::uiq(img, img) == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("uiq is negative against the negated image") {
  const GrayImage img = gradient_8x8();
  CHECK(histeq::uiq(img, negated(img)) < 0.0);
}

TEST_CASE("uiq window and degeneracy rules") {
  const GrayImage img = gradient_8x8();
  CHECK_THROWS_WITH(histeq::uiq(GrayImage(4, 4, 0), GrayImage(4, 4, 0)),
                    "image smaller than window");
  CHECK_NOTHROW(histeq::uiq(GrayImage(4, 4, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16}),
                            GrayImage(4, 4, 1), 4));
  CHECK_THROWS_WITH(histeq::uiq(GrayImage(8, 8, 5), GrayImage(8, 8, 9)), "UIQ undefined");
  CHECK_THROWS_AS(histeq::uiq(img, img, 0), std::invalid_argument);
}

TEST_CASE("full_report identity row") {
  const GrayImage img = gradient_8x8();
  const histeq::MetricReport r = histeq::full_report(img, img);
  CHECK(r.mse == 0.0);
  CHECK(r.rmse == 0.0);
  CHECK(r.mae == 0.0);
  CHECK(std::isinf(r.psnr));
  REQUIRE(r.snr.has_value());
  CHECK(std::isinf(*r.snr));
  REQUIRE(r.pcc.has_value());
  CHECK(*r.pcc == Catch::Approx(1.0).margin(1e-9));
  REQUIRE(r.uiq.has_value());
  CHECK(*r.uiq == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("full_report marks undefined metrics instead of zeroing them") {
  const GrayImage flat(8, 8, 20);
  const GrayImage varied = gradient_8x8();
  const histeq::MetricReport r = histeq::full_report(flat, varied);
  CHECK_FALSE(r.pcc.has_value());
  CHECK(r.mse > 0.0);
  CHECK(r.snr.has_value());

  // too small for the default 8x8 window
  const histeq::MetricReport small =
      histeq::full_report(GrayImage(2, 2, {1, 2, 3, 4}), GrayImage(2, 2, {2, 3, 4, 5}));
  CHECK_FALSE(small.uiq.has_value());
  CHECK(small.pcc.has_value());
}

TEST_CASE("rmse squared equals mse") {
  Rng rng(41);
  for (int round = 0; round < 200; ++round) {
    const int w = rng.next_int(1, 16);
    const int h = rng.next_int(1, 16);
    const GrayImage a = testsupport::random_image(w, h, rng);
    const GrayImage b = testsupport::random_image(w, h, rng);
    const double r = histeq::rmse(a, b);
    CHECK(std::abs(r * r - histeq::mse(a, b)) <= 1e-9);
    CHECK(histeq::mae(a, b) <= r + 1e-12);
  }
}

TEST_CASE("all metrics except the dB ratios are symmetric") {
  Rng rng(42);
  for (int round = 0; round < 20; ++round) {
    const GrayImage a = testsupport::random_image(9, 9, rng);
    const GrayImage b = testsupport::random_image(9, 9, rng);
    CHECK(histeq::mse(a, b) == histeq::mse(b, a));
    CHECK(histeq::rmse(a, b) == histeq::rmse(b, a));
    CHECK(histeq::mae(a, b) == histeq::mae(b, a));
    CHECK(histeq::pcc(a, b) == Catch::Approx(histeq::pcc(b, a)).margin(1e-12));
    CHECK(histeq::uiq(a, b) == Catch::Approx(histeq::uiq(b, a)).margin(1e-12));
  }
}

TEST_CASE("psnr strictly decreases as mse grows") {
  double last_psnr = std::numeric_limits<double>::infinity();
  double last_mse = -1.0;
  for (int k : {1, 3, 9, 40, 255}) {
    const GrayImage a(4, 4, 0);
    const GrayImage b(4, 4, static_cast<std::uint8_t>(k));
    const double m = histeq::mse(a, b);
    const double p = histeq::psnr(a, b);
    CHECK(m > last_mse);
    CHECK(p < last_psnr);
    last_mse = m;
    last_psnr = p;
  }
}

TEST_CASE("pcc and uiq stay inside [-1, 1]") {
  Rng rng(43);
  for (int round = 0; round < 50; ++round) {
    const GrayImage a = testsupport::random_image(12, 12, rng);
    const GrayImage b = testsupport::random_image(12, 12, rng);
    const double c = histeq::pcc(a, b);
    const double q = histeq::uiq(a, b);
    CHECK(c >= -1.0);
    CHECK(c <= 1.0);
    CHECK(q >= -1.0);
    CHECK(q <= 1.0);
  }
}

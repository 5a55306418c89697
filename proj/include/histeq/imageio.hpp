#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <png.h>

#include "histeq/image.hpp"

namespace histeq {

/// On-disk formats this library reads and writes. The format of an input
/// file is always detected from its magic bytes, never from the extension.
enum class ImageFormat { PgmAscii, PgmBinary, Png };

class IoError : public std::runtime_error {
 public:
  enum class Kind { UnreadableFile, UnsupportedFormat, MalformedHeader, TruncatedData, WriteFailure };

  IoError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

namespace detail {

// Loader-side sanity caps; a header announcing more than this is rejected
// rather than allocated.
inline constexpr int kMaxLoadDimension = 1'000'000;
inline constexpr std::uint64_t kMaxLoadPixels = std::uint64_t{1} << 26;

inline long long stream_offset(std::istream& in) {
  const bool failed = in.fail();
  in.clear();
  const auto pos = in.tellg();
  if (failed) in.setstate(std::ios::failbit);
  return pos == std::istream::pos_type(-1) ? -1 : static_cast<long long>(pos);
}

inline std::string at_offset(std::istream& in) {
  const long long off = stream_offset(in);
  return off < 0 ? std::string{} : " at byte " + std::to_string(off);
}

// Reads the next header/raster token, skipping whitespace and '#' comments.
// The single whitespace character terminating the token is consumed, which
// is exactly the delimiter the binary raster must follow.
inline bool next_pgm_token(std::istream& in, std::string& token) {
  token.clear();
  int c = in.get();
  while (c != std::istream::traits_type::eof()) {
    if (c == '#') {
      do {
        c = in.get();
      } while (c != std::istream::traits_type::eof() && c != '\n');
      if (c != std::istream::traits_type::eof()) c = in.get();
    } else if (std::isspace(c) != 0) {
      c = in.get();
    } else {
      break;
    }
  }
  if (c == std::istream::traits_type::eof()) return false;
  while (c != std::istream::traits_type::eof() && std::isspace(c) == 0 && c != '#') {
    token.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (c == '#') in.unget();
  return !token.empty();
}

inline std::uint64_t parse_header_number(std::istream& in, const char* field) {
  std::string token;
  if (!next_pgm_token(in, token)) {
    throw IoError(IoError::Kind::MalformedHeader,
                  std::string("malformed header: missing ") + field + at_offset(in));
  }
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw IoError(IoError::Kind::MalformedHeader,
                  std::string("malformed header: invalid ") + field + " '" + token + "'" +
                      at_offset(in));
  }
  return value;
}

inline std::uint8_t rescale_sample(std::uint64_t value, std::uint64_t maxval) {
  if (value > maxval) value = maxval;
  if (maxval == 255) return static_cast<std::uint8_t>(value);
  return static_cast<std::uint8_t>(
      std::lround(static_cast<double>(value) * 255.0 / static_cast<double>(maxval)));
}

inline GrayImage decode_pgm(std::istream& in) {
  std::string magic;
  if (!next_pgm_token(in, magic) || (magic != "P2" && magic != "P5")) {
    throw IoError(IoError::Kind::UnsupportedFormat, "unsupported magic '" + magic + "'");
  }
  const bool binary = magic == "P5";

  const std::uint64_t width = parse_header_number(in, "width");
  const std::uint64_t height = parse_header_number(in, "height");
  const std::uint64_t maxval = parse_header_number(in, "maxval");
  if (width < 1 || height < 1 || width > kMaxLoadDimension || height > kMaxLoadDimension ||
      width * height > kMaxLoadPixels) {
    throw IoError(IoError::Kind::MalformedHeader, "malformed header: bad image dimensions " +
                                                      std::to_string(width) + "x" +
                                                      std::to_string(height));
  }
  if (maxval < 1 || maxval > 65535) {
    throw IoError(IoError::Kind::MalformedHeader,
                  "malformed header: maxval " + std::to_string(maxval) + " out of range");
  }

  const std::size_t count = static_cast<std::size_t>(width * height);
  std::vector<std::uint8_t> pixels(count);

  if (binary) {
    const int bytes_per_sample = maxval > 255 ? 2 : 1;
    const long long raster_start = stream_offset(in);
    std::vector<std::uint8_t> raw(count * static_cast<std::size_t>(bytes_per_sample));
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
      const long long off = raster_start < 0 ? -1 : raster_start + in.gcount();
      throw IoError(IoError::Kind::TruncatedData,
                    "truncated pixel data" +
                        (off < 0 ? std::string{} : " at byte " + std::to_string(off)));
    }
    for (std::size_t i = 0; i < count; ++i) {
      const std::uint64_t sample =
          bytes_per_sample == 1
              ? raw[i]
              : (static_cast<std::uint64_t>(raw[2 * i]) << 8) | raw[2 * i + 1];
      pixels[i] = rescale_sample(sample, maxval);
    }
  } else {
    std::string token;
    for (std::size_t i = 0; i < count; ++i) {
      if (!next_pgm_token(in, token)) {
        throw IoError(IoError::Kind::TruncatedData, "truncated pixel data" + at_offset(in));
      }
      std::uint64_t sample = 0;
      const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), sample);
      if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw IoError(IoError::Kind::TruncatedData,
                      "truncated pixel data: invalid sample '" + token + "'" + at_offset(in));
      }
      pixels[i] = rescale_sample(sample, maxval);
    }
  }
  return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
}

inline void png_read_callback(png_structp png, png_bytep out, png_size_t count) {
  auto* in = static_cast<std::istream*>(png_get_io_ptr(png));
  in->read(reinterpret_cast<char*>(out), static_cast<std::streamsize>(count));
  if (static_cast<png_size_t>(in->gcount()) != count) png_error(png, "unexpected end of stream");
}

inline void png_write_callback(png_structp png, png_bytep data, png_size_t count) {
  auto* out = static_cast<std::ostream*>(png_get_io_ptr(png));
  out->write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count));
  if (!out->good()) png_error(png, "write failed");
}

inline void png_flush_callback(png_structp png) {
  static_cast<std::ostream*>(png_get_io_ptr(png))->flush();
}

// libpng's default handlers print to stderr before bailing out; errors here
// surface as IoError instead.
[[noreturn]] inline void png_error_handler(png_structp png, png_const_charp) {
  png_longjmp(png, 1);
}

inline void png_warning_handler(png_structp, png_const_charp) {}

/// BT.601 luma, rounded half away from zero.
inline std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const long y = std::lround(0.299 * r + 0.587 * g + 0.114 * b);
  return static_cast<std::uint8_t>(std::min(y, long{kMaxIntensity}));
}

inline GrayImage decode_png(std::istream& in) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_handler, png_warning_handler);
  png_infop info = png != nullptr ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr) {
    if (png != nullptr) png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(IoError::Kind::UnreadableFile, "failed to initialize PNG reader");
  }

  // No locals with destructors may be created after this point inside libpng
  // call frames; the error path longjmps back here and we rethrow normally.
  std::vector<std::uint8_t> interleaved;
  std::vector<png_bytep> row_pointers;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(IoError::Kind::TruncatedData, "truncated or corrupt PNG data");
  }

  png_set_read_fn(png, &in, png_read_callback);
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);

  if (width < 1 || height < 1 || width > kMaxLoadDimension || height > kMaxLoadDimension ||
      static_cast<std::uint64_t>(width) * height > kMaxLoadPixels) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(IoError::Kind::MalformedHeader, "malformed header: bad image dimensions");
  }
  if (bit_depth != 8) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(IoError::Kind::UnsupportedFormat,
                  "unsupported PNG format: only 8-bit samples are supported");
  }
  if (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_GRAY_ALPHA &&
      color_type != PNG_COLOR_TYPE_RGB && color_type != PNG_COLOR_TYPE_RGB_ALPHA) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(IoError::Kind::UnsupportedFormat,
                  "unsupported PNG format: expected grayscale, RGB or RGBA");
  }

  if (color_type == PNG_COLOR_TYPE_GRAY_ALPHA || color_type == PNG_COLOR_TYPE_RGB_ALPHA) {
    png_set_strip_alpha(png);
  }
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  const int channels = png_get_channels(png, info);
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  interleaved.resize(row_bytes * height);
  row_pointers.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) row_pointers[y] = interleaved.data() + y * row_bytes;

  png_read_image(png, row_pointers.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  GrayImage out(static_cast<int>(width), static_cast<int>(height));
  for (png_uint_32 y = 0; y < height; ++y) {
    const std::uint8_t* row = interleaved.data() + y * row_bytes;
    for (png_uint_32 x = 0; x < width; ++x) {
      out.at(static_cast<int>(x), static_cast<int>(y)) =
          channels == 1 ? row[x] : luminance(row[3 * x], row[3 * x + 1], row[3 * x + 2]);
    }
  }
  return out;
}

inline void encode_png(const GrayImage& img, std::ostream& out) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_handler, png_warning_handler);
  png_infop info = png != nullptr ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr) {
    if (png != nullptr) png_destroy_write_struct(&png, &info);
    throw IoError(IoError::Kind::WriteFailure, "failed to initialize PNG writer");
  }

  std::vector<std::uint8_t> pixels(img.pixels().begin(), img.pixels().end());
  std::vector<png_bytep> row_pointers;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError(IoError::Kind::WriteFailure, "PNG write failed");
  }

  png_set_write_fn(png, &out, png_write_callback, png_flush_callback);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()),
               static_cast<png_uint_32>(img.height()), 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  row_pointers.resize(static_cast<std::size_t>(img.height()));
  for (int y = 0; y < img.height(); ++y) {
    row_pointers[static_cast<std::size_t>(y)] =
        pixels.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(img.width());
  }
  png_write_image(png, row_pointers.data());
  png_write_end(png, info);
  png_destroy_write_struct(&png, &info);
}

inline void encode_pgm(const GrayImage& img, std::ostream& out, bool binary) {
  out << (binary ? "P5" : "P2") << '\n' << img.width() << ' ' << img.height() << '\n' << "255\n";
  if (binary) {
    out.write(reinterpret_cast<const char*>(img.pixels().data()),
              static_cast<std::streamsize>(img.pixel_count()));
  } else {
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        if (x > 0) out << ' ';
        out << static_cast<int>(img.at(x, y));
      }
      out << '\n';
    }
  }
}

}  // namespace detail

/// Decodes a PGM (P2/P5) or PNG image from a seekable stream, sniffing the
/// format from the magic bytes. Color input collapses to grayscale through
/// the BT.601 luminance weights; PGM samples are rescaled to maxval 255.
inline GrayImage decode_image(std::istream& in) {
  const int first = in.peek();
  if (first == 'P') return detail::decode_pgm(in);
  if (first == 0x89) return detail::decode_png(in);
  if (first == std::istream::traits_type::eof()) {
    throw IoError(IoError::Kind::TruncatedData, "truncated pixel data: empty input");
  }
  throw IoError(IoError::Kind::UnsupportedFormat, "unsupported magic byte 0x" + [&] {
    char buf[3];
    std::snprintf(buf, sizeof buf, "%02x", static_cast<unsigned>(first) & 0xffu);
    return std::string(buf);
  }());
}

inline void encode_image(const GrayImage& img, std::ostream& out, ImageFormat format) {
  switch (format) {
    case ImageFormat::PgmAscii:
      detail::encode_pgm(img, out, false);
      break;
    case ImageFormat::PgmBinary:
      detail::encode_pgm(img, out, true);
      break;
    case ImageFormat::Png:
      detail::encode_png(img, out);
      break;
  }
  if (!out.good()) throw IoError(IoError::Kind::WriteFailure, "image write failed");
}

inline GrayImage load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(IoError::Kind::UnreadableFile, "cannot open file: " + path.string());
  }
  try {
    return decode_image(in);
  } catch (const IoError& e) {
    throw IoError(e.kind(), path.string() + ": " + e.what());
  }
}

inline void save_image(const GrayImage& img, const std::filesystem::path& path,
                       ImageFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError(IoError::Kind::WriteFailure, "cannot open file for writing: " + path.string());
  }
  try {
    encode_image(img, out, format);
  } catch (const IoError& e) {
    throw IoError(e.kind(), path.string() + ": " + e.what());
  }
  out.flush();
  if (!out.good()) {
    throw IoError(IoError::Kind::WriteFailure, "image write failed: " + path.string());
  }
}

/// Output format implied by a file extension (.pgm/.pnm/.png), if any.
inline std::optional<ImageFormat> format_for_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".pgm" || ext == ".pnm") return ImageFormat::PgmBinary;
  if (ext == ".png") return ImageFormat::Png;
  return std::nullopt;
}

}  // namespace histeq

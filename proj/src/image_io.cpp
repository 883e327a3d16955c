#include <png.h>

#include <cctype>
#include <fstream>
#include <iterator>

#include "mrpods/error.hpp"
#include "mrpods/image_io.hpp"

namespace mrpods {
namespace {

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, const Bytes& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

class PnmReader {
 public:
  explicit PnmReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  int next_int() {
    skip_space();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) throw Error(ErrorCode::Io, "malformed PNM header");
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > (1 << 24)) throw Error(ErrorCode::Io, "PNM dimension too large");
    }
    return static_cast<int>(v);
  }
  // Exactly one whitespace octet separates the header from the raster.
  std::span<const std::uint8_t> raster() {
    ++pos_;
    if (pos_ > bytes_.size()) throw Error(ErrorCode::Io, "truncated PNM");
    return bytes_.subspan(pos_);
  }

 private:
  void skip_space() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

}  // namespace

RasterImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::Io, std::string("PNG decode failed: ") + image.message);
  }
  image.format = PNG_FORMAT_GRAY;
  RasterImage img(static_cast<int>(image.width), static_cast<int>(image.height));
  if (!png_image_finish_read(&image, nullptr, img.pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::Io, "PNG decode failed: " + msg);
  }
  return img;
}

Bytes encode_png(const RasterImage& img) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.pixels.data(), 0, nullptr)) {
    throw Error(ErrorCode::Io, std::string("PNG encode failed: ") + image.message);
  }
  Bytes out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.pixels.data(), 0, nullptr)) {
    throw Error(ErrorCode::Io, std::string("PNG encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

Bytes encode_pnm(const RasterImage& img, ImageFormat format) {
  const bool bitmap = format == ImageFormat::Pbm;
  const std::string head = (bitmap ? "P4\n" : "P5\n") + std::to_string(img.width) + " " +
                           std::to_string(img.height) + (bitmap ? "\n" : "\n255\n");
  Bytes out(head.begin(), head.end());
  if (!bitmap) {
    out.insert(out.end(), img.pixels.begin(), img.pixels.end());
    return out;
  }
  const std::size_t stride = (static_cast<std::size_t>(img.width) + 7) / 8;
  const std::size_t start = out.size();
  out.resize(start + stride * img.height, 0);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      if (img.at(x, y) < 128) out[start + y * stride + x / 8] |= static_cast<std::uint8_t>(0x80u >> (x % 8));
    }
  }
  return out;
}

RasterImage decode_pnm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 3 || bytes[0] != 'P' || (bytes[1] != '4' && bytes[1] != '5')) {
    throw Error(ErrorCode::Io, "not a binary PBM/PGM image");
  }
  const bool bitmap = bytes[1] == '4';
  PnmReader reader(bytes);
  const int w = reader.next_int();
  const int h = reader.next_int();
  const int maxval = bitmap ? 1 : reader.next_int();
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) throw Error(ErrorCode::Io, "unsupported PNM parameters");
  const auto raster = reader.raster();
  RasterImage img(w, h);
  if (bitmap) {
    const std::size_t stride = (static_cast<std::size_t>(w) + 7) / 8;
    if (raster.size() < stride * h) throw Error(ErrorCode::Io, "truncated PBM raster");
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        img.at(x, y) = (raster[y * stride + x / 8] >> (7 - x % 8)) & 1 ? 0 : 255;
      }
    }
  } else {
    if (raster.size() < img.pixels.size()) throw Error(ErrorCode::Io, "truncated PGM raster");
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
      img.pixels[i] = static_cast<std::uint8_t>(raster[i] * 255 / maxval);
    }
  }
  return img;
}

RasterImage read_image(const std::filesystem::path& path) {
  const Bytes bytes = read_file(path);
  static constexpr std::uint8_t kPngSignature[] = {0x89, 'P', 'N', 'G'};
  if (bytes.size() >= 4 && std::equal(std::begin(kPngSignature), std::end(kPngSignature), bytes.begin())) {
    return decode_png(bytes);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P') return decode_pnm(bytes);
  throw Error(ErrorCode::Io, "unrecognized image format: " + path.string());
}

void write_image(const RasterImage& img, const std::filesystem::path& path, ImageFormat format) {
  write_file(path, format == ImageFormat::Png ? encode_png(img) : encode_pnm(img, format));
}

std::string page_image_name(const std::string& stem, std::uint32_t index) {
  return stem + "_p" + std::to_string(index) + ".png";
}

}  // namespace mrpods

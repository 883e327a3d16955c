#pragma once

// Reading and writing page images: 8-bit grayscale PNG, binary PGM (P5) and
// binary PBM (P4).

#include <filesystem>
#include <string>

#include "mrpods/raster.hpp"

namespace mrpods {

enum class ImageFormat { Png, Pgm, Pbm };

// Detects the format from the file signature. Throws Error(Io).
RasterImage read_image(const std::filesystem::path& path);

// Colour PNGs are reduced to luma. Throws Error(Io).
RasterImage decode_png(std::span<const std::uint8_t> bytes);
Bytes encode_png(const RasterImage& img);

void write_image(const RasterImage& img, const std::filesystem::path& path, ImageFormat format = ImageFormat::Png);

// PBM stores ink as 1 for pixels darker than mid-grey.
Bytes encode_pnm(const RasterImage& img, ImageFormat format);
RasterImage decode_pnm(std::span<const std::uint8_t> bytes);

// "<stem>_p<index>.png"
std::string page_image_name(const std::string& stem, std::uint32_t index);

}  // namespace mrpods

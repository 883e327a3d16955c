#pragma once

// Raster side of the codec: drawing pages as grayscale bitmaps and reading
// them back (grid location, cell sampling, header recovery, ECC).

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mrpods/sheet.hpp"

namespace mrpods {

// Row-major 8-bit grayscale; 0 is ink, 255 is paper.
struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  RasterImage() = default;
  RasterImage(int w, int h, std::uint8_t fill = 255)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  // Bilinear sample at a continuous position; pixel (i, j) is centred on
  // (i + 0.5, j + 0.5). Outside the image reads as paper.
  double sample(double x, double y) const;
  bool operator==(const RasterImage&) const = default;
};

struct PointF {
  double x = 0;
  double y = 0;
};

// Maps continuous cell coordinates to pixels. (0, 0) is the outer corner of
// the frame; cell (c, r) is centred on (c + 0.5, r + 0.5).
struct GridGeometry {
  PointF origin_px;  // centre of cell (0, 0)
  double cell_pitch_px = 0;
  double rotation_deg = 0;
  int cols = 0;
  int rows = 0;
  // Outer frame corners: top-left, top-right, bottom-left, bottom-right.
  std::array<PointF, 4> corners{};

  PointF to_pixel(double col, double row) const;
};

// Full cell grid of a page: 1 = ink.
struct CellGrid {
  int cols = 0;
  int rows = 0;
  std::vector<std::uint8_t> bits;

  std::uint8_t at(int c, int r) const { return bits[static_cast<std::size_t>(r) * cols + c]; }
  std::uint8_t& at(int c, int r) { return bits[static_cast<std::size_t>(r) * cols + c]; }
};

CellGrid page_cells(const Page& page, const SheetLayout& layout);

// True for frame and timing-ring cells, which render as solid squares.
bool is_border_cell(int col, int row, int cols, int rows);

// Dot side length in pixels for a cell pitch and coverage percentage.
int dot_side_px(double cell_px, int dot_size_percent);

// Throws DpiTooLow when render_dpi < dots_per_inch.
RasterImage render(const Page& page, const SheetConfig& config, int render_dpi = 600);
RasterImage render_cells(const CellGrid& cells, const SheetConfig& config, int render_dpi);

// Throws GridNotFound or ExcessiveSkew.
GridGeometry locate_grid(const RasterImage& img);

struct CellSample {
  int cols = 0;
  int rows = 0;
  std::vector<std::uint8_t> bits;  // 1 = ink
  std::vector<float> confidence;   // 0..1, distance from the threshold
  std::vector<std::uint8_t> erased;
  double threshold = 0;
  bool used_local_threshold = false;

  std::size_t index(int c, int r) const { return static_cast<std::size_t>(r) * cols + c; }
  std::size_t erasure_count() const;
};

struct SampleOptions {
  double erasure_cutoff = 0.15;
  // Sampling footprint radius in cells around each centre.
  double footprint = 0.2;
};

CellSample sample_cells(const RasterImage& img, const GridGeometry& geom, const SampleOptions& options = {});

enum class HeaderSource { Both, TopOnly, BottomOnly };

struct DecodeReport {
  HeaderSource header_source = HeaderSource::Both;
  int header_copies_valid = 0;
  int header_copies_total = 0;
  int erased_cells = 0;
  int raw_crc_failures = 0;
  int corrected_symbols = 0;
  int erased_symbols = 0;
  int failed_codewords = 0;
  int blocks_total = 0;
  std::vector<std::uint32_t> failed_blocks;  // global addresses
  bool complete() const { return failed_codewords == 0; }
};

struct SheetDecode {
  Page page;
  DecodeReport report;
  GridGeometry geometry;
};

// Throws GridNotFound, ExcessiveSkew, BadHeaderCrc, HeaderConflict, and
// UncorrectableCodeword when not a single block survives.
SheetDecode decode_sheet(const RasterImage& img, const SampleOptions& options = {});

// Decoding from already-sampled cells; the geometry is only echoed back.
SheetDecode decode_cells(const CellSample& cells, const GridGeometry& geom = {});

// Bit error rate between two samples over the area inside the frame. Grids of
// different sizes compare as 0.5.
double bit_error_rate(const CellSample& observed, const CellGrid& truth);

// Otsu threshold over a histogram of `values` quantized to 0..255.
double otsu_threshold(const std::vector<double>& values);

}  // namespace mrpods

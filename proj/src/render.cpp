#include <cmath>

#include "mrpods/error.hpp"
#include "mrpods/raster.hpp"

namespace mrpods {
namespace {

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

void fill_rect(RasterImage& img, int x0, int y0, int x1, int y1) {
  x0 = std::max(x0, 0);
  y0 = std::max(y0, 0);
  x1 = std::min(x1, img.width);
  y1 = std::min(y1, img.height);
  for (int y = y0; y < y1; ++y) {
    std::fill(img.pixels.begin() + static_cast<std::size_t>(y) * img.width + x0,
              img.pixels.begin() + static_cast<std::size_t>(y) * img.width + x1, 0);
  }
}

void put_bits(CellGrid& grid, int col0, int row0, int width, std::span<const std::uint8_t> bytes,
              std::size_t first_bit, std::size_t nbits) {
  for (std::size_t i = 0; i < nbits; ++i) {
    const std::size_t bit = first_bit + i;
    const int c = col0 + static_cast<int>(bit % width);
    const int r = row0 + static_cast<int>(bit / width);
    grid.at(c, r) = (bytes[i >> 3] >> (7 - (i & 7))) & 1u;
  }
}

}  // namespace

double RasterImage::sample(double x, double y) const {
  const double fx = x - 0.5, fy = y - 0.5;
  const int x0 = static_cast<int>(std::floor(fx)), y0 = static_cast<int>(std::floor(fy));
  const double ax = fx - x0, ay = fy - y0;
  auto px = [&](int xx, int yy) -> double {
    if (xx < 0 || yy < 0 || xx >= width || yy >= height) return 255.0;
    return pixels[static_cast<std::size_t>(yy) * width + xx];
  };
  if (x0 >= 0 && y0 >= 0 && x0 + 1 < width && y0 + 1 < height) {
    const std::uint8_t* row = pixels.data() + static_cast<std::size_t>(y0) * width + x0;
    const double top = row[0] + ax * (row[1] - row[0]);
    const double bot = row[width] + ax * (row[width + 1] - row[width]);
    return top + ay * (bot - top);
  }
  const double top = px(x0, y0) + ax * (px(x0 + 1, y0) - px(x0, y0));
  const double bot = px(x0, y0 + 1) + ax * (px(x0 + 1, y0 + 1) - px(x0, y0 + 1));
  return top + ay * (bot - top);
}

PointF GridGeometry::to_pixel(double col, double row) const {
  const double u = col / cols, v = row / rows;
  const auto& [tl, tr, bl, br] = corners;
  return PointF{tl.x + (tr.x - tl.x) * u + (bl.x - tl.x) * v + (br.x - bl.x - tr.x + tl.x) * u * v,
                tl.y + (tr.y - tl.y) * u + (bl.y - tl.y) * v + (br.y - bl.y - tr.y + tl.y) * u * v};
}

bool is_border_cell(int col, int row, int cols, int rows) {
  return std::min({col, row, cols - 1 - col, rows - 1 - row}) < kBorderCells;
}

int dot_side_px(double cell_px, int dot_size_percent) {
  return std::max(1, round_half_up(cell_px * std::sqrt(dot_size_percent / 100.0)));
}

CellGrid page_cells(const Page& page, const SheetLayout& layout) {
  CellGrid grid;
  grid.cols = layout.grid_cols;
  grid.rows = layout.grid_rows;
  grid.bits.assign(static_cast<std::size_t>(grid.cols) * grid.rows, 0);

  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      const int ring = std::min({c, r, grid.cols - 1 - c, grid.rows - 1 - r});
      if (ring < kFrameCells) {
        grid.at(c, r) = 1;
      } else if (ring == kFrameCells) {
        const bool horizontal = (r == kFrameCells || r == grid.rows - 1 - kFrameCells);
        grid.at(c, r) = horizontal ? (c % 2 == 0) : (r % 2 == 0);
      }
    }
  }

  const HeaderRecord record = header_serialize(page.header);
  const Codeword copy = rs_encode(record, header_rs_params());
  for (int band : {layout.top_band_row(), layout.bottom_band_row()}) {
    for (int k = 0; k < layout.header_copies; ++k) {
      put_bits(grid, kBorderCells, band, layout.data_cols, copy.symbols,
               static_cast<std::size_t>(k) * kHeaderCopyBits, kHeaderCopyBits);
    }
  }

  const std::uint32_t first = page.header.page_index * layout.blocks_per_page;
  std::vector<const DataBlock*> by_slot(layout.blocks_per_page, nullptr);
  for (const DataBlock& b : page.blocks) {
    if (b.index() >= first && b.index() - first < static_cast<std::uint32_t>(layout.blocks_per_page)) {
      by_slot[b.index() - first] = &b;
    }
  }
  for (int tr = 0; tr < layout.block_rows; ++tr) {
    for (int tc = 0; tc < layout.block_cols; ++tc) {
      const int r0 = layout.tile_origin_row() + tr * kTileCells;
      const int c0 = layout.tile_origin_col() + tc * kTileCells;
      for (int i = 0; i < kTileCells; ++i) {
        grid.at(c0 + i, r0) = (i % 2 == 0);
        grid.at(c0, r0 + i) = (i % 2 == 0);
      }
      const DataBlock* block = by_slot[tr * layout.block_cols + tc];
      if (!block) continue;
      const auto bytes = block->to_bytes();
      put_bits(grid, c0 + kTileGutter, r0 + kTileGutter, kBlockSide, bytes, 0, kBlockBytes * 8);
    }
  }
  return grid;
}

RasterImage render_cells(const CellGrid& cells, const SheetConfig& config, int render_dpi) {
  if (render_dpi < config.dots_per_inch) {
    throw Error(ErrorCode::DpiTooLow, "render_dpi " + std::to_string(render_dpi) + " is below dots_per_inch " +
                                          std::to_string(config.dots_per_inch));
  }
  const double pitch = static_cast<double>(render_dpi) / config.dots_per_inch;
  if (pitch <= 2.0) {
    throw Error(ErrorCode::DpiTooLow, "render_dpi must give more than 2 pixels per cell");
  }
  RasterImage img(round_half_up(config.page_width_in * render_dpi), round_half_up(config.page_height_in * render_dpi));
  const double origin = config.margin_in * render_dpi;
  const int side = dot_side_px(pitch, config.dot_size_percent);

  for (int r = 0; r < cells.rows; ++r) {
    for (int c = 0; c < cells.cols; ++c) {
      if (!cells.at(c, r)) continue;
      if (is_border_cell(c, r, cells.cols, cells.rows)) {
        fill_rect(img, round_half_up(origin + c * pitch), round_half_up(origin + r * pitch),
                  round_half_up(origin + (c + 1) * pitch), round_half_up(origin + (r + 1) * pitch));
      } else {
        const int x = round_half_up(origin + (c + 0.5) * pitch - side / 2.0);
        const int y = round_half_up(origin + (r + 0.5) * pitch - side / 2.0);
        fill_rect(img, x, y, x + side, y + side);
      }
    }
  }
  return img;
}

RasterImage render(const Page& page, const SheetConfig& config, int render_dpi) {
  validate(config);
  const SheetLayout layout = layout_for(config);
  return render_cells(page_cells(page, layout), config, render_dpi);
}

}  // namespace mrpods

#include <cmath>
#include <sstream>

#include "mrpods/error.hpp"
#include "mrpods/sheet.hpp"

namespace mrpods {
namespace {

int cells_along(double inches, double margin, int dpi) {
  return static_cast<int>(std::floor((inches - 2.0 * margin) * dpi + 1e-9));
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::ConfigInvalid, what);
}

}  // namespace

RsParams header_rs_params() { return RsParams{kHeaderCopyBytes, kHeaderBytes, {20, 44}}; }

RsParams page_rs_params(RedundancyRatio ratio) {
  require(ratio.parity > 0 && ratio.data > 0, "redundancy components must be positive");
  for (int k = kPreferredDataSymbols; k >= 1; --k) {
    const std::uint64_t parity = (static_cast<std::uint64_t>(k) * ratio.parity + ratio.data - 1) / ratio.data;
    if (k + parity <= 255) return redundancy_to_params(ratio, k);
  }
  // Even k = 1 overflows; let redundancy_to_params raise RatioUnrealizable.
  return redundancy_to_params(ratio, 1);
}

void validate(const SheetConfig& c) {
  require(c.dots_per_inch >= 50 && c.dots_per_inch <= 600, "dots_per_inch must lie in [50, 600]");
  require(c.dot_size_percent >= 10 && c.dot_size_percent <= 100, "dot_size_percent must lie in [10, 100]");
  require(c.page_width_in > 0 && c.page_height_in > 0, "page dimensions must be positive");
  require(c.margin_in >= 0, "margin must be non-negative");
  require(c.redundancy.parity > 0 && c.redundancy.data > 0, "redundancy components must be positive");
  const int cols = cells_along(c.page_width_in, c.margin_in, c.dots_per_inch);
  const int rows = cells_along(c.page_height_in, c.margin_in, c.dots_per_inch);
  require(cols >= 16 && rows >= 16, "printable grid must be at least 16x16 cells");
  layout_for(c);
}

int header_band_rows(int data_cols) {
  return std::max(2, (3 * kHeaderCopyBits + data_cols - 1) / data_cols);
}

SheetLayout layout_for_grid(int grid_cols, int grid_rows, const RsParams& rs) {
  SheetLayout l;
  l.grid_cols = grid_cols;
  l.grid_rows = grid_rows;
  l.data_cols = grid_cols - 2 * kBorderCells;
  l.data_rows = grid_rows - 2 * kBorderCells;
  require(l.data_cols >= kTileCells && l.data_rows >= kTileCells, "grid too small for one block tile");
  l.band_rows = header_band_rows(l.data_cols);
  l.header_copies = l.band_rows * l.data_cols / kHeaderCopyBits;
  l.block_cols = l.data_cols / kTileCells;
  l.block_rows = (l.data_rows - 2 * l.band_rows) / kTileCells;
  require(l.block_rows >= 1, "grid too small for header bands plus one block row");
  l.blocks_per_page = l.block_cols * l.block_rows;
  l.rs = rs;
  l.codewords_per_page = static_cast<int>(static_cast<std::int64_t>(l.blocks_per_page) * kBlockPayloadBytes / rs.n);
  require(l.codewords_per_page >= 1, "page too small to hold one codeword");
  l.interleave_depth = l.block_rows;
  return l;
}

SheetLayout layout_for(const SheetConfig& c) {
  require(c.dots_per_inch > 0, "dots_per_inch must be positive");
  const int cols = cells_along(c.page_width_in, c.margin_in, c.dots_per_inch);
  const int rows = cells_along(c.page_height_in, c.margin_in, c.dots_per_inch);
  return layout_for_grid(cols, rows, page_rs_params(c.redundancy));
}

CapacityReport page_capacity(const SheetConfig& config) {
  validate(config);
  const SheetLayout l = layout_for(config);
  CapacityReport r;
  r.grid_cols = l.grid_cols;
  r.grid_rows = l.grid_rows;
  r.rs = l.rs;
  r.raw_dots = static_cast<std::uint64_t>(l.grid_cols) * l.grid_rows;
  const std::uint64_t data_area = static_cast<std::uint64_t>(l.data_cols) * l.data_rows;
  r.border_cells = r.raw_dots - data_area;
  r.header_band_cells = 2ull * l.band_rows * l.data_cols;
  const std::uint64_t bpp = static_cast<std::uint64_t>(l.blocks_per_page);
  r.block_cells = bpp * kBlockSide * kBlockSide;
  r.gutter_cells = bpp * (kTileCells * kTileCells - kBlockSide * kBlockSide);
  r.spare_cells = data_area - r.header_band_cells - r.block_cells - r.gutter_cells;
  r.block_overhead_bytes = bpp * (kBlockBytes - kBlockPayloadBytes);
  r.stream_bytes = l.stream_bytes();
  r.unused_stream_bytes = bpp * kBlockPayloadBytes - r.stream_bytes;
  r.parity_bytes = static_cast<std::uint64_t>(l.codewords_per_page) * l.rs.parity();
  r.usable_payload_bytes = l.data_bytes_per_page();
  return r;
}

std::string CapacityReport::itemize() const {
  std::ostringstream out;
  out << "grid                 " << grid_cols << " x " << grid_rows << " cells\n"
      << "raw dots             " << raw_dots << " (" << raw_dots / 8 << " octets)\n"
      << "- frame + timing     " << border_cells << " cells\n"
      << "- header bands       " << header_band_cells << " cells\n"
      << "- tile gutters       " << gutter_cells << " cells\n"
      << "- spare strips       " << spare_cells << " cells\n"
      << "= block cells        " << block_cells << " cells (" << block_cells / 8 << " octets)\n"
      << "- address + CRC-16   " << block_overhead_bytes << " octets\n"
      << "- stream tail        " << unused_stream_bytes << " octets\n"
      << "= ECC stream         " << stream_bytes << " octets, RS(" << rs.n << "," << rs.k << ")\n"
      << "- parity             " << parity_bytes << " octets\n"
      << "= usable payload     " << usable_payload_bytes << " octets\n";
  return out.str();
}

}  // namespace mrpods

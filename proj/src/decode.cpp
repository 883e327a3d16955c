#include <algorithm>
#include <map>

#include "mrpods/error.hpp"
#include "mrpods/raster.hpp"

namespace mrpods {
namespace {

constexpr int kDecodeReserve = 4;

// Packs `nbits` cells starting at bit offset `first_bit` of a region
// `width` cells wide into octets; an octet is erased when any of its cells is.
void read_bits(const CellSample& cells, int col0, int row0, int width, std::size_t first_bit, std::size_t nbits,
               std::uint8_t* bytes, bool* erased) {
  for (std::size_t i = 0; i < nbits / 8; ++i) {
    bytes[i] = 0;
    erased[i] = false;
  }
  for (std::size_t i = 0; i < nbits; ++i) {
    const std::size_t bit = first_bit + i;
    const std::size_t idx = cells.index(col0 + static_cast<int>(bit % width), row0 + static_cast<int>(bit / width));
    if (cells.bits[idx]) bytes[i >> 3] |= static_cast<std::uint8_t>(0x80u >> (i & 7));
    if (cells.erased[idx]) erased[i >> 3] = true;
  }
}

struct BandResult {
  std::vector<PageHeader> valid;
  int total = 0;
};

BandResult read_band(const CellSample& cells, int band_row, int data_cols, int copies) {
  BandResult out;
  out.total = copies;
  const RsParams rs = header_rs_params();
  for (int k = 0; k < copies; ++k) {
    Codeword word;
    word.symbols.resize(kHeaderCopyBytes);
    bool erased[kHeaderCopyBytes];
    read_bits(cells, kBorderCells, band_row, data_cols, static_cast<std::size_t>(k) * kHeaderCopyBits, kHeaderCopyBits,
              word.symbols.data(), erased);
    word.erasures.assign(erased, erased + kHeaderCopyBytes);
    auto decoded = rs_try_decode(word, rs);
    if (!decoded) continue;
    try {
      out.valid.push_back(header_parse(decoded->data));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::UnknownVersion) throw;
    }
  }
  return out;
}

std::optional<PageHeader> majority(const std::vector<PageHeader>& headers) {
  if (headers.empty()) return std::nullopt;
  std::size_t best = 0, best_count = 0;
  for (std::size_t i = 0; i < headers.size(); ++i) {
    const auto n = static_cast<std::size_t>(std::count(headers.begin(), headers.end(), headers[i]));
    if (n > best_count) {
      best = i;
      best_count = n;
    }
  }
  return headers[best];
}

}  // namespace

SheetDecode decode_cells(const CellSample& cells, const GridGeometry& geom) {
  const int data_cols = cells.cols - 2 * kBorderCells;
  if (data_cols < kTileCells || cells.rows < 2 * kBorderCells + kTileCells) {
    throw Error(ErrorCode::GridNotFound, "grid too small for a sheet");
  }
  const int band_rows = header_band_rows(data_cols);
  const int copies = band_rows * data_cols / kHeaderCopyBits;

  const BandResult top = read_band(cells, kBorderCells, data_cols, copies);
  const BandResult bottom = read_band(cells, cells.rows - kBorderCells - band_rows, data_cols, copies);
  const auto top_header = majority(top.valid);
  const auto bottom_header = majority(bottom.valid);
  if (!top_header && !bottom_header) throw Error(ErrorCode::BadHeaderCrc, "no header copy passed its CRC");
  if (top_header && bottom_header && !(*top_header == *bottom_header)) {
    throw Error(ErrorCode::HeaderConflict, "top and bottom header bands disagree");
  }

  SheetDecode out;
  out.geometry = geom;
  DecodeReport& report = out.report;
  report.header_source =
      top_header && bottom_header ? HeaderSource::Both : (top_header ? HeaderSource::TopOnly : HeaderSource::BottomOnly);
  report.header_copies_valid = static_cast<int>(top.valid.size() + bottom.valid.size());
  report.header_copies_total = top.total + bottom.total;
  report.erased_cells = static_cast<int>(cells.erasure_count());

  const PageHeader header = top_header ? *top_header : *bottom_header;
  if (header.rs_k < 1 || header.rs_n <= header.rs_k) {
    throw Error(ErrorCode::BadHeaderCrc, "header carries invalid RS parameters");
  }
  const RsParams rs{header.rs_n, header.rs_k, {}};
  const SheetLayout layout = layout_for_grid(cells.cols, cells.rows, rs);
  const std::uint32_t first = header.page_index * static_cast<std::uint32_t>(layout.blocks_per_page);

  std::vector<SlotRead> slots(layout.blocks_per_page);
  for (int tr = 0; tr < layout.block_rows; ++tr) {
    for (int tc = 0; tc < layout.block_cols; ++tc) {
      const int slot = tr * layout.block_cols + tc;
      SlotRead& s = slots[slot];
      read_bits(cells, layout.tile_origin_col() + tc * kTileCells + kTileGutter,
                layout.tile_origin_row() + tr * kTileCells + kTileGutter, kBlockSide, 0, kBlockBytes * 8,
                s.bytes.data(), s.erased.data());
      s.present = true;
      const DataBlock block = DataBlock::from_bytes(s.bytes);
      s.crc_ok = block.compute_crc() == block.crc16 && block.index() == first + static_cast<std::uint32_t>(slot);
      if (!s.crc_ok) ++report.raw_crc_failures;
    }
  }

  const PageLayoutInfo info{static_cast<std::uint32_t>(layout.blocks_per_page),
                            static_cast<std::uint16_t>(layout.interleave_depth)};
  const PageCorrection fixed = correct_page(slots, rs, info, first, header.payload_id, CorrectionPolicy{kDecodeReserve, true});
  report.corrected_symbols = fixed.corrected_symbols;
  report.erased_symbols = fixed.erased_symbols;
  report.failed_codewords = fixed.failed_codewords;
  report.blocks_total = layout.blocks_per_page;
  for (std::uint32_t slot : fixed.failed_slots) report.failed_blocks.push_back(first + slot);
  if (fixed.blocks.empty()) {
    throw Error(ErrorCode::UncorrectableCodeword, "no block of the page could be recovered");
  }

  out.page.header = header;
  out.page.layout = info;
  out.page.blocks = fixed.blocks;
  return out;
}

SheetDecode decode_sheet(const RasterImage& img, const SampleOptions& options) {
  const GridGeometry geom = locate_grid(img);
  return decode_cells(sample_cells(img, geom, options), geom);
}

}  // namespace mrpods

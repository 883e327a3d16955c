#pragma once

// Sheet format: configuration, page geometry, the 44-octet page header,
// pagination of a compressed stream into error-corrected addressed blocks,
// and reassembly.
//
// Cell layout of a sheet (grid_cols x grid_rows cells):
//
//   rings 0-1   solid frame
//   ring 2      timing marks, black on even column/row index
//   inside      header band, block tiles, header band
//
// Each header band holds repeated copies of the header record protected by
// RS(64,44). Block tiles are 18x18 cells: row 0 and column 0 carry
// alternating timing dots, row 1 and column 1 are quiet, and the remaining
// 16x16 cells hold one 32-octet block (address, payload, CRC-16).

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mrpods/checksum.hpp"
#include "mrpods/compress.hpp"
#include "mrpods/ecc.hpp"

namespace mrpods {

struct SheetConfig {
  int dots_per_inch = 200;
  int dot_size_percent = 70;
  RedundancyRatio redundancy{1, 5};
  double page_width_in = 8.5;
  double page_height_in = 11.0;
  double margin_in = 0.0;  // borderless
  bool omit_total_pages = false;
};

// Throws ConfigInvalid naming the offending field.
void validate(const SheetConfig& config);

inline constexpr int kFrameCells = 2;
inline constexpr int kBorderCells = 3;  // frame + timing ring
inline constexpr int kTileCells = 18;
inline constexpr int kTileGutter = 2;
inline constexpr int kBlockSide = 16;
inline constexpr int kBlockBytes = 32;
inline constexpr int kBlockPayloadBytes = 26;
inline constexpr int kHeaderBytes = 44;
inline constexpr int kHeaderCopyBytes = 64;  // RS(64,44) protected record
inline constexpr int kHeaderCopyBits = kHeaderCopyBytes * 8;
inline constexpr int kPreferredDataSymbols = 180;
inline constexpr std::uint32_t kPaddingFlag = 0x8000'0000u;
inline constexpr std::uint32_t kOmittedTotal = 0xFFFF'FFFFu;
inline constexpr std::uint64_t kWithheldLength = 0xFFFF'FFFF'FFFF'FFFFull;

RsParams header_rs_params();

// RS parameters used for page data: k = min(180, largest k realizable at the
// ratio).
RsParams page_rs_params(RedundancyRatio ratio);

struct SheetLayout {
  int grid_cols = 0;
  int grid_rows = 0;
  int data_cols = 0;  // inside the timing ring
  int data_rows = 0;
  int band_rows = 0;
  int header_copies = 0;  // per band
  int block_cols = 0;
  int block_rows = 0;
  int blocks_per_page = 0;
  RsParams rs{};
  int codewords_per_page = 0;
  int interleave_depth = 0;

  int top_band_row() const { return kBorderCells; }
  int bottom_band_row() const { return grid_rows - kBorderCells - band_rows; }
  int tile_origin_row() const { return kBorderCells + band_rows; }
  int tile_origin_col() const { return kBorderCells; }
  std::size_t stream_bytes() const { return static_cast<std::size_t>(codewords_per_page) * rs.n; }
  std::size_t data_bytes_per_page() const { return static_cast<std::size_t>(codewords_per_page) * rs.k; }
};

// Header band height for a data area `data_cols` wide: at least two rows
// and at least three RS-protected header copies.
int header_band_rows(int data_cols);

// Geometry for a grid of the given size; throws ConfigInvalid when the grid
// cannot hold both header bands and at least one codeword.
SheetLayout layout_for_grid(int grid_cols, int grid_rows, const RsParams& rs);
SheetLayout layout_for(const SheetConfig& config);

struct CapacityReport {
  int grid_cols = 0;
  int grid_rows = 0;
  std::uint64_t raw_dots = 0;
  std::uint64_t border_cells = 0;       // frame + timing ring
  std::uint64_t header_band_cells = 0;  // both bands
  std::uint64_t gutter_cells = 0;       // tile timing + quiet lines
  std::uint64_t spare_cells = 0;        // leftover strips that fit no tile
  std::uint64_t block_cells = 0;
  std::uint64_t block_overhead_bytes = 0;  // addresses + CRC-16s
  std::uint64_t stream_bytes = 0;          // codewords_per_page * n
  std::uint64_t unused_stream_bytes = 0;   // tail too short for a codeword
  std::uint64_t parity_bytes = 0;
  std::uint64_t usable_payload_bytes = 0;
  RsParams rs{};

  // Multi-line itemized accounting, one overhead term per line.
  std::string itemize() const;
};

CapacityReport page_capacity(const SheetConfig& config);

struct PageHeader {
  std::uint8_t format_version = 1;
  bool total_withheld = false;
  Digest16 payload_id{};
  std::uint32_t page_index = 0;
  std::uint32_t total_pages = 0;  // kOmittedTotal when withheld
  std::uint8_t rs_n = 0;
  std::uint8_t rs_k = 0;
  std::uint16_t dots_per_inch = 0;
  std::uint64_t payload_total_bytes = 0;  // kWithheldLength when withheld
  std::uint32_t header_crc = 0;           // filled by header_serialize

  bool operator==(const PageHeader&) const = default;
};

using HeaderRecord = std::array<std::uint8_t, kHeaderBytes>;

// Serializes and stamps header_crc (CRC-32 over octets 0..39).
HeaderRecord header_serialize(const PageHeader& header);
// Throws UnknownVersion or BadHeaderCrc.
PageHeader header_parse(std::span<const std::uint8_t> record);

struct DataBlock {
  std::uint32_t address = 0;  // bit 31 flags padding
  std::array<std::uint8_t, kBlockPayloadBytes> payload{};
  std::uint16_t crc16 = 0;

  std::uint32_t index() const { return address & ~kPaddingFlag; }
  bool is_padding() const { return (address & kPaddingFlag) != 0; }
  std::uint16_t compute_crc() const;
  std::array<std::uint8_t, kBlockBytes> to_bytes() const;
  static DataBlock from_bytes(std::span<const std::uint8_t, kBlockBytes> bytes);
  bool operator==(const DataBlock&) const = default;
};

struct PageLayoutInfo {
  std::uint32_t blocks_per_page = 0;
  std::uint16_t interleave_depth = 0;
  bool operator==(const PageLayoutInfo&) const = default;
};

struct Page {
  PageHeader header;
  PageLayoutInfo layout;
  std::vector<DataBlock> blocks;  // ascending address; damaged blocks may be absent
  bool operator==(const Page&) const = default;
};

std::vector<Page> paginate(const ByteStream& compressed, const SheetConfig& config);

struct MissingReport {
  std::vector<std::uint32_t> missing_pages;
  std::vector<std::uint32_t> damaged_pages;  // present but beyond the ECC budget
  bool total_unknown = false;
  std::string reason;
};

using AssembleResult = std::variant<ByteStream, MissingReport>;

// Throws MixedPayloads or HeaderConflict.
AssembleResult assemble(std::span<const Page> pages);

// Best-effort reassembly: every page that corrects fully is placed at its
// offset in the compressed stream; everything else is zero-filled and listed
// as a gap of [begin, end) octets.
struct PartialAssembly {
  Bytes data;
  std::vector<std::uint32_t> recovered_pages;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> gaps;
};
PartialAssembly partial_assemble(std::span<const Page> pages);

// ".mrp" page container: header record, layout record, 32-octet blocks.
Bytes serialize_page(const Page& page);
Page parse_page(std::span<const std::uint8_t> bytes);

// Per-slot raw reading of one page, as produced by the raster decoder or
// synthesized from a Page.
struct SlotRead {
  std::array<std::uint8_t, kBlockBytes> bytes{};
  std::array<bool, kBlockBytes> erased{};
  bool present = false;  // false: whole slot unreadable
  bool crc_ok = false;
};

struct PageCorrection {
  Bytes data;                           // codewords_per_page * k octets
  std::vector<DataBlock> blocks;        // accepted blocks, corrected
  std::vector<std::uint32_t> failed_slots;
  int corrected_symbols = 0;
  int erased_symbols = 0;
  int failed_codewords = 0;
  bool complete() const { return failed_codewords == 0; }
};

struct CorrectionPolicy {
  // Parity held back for detection; see RsDecodeOptions.
  int reserve = 0;
  // Reject a codeword whose corrections touch a slot whose raw CRC passed.
  bool distrust_crc_valid_corrections = false;
};

// Deinterleaves, unmasks, RS-decodes and re-slices one page. `slots` has
// blocks_per_page entries; `first_address` is page_index * blocks_per_page.
PageCorrection correct_page(std::span<const SlotRead> slots, const RsParams& rs,
                            const PageLayoutInfo& layout, std::uint32_t first_address,
                            const Digest16& payload_id, const CorrectionPolicy& policy = {});

// Keystream XORed over a page's interleaved ECC stream:
// SHA-256(payload_id | page_index u32le | counter u32le) for counter = 0, 1, ...
Bytes stream_mask(const Digest16& payload_id, std::uint32_t page_index, std::size_t length);

// Interleaving map: page stream offset -> (codeword, symbol).
struct StreamPosition {
  int codeword;
  int symbol;
};
StreamPosition interleave_position(std::size_t offset, int codewords, int depth, int n);

}  // namespace mrpods

#pragma once

// Block-sorting compression: Burrows-Wheeler transform, move-to-front
// recoding and canonical Huffman coding, wrapped in the "MRP1" container.
//
// The container is NOT bzip2-compatible; there is no run-length stage and
// each block carries exactly one Huffman table.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace mrpods {

using Bytes = std::vector<std::uint8_t>;

enum class Stage { Raw, BwtTransformed, MtfTransformed, Compressed };

struct ByteStream {
  Bytes bytes;
  Stage stage = Stage::Raw;
};

struct BwtBlock {
  Bytes data;
  std::uint32_t primary_index = 0;
};

inline constexpr std::size_t kDefaultBlockSize = 900'000;
inline constexpr std::size_t kMinBlockSize = 4 * 1024;
inline constexpr std::size_t kMaxBlockSize = 4 * 1024 * 1024;
inline constexpr std::size_t kDefaultMaxInputBytes = 4 * 1024 * 1024;

// Rotation BWT without a sentinel. Equal rotations keep index order, so
// primary_index is the first row holding the input rotation.
BwtBlock bwt_forward(std::span<const std::uint8_t> block,
                     std::size_t block_size = kDefaultBlockSize);
Bytes bwt_inverse(const BwtBlock& block);

Bytes mtf_forward(std::span<const std::uint8_t> data);
Bytes mtf_inverse(std::span<const std::uint8_t> data);

inline constexpr std::size_t kHuffmanSymbols = 257;
inline constexpr std::uint16_t kEndOfBlock = 256;
inline constexpr int kMaxCodeLength = 24;

struct HuffmanTable {
  // 0 marks an unused symbol.
  std::array<std::uint8_t, kHuffmanSymbols> code_lengths{};
};

// MSB-first packed bits.
struct BitSequence {
  Bytes bytes;
  std::uint64_t bit_length = 0;

  void push(std::uint32_t code, int length);
  bool at(std::uint64_t index) const { return (bytes[index >> 3] >> (7 - (index & 7))) & 1u; }
};

struct HuffmanCoded {
  HuffmanTable table;
  BitSequence bits;
};

HuffmanCoded huffman_encode(std::span<const std::uint8_t> data);
Bytes huffman_decode(const HuffmanTable& table, const BitSequence& bits);

// Sum of 2^-len over used symbols, for checking the Kraft inequality.
double kraft_sum(const HuffmanTable& table);

struct CompressionStats {
  std::uint64_t original_size_bytes = 0;    // ODS
  std::uint64_t compressed_size_bytes = 0;  // CDS
  double compression_ratio = 0.0;           // ODS / CDS
  double data_density = 0.0;                // 1 / CDS, per byte

  static CompressionStats from_sizes(std::uint64_t ods, std::uint64_t cds);
};

struct CompressOptions {
  std::size_t block_size = kDefaultBlockSize;
  std::size_t max_input_bytes = kDefaultMaxInputBytes;
  bool allow_large = false;
};

std::pair<ByteStream, CompressionStats> compress(const ByteStream& raw,
                                                 const CompressOptions& options = {});
ByteStream decompress(const ByteStream& compressed);

// Convenience wrappers over raw octets.
std::pair<Bytes, CompressionStats> compress_bytes(std::span<const std::uint8_t> raw,
                                                  const CompressOptions& options = {});
Bytes decompress_bytes(std::span<const std::uint8_t> container);

// Walks the container framing and returns its total length, or nullopt when
// `data` is too short to hold a complete container. Trailing octets are
// ignored, which lets callers strip page padding without knowing the size.
std::optional<std::size_t> container_length(std::span<const std::uint8_t> data);

// Largest prefix of `container` that decodes, block by block, even when the
// tail is missing or damaged. Used for partial recovery.
struct PartialDecode {
  Bytes data;
  std::size_t blocks_decoded = 0;
  std::size_t blocks_total = 0;
  std::size_t container_bytes_used = 0;
};
PartialDecode decompress_prefix(std::span<const std::uint8_t> container);

}  // namespace mrpods

#include <cstring>

#include "mrpods/checksum.hpp"
#include "mrpods/compress.hpp"
#include "mrpods/error.hpp"

namespace mrpods {
namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'M', 'R', 'P', '1'};
constexpr std::size_t kPreamble = 12;
constexpr std::size_t kBlockHeader = 8 + kHuffmanSymbols;

void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[at + i]) << (8 * i);
  return v;
}

struct BlockView {
  std::uint32_t bit_length;
  std::uint32_t primary_index;
  HuffmanTable table;
  std::span<const std::uint8_t> payload;
};

// Parses the block framing starting at `at`; returns nullopt on truncation.
std::optional<BlockView> view_block(std::span<const std::uint8_t> in, std::size_t& at) {
  if (in.size() < at + kBlockHeader) return std::nullopt;
  BlockView v;
  v.bit_length = get_u32(in, at);
  v.primary_index = get_u32(in, at + 4);
  std::memcpy(v.table.code_lengths.data(), in.data() + at + 8, kHuffmanSymbols);
  const std::size_t payload_bytes = (static_cast<std::size_t>(v.bit_length) + 7) / 8;
  if (in.size() < at + kBlockHeader + payload_bytes) return std::nullopt;
  v.payload = in.subspan(at + kBlockHeader, payload_bytes);
  at += kBlockHeader + payload_bytes;
  return v;
}

Bytes decode_block(const BlockView& v, std::size_t block_size) {
  BitSequence bits;
  bits.bytes.assign(v.payload.begin(), v.payload.end());
  bits.bit_length = v.bit_length;
  Bytes mtf;
  try {
    mtf = huffman_decode(v.table, bits);
  } catch (const Error& e) {
    throw Error(ErrorCode::CorruptContainer, std::string("block entropy stream: ") + e.what());
  }
  if (mtf.empty() || mtf.size() > block_size) {
    throw Error(ErrorCode::CorruptContainer, "block length outside (0, block_size]");
  }
  if (v.primary_index >= mtf.size()) {
    throw Error(ErrorCode::CorruptContainer, "invalid primary_index");
  }
  BwtBlock bwt{mtf_inverse(mtf), v.primary_index};
  return bwt_inverse(bwt);
}

bool has_magic(std::span<const std::uint8_t> in) {
  return in.size() >= kPreamble && std::equal(kMagic.begin(), kMagic.end(), in.begin());
}

}  // namespace

CompressionStats CompressionStats::from_sizes(std::uint64_t ods, std::uint64_t cds) {
  CompressionStats s;
  s.original_size_bytes = ods;
  s.compressed_size_bytes = cds;
  s.compression_ratio = static_cast<double>(ods) / static_cast<double>(cds);
  s.data_density = 1.0 / static_cast<double>(cds);
  return s;
}

std::pair<Bytes, CompressionStats> compress_bytes(std::span<const std::uint8_t> raw,
                                                  const CompressOptions& options) {
  if (options.block_size < kMinBlockSize || options.block_size > kMaxBlockSize) {
    throw Error(ErrorCode::ConfigInvalid, "block_size must lie in [4 KiB, 4 MiB]");
  }
  if (!options.allow_large && raw.size() > options.max_input_bytes) {
    throw Error(ErrorCode::InputTooLarge,
                "input of " + std::to_string(raw.size()) + " bytes exceeds max_input_bytes " +
                    std::to_string(options.max_input_bytes));
  }
  const std::size_t blocks = (raw.size() + options.block_size - 1) / options.block_size;

  Bytes out(kMagic.begin(), kMagic.end());
  put_u32(out, static_cast<std::uint32_t>(options.block_size));
  put_u32(out, static_cast<std::uint32_t>(blocks));
  for (std::size_t b = 0; b < blocks; ++b) {
    const auto chunk = raw.subspan(b * options.block_size,
                                   std::min(options.block_size, raw.size() - b * options.block_size));
    const BwtBlock bwt = bwt_forward(chunk, options.block_size);
    const HuffmanCoded coded = huffman_encode(mtf_forward(bwt.data));
    put_u32(out, static_cast<std::uint32_t>(coded.bits.bit_length));
    put_u32(out, bwt.primary_index);
    out.insert(out.end(), coded.table.code_lengths.begin(), coded.table.code_lengths.end());
    out.insert(out.end(), coded.bits.bytes.begin(), coded.bits.bytes.end());
  }
  put_u32(out, crc32(out));

  const auto stats = CompressionStats::from_sizes(raw.size(), out.size());
  return {std::move(out), stats};
}

std::pair<ByteStream, CompressionStats> compress(const ByteStream& raw,
                                                 const CompressOptions& options) {
  if (raw.stage != Stage::Raw) throw Error(ErrorCode::ConfigInvalid, "compress expects a Raw stream");
  auto [bytes, stats] = compress_bytes(raw.bytes, options);
  return {ByteStream{std::move(bytes), Stage::Compressed}, stats};
}

Bytes decompress_bytes(std::span<const std::uint8_t> in) {
  if (!has_magic(in)) throw Error(ErrorCode::CorruptContainer, "bad magic or short preamble");
  const auto total = container_length(in);
  if (!total) throw Error(ErrorCode::CorruptContainer, "truncated container");
  if (*total != in.size()) throw Error(ErrorCode::CorruptContainer, "trailing octets after CRC");
  if (crc32(in.first(in.size() - 4)) != get_u32(in, in.size() - 4)) {
    throw Error(ErrorCode::CorruptContainer, "CRC-32 mismatch");
  }
  const std::size_t block_size = get_u32(in, 4);
  if (block_size < kMinBlockSize || block_size > kMaxBlockSize) {
    throw Error(ErrorCode::CorruptContainer, "block_size out of range");
  }
  const std::uint32_t blocks = get_u32(in, 8);
  Bytes out;
  std::size_t at = kPreamble;
  for (std::uint32_t b = 0; b < blocks; ++b) {
    const auto view = view_block(in, at);
    const Bytes block = decode_block(*view, block_size);
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

ByteStream decompress(const ByteStream& compressed) {
  if (compressed.stage != Stage::Compressed) {
    throw Error(ErrorCode::CorruptContainer, "decompress expects a Compressed stream");
  }
  return ByteStream{decompress_bytes(compressed.bytes), Stage::Raw};
}

std::optional<std::size_t> container_length(std::span<const std::uint8_t> in) {
  if (!has_magic(in)) return std::nullopt;
  const std::uint32_t blocks = get_u32(in, 8);
  std::size_t at = kPreamble;
  for (std::uint32_t b = 0; b < blocks; ++b) {
    if (!view_block(in, at)) return std::nullopt;
  }
  if (in.size() < at + 4) return std::nullopt;
  return at + 4;
}

PartialDecode decompress_prefix(std::span<const std::uint8_t> in) {
  PartialDecode result;
  if (!has_magic(in)) return result;
  const std::size_t block_size = get_u32(in, 4);
  if (block_size < kMinBlockSize || block_size > kMaxBlockSize) return result;
  result.blocks_total = get_u32(in, 8);
  std::size_t at = kPreamble;
  for (std::size_t b = 0; b < result.blocks_total; ++b) {
    const auto view = view_block(in, at);
    if (!view) break;
    try {
      const Bytes block = decode_block(*view, block_size);
      result.data.insert(result.data.end(), block.begin(), block.end());
    } catch (const Error&) {
      break;
    }
    ++result.blocks_decoded;
    result.container_bytes_used = at;
  }
  return result;
}

}  // namespace mrpods

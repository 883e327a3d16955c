#include "mrpods/error.hpp"
#include "mrpods/sheet.hpp"

namespace mrpods {
namespace {

template <typename T>
void put_le(std::uint8_t* out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

template <typename T>
T get_le(const std::uint8_t* in) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(in[i]) << (8 * i);
  return v;
}

}  // namespace

// Version 1 record, little-endian:
//   0 version | 1 flags | 2..17 payload_id | 18 page_index u32
//   22 total_pages u32 | 26 rs_n | 27 rs_k | 28 dpi u16
//   30 payload_total_bytes u64 | 38 reserved u16 (zero) | 40 CRC-32 of 0..39
HeaderRecord header_serialize(const PageHeader& h) {
  HeaderRecord r{};
  r[0] = h.format_version;
  r[1] = h.total_withheld ? 1 : 0;
  std::copy(h.payload_id.begin(), h.payload_id.end(), r.begin() + 2);
  put_le(r.data() + 18, h.page_index);
  put_le(r.data() + 22, h.total_pages);
  r[26] = h.rs_n;
  r[27] = h.rs_k;
  put_le(r.data() + 28, h.dots_per_inch);
  put_le(r.data() + 30, h.payload_total_bytes);
  put_le(r.data() + 40, crc32(std::span<const std::uint8_t>(r.data(), 40)));
  return r;
}

PageHeader header_parse(std::span<const std::uint8_t> record) {
  if (record.size() != kHeaderBytes) {
    throw Error(ErrorCode::BadHeaderCrc, "header record must be 44 octets");
  }
  const std::uint32_t stored = get_le<std::uint32_t>(record.data() + 40);
  if (crc32(record.first(40)) != stored) throw Error(ErrorCode::BadHeaderCrc, "header CRC mismatch");
  if (record[0] != 1) {
    throw Error(ErrorCode::UnknownVersion, "header format version " + std::to_string(record[0]));
  }
  PageHeader h;
  h.format_version = record[0];
  h.total_withheld = (record[1] & 1) != 0;
  std::copy(record.begin() + 2, record.begin() + 18, h.payload_id.begin());
  h.page_index = get_le<std::uint32_t>(record.data() + 18);
  h.total_pages = get_le<std::uint32_t>(record.data() + 22);
  h.rs_n = record[26];
  h.rs_k = record[27];
  h.dots_per_inch = get_le<std::uint16_t>(record.data() + 28);
  h.payload_total_bytes = get_le<std::uint64_t>(record.data() + 30);
  h.header_crc = stored;
  return h;
}

std::array<std::uint8_t, kBlockBytes> DataBlock::to_bytes() const {
  std::array<std::uint8_t, kBlockBytes> out{};
  put_le(out.data(), address);
  std::copy(payload.begin(), payload.end(), out.begin() + 4);
  put_le(out.data() + 4 + kBlockPayloadBytes, crc16);
  return out;
}

DataBlock DataBlock::from_bytes(std::span<const std::uint8_t, kBlockBytes> bytes) {
  DataBlock b;
  b.address = get_le<std::uint32_t>(bytes.data());
  std::copy(bytes.begin() + 4, bytes.begin() + 4 + kBlockPayloadBytes, b.payload.begin());
  b.crc16 = get_le<std::uint16_t>(bytes.data() + 4 + kBlockPayloadBytes);
  return b;
}

std::uint16_t DataBlock::compute_crc() const {
  const auto bytes = to_bytes();
  return mrpods::crc16(std::span<const std::uint8_t>(bytes.data(), 4 + kBlockPayloadBytes));
}

Bytes serialize_page(const Page& page) {
  const HeaderRecord h = header_serialize(page.header);
  Bytes out;
  out.reserve(h.size() + 8 + page.blocks.size() * kBlockBytes);
  out.assign(h.begin(), h.end());
  std::array<std::uint8_t, 8> layout{};
  put_le(layout.data(), page.layout.blocks_per_page);
  put_le(layout.data() + 4, page.layout.interleave_depth);
  put_le(layout.data() + 6, static_cast<std::uint16_t>(kBlockPayloadBytes));
  out.insert(out.end(), layout.begin(), layout.end());
  for (const DataBlock& b : page.blocks) {
    const auto bytes = b.to_bytes();
    out.insert(out.end(), bytes.begin(), bytes.end());
  }
  return out;
}

Page parse_page(std::span<const std::uint8_t> bytes) {
  constexpr std::size_t kPrefix = kHeaderBytes + 8;
  if (bytes.size() < kPrefix || (bytes.size() - kPrefix) % kBlockBytes != 0) {
    throw Error(ErrorCode::CorruptContainer, "page container has a bad length");
  }
  Page page;
  page.header = header_parse(bytes.first(kHeaderBytes));
  page.layout.blocks_per_page = get_le<std::uint32_t>(bytes.data() + kHeaderBytes);
  page.layout.interleave_depth = get_le<std::uint16_t>(bytes.data() + kHeaderBytes + 4);
  if (get_le<std::uint16_t>(bytes.data() + kHeaderBytes + 6) != kBlockPayloadBytes) {
    throw Error(ErrorCode::CorruptContainer, "unsupported block payload size");
  }
  for (std::size_t at = kPrefix; at < bytes.size(); at += kBlockBytes) {
    DataBlock b = DataBlock::from_bytes(bytes.subspan(at).first<kBlockBytes>());
    if (!page.blocks.empty() && b.index() <= page.blocks.back().index()) {
      throw Error(ErrorCode::CorruptContainer, "block addresses not strictly increasing");
    }
    page.blocks.push_back(b);
  }
  return page;
}

}  // namespace mrpods

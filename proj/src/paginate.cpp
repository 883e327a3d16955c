#include <algorithm>
#include <map>
#include <optional>

#include <openssl/sha.h>

#include "mrpods/error.hpp"
#include "mrpods/sheet.hpp"

namespace mrpods {
namespace {

// Whether slot `slot` carries no payload octets: every stream octet it holds
// is beyond the codewords or belongs to a codeword past `data_len`.
bool slot_is_padding(int slot, int codewords, int depth, const RsParams& rs, std::size_t data_len) {
  const std::size_t stream = static_cast<std::size_t>(codewords) * rs.n;
  for (int i = 0; i < kBlockPayloadBytes; ++i) {
    const std::size_t offset = static_cast<std::size_t>(slot) * kBlockPayloadBytes + i;
    if (offset >= stream) continue;
    const auto pos = interleave_position(offset, codewords, depth, rs.n);
    if (static_cast<std::size_t>(pos.codeword) * rs.k < data_len) return false;
  }
  return true;
}

int codewords_for(const PageLayoutInfo& layout, const RsParams& rs) {
  return static_cast<int>(static_cast<std::uint64_t>(layout.blocks_per_page) * kBlockPayloadBytes / rs.n);
}

// Blocks of one page gathered from every sheet claiming it. Sheets that
// disagree on a block leave an empty entry, which reads as an erasure.
using BlockMap = std::map<std::uint32_t, std::optional<DataBlock>>;

void merge_blocks(BlockMap& merged, const std::vector<DataBlock>& blocks) {
  for (const DataBlock& b : blocks) {
    auto [it, inserted] = merged.emplace(b.index(), b);
    if (!inserted && it->second && !(*it->second == b)) it->second.reset();
  }
}

std::vector<SlotRead> slot_reads(const BlockMap& merged, std::uint32_t first, std::uint32_t blocks_per_page) {
  std::vector<SlotRead> slots(blocks_per_page);
  for (const auto& [addr, block] : merged) {
    if (!block || addr < first || addr - first >= blocks_per_page) continue;
    SlotRead& s = slots[addr - first];
    s.bytes = block->to_bytes();
    s.present = true;
    s.crc_ok = block->compute_crc() == block->crc16;
  }
  return slots;
}

}  // namespace

Bytes stream_mask(const Digest16& payload_id, std::uint32_t page_index, std::size_t length) {
  Bytes out(length);
  std::array<std::uint8_t, 24> seed{};
  std::copy(payload_id.begin(), payload_id.end(), seed.begin());
  for (int i = 0; i < 4; ++i) seed[16 + i] = static_cast<std::uint8_t>(page_index >> (8 * i));
  std::array<unsigned char, SHA256_DIGEST_LENGTH> block{};
  for (std::size_t pos = 0, counter = 0; pos < length; pos += block.size(), ++counter) {
    for (int i = 0; i < 4; ++i) seed[20 + i] = static_cast<std::uint8_t>(counter >> (8 * i));
    SHA256(seed.data(), seed.size(), block.data());
    std::copy_n(block.begin(), std::min(block.size(), length - pos), out.begin() + pos);
  }
  return out;
}

StreamPosition interleave_position(std::size_t offset, int codewords, int depth, int n) {
  const std::size_t group_span = static_cast<std::size_t>(depth) * n;
  const std::size_t group = offset / group_span;
  const int base = static_cast<int>(group * depth);
  const int width = std::min(depth, codewords - base);
  const std::size_t within = offset - group * group_span;
  return StreamPosition{base + static_cast<int>(within % width), static_cast<int>(within / width)};
}

std::vector<Page> paginate(const ByteStream& compressed, const SheetConfig& config) {
  if (compressed.stage != Stage::Compressed) {
    throw Error(ErrorCode::ConfigInvalid, "paginate expects a Compressed stream");
  }
  if (compressed.bytes.empty()) throw Error(ErrorCode::ConfigInvalid, "nothing to paginate");
  validate(config);
  const SheetLayout layout = layout_for(config);
  const RsParams& rs = layout.rs;
  const std::size_t capacity = layout.data_bytes_per_page();
  const std::size_t total = compressed.bytes.size();
  const std::uint64_t pages = (total + capacity - 1) / capacity;
  if (pages * layout.blocks_per_page > kPaddingFlag) {
    throw Error(ErrorCode::InputTooLarge, "payload needs more than 2^31 blocks");
  }

  const Digest16 id = content_digest(compressed.bytes);
  const int codewords = layout.codewords_per_page;
  const int depth = layout.interleave_depth;

  std::vector<Page> out;
  out.reserve(pages);
  for (std::uint64_t p = 0; p < pages; ++p) {
    const std::size_t begin = p * capacity;
    const std::size_t data_len = std::min(capacity, total - begin);

    std::vector<Codeword> words(codewords);
    std::vector<std::uint8_t> chunk(rs.k);
    for (int c = 0; c < codewords; ++c) {
      std::fill(chunk.begin(), chunk.end(), 0);
      const std::size_t from = static_cast<std::size_t>(c) * rs.k;
      if (from < data_len) {
        const std::size_t len = std::min<std::size_t>(rs.k, data_len - from);
        std::copy_n(compressed.bytes.begin() + begin + from, len, chunk.begin());
      }
      words[c] = rs_encode(chunk, rs);
    }

    Bytes stream(static_cast<std::size_t>(layout.blocks_per_page) * kBlockPayloadBytes, 0);
    const Bytes mask = stream_mask(id, static_cast<std::uint32_t>(p), layout.stream_bytes());
    for (std::size_t off = 0; off < layout.stream_bytes(); ++off) {
      const auto pos = interleave_position(off, codewords, depth, rs.n);
      stream[off] = words[pos.codeword].symbols[pos.symbol] ^ mask[off];
    }

    Page page;
    page.header.payload_id = id;
    page.header.page_index = static_cast<std::uint32_t>(p);
    page.header.total_withheld = config.omit_total_pages;
    page.header.total_pages = config.omit_total_pages ? kOmittedTotal : static_cast<std::uint32_t>(pages);
    page.header.rs_n = static_cast<std::uint8_t>(rs.n);
    page.header.rs_k = static_cast<std::uint8_t>(rs.k);
    page.header.dots_per_inch = static_cast<std::uint16_t>(config.dots_per_inch);
    page.header.payload_total_bytes = config.omit_total_pages ? kWithheldLength : total;
    page.header.header_crc = header_parse(header_serialize(page.header)).header_crc;
    page.layout = {static_cast<std::uint32_t>(layout.blocks_per_page), static_cast<std::uint16_t>(depth)};

    page.blocks.resize(layout.blocks_per_page);
    const std::uint32_t first = static_cast<std::uint32_t>(p * layout.blocks_per_page);
    for (int slot = 0; slot < layout.blocks_per_page; ++slot) {
      DataBlock& b = page.blocks[slot];
      b.address = first + slot;
      if (slot_is_padding(slot, codewords, depth, rs, data_len)) b.address |= kPaddingFlag;
      std::copy_n(stream.begin() + static_cast<std::size_t>(slot) * kBlockPayloadBytes, kBlockPayloadBytes,
                  b.payload.begin());
      b.crc16 = b.compute_crc();
    }
    out.push_back(std::move(page));
  }
  return out;
}

PageCorrection correct_page(std::span<const SlotRead> slots, const RsParams& rs, const PageLayoutInfo& layout,
                            std::uint32_t first_address, const Digest16& payload_id, const CorrectionPolicy& policy) {
  if (slots.size() != layout.blocks_per_page) {
    throw Error(ErrorCode::LengthMismatch, "slot count differs from blocks_per_page");
  }
  const int codewords = codewords_for(layout, rs);
  const int depth = layout.interleave_depth;
  if (codewords < 1 || depth < 1) throw Error(ErrorCode::ConfigInvalid, "degenerate page layout");
  const std::size_t stream_len = static_cast<std::size_t>(codewords) * rs.n;
  const Bytes mask = stream_mask(payload_id, first_address / layout.blocks_per_page, stream_len);

  // Gather codewords; a slot whose CRC passed is trusted outright.
  std::vector<Codeword> words(codewords);
  std::vector<std::vector<int>> word_slots(codewords);
  for (auto& w : words) {
    w.symbols.assign(rs.n, 0);
    w.erasures.assign(rs.n, false);
  }
  for (auto& ws : word_slots) ws.assign(rs.n, 0);
  for (std::size_t off = 0; off < stream_len; ++off) {
    const int slot = static_cast<int>(off / kBlockPayloadBytes);
    const int byte = 4 + static_cast<int>(off % kBlockPayloadBytes);
    const SlotRead& s = slots[slot];
    const auto pos = interleave_position(off, codewords, depth, rs.n);
    word_slots[pos.codeword][pos.symbol] = slot;
    if (!s.present) {
      words[pos.codeword].erasures[pos.symbol] = true;
      continue;
    }
    words[pos.codeword].symbols[pos.symbol] = s.bytes[byte] ^ mask[off];
    words[pos.codeword].erasures[pos.symbol] = !s.crc_ok && s.erased[byte];
  }

  PageCorrection result;
  result.data.assign(static_cast<std::size_t>(codewords) * rs.k, 0);
  std::vector<bool> word_ok(codewords, false);
  std::vector<std::vector<std::uint8_t>> fixed(codewords);
  const RsDecodeOptions options{policy.reserve};

  auto trusted = [&](int c, const RsDecodeResult& r) {
    if (!policy.distrust_crc_valid_corrections) return true;
    return std::none_of(r.corrected_positions.begin(), r.corrected_positions.end(), [&](int pos) {
      const SlotRead& s = slots[word_slots[c][pos]];
      return s.present && s.crc_ok;
    });
  };

  for (int c = 0; c < codewords; ++c) {
    auto decoded = rs_try_decode(words[c], rs, options);
    if (decoded && !trusted(c, *decoded)) decoded.reset();
    if (!decoded) {
      // Retry treating every octet of a CRC-failed slot as erased.
      Codeword wider = words[c];
      for (int i = 0; i < rs.n; ++i) {
        const SlotRead& s = slots[word_slots[c][i]];
        if (s.present && !s.crc_ok) wider.erasures[i] = true;
      }
      decoded = rs_try_decode(wider, rs, options);
      if (decoded && !trusted(c, *decoded)) decoded.reset();
    }
    if (!decoded) {
      ++result.failed_codewords;
      continue;
    }
    word_ok[c] = true;
    result.corrected_symbols += static_cast<int>(decoded->corrected_positions.size());
    result.erased_symbols += decoded->erasures;
    std::copy(decoded->data.begin(), decoded->data.end(), result.data.begin() + static_cast<std::size_t>(c) * rs.k);
    fixed[c] = rs_encode(decoded->data, rs).symbols;
  }

  // Padding flags: from CRC-valid reads, from codewords at or before the
  // last one holding a nonzero data octet, then spread along the padding
  // suffix. Slots still undecided are reported as failed.
  const int nslots = static_cast<int>(slots.size());
  int last_nonzero = -1;
  for (int c = 0; c < codewords; ++c) {
    if (!word_ok[c]) continue;
    const auto begin = result.data.begin() + static_cast<std::ptrdiff_t>(c) * rs.k;
    if (std::any_of(begin, begin + rs.k, [](std::uint8_t v) { return v != 0; })) last_nonzero = c;
  }
  std::vector<int> padding(nslots, -1);
  for (int i = 0; i < nslots; ++i) {
    const SlotRead& s = slots[i];
    if (static_cast<std::size_t>(i) * kBlockPayloadBytes >= stream_len) {
      padding[i] = 1;
    } else if (s.present && s.crc_ok) {
      padding[i] = (s.bytes[3] & 0x80) ? 1 : 0;
    }
    for (int j = 0; j < kBlockPayloadBytes && padding[i] == -1; ++j) {
      const std::size_t off = static_cast<std::size_t>(i) * kBlockPayloadBytes + j;
      if (off < stream_len && interleave_position(off, codewords, depth, rs.n).codeword <= last_nonzero) padding[i] = 0;
    }
  }
  for (int i = 0, last_pad = -1; i < nslots; ++i) {
    if (padding[i] == 1) last_pad = i;
    if (padding[i] == -1 && last_pad >= 0) padding[i] = 1;
  }
  for (int i = nslots - 1, next_data = -1; i >= 0; --i) {
    if (padding[i] == 0) next_data = i;
    if (padding[i] == -1 && next_data >= 0) padding[i] = 0;
  }

  for (int slot = 0; slot < nslots; ++slot) {
    DataBlock b;
    bool ok = true;
    for (int i = 0; i < kBlockPayloadBytes && ok; ++i) {
      const std::size_t off = static_cast<std::size_t>(slot) * kBlockPayloadBytes + i;
      if (off >= stream_len) {
        b.payload[i] = 0;
        continue;
      }
      const auto pos = interleave_position(off, codewords, depth, rs.n);
      if (!word_ok[pos.codeword]) {
        ok = false;
        break;
      }
      b.payload[i] = fixed[pos.codeword][pos.symbol] ^ mask[off];
    }
    if (!ok || padding[slot] == -1) {
      result.failed_slots.push_back(static_cast<std::uint32_t>(slot));
      continue;
    }
    b.address = (first_address + static_cast<std::uint32_t>(slot)) | (padding[slot] ? kPaddingFlag : 0u);
    b.crc16 = b.compute_crc();
    result.blocks.push_back(b);
  }
  return result;
}

AssembleResult assemble(std::span<const Page> pages) {
  if (pages.empty()) return MissingReport{{}, {}, true, "no pages supplied"};

  const PageHeader& ref = pages.front().header;
  const PageLayoutInfo ref_layout = pages.front().layout;
  std::map<std::uint32_t, const Page*> by_index;
  std::map<std::uint32_t, BlockMap> blocks_by_page;
  for (const Page& p : pages) {
    const PageHeader& h = p.header;
    if (h.payload_id != ref.payload_id) throw Error(ErrorCode::MixedPayloads, "pages carry different payload ids");
    if (h.rs_n != ref.rs_n || h.rs_k != ref.rs_k || !(p.layout == ref_layout) ||
        h.total_withheld != ref.total_withheld) {
      throw Error(ErrorCode::MixedPayloads, "pages disagree on ECC parameters or layout");
    }
    if (h.total_pages != ref.total_pages || h.payload_total_bytes != ref.payload_total_bytes) {
      throw Error(ErrorCode::HeaderConflict, "pages disagree on totals");
    }
    if (!h.total_withheld && h.page_index >= h.total_pages) {
      throw Error(ErrorCode::HeaderConflict, "page_index beyond total_pages");
    }
    auto [it, inserted] = by_index.emplace(h.page_index, &p);
    if (!inserted && !(it->second->header == h)) {
      throw Error(ErrorCode::HeaderConflict, "two sheets claim page " + std::to_string(h.page_index));
    }
    merge_blocks(blocks_by_page[h.page_index], p.blocks);
  }

  const RsParams rs{ref.rs_n, ref.rs_k, {}};
  if (rs.k < 1 || rs.n <= rs.k) throw Error(ErrorCode::CorruptContainer, "header carries invalid RS parameters");
  const int codewords = codewords_for(ref_layout, rs);
  const std::size_t capacity = static_cast<std::size_t>(codewords) * rs.k;
  const bool withheld = ref.total_withheld;

  MissingReport report;
  report.total_unknown = withheld;
  const std::uint32_t last = withheld ? by_index.rbegin()->first : ref.total_pages - 1;
  for (std::uint32_t i = 0; i <= last; ++i) {
    if (!by_index.count(i)) report.missing_pages.push_back(i);
  }

  Bytes data;
  for (const auto& [index, page] : by_index) {
    const std::uint32_t first = index * ref_layout.blocks_per_page;
    const std::vector<SlotRead> slots = slot_reads(blocks_by_page[index], first, ref_layout.blocks_per_page);
    const PageCorrection fixed = correct_page(slots, rs, ref_layout, first, ref.payload_id);
    if (!fixed.complete()) {
      report.damaged_pages.push_back(index);
      continue;
    }
    if (report.missing_pages.empty() && report.damaged_pages.empty()) {
      data.insert(data.end(), fixed.data.begin(), fixed.data.end());
    }
  }

  if (!report.missing_pages.empty() || !report.damaged_pages.empty()) {
    report.reason = withheld ? "total count withheld" : "pages missing or beyond ECC budget";
    return report;
  }

  std::size_t length = 0;
  if (withheld) {
    const auto found = container_length(data);
    if (!found) {
      report.reason = "total count withheld";
      return report;
    }
    length = *found;
  } else {
    length = static_cast<std::size_t>(ref.payload_total_bytes);
    if (length > data.size() || data.size() - length >= capacity) {
      report.reason = "payload length inconsistent with page count";
      return report;
    }
  }
  data.resize(length);
  if (content_digest(data) != ref.payload_id) {
    if (withheld) {
      report.reason = "total count withheld";
    } else {
      report.reason = "payload digest mismatch";
      for (const auto& [index, page] : by_index) report.damaged_pages.push_back(index);
    }
    return report;
  }
  return ByteStream{std::move(data), Stage::Compressed};
}

PartialAssembly partial_assemble(std::span<const Page> pages) {
  PartialAssembly out;
  if (pages.empty()) return out;
  const PageHeader& ref = pages.front().header;
  const PageLayoutInfo layout = pages.front().layout;
  const RsParams rs{ref.rs_n, ref.rs_k, {}};
  if (rs.k < 1 || rs.n <= rs.k) return out;
  const std::size_t capacity = static_cast<std::size_t>(codewords_for(layout, rs)) * rs.k;

  std::map<std::uint32_t, BlockMap> blocks_by_page;
  for (const Page& p : pages) {
    if (p.header.payload_id != ref.payload_id || !(p.layout == layout)) continue;
    merge_blocks(blocks_by_page[p.header.page_index], p.blocks);
  }
  std::uint32_t last = blocks_by_page.rbegin()->first;
  if (!ref.total_withheld && ref.total_pages > 0) last = std::max(last, ref.total_pages - 1);

  out.data.assign(static_cast<std::size_t>(last + 1) * capacity, 0);
  for (std::uint32_t index = 0; index <= last; ++index) {
    const std::uint64_t begin = static_cast<std::uint64_t>(index) * capacity;
    const auto found = blocks_by_page.find(index);
    bool ok = false;
    if (found != blocks_by_page.end()) {
      const std::uint32_t first = index * layout.blocks_per_page;
      const std::vector<SlotRead> slots = slot_reads(found->second, first, layout.blocks_per_page);
      const PageCorrection fixed = correct_page(slots, rs, layout, first, ref.payload_id);
      if (fixed.complete()) {
        std::copy(fixed.data.begin(), fixed.data.end(), out.data.begin() + begin);
        out.recovered_pages.push_back(index);
        ok = true;
      }
    }
    if (!ok) {
      if (!out.gaps.empty() && out.gaps.back().second == begin) {
        out.gaps.back().second = begin + capacity;
      } else {
        out.gaps.emplace_back(begin, begin + capacity);
      }
    }
  }
  if (!ref.total_withheld && ref.payload_total_bytes < out.data.size()) {
    out.data.resize(static_cast<std::size_t>(ref.payload_total_bytes));
    for (auto& g : out.gaps) g.second = std::min<std::uint64_t>(g.second, out.data.size());
    std::erase_if(out.gaps, [](const auto& g) { return g.first >= g.second; });
  }
  return out;
}

}  // namespace mrpods

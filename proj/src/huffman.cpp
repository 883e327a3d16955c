#include <algorithm>
#include <cmath>
#include <queue>

#include "mrpods/compress.hpp"
#include "mrpods/error.hpp"

namespace mrpods {
namespace {

using Frequencies = std::array<std::uint64_t, kHuffmanSymbols>;

std::array<std::uint8_t, kHuffmanSymbols> build_lengths(Frequencies freq) {
  while (true) {
    struct Node {
      std::uint64_t weight;
      int index;
    };
    auto heavier = [](const Node& a, const Node& b) {
      return a.weight != b.weight ? a.weight > b.weight : a.index > b.index;
    };
    std::priority_queue<Node, std::vector<Node>, decltype(heavier)> heap(heavier);
    std::vector<int> parent(2 * kHuffmanSymbols, -1);
    int next = static_cast<int>(kHuffmanSymbols);
    for (std::size_t s = 0; s < kHuffmanSymbols; ++s) {
      if (freq[s] > 0) heap.push({freq[s], static_cast<int>(s)});
    }

    std::array<std::uint8_t, kHuffmanSymbols> lengths{};
    if (heap.size() == 1) {
      lengths[heap.top().index] = 1;
      return lengths;
    }
    while (heap.size() > 1) {
      const Node a = heap.top();
      heap.pop();
      const Node b = heap.top();
      heap.pop();
      parent[a.index] = next;
      parent[b.index] = next;
      heap.push({a.weight + b.weight, next++});
    }

    int longest = 0;
    for (std::size_t s = 0; s < kHuffmanSymbols; ++s) {
      if (freq[s] == 0) continue;
      int depth = 0;
      for (int p = parent[s]; p != -1; p = parent[p]) ++depth;
      lengths[s] = static_cast<std::uint8_t>(depth);
      longest = std::max(longest, depth);
    }
    if (longest <= kMaxCodeLength) return lengths;
    // Flatten the distribution and retry until the tree is shallow enough.
    for (auto& f : freq) {
      if (f > 0) f = 1 + f / 2;
    }
  }
}

struct CanonicalCode {
  std::array<std::uint32_t, kHuffmanSymbols> codes{};
  // Decoding tables indexed by length.
  std::array<std::uint32_t, kMaxCodeLength + 2> first_code{};
  std::array<std::uint32_t, kMaxCodeLength + 2> count{};
  std::array<std::uint32_t, kMaxCodeLength + 2> offset{};
  std::vector<std::uint16_t> sorted_symbols;
  int max_length = 0;
};

CanonicalCode make_canonical(const HuffmanTable& table) {
  CanonicalCode cc;
  for (std::size_t s = 0; s < kHuffmanSymbols; ++s) {
    const int len = table.code_lengths[s];
    if (len == 0) continue;
    if (len > kMaxCodeLength) throw Error(ErrorCode::InvalidTable, "code length too long");
    ++cc.count[len];
    cc.max_length = std::max(cc.max_length, len);
  }
  if (kraft_sum(table) > 1.0) throw Error(ErrorCode::InvalidTable, "Kraft inequality violated");

  std::uint32_t code = 0;
  std::uint32_t position = 0;
  for (int len = 1; len <= kMaxCodeLength; ++len) {
    code <<= 1;
    cc.first_code[len] = code;
    cc.offset[len] = position;
    code += cc.count[len];
    position += cc.count[len];
  }
  cc.sorted_symbols.resize(position);
  std::array<std::uint32_t, kMaxCodeLength + 2> fill{};
  for (int len = 1; len <= kMaxCodeLength; ++len) {
    for (std::size_t s = 0; s < kHuffmanSymbols; ++s) {
      if (table.code_lengths[s] != len) continue;
      cc.codes[s] = cc.first_code[len] + fill[len];
      cc.sorted_symbols[cc.offset[len] + fill[len]] = static_cast<std::uint16_t>(s);
      ++fill[len];
    }
  }
  return cc;
}

bool only_end_of_block(const HuffmanTable& table) {
  for (std::size_t s = 0; s < kEndOfBlock; ++s) {
    if (table.code_lengths[s] != 0) return false;
  }
  return true;
}

}  // namespace

void BitSequence::push(std::uint32_t code, int length) {
  for (int i = length - 1; i >= 0; --i) {
    if ((bit_length & 7) == 0) bytes.push_back(0);
    if ((code >> i) & 1u) bytes.back() |= static_cast<std::uint8_t>(0x80u >> (bit_length & 7));
    ++bit_length;
  }
}

double kraft_sum(const HuffmanTable& table) {
  double sum = 0.0;
  for (std::uint8_t len : table.code_lengths) {
    if (len != 0) sum += std::ldexp(1.0, -static_cast<int>(len));
  }
  return sum;
}

HuffmanCoded huffman_encode(std::span<const std::uint8_t> data) {
  Frequencies freq{};
  for (std::uint8_t b : data) ++freq[b];
  freq[kEndOfBlock] = 1;

  HuffmanCoded out;
  out.table.code_lengths = build_lengths(freq);
  // A lone end-of-block symbol needs no bits at all.
  if (data.empty()) return out;

  const CanonicalCode cc = make_canonical(out.table);
  out.bits.bytes.reserve(data.size() / 2);
  for (std::uint8_t b : data) out.bits.push(cc.codes[b], out.table.code_lengths[b]);
  out.bits.push(cc.codes[kEndOfBlock], out.table.code_lengths[kEndOfBlock]);
  return out;
}

Bytes huffman_decode(const HuffmanTable& table, const BitSequence& bits) {
  if (table.code_lengths[kEndOfBlock] == 0) {
    throw Error(ErrorCode::InvalidTable, "table lacks an end-of-block code");
  }
  const CanonicalCode cc = make_canonical(table);
  if (only_end_of_block(table)) return {};
  if (bits.bytes.size() * 8 < bits.bit_length) {
    throw Error(ErrorCode::TruncatedStream, "bit length exceeds buffer");
  }

  Bytes out;
  std::uint64_t pos = 0;
  while (true) {
    std::uint32_t code = 0;
    int len = 0;
    while (true) {
      if (pos >= bits.bit_length) throw Error(ErrorCode::TruncatedStream, "stream ended mid-code");
      code = (code << 1) | (bits.at(pos++) ? 1u : 0u);
      ++len;
      if (len > cc.max_length) throw Error(ErrorCode::TruncatedStream, "no code matches");
      if (cc.count[len] != 0 && code - cc.first_code[len] < cc.count[len]) break;
    }
    const std::uint16_t symbol = cc.sorted_symbols[cc.offset[len] + (code - cc.first_code[len])];
    if (symbol == kEndOfBlock) return out;
    out.push_back(static_cast<std::uint8_t>(symbol));
  }
}

}  // namespace mrpods

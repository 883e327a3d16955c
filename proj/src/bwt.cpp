#include <algorithm>
#include <numeric>

#include "mrpods/compress.hpp"
#include "mrpods/error.hpp"

namespace mrpods {
namespace {

// Sorts all cyclic rotations of `s` by prefix doubling with radix passes.
// Returns start offsets ordered by (rotation content, start offset).
std::vector<std::uint32_t> sort_rotations(std::span<const std::uint8_t> s) {
  const std::size_t n = s.size();
  std::vector<std::uint32_t> sa(n), tmp(n), rank(n), next_rank(n);
  std::vector<std::uint32_t> count(std::max<std::size_t>(n, 256) + 1);

  for (std::size_t i = 0; i < n; ++i) rank[i] = s[i];
  std::size_t classes = 256;

  auto counting_sort = [&](const std::vector<std::uint32_t>& order) {
    std::fill(count.begin(), count.begin() + classes + 1, 0);
    for (std::uint32_t i : order) ++count[rank[i] + 1];
    for (std::size_t c = 1; c <= classes; ++c) count[c] += count[c - 1];
    for (std::uint32_t i : order) sa[count[rank[i]]++] = i;
  };

  std::vector<std::uint32_t> identity(n);
  std::iota(identity.begin(), identity.end(), 0u);
  counting_sort(identity);

  for (std::size_t k = 1; k < n; k <<= 1) {
    // Order by second key (rank of i+k) falls out of the current order.
    for (std::size_t i = 0; i < n; ++i) tmp[i] = static_cast<std::uint32_t>((sa[i] + n - k) % n);
    counting_sort(tmp);

    next_rank[sa[0]] = 0;
    std::uint32_t r = 0;
    for (std::size_t i = 1; i < n; ++i) {
      const std::uint32_t a = sa[i - 1], b = sa[i];
      if (rank[a] != rank[b] || rank[(a + k) % n] != rank[(b + k) % n]) ++r;
      next_rank[b] = r;
    }
    rank.swap(next_rank);
    classes = static_cast<std::size_t>(r) + 1;
    if (classes == n) break;
  }

  // Final pass in index order makes ties (periodic inputs) index-stable.
  counting_sort(identity);
  return sa;
}

}  // namespace

BwtBlock bwt_forward(std::span<const std::uint8_t> block, std::size_t block_size) {
  if (block.empty()) throw Error(ErrorCode::EmptyBlock, "BWT input is empty");
  if (block.size() > block_size) {
    throw Error(ErrorCode::InputTooLarge, "BWT block exceeds block_size");
  }
  const std::size_t n = block.size();
  const auto sa = sort_rotations(block);

  BwtBlock out;
  out.data.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.data[i] = block[(sa[i] + n - 1) % n];
    if (sa[i] == 0) out.primary_index = static_cast<std::uint32_t>(i);
  }
  return out;
}

Bytes bwt_inverse(const BwtBlock& block) {
  const std::size_t n = block.data.size();
  if (n == 0) throw Error(ErrorCode::EmptyBlock, "BWT block is empty");
  if (block.primary_index >= n) {
    throw Error(ErrorCode::IndexOutOfRange, "primary_index beyond block length");
  }

  std::array<std::uint32_t, 256> first{};
  for (std::uint8_t c : block.data) ++first[c];
  std::uint32_t sum = 0;
  for (auto& f : first) {
    const std::uint32_t c = f;
    f = sum;
    sum += c;
  }

  // lf[i]: row whose rotation starts one octet earlier than row i's.
  std::vector<std::uint32_t> lf(n);
  std::array<std::uint32_t, 256> seen{};
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t c = block.data[i];
    lf[i] = first[c] + seen[c]++;
  }

  Bytes out(n);
  std::uint32_t row = block.primary_index;
  for (std::size_t i = n; i-- > 0;) {
    out[i] = block.data[row];
    row = lf[row];
  }
  return out;
}

}  // namespace mrpods

#include <numeric>

#include "mrpods/compress.hpp"

namespace mrpods {

Bytes mtf_forward(std::span<const std::uint8_t> data) {
  std::array<std::uint8_t, 256> order{};
  std::iota(order.begin(), order.end(), std::uint8_t{0});
  Bytes out;
  out.reserve(data.size());
  for (std::uint8_t symbol : data) {
    std::size_t idx = 0;
    while (order[idx] != symbol) ++idx;
    out.push_back(static_cast<std::uint8_t>(idx));
    for (; idx > 0; --idx) order[idx] = order[idx - 1];
    order[0] = symbol;
  }
  return out;
}

Bytes mtf_inverse(std::span<const std::uint8_t> data) {
  std::array<std::uint8_t, 256> order{};
  std::iota(order.begin(), order.end(), std::uint8_t{0});
  Bytes out;
  out.reserve(data.size());
  for (std::uint8_t idx : data) {
    const std::uint8_t symbol = order[idx];
    out.push_back(symbol);
    for (std::size_t i = idx; i > 0; --i) order[i] = order[i - 1];
    order[0] = symbol;
  }
  return out;
}

}  // namespace mrpods

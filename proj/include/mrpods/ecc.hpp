#pragma once

// Reed-Solomon coding over GF(2^8), primitive polynomial 0x11D, generator
// roots alpha^0 .. alpha^(n-k-1). Codewords are systematic: data first.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mrpods {

namespace gf256 {

std::uint8_t exp(int power);
// log(0) is undefined; callers must not ask.
int log(std::uint8_t value);
std::uint8_t mul(std::uint8_t a, std::uint8_t b);
std::uint8_t div(std::uint8_t a, std::uint8_t b);
std::uint8_t inv(std::uint8_t a);
// Carry-less multiply reduced by 0x11D without tables.
std::uint8_t mul_slow(std::uint8_t a, std::uint8_t b);

}  // namespace gf256

// Parity-to-data symbol proportion, written "P:D".
struct RedundancyRatio {
  std::uint32_t parity = 1;
  std::uint32_t data = 5;

  static RedundancyRatio parse(const std::string& text);
  std::string to_string() const;
  friend bool operator==(const RedundancyRatio&, const RedundancyRatio&) = default;
};

struct RsParams {
  int n = 216;
  int k = 180;
  RedundancyRatio ratio{};

  int parity() const { return n - k; }
  // (n - k) / k as actually realized after rounding.
  double realized_ratio() const { return static_cast<double>(n - k) / k; }
};

// k = block_symbols, n = k + ceil(k * parity / data). Throws
// RatioUnrealizable when n would exceed 255.
RsParams redundancy_to_params(RedundancyRatio ratio, int block_symbols);

struct Codeword {
  std::vector<std::uint8_t> symbols;
  // Empty, or one flag per symbol marking known-bad positions.
  std::vector<bool> erasures;
};

struct RsDecodeResult {
  std::vector<std::uint8_t> data;
  std::vector<int> corrected_positions;
  int errors = 0;
  int erasures = 0;
};

struct RsDecodeOptions {
  // Parity symbols held back from correction so that a decode only succeeds
  // with spare redundancy left over for detection: 2e + s <= n - k - reserve.
  int reserve = 0;
};

Codeword rs_encode(std::span<const std::uint8_t> data, const RsParams& params);

// Throws UncorrectableCodeword when 2e + s exceeds the budget or the
// syndromes are inconsistent with any correctable pattern.
RsDecodeResult rs_decode(const Codeword& word, const RsParams& params,
                         const RsDecodeOptions& options = {});

// Same as rs_decode but reports failure as nullopt.
std::optional<RsDecodeResult> rs_try_decode(const Codeword& word, const RsParams& params,
                                            const RsDecodeOptions& options = {});

// True when every generator root is a root of the codeword polynomial.
bool rs_is_codeword(std::span<const std::uint8_t> symbols, const RsParams& params);

}  // namespace mrpods

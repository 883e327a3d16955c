#include <algorithm>
#include <array>
#include <charconv>
#include <mutex>

#include "mrpods/ecc.hpp"
#include "mrpods/error.hpp"

namespace mrpods {
namespace {

using Poly = std::vector<std::uint8_t>;  // coefficient i multiplies x^i

// Generator for `parity` roots, stored highest degree first for division.
const Poly& generator(int parity) {
  static std::array<Poly, 256> cache;
  static std::array<std::once_flag, 256> once;
  std::call_once(once[parity], [parity] {
    Poly g{1};
    for (int i = 0; i < parity; ++i) {
      Poly next(g.size() + 1, 0);
      const std::uint8_t root = gf256::exp(i);
      for (std::size_t j = 0; j < g.size(); ++j) {
        next[j] ^= g[j];
        next[j + 1] ^= gf256::mul(g[j], root);
      }
      g = std::move(next);
    }
    cache[parity] = std::move(g);
  });
  return cache[parity];
}

std::uint8_t poly_eval(const Poly& p, std::uint8_t x) {
  std::uint8_t y = 0;
  for (std::size_t i = p.size(); i-- > 0;) y = gf256::mul(y, x) ^ p[i];
  return y;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] ^= gf256::mul(a[i], b[j]);
  }
  return out;
}

void trim(Poly& p) {
  while (p.size() > 1 && p.back() == 0) p.pop_back();
}

std::vector<std::uint8_t> syndromes(std::span<const std::uint8_t> symbols, int parity) {
  std::vector<std::uint8_t> s(parity);
  for (int i = 0; i < parity; ++i) {
    const std::uint8_t root = gf256::exp(i);
    std::uint8_t acc = 0;
    for (std::uint8_t c : symbols) acc = gf256::mul(acc, root) ^ c;
    s[i] = acc;
  }
  return s;
}

// Berlekamp-Massey over `seq`; returns the shortest connection polynomial.
Poly berlekamp_massey(std::span<const std::uint8_t> seq) {
  Poly c{1}, b{1};
  int l = 0;
  int m = 1;
  std::uint8_t bd = 1;
  for (std::size_t r = 0; r < seq.size(); ++r) {
    std::uint8_t d = seq[r];
    for (int i = 1; i <= l && i < static_cast<int>(c.size()); ++i) d ^= gf256::mul(c[i], seq[r - i]);
    if (d == 0) {
      ++m;
      continue;
    }
    const std::uint8_t coef = gf256::div(d, bd);
    Poly t = c;
    if (c.size() < b.size() + m) c.resize(b.size() + m, 0);
    for (std::size_t i = 0; i < b.size(); ++i) c[i + m] ^= gf256::mul(coef, b[i]);
    if (2 * l <= static_cast<int>(r)) {
      l = static_cast<int>(r) + 1 - l;
      b = std::move(t);
      bd = d;
      m = 1;
    } else {
      ++m;
    }
  }
  trim(c);
  return c;
}

void validate_params(const RsParams& p) {
  if (p.k < 1 || p.n > 255 || p.k >= p.n) {
    throw Error(ErrorCode::ConfigInvalid, "RS parameters must satisfy 1 <= k < n <= 255");
  }
}

}  // namespace

RedundancyRatio RedundancyRatio::parse(const std::string& text) {
  const auto colon = text.find(':');
  RedundancyRatio r;
  auto parse_part = [&](std::string_view part, std::uint32_t& out) {
    const auto res = std::from_chars(part.data(), part.data() + part.size(), out);
    return res.ec == std::errc() && res.ptr == part.data() + part.size() && out > 0;
  };
  if (colon == std::string::npos ||
      !parse_part(std::string_view(text).substr(0, colon), r.parity) ||
      !parse_part(std::string_view(text).substr(colon + 1), r.data)) {
    throw Error(ErrorCode::ConfigInvalid, "redundancy must look like P:D with positive integers, got '" + text + "'");
  }
  return r;
}

std::string RedundancyRatio::to_string() const {
  return std::to_string(parity) + ":" + std::to_string(data);
}

RsParams redundancy_to_params(RedundancyRatio ratio, int block_symbols) {
  if (ratio.parity == 0 || ratio.data == 0) {
    throw Error(ErrorCode::ConfigInvalid, "ratio components must be positive");
  }
  if (block_symbols < 1 || block_symbols > 255) {
    throw Error(ErrorCode::ConfigInvalid, "block_symbols must lie in [1, 255]");
  }
  const std::uint64_t k = static_cast<std::uint64_t>(block_symbols);
  const std::uint64_t parity = (k * ratio.parity + ratio.data - 1) / ratio.data;
  if (k + parity > 255) {
    throw Error(ErrorCode::RatioUnrealizable,
                "k=" + std::to_string(k) + " at " + ratio.to_string() + " needs n=" +
                    std::to_string(k + parity) + " > 255");
  }
  return RsParams{static_cast<int>(k + parity), static_cast<int>(k), ratio};
}

Codeword rs_encode(std::span<const std::uint8_t> data, const RsParams& params) {
  validate_params(params);
  if (static_cast<int>(data.size()) != params.k) {
    throw Error(ErrorCode::LengthMismatch,
                "expected " + std::to_string(params.k) + " data symbols, got " + std::to_string(data.size()));
  }
  const int parity = params.parity();
  const Poly& g = generator(parity);  // g[0] is the x^parity coefficient (== 1)

  Codeword out;
  out.symbols.assign(data.begin(), data.end());
  out.symbols.resize(params.n, 0);
  // Long division of data * x^parity by g; the remainder lands in the tail.
  std::vector<std::uint8_t> work(out.symbols);
  for (int i = 0; i < params.k; ++i) {
    const std::uint8_t coef = work[i];
    if (coef == 0) continue;
    for (int j = 1; j <= parity; ++j) work[i + j] ^= gf256::mul(g[j], coef);
  }
  std::copy(work.begin() + params.k, work.end(), out.symbols.begin() + params.k);
  return out;
}

bool rs_is_codeword(std::span<const std::uint8_t> symbols, const RsParams& params) {
  const auto s = syndromes(symbols, params.parity());
  return std::all_of(s.begin(), s.end(), [](std::uint8_t v) { return v == 0; });
}

std::optional<RsDecodeResult> rs_try_decode(const Codeword& word, const RsParams& params,
                                            const RsDecodeOptions& options) {
  validate_params(params);
  if (static_cast<int>(word.symbols.size()) != params.n) return std::nullopt;
  if (!word.erasures.empty() && static_cast<int>(word.erasures.size()) != params.n) return std::nullopt;
  const int n = params.n;
  const int parity = params.parity();
  const int budget = parity - options.reserve;

  std::vector<int> erased;
  if (!word.erasures.empty()) {
    for (int j = 0; j < n; ++j) {
      if (word.erasures[j]) erased.push_back(j);
    }
  }
  const int s = static_cast<int>(erased.size());
  if (s > budget) return std::nullopt;

  RsDecodeResult result;
  result.erasures = s;
  const auto synd = syndromes(word.symbols, parity);
  if (std::all_of(synd.begin(), synd.end(), [](std::uint8_t v) { return v == 0; })) {
    result.data.assign(word.symbols.begin(), word.symbols.begin() + params.k);
    return result;
  }

  // Position j carries x^(n-1-j); its locator is alpha^(n-1-j).
  auto locator_of = [n](int j) { return gf256::exp(n - 1 - j); };

  Poly gamma{1};
  for (int j : erased) gamma = poly_mul(gamma, Poly{1, locator_of(j)});

  // Forney syndromes: fold the known erasures out of the syndrome sequence.
  Poly synd_poly(synd.begin(), synd.end());
  Poly folded = poly_mul(gamma, synd_poly);
  folded.resize(parity);
  const Poly lambda = berlekamp_massey(std::span<const std::uint8_t>(folded).subspan(s));
  const int errors = static_cast<int>(lambda.size()) - 1;
  if (2 * errors + s > budget) return std::nullopt;

  Poly errata = poly_mul(lambda, gamma);
  trim(errata);
  const int degree = static_cast<int>(errata.size()) - 1;

  Poly omega = poly_mul(synd_poly, errata);
  omega.resize(parity);

  // Formal derivative: odd-power terms survive in characteristic 2.
  Poly derivative(std::max<std::size_t>(errata.size() - 1, 1), 0);
  for (std::size_t i = 1; i < errata.size(); i += 2) derivative[i - 1] = errata[i];

  std::vector<std::uint8_t> fixed = word.symbols;
  int roots = 0;
  for (int j = 0; j < n; ++j) {
    const std::uint8_t x = locator_of(j);
    const std::uint8_t x_inv = gf256::inv(x);
    if (poly_eval(errata, x_inv) != 0) continue;
    ++roots;
    const std::uint8_t denom = poly_eval(derivative, x_inv);
    if (denom == 0) return std::nullopt;
    const std::uint8_t magnitude = gf256::mul(x, gf256::div(poly_eval(omega, x_inv), denom));
    if (magnitude != 0) {
      fixed[j] ^= magnitude;
      result.corrected_positions.push_back(j);
    }
  }
  if (roots != degree) return std::nullopt;
  if (!rs_is_codeword(fixed, params)) return std::nullopt;

  result.errors = errors;
  result.data.assign(fixed.begin(), fixed.begin() + params.k);
  return result;
}

RsDecodeResult rs_decode(const Codeword& word, const RsParams& params, const RsDecodeOptions& options) {
  if (static_cast<int>(word.symbols.size()) != params.n) {
    throw Error(ErrorCode::LengthMismatch,
                "expected " + std::to_string(params.n) + " symbols, got " + std::to_string(word.symbols.size()));
  }
  if (!word.erasures.empty() && static_cast<int>(word.erasures.size()) != params.n) {
    throw Error(ErrorCode::LengthMismatch, "erasure flags must match codeword length");
  }
  auto result = rs_try_decode(word, params, options);
  if (!result) throw Error(ErrorCode::UncorrectableCodeword, "error/erasure budget exceeded or inconsistent syndromes");
  return std::move(*result);
}

}  // namespace mrpods

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "mrpods/ecc.hpp"
#include "mrpods/error.hpp"

namespace mrpods {
namespace {

using Poly = std::vector<std::uint8_t>;  // highest degree first

// Schoolbook arithmetic with the table-free multiplier.
Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] ^= gf256::mul_slow(a[i], b[j]);
  }
  return out;
}

std::uint8_t alpha_pow(int e) {
  std::uint8_t v = 1;
  for (int i = 0; i < e; ++i) v = gf256::mul_slow(v, 2);
  return v;
}

// Parity = remainder of data * x^(n-k) divided by prod (x - alpha^i).
Poly long_division_parity(const Poly& data, int parity) {
  Poly g{1};
  for (int i = 0; i < parity; ++i) g = poly_mul(g, Poly{1, alpha_pow(i)});
  Poly rem(data);
  rem.resize(data.size() + parity, 0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::uint8_t coef = rem[i];
    if (!coef) continue;
    for (std::size_t j = 0; j < g.size(); ++j) rem[i + j] ^= gf256::mul_slow(g[j], coef);
  }
  return Poly(rem.end() - parity, rem.end());
}

Poly random_data(std::mt19937_64& rng, int k) {
  Poly d(k);
  for (auto& b : d) b = static_cast<std::uint8_t>(rng());
  return d;
}

std::vector<int> distinct_positions(std::mt19937_64& rng, int n, int count) {
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(count);
  return all;
}

const RsParams kDefault{216, 180, {1, 5}};

TEST(Gf256, TablesAgreeWithCarrylessMultiply) {
  for (int a = 0; a < 256; ++a) {
    for (int b = 0; b < 256; ++b) {
      ASSERT_EQ(gf256::mul(a, b), gf256::mul_slow(a, b)) << a << "*" << b;
    }
  }
  for (int a = 1; a < 256; ++a) {
    EXPECT_EQ(gf256::mul(a, gf256::inv(a)), 1);
    EXPECT_EQ(gf256::exp(gf256::log(a)), a);
    EXPECT_EQ(gf256::div(gf256::mul(a, 77), 77), a);
  }
}

TEST(Gf256, AlphaIsPrimitiveForPoly11D) {
  std::set<int> seen;
  for (int e = 0; e < 255; ++e) seen.insert(alpha_pow(e));
  EXPECT_EQ(seen.size(), 255u);
  EXPECT_EQ(alpha_pow(8), 0x1D);
  EXPECT_EQ(gf256::exp(8), 0x1D);
}

TEST(Redundancy, ParamsFromRatio) {
  const RsParams p = redundancy_to_params({1, 5}, 180);
  EXPECT_EQ(p.n, 216);
  EXPECT_EQ(p.k, 180);
  const RsParams q = redundancy_to_params({1, 10}, 180);
  EXPECT_EQ(q.n, 198);
  EXPECT_EQ(redundancy_to_params({1, 3}, 100).n, 134);
  EXPECT_NEAR(p.realized_ratio(), 0.2, 1e-12);
  try {
    redundancy_to_params({1, 1}, 180);
    FAIL() << "n > 255 accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RatioUnrealizable);
  }
}

TEST(Redundancy, ParseAndFormat) {
  const RedundancyRatio r = RedundancyRatio::parse("2:7");
  EXPECT_EQ(r.parity, 2u);
  EXPECT_EQ(r.data, 7u);
  EXPECT_EQ(r.to_string(), "2:7");
  for (const char* bad : {"", "1", "1:0", "a:b", "1:5:2", "-1:5"}) {
    EXPECT_THROW(RedundancyRatio::parse(bad), Error) << bad;
  }
}

TEST(ReedSolomon, EncodeMatchesLongDivision) {
  std::mt19937_64 rng(1);
  for (const RsParams& p : {kDefault, RsParams{198, 180, {}}, RsParams{64, 44, {}}, RsParams{255, 223, {}}}) {
    for (int trial = 0; trial < 20; ++trial) {
      const Poly data = random_data(rng, p.k);
      const Codeword cw = rs_encode(data, p);
      ASSERT_EQ(cw.symbols.size(), static_cast<std::size_t>(p.n));
      EXPECT_TRUE(std::equal(data.begin(), data.end(), cw.symbols.begin()));
      EXPECT_EQ(Poly(cw.symbols.begin() + p.k, cw.symbols.end()), long_division_parity(data, p.n - p.k));
      EXPECT_TRUE(rs_is_codeword(cw.symbols, p));
    }
  }
}

TEST(ReedSolomon, CorrectsEighteenErrorsEveryTime) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    const Poly data = random_data(rng, 180);
    Codeword cw = rs_encode(data, kDefault);
    for (int pos : distinct_positions(rng, 216, 18)) cw.symbols[pos] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    const RsDecodeResult r = rs_decode(cw, kDefault);
    ASSERT_EQ(r.data, data) << "trial " << trial;
    ASSERT_EQ(r.errors, 18);
  }
}

TEST(ReedSolomon, ErasureBudgetBoundaryIsExact) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const Poly data = random_data(rng, 180);
    Codeword cw = rs_encode(data, kDefault);
    const std::vector<int> lost = distinct_positions(rng, 216, 37);
    cw.erasures.assign(216, false);
    for (int i = 0; i < 36; ++i) {
      cw.symbols[lost[i]] = static_cast<std::uint8_t>(rng());
      cw.erasures[lost[i]] = true;
    }
    const RsDecodeResult ok = rs_decode(cw, kDefault);
    ASSERT_EQ(ok.data, data);
    ASSERT_EQ(ok.erasures, 36);

    cw.symbols[lost[36]] ^= 0x81;
    cw.erasures[lost[36]] = true;
    try {
      rs_decode(cw, kDefault);
      FAIL() << "37 erasures decoded";
    } catch (const Error& e) {
      ASSERT_EQ(e.code(), ErrorCode::UncorrectableCodeword);
    }
  }
}

TEST(ReedSolomon, MixedErrorsAndErasuresWithinBudget) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    const int errors = static_cast<int>(rng() % 19);
    const int erasures = static_cast<int>(rng() % (37 - 2 * errors));
    const Poly data = random_data(rng, 180);
    Codeword cw = rs_encode(data, kDefault);
    cw.erasures.assign(216, false);
    const std::vector<int> pos = distinct_positions(rng, 216, errors + erasures);
    for (int i = 0; i < errors + erasures; ++i) {
      cw.symbols[pos[i]] ^= static_cast<std::uint8_t>(1 + rng() % 255);
      if (i >= errors) cw.erasures[pos[i]] = true;
    }
    ASSERT_EQ(rs_decode(cw, kDefault).data, data) << errors << " errors, " << erasures << " erasures";
  }
}

TEST(ReedSolomon, ReserveShrinksTheBudget) {
  std::mt19937_64 rng(5);
  const Poly data = random_data(rng, 180);
  Codeword cw = rs_encode(data, kDefault);
  for (int pos : distinct_positions(rng, 216, 17)) cw.symbols[pos] ^= 0x3C;
  EXPECT_TRUE(rs_try_decode(cw, kDefault, {0}).has_value());
  EXPECT_TRUE(rs_try_decode(cw, kDefault, {2}).has_value());
  EXPECT_FALSE(rs_try_decode(cw, kDefault, {4}).has_value());
}

TEST(ReedSolomon, BeyondBudgetNeverReturnsWrongDataSilently) {
  std::mt19937_64 rng(6);
  int wrong = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Poly data = random_data(rng, 180);
    Codeword cw = rs_encode(data, kDefault);
    for (int pos : distinct_positions(rng, 216, 19 + static_cast<int>(rng() % 20))) {
      cw.symbols[pos] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    }
    const auto r = rs_try_decode(cw, kDefault);
    if (r && r->data != data) {
      ++wrong;
      const Codeword re = rs_encode(r->data, kDefault);
      EXPECT_TRUE(rs_is_codeword(re.symbols, kDefault));
    }
  }
  // Miscorrection onto another codeword is possible in principle but must
  // be rare at 19+ errors with 36 parity symbols.
  EXPECT_LE(wrong, 1);
}

TEST(ReedSolomon, RejectsBadParams) {
  EXPECT_THROW(rs_encode(Poly(10), RsParams{8, 10, {}}), Error);
  EXPECT_THROW(rs_encode(Poly(10), RsParams{300, 10, {}}), Error);
  EXPECT_THROW(rs_encode(Poly(9), RsParams{20, 10, {}}), Error);
}

}  // namespace
}  // namespace mrpods

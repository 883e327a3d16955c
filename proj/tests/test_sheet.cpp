#include <gtest/gtest.h>

#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "mrpods/error.hpp"
#include "mrpods/sheet.hpp"

#ifndef MRPODS_TEST_DATA
#define MRPODS_TEST_DATA "tests/data"
#endif

namespace mrpods {
namespace {

Bytes hex_decode(const std::string& hex) {
  Bytes out;
  for (std::size_t i = 0; i + 1 < hex.size(); i += 2) out.push_back(static_cast<std::uint8_t>(std::stoi(hex.substr(i, 2), nullptr, 16)));
  return out;
}

std::vector<std::string> golden_lines() {
  std::ifstream in(std::string(MRPODS_TEST_DATA) + "/header_v1.hex");
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

PageHeader sample_header(bool withheld) {
  PageHeader h;
  for (int i = 0; i < 16; ++i) h.payload_id[i] = static_cast<std::uint8_t>(i);
  h.rs_n = 216;
  h.rs_k = 180;
  h.dots_per_inch = 200;
  if (withheld) {
    h.total_withheld = true;
    h.page_index = 7;
    h.total_pages = kOmittedTotal;
    h.payload_total_bytes = kWithheldLength;
  } else {
    h.page_index = 2;
    h.total_pages = 5;
    h.payload_total_bytes = 1234567;
  }
  return h;
}

SheetConfig small_config() {
  SheetConfig c;
  c.page_width_in = 3.0;
  c.page_height_in = 3.0;
  return c;
}

ByteStream random_stream(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ByteStream s{Bytes(n), Stage::Compressed};
  for (auto& b : s.bytes) b = static_cast<std::uint8_t>(rng());
  return s;
}

// A real container, so that assembly can find the end without totals.
ByteStream container_stream(std::size_t n, std::uint64_t seed) {
  const ByteStream raw{random_stream(n, seed).bytes, Stage::Raw};
  return compress(raw).first;
}

TEST(Header, MatchesGoldenRecords) {
  const auto lines = golden_lines();
  ASSERT_EQ(lines.size(), 2u);
  for (int i = 0; i < 2; ++i) {
    const HeaderRecord rec = header_serialize(sample_header(i == 1));
    EXPECT_EQ(Bytes(rec.begin(), rec.end()), hex_decode(lines[i])) << "record " << i;
    PageHeader want = sample_header(i == 1);
    const PageHeader got = header_parse(hex_decode(lines[i]));
    want.header_crc = got.header_crc;
    EXPECT_EQ(got, want);
  }
}

TEST(Header, EverySingleBitFlipIsCaught) {
  const HeaderRecord rec = header_serialize(sample_header(false));
  for (int bit = 0; bit < kHeaderBytes * 8; ++bit) {
    HeaderRecord bad = rec;
    bad[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    try {
      header_parse(bad);
      FAIL() << "bit " << bit;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::BadHeaderCrc);
    }
  }
}

TEST(Header, UnknownVersionWithValidCrc) {
  PageHeader h = sample_header(false);
  h.format_version = 2;
  try {
    header_parse(header_serialize(h));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownVersion);
  }
}

TEST(Config, ValidationNamesTheField) {
  SheetConfig c;
  EXPECT_NO_THROW(validate(c));
  c.dots_per_inch = 49;
  EXPECT_THROW(validate(c), Error);
  c = SheetConfig{};
  c.dot_size_percent = 101;
  EXPECT_THROW(validate(c), Error);
  c = SheetConfig{};
  c.page_width_in = 0.05;
  EXPECT_THROW(validate(c), Error);
  c = SheetConfig{};
  c.margin_in = 4.3;
  EXPECT_THROW(validate(c), Error);
}

TEST(Capacity, DefaultLetterPageAgainstHandAccounting) {
  const CapacityReport r = page_capacity(SheetConfig{});
  EXPECT_EQ(r.grid_cols, 1700);
  EXPECT_EQ(r.grid_rows, 2200);
  EXPECT_EQ(r.raw_dots, 3740000u);

  // Hand accounting for 1700 x 2200 cells: a 3-cell border leaves a
  // 1694 x 2194 data area; 2-row header bands hold 6 copies of 512 bits;
  // 18-cell tiles give 94 x 121 blocks of 26 payload octets; RS(216,180).
  const std::uint64_t data_area = 1694ull * 2194;
  const std::uint64_t blocks = 94ull * 121;
  const std::uint64_t codewords = blocks * 26 / 216;
  EXPECT_EQ(r.border_cells, 3740000 - data_area);
  EXPECT_EQ(r.header_band_cells, 2ull * 2 * 1694);
  EXPECT_EQ(r.block_cells, blocks * 256);
  EXPECT_EQ(r.gutter_cells, blocks * (324 - 256));
  EXPECT_EQ(r.block_overhead_bytes, blocks * 6);
  EXPECT_EQ(r.stream_bytes, codewords * 216);
  EXPECT_EQ(r.parity_bytes, codewords * 36);
  EXPECT_EQ(r.usable_payload_bytes, codewords * 180);
  EXPECT_EQ(r.usable_payload_bytes, 246420u);
  EXPECT_EQ(r.border_cells + r.header_band_cells + r.gutter_cells + r.spare_cells + r.block_cells, r.raw_dots);

  const std::string text = r.itemize();
  for (const char* item : {"frame + timing", "header bands", "tile gutters", "address + CRC-16", "parity", "usable payload"}) {
    EXPECT_NE(text.find(item), std::string::npos) << item;
  }
}

TEST(Capacity, RawDotsQuadraticInDpi) {
  SheetConfig c;
  c.dots_per_inch = 100;
  const auto a = page_capacity(c).raw_dots;
  c.dots_per_inch = 200;
  EXPECT_EQ(page_capacity(c).raw_dots, 4 * a);
}

TEST(Capacity, MarginShrinksTheGrid) {
  SheetConfig c;
  c.margin_in = 0.25;
  const CapacityReport r = page_capacity(c);
  EXPECT_EQ(r.grid_cols, 1600);
  EXPECT_EQ(r.grid_rows, 2100);
}

TEST(RsChoice, PreferredKUnlessRatioForbidsIt) {
  EXPECT_EQ(page_rs_params({1, 5}).n, 216);
  EXPECT_EQ(page_rs_params({1, 10}).n, 198);
  const RsParams even = page_rs_params({1, 1});
  EXPECT_EQ(even.k, 127);
  EXPECT_EQ(even.n, 254);
}

TEST(Paginate, CapacityBoundary) {
  const SheetConfig c = small_config();
  const std::size_t cap = layout_for(c).data_bytes_per_page();
  EXPECT_EQ(paginate(random_stream(cap, 1), c).size(), 1u);
  EXPECT_EQ(paginate(random_stream(cap + 1, 1), c).size(), 2u);
}

TEST(Paginate, PaddingFlaggedAndAddressesIncrease) {
  const SheetConfig c = small_config();
  const auto pages = paginate(random_stream(100, 2), c);
  ASSERT_EQ(pages.size(), 1u);
  int padding = 0;
  for (std::size_t i = 0; i < pages[0].blocks.size(); ++i) {
    const DataBlock& b = pages[0].blocks[i];
    EXPECT_EQ(b.index(), i);
    EXPECT_EQ(b.compute_crc(), b.crc16);
    padding += b.is_padding();
  }
  EXPECT_GT(padding, 0);
  EXPECT_LT(padding, static_cast<int>(pages[0].blocks.size()));
}

TEST(Paginate, RejectsEmptyAndWrongStage) {
  EXPECT_THROW(paginate(ByteStream{{}, Stage::Compressed}, SheetConfig{}), Error);
  EXPECT_THROW(paginate(ByteStream{{1}, Stage::Raw}, SheetConfig{}), Error);
}

TEST(Assemble, RoundTripAcrossConfigGrid) {
  for (int dpi : {100, 200, 300}) {
    for (const char* ratio : {"1:1", "1:5", "1:10"}) {
      for (bool omit : {false, true}) {
        SheetConfig c;
        c.page_width_in = 2.5;
        c.page_height_in = 2.5;
        c.dots_per_inch = dpi;
        c.redundancy = RedundancyRatio::parse(ratio);
        c.omit_total_pages = omit;
        const ByteStream s = container_stream(30000 + static_cast<std::size_t>(dpi), static_cast<std::uint64_t>(dpi));
        std::vector<Page> pages = paginate(s, c);
        std::reverse(pages.begin(), pages.end());
        const AssembleResult r = assemble(pages);
        ASSERT_TRUE(std::holds_alternative<ByteStream>(r)) << dpi << " " << ratio << " " << omit;
        EXPECT_EQ(std::get<ByteStream>(r).bytes, s.bytes);
      }
    }
  }
}

TEST(Assemble, ReportsMissingMiddlePage) {
  const SheetConfig c = small_config();
  const auto pages = paginate(random_stream(2 * layout_for(c).data_bytes_per_page() + 10, 3), c);
  ASSERT_EQ(pages.size(), 3u);
  const std::vector<Page> some{pages[0], pages[2]};
  const AssembleResult r = assemble(some);
  ASSERT_TRUE(std::holds_alternative<MissingReport>(r));
  const MissingReport& m = std::get<MissingReport>(r);
  EXPECT_EQ(m.missing_pages, std::vector<std::uint32_t>{1});
  EXPECT_FALSE(m.total_unknown);
}

TEST(Assemble, WithheldTotalMakesTailLossAmbiguous) {
  SheetConfig c = small_config();
  c.omit_total_pages = true;
  const auto pages = paginate(container_stream(2 * layout_for(c).data_bytes_per_page() + 10, 4), c);
  ASSERT_EQ(pages.size(), 3u);
  for (const Page& p : pages) {
    EXPECT_EQ(p.header.total_pages, kOmittedTotal);
    EXPECT_EQ(p.header.payload_total_bytes, kWithheldLength);
  }
  const std::vector<Page> head{pages[0], pages[1]};
  const AssembleResult r = assemble(head);
  ASSERT_TRUE(std::holds_alternative<MissingReport>(r));
  EXPECT_TRUE(std::get<MissingReport>(r).total_unknown);
  EXPECT_EQ(std::get<MissingReport>(r).reason, "total count withheld");
}

TEST(Assemble, MixedPayloadsThrowAndConflictingBlocksAreErased) {
  const SheetConfig c = small_config();
  const auto a = paginate(random_stream(500, 5), c);
  const auto b = paginate(random_stream(500, 6), c);
  const std::vector<Page> mixed{a[0], b[0]};
  try {
    assemble(mixed);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MixedPayloads);
  }
  Page forged = a[0];
  forged.blocks[0].payload[0] ^= 1;
  forged.blocks[0].crc16 = forged.blocks[0].compute_crc();
  const std::vector<Page> twice{a[0], forged};
  const AssembleResult r = assemble(twice);
  ASSERT_TRUE(std::holds_alternative<ByteStream>(r));
  EXPECT_EQ(std::get<ByteStream>(r).bytes, random_stream(500, 5).bytes);

  Page other_header = a[0];
  other_header.header.dots_per_inch += 1;
  const std::vector<Page> conflict{a[0], other_header};
  try {
    assemble(conflict);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::HeaderConflict);
  }
}

TEST(Assemble, ForeignBlocksDoNotDecodeUnderAnotherHeader) {
  const SheetConfig c = small_config();
  const auto a = paginate(random_stream(3000, 8), c);
  const auto b = paginate(random_stream(3000, 9), c);
  Page spliced = a[0];
  spliced.blocks = b[0].blocks;
  const std::vector<Page> pages{spliced};
  EXPECT_TRUE(std::holds_alternative<MissingReport>(assemble(pages)));
  EXPECT_TRUE(partial_assemble(pages).recovered_pages.empty());
}

TEST(StreamMask, DependsOnPayloadAndPage) {
  Digest16 id{};
  id[0] = 1;
  const Bytes m = stream_mask(id, 0, 100);
  EXPECT_EQ(m.size(), 100u);
  EXPECT_EQ(Bytes(m.begin(), m.begin() + 40), stream_mask(id, 0, 40));
  EXPECT_NE(m, stream_mask(id, 1, 100));
  id[15] = 1;
  EXPECT_NE(m, stream_mask(id, 0, 100));

  // hashlib.sha256(bytes(range(16)) + struct.pack("<II", 3, counter))
  Digest16 seq{};
  std::iota(seq.begin(), seq.end(), 0);
  const Bytes g = stream_mask(seq, 3, 36);
  EXPECT_EQ(to_hex(std::span(g).first(8)), "c79842d91d59f2fc");
  EXPECT_EQ(to_hex(std::span(g).subspan(32, 4)), "cbc18c7f");
}

TEST(Assemble, LostBlocksWithinBudgetStillAssemble) {
  const SheetConfig c = small_config();
  const ByteStream s = random_stream(5000, 7);
  auto pages = paginate(s, c);
  // Dropping one full tile row costs each codeword a handful of erasures.
  const int cols = layout_for(c).block_cols;
  pages[0].blocks.erase(pages[0].blocks.begin() + cols, pages[0].blocks.begin() + 2 * cols);
  const AssembleResult r = assemble(pages);
  ASSERT_TRUE(std::holds_alternative<ByteStream>(r));
  EXPECT_EQ(std::get<ByteStream>(r).bytes, s.bytes);
}

TEST(Assemble, TooManyLostBlocksGiveReportNotGarbage) {
  const SheetConfig c = small_config();
  auto pages = paginate(random_stream(5000, 8), c);
  pages[0].blocks.resize(pages[0].blocks.size() / 3);
  const AssembleResult r = assemble(pages);
  ASSERT_TRUE(std::holds_alternative<MissingReport>(r));
  EXPECT_EQ(std::get<MissingReport>(r).damaged_pages, std::vector<std::uint32_t>{0});
}

TEST(PartialAssemble, PlacesRecoveredPagesAndMapsGaps) {
  const SheetConfig c = small_config();
  const std::size_t cap = layout_for(c).data_bytes_per_page();
  const ByteStream s = random_stream(2 * cap + 100, 9);
  const auto pages = paginate(s, c);
  const std::vector<Page> some{pages[2], pages[0]};
  const PartialAssembly p = partial_assemble(some);
  EXPECT_EQ(p.recovered_pages, (std::vector<std::uint32_t>{0, 2}));
  ASSERT_EQ(p.gaps.size(), 1u);
  EXPECT_EQ(p.gaps[0].first, cap);
  EXPECT_EQ(p.gaps[0].second, 2 * cap);
  ASSERT_EQ(p.data.size(), s.bytes.size());
  EXPECT_TRUE(std::equal(p.data.begin(), p.data.begin() + cap, s.bytes.begin()));
  EXPECT_TRUE(std::equal(p.data.begin() + 2 * cap, p.data.end(), s.bytes.begin() + 2 * cap));
}

TEST(PageContainer, SerializeParseRoundTrip) {
  const auto pages = paginate(random_stream(3000, 10), small_config());
  const Bytes bytes = serialize_page(pages[0]);
  EXPECT_EQ(parse_page(bytes), pages[0]);
  Bytes cut(bytes.begin(), bytes.end() - 5);
  EXPECT_THROW(parse_page(cut), Error);
}

TEST(Interleave, EveryStreamOffsetMapsToADistinctSymbol) {
  const int codewords = 7, depth = 4, n = 216;
  std::vector<int> seen(static_cast<std::size_t>(codewords) * n, 0);
  for (std::size_t off = 0; off < seen.size(); ++off) {
    const StreamPosition p = interleave_position(off, codewords, depth, n);
    ASSERT_GE(p.codeword, 0);
    ASSERT_LT(p.codeword, codewords);
    ASSERT_GE(p.symbol, 0);
    ASSERT_LT(p.symbol, n);
    ++seen[static_cast<std::size_t>(p.codeword) * n + p.symbol];
  }
  for (int v : seen) EXPECT_EQ(v, 1);
}

TEST(Checksums, KnownVectors) {
  const std::string s = "123456789";
  const std::span<const std::uint8_t> bytes(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
  EXPECT_EQ(crc32(bytes), 0xCBF43926u);
  EXPECT_EQ(crc16(bytes), 0x29B1u);
  EXPECT_EQ(sha256_hex(std::span<const std::uint8_t>()),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

}  // namespace
}  // namespace mrpods

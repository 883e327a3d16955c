#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "mrpods/cost.hpp"
#include "mrpods/error.hpp"

namespace mrpods {
namespace {

// Year-by-year accumulation: buy at year 0 and at every lifespan boundary,
// pay one year of electricity per elapsed year.
std::vector<double> accumulation_oracle(const HddCostParams& p) {
  std::vector<double> out;
  double total = 0;
  for (int year = 0; year <= p.horizon_years; ++year) {
    if (year % p.lifespan_years == 0) total += p.unit_cost_usd;
    if (year > 0) total += p.power_watts / 1000.0 * 8766.0 * p.electricity_usd_per_kwh;
    out.push_back(total);
  }
  return out;
}

std::optional<int> crossover_oracle(const HddCostParams& hdd, const PrintCostParams& print) {
  const auto series = accumulation_oracle(hdd);
  for (int year = 0; year <= hdd.horizon_years; ++year) {
    if (series[year] > print.cost_per_page_usd * print.page_count) return year;
  }
  return std::nullopt;
}

TEST(Cost, HddSeriesMatchesAccumulation) {
  for (const HddCostParams& p : {HddCostParams{}, HddCostParams{95, 4, 8.5, 0.31, 100, 0},
                                 HddCostParams{20, 7, 3, 0.05, 60, 0}}) {
    const auto want = accumulation_oracle(p);
    for (int year = 0; year <= p.horizon_years; ++year) {
      EXPECT_NEAR(hdd_cumulative_cost(p, year), want[year], 1e-9 * want[year]) << year;
    }
  }
}

TEST(Cost, SpotValues) {
  const HddCostParams p;
  EXPECT_DOUBLE_EQ(hdd_cumulative_cost(p, 0), 40.0);
  EXPECT_NEAR(hdd_cumulative_cost(p, 5), 80.0 + 5 * 6.0 / 1000 * 8766 * 0.15, 1e-9);
  EXPECT_DOUBLE_EQ(print_fixed_cost(PrintCostParams{0.10, 20}), 2.0);
  EXPECT_DOUBLE_EQ(print_fixed_cost(PrintCostParams{0.0, 20}), 0.0);
}

TEST(Cost, StepsLandOnLifespanMultiples) {
  HddCostParams p;
  p.lifespan_years = 7;
  const double electricity = p.power_watts / 1000 * 8766 * p.electricity_usd_per_kwh;
  for (int year = 1; year <= p.horizon_years; ++year) {
    const double step = hdd_cumulative_cost(p, year) - hdd_cumulative_cost(p, year - 1);
    const double want = electricity + (year % 7 == 0 ? p.unit_cost_usd : 0.0);
    EXPECT_NEAR(step, want, 1e-9) << year;
  }
}

TEST(Cost, CrossoverMatchesBruteForce) {
  const HddCostParams hdd;
  for (double page_cost : {0.5, 1.0, 3.0, 7.5, 20.0, 100.0}) {
    for (int pages : {1, 5, 20, 80}) {
      const PrintCostParams print{page_cost, pages};
      EXPECT_EQ(crossover_year(hdd, print), crossover_oracle(hdd, print)) << page_cost << " x " << pages;
    }
  }
  EXPECT_EQ(crossover_year(hdd, PrintCostParams{1.0, 20}), 0);
  EXPECT_EQ(crossover_year(hdd, PrintCostParams{1e9, 20}), std::nullopt);
  EXPECT_EQ(crossover_year(hdd, PrintCostParams{}), 3);
}

TEST(Cost, DiscountingLowersLaterYears) {
  HddCostParams p;
  p.discount_rate = 0.05;
  const HddCostParams nominal;
  EXPECT_DOUBLE_EQ(hdd_cumulative_cost(p, 0), 40.0);
  EXPECT_LT(hdd_cumulative_cost(p, 50), hdd_cumulative_cost(nominal, 50));
  for (int year = 1; year <= 100; ++year) EXPECT_GE(hdd_cumulative_cost(p, year), hdd_cumulative_cost(p, year - 1));
}

TEST(Cost, Errors) {
  const HddCostParams p;
  for (int year : {-1, 101}) {
    try {
      hdd_cumulative_cost(p, year);
      FAIL() << year;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::YearOutOfRange);
    }
  }
  HddCostParams bad;
  bad.lifespan_years = 0;
  EXPECT_THROW(validate(bad), Error);
  EXPECT_THROW(validate(PrintCostParams{-1, 20}), Error);
  EXPECT_THROW(pages_and_cost_series({0.0}, SheetConfig{}, 3.0), Error);
}

TEST(Cost, TimeSeriesCsv) {
  const auto rows = cost_over_time(HddCostParams{}, PrintCostParams{});
  ASSERT_EQ(rows.size(), 101u);
  for (const auto& r : rows) EXPECT_EQ(r.print_fixed_usd, 60.0);
  const std::string csv = cost_over_time_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "year,hdd_cumulative_usd,print_fixed_usd");
  EXPECT_NE(csv.find("\n0,40,60\n"), std::string::npos);
}

TEST(Cost, PagesAndCostSeries) {
  const SheetConfig c;
  const double page_mb = page_capacity(c).usable_payload_bytes / 1e6;
  const auto one = pages_and_cost_series({page_mb}, c, 3.0);
  EXPECT_EQ(one[0].pages, 1u);

  std::vector<double> sizes;
  for (int s = 1; s <= 10; ++s) sizes.push_back(s);
  const auto rows = pages_and_cost_series(sizes, c, 3.0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_GE(rows[i].pages, rows[i - 1].pages);
    EXPECT_DOUBLE_EQ(rows[i].cost_usd, 3.0 * rows[i].pages);
  }
  for (int s = 1; s <= 5; ++s) EXPECT_LE(rows[2 * s - 1].pages, 2 * rows[s - 1].pages + 1);

  const auto grid = default_size_grid();
  ASSERT_EQ(grid.size(), 96u);
  EXPECT_DOUBLE_EQ(grid.front(), 0.5);
  EXPECT_NEAR(grid.back(), 10.0, 1e-9);
  const std::string csv = pages_and_cost_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "size_mb,pages,cost_usd");
}

}  // namespace
}  // namespace mrpods

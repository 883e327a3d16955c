#pragma once

// Storage cost arithmetic: cumulative hard-drive cost against the one-off
// cost of printing, and page counts and print cost against data size.
//
// Dollar defaults are illustrative inputs, not measured values.

#include <optional>
#include <string>
#include <vector>

#include "mrpods/sheet.hpp"

namespace mrpods {

inline constexpr double kHoursPerYear = 8766.0;
inline constexpr double kBytesPerMegabyte = 1e6;

struct HddCostParams {
  double unit_cost_usd = 40.0;
  int lifespan_years = 5;
  double power_watts = 6.0;
  double electricity_usd_per_kwh = 0.15;
  int horizon_years = 100;
  // Annual discount rate applied to future spending; 0 gives nominal cost.
  double discount_rate = 0.0;
};

struct PrintCostParams {
  double cost_per_page_usd = 3.0;
  int page_count = 20;
};

// Throw ConfigInvalid naming the offending field.
void validate(const HddCostParams& p);
void validate(const PrintCostParams& p);

// unit * (1 + floor(year / lifespan)) + year * watts / 1000 * 8766 * $/kWh.
// Throws YearOutOfRange outside 0..horizon_years.
double hdd_cumulative_cost(const HddCostParams& p, int year);

double print_fixed_cost(const PrintCostParams& p);

// Smallest year whose cumulative drive cost exceeds the print cost, or
// nullopt when that never happens within the horizon.
std::optional<int> crossover_year(const HddCostParams& hdd, const PrintCostParams& print);

struct CostYear {
  int year = 0;
  double hdd_cumulative_usd = 0;
  double print_fixed_usd = 0;
};

std::vector<CostYear> cost_over_time(const HddCostParams& hdd, const PrintCostParams& print);
// "year,hdd_cumulative_usd,print_fixed_usd"
std::string cost_over_time_csv(const std::vector<CostYear>& rows);

struct SizeCost {
  double size_mb = 0;
  std::uint64_t pages = 0;
  double cost_usd = 0;
};

// pages = ceil(size * 10^6 / usable payload bytes per page). Throws
// ConfigInvalid for non-positive sizes or cost, or an invalid sheet config.
std::vector<SizeCost> pages_and_cost_series(const std::vector<double>& sizes_mb, const SheetConfig& config,
                                            double cost_per_page_usd);
// "size_mb,pages,cost_usd"
std::string pages_and_cost_csv(const std::vector<SizeCost>& rows);

// 0.5, 0.6, ..., 10.0 megabytes.
std::vector<double> default_size_grid();

}  // namespace mrpods

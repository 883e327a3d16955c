#include <cmath>
#include <iomanip>
#include <sstream>

#include "mrpods/cost.hpp"
#include "mrpods/error.hpp"

namespace mrpods {
namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::ConfigInvalid, message);
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

double energy_cost_per_year(const HddCostParams& p) {
  return p.power_watts / 1000.0 * kHoursPerYear * p.electricity_usd_per_kwh;
}

}  // namespace

void validate(const HddCostParams& p) {
  require(std::isfinite(p.unit_cost_usd) && p.unit_cost_usd > 0, "unit_cost_usd must be positive");
  require(p.lifespan_years > 0, "lifespan_years must be positive");
  require(std::isfinite(p.power_watts) && p.power_watts > 0, "power_watts must be positive");
  require(std::isfinite(p.electricity_usd_per_kwh) && p.electricity_usd_per_kwh > 0,
          "electricity_usd_per_kwh must be positive");
  require(p.horizon_years > 0, "horizon_years must be positive");
  require(p.lifespan_years <= p.horizon_years, "lifespan_years must not exceed horizon_years");
  require(std::isfinite(p.discount_rate) && p.discount_rate >= 0 && p.discount_rate < 1,
          "discount_rate must be within [0, 1)");
}

void validate(const PrintCostParams& p) {
  require(std::isfinite(p.cost_per_page_usd) && p.cost_per_page_usd >= 0, "cost_per_page_usd must be >= 0");
  require(p.page_count > 0, "page_count must be positive");
}

double hdd_cumulative_cost(const HddCostParams& p, int year) {
  validate(p);
  if (year < 0 || year > p.horizon_years) {
    throw Error(ErrorCode::YearOutOfRange,
                "year " + std::to_string(year) + " outside 0.." + std::to_string(p.horizon_years));
  }
  if (p.discount_rate == 0) {
    return p.unit_cost_usd * (1 + year / p.lifespan_years) + year * energy_cost_per_year(p);
  }
  const double r = 1.0 + p.discount_rate;
  double total = 0;
  for (int purchase = 0; purchase <= year; purchase += p.lifespan_years) total += p.unit_cost_usd / std::pow(r, purchase);
  for (int y = 1; y <= year; ++y) total += energy_cost_per_year(p) / std::pow(r, y);
  return total;
}

double print_fixed_cost(const PrintCostParams& p) {
  validate(p);
  return p.cost_per_page_usd * p.page_count;
}

std::optional<int> crossover_year(const HddCostParams& hdd, const PrintCostParams& print) {
  const double fixed = print_fixed_cost(print);
  for (int y = 0; y <= hdd.horizon_years; ++y) {
    if (hdd_cumulative_cost(hdd, y) > fixed) return y;
  }
  return std::nullopt;
}

std::vector<CostYear> cost_over_time(const HddCostParams& hdd, const PrintCostParams& print) {
  const double fixed = print_fixed_cost(print);
  std::vector<CostYear> rows;
  for (int y = 0; y <= hdd.horizon_years; ++y) rows.push_back({y, hdd_cumulative_cost(hdd, y), fixed});
  return rows;
}

std::string cost_over_time_csv(const std::vector<CostYear>& rows) {
  std::ostringstream out;
  out << "year,hdd_cumulative_usd,print_fixed_usd\n";
  for (const auto& r : rows) out << r.year << "," << fmt(r.hdd_cumulative_usd) << "," << fmt(r.print_fixed_usd) << "\n";
  return out.str();
}

std::vector<SizeCost> pages_and_cost_series(const std::vector<double>& sizes_mb, const SheetConfig& config,
                                            double cost_per_page_usd) {
  require(std::isfinite(cost_per_page_usd) && cost_per_page_usd >= 0, "cost_per_page_usd must be >= 0");
  const std::uint64_t usable = page_capacity(config).usable_payload_bytes;
  std::vector<SizeCost> rows;
  for (double mb : sizes_mb) {
    require(std::isfinite(mb) && mb > 0, "sizes must be positive");
    const auto bytes = static_cast<std::uint64_t>(std::llround(mb * kBytesPerMegabyte));
    const std::uint64_t pages = (bytes + usable - 1) / usable;
    rows.push_back({mb, pages, static_cast<double>(pages) * cost_per_page_usd});
  }
  return rows;
}

std::string pages_and_cost_csv(const std::vector<SizeCost>& rows) {
  std::ostringstream out;
  out << "size_mb,pages,cost_usd\n";
  for (const auto& r : rows) out << fmt(r.size_mb) << "," << r.pages << "," << fmt(r.cost_usd) << "\n";
  return out.str();
}

std::vector<double> default_size_grid() {
  std::vector<double> sizes;
  for (int tenth = 5; tenth <= 100; ++tenth) sizes.push_back(tenth / 10.0);
  return sizes;
}

}  // namespace mrpods

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "p2pmarket/pqr.hpp"
#include "p2pmarket/sim.hpp"

namespace p2pmarket {

enum class ReportFormat { Csv, Json };

ReportFormat format_from_string(const std::string& s);

// JSON writes `<base>.json`; CSV writes `<base>.periods.csv`,
// `<base>.aggregates.csv`, `<base>.prices.csv` and the config echo
// `<base>.config`. Emitted files contain no timing metadata, so identical
// runs produce identical bytes.
void write_report(const SimulationReport& report,
                  const std::filesystem::path& base, ReportFormat format);

std::string report_to_json(const SimulationReport& report);
SimulationReport read_report_json(const std::filesystem::path& path);

// Typed CSV readers matching the writers above.
struct ProsumerPeriodRow {
  long period = 0;
  int prosumer = 0;
  char role = 'b';
  double demand_kwh = 0.0, surplus_kwh = 0.0;
  double local_kwh = 0.0, sold_kwh = 0.0, grid_kwh = 0.0, unsold_kwh = 0.0;
  double loss_kwh = 0.0;
  double cost = 0.0, revenue = 0.0, value = 0.0, price = 0.0;
};

struct AggregateRow {
  std::string period;  // period index, or "total" for the closing row
  double fitness = 0.0, buyer_value = 0.0, seller_revenue = 0.0;
  double cum_seller_revenue = 0.0;
  double ma10_buyer_value = 0.0, ma10_seller_revenue = 0.0;
  double grid_import_kwh = 0.0, grid_export_kwh = 0.0;
};

struct PriceRow {
  long period = 0;
  int prosumer = 0;
  double price = 0.0;
};

std::vector<ProsumerPeriodRow> read_periods_csv(
    const std::filesystem::path& path);
std::vector<AggregateRow> read_aggregates_csv(
    const std::filesystem::path& path);
std::vector<PriceRow> read_prices_csv(const std::filesystem::path& path);

// Versioned learning-state snapshot, exact enough to resume a run.
void save_checkpoint(std::span<const PriceAgent> agents,
                     const std::filesystem::path& path);
std::vector<PriceAgent> load_checkpoint(const std::filesystem::path& path);

}  // namespace p2pmarket

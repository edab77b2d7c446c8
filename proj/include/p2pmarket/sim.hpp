#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "p2pmarket/config.hpp"
#include "p2pmarket/market.hpp"
#include "p2pmarket/pqr.hpp"
#include "p2pmarket/traces.hpp"

namespace p2pmarket {

// Role assignment for one period: (prosumer index, kWh) pairs in
// registration order. Prosumers whose consumption exactly balances
// production join neither set.
struct Classified {
  std::vector<std::pair<int, double>> buyers;   // net demand
  std::vector<std::pair<int, double>> sellers;  // net surplus
};

Classified classify_prosumers(const TraceSet& traces, std::size_t t);

struct BuyerRecord {
  int prosumer = 0;
  double demand_kwh = 0.0;
  double local_kwh = 0.0;
  double grid_kwh = 0.0;
  double cost = 0.0;
  double value = 0.0;
};

struct SellerRecord {
  int prosumer = 0;
  double surplus_kwh = 0.0;
  double delivered_kwh = 0.0;
  double loss_kwh = 0.0;
  double unsold_kwh = 0.0;
  double price = 0.0;  // price in force when the period cleared
  double revenue = 0.0;
};

struct PeriodResult {
  long period_index = 0;
  AllocationMatrix allocation;
  std::vector<BuyerRecord> buyers;
  std::vector<SellerRecord> sellers;
  double fitness = 0.0;  // sum of buyer values this period
  double grid_import_kwh = 0.0;
  double grid_export_kwh = 0.0;
};

struct ReportAggregates {
  double total_buyer_value = 0.0;
  double mean_buyer_value = 0.0;
  double total_seller_revenue = 0.0;
  double total_grid_import_kwh = 0.0;
  double total_grid_export_kwh = 0.0;
  std::vector<double> buyer_value;          // per period
  std::vector<double> seller_revenue;       // per period
  std::vector<double> cum_seller_revenue;   // running sum
  std::vector<double> ma10_buyer_value;     // 10-period moving average
  std::vector<double> ma10_seller_revenue;  // 10-period moving average
};

struct PriceTrajectory {
  int prosumer = 0;
  std::vector<long> periods;
  std::vector<double> prices;
};

struct SimulationReport {
  std::string version;
  SimulationConfig config;
  std::vector<PeriodResult> periods;
  ReportAggregates aggregates;
  std::vector<PriceTrajectory> price_trajectories;
  double wall_seconds = 0.0;  // informational only; never serialized
};

ReportAggregates compute_aggregates(const std::vector<PeriodResult>& periods);
std::vector<PriceTrajectory> compute_price_trajectories(
    const std::vector<PeriodResult>& periods);

// Mutable cross-period state: sampled profiles and pair losses, current
// seller asks (as grid states) and the learning agents.
struct SimState {
  SimulationConfig config;
  PriceGrid grid;
  std::vector<ProsumerProfile> profiles;  // by registration index
  std::vector<int> ask_state;             // current ask, grid state per prosumer
  std::vector<PriceAgent> agents;         // one per prosumer
  std::vector<double> pair_loss;          // n x n symmetric loss fractions

  double loss_between(std::size_t a, std::size_t b) const {
    return pair_loss[a * profiles.size() + b];
  }
};

SimState init_sim_state(const SimulationConfig& config, const TraceSet& traces);

// Clears one period with the configured strategy and, for debate_pqr,
// reprices sellers for the next period.
PeriodResult run_period(SimState& state, const TraceSet& traces,
                        std::size_t t);

SimulationReport run_simulation(const SimulationConfig& config,
                                const TraceSet& traces);

// Random desk-scale instance drawn from the config's parameter ranges;
// used by benchmarks and the convergence tool.
MarketPeriod sample_period(const SimulationConfig& config, std::size_t ns,
                           std::size_t nb, Rng& rng);

}  // namespace p2pmarket

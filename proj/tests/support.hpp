#pragma once

#include <filesystem>
#include <unistd.h>
#include <functional>
#include <limits>
#include <string>

#include "p2pmarket/market.hpp"
#include "p2pmarket/rng.hpp"
#include "p2pmarket/sim.hpp"

namespace testsup {

// Desk-scale instance from the default parameter ranges.
inline p2pmarket::MarketPeriod random_period(std::size_t ns, std::size_t nb,
                                             std::uint64_t seed) {
  p2pmarket::SimulationConfig cfg;
  p2pmarket::Rng rng(p2pmarket::mix_seed(seed, 100));
  return p2pmarket::sample_period(cfg, ns, nb, rng);
}

// Exhaustive search over the feasible grid with the given number of steps
// per component (step size 1/steps). Columns are enumerated buyer-major so
// each buyer's value is computed once per completed column. Independent of
// the solver: only the fitness definition is shared.
inline double grid_search_best_fitness(const p2pmarket::MarketPeriod& period,
                                       int steps) {
  using namespace p2pmarket;
  const std::size_t ns = period.sellers.size();
  const std::size_t nb = period.buyers.size();
  AllocationMatrix x = AllocationMatrix::zeros(ns, nb);
  if (ns == 0 || nb == 0) return market_fitness(x, period);

  std::vector<double> row_used(ns, 0.0);
  double best = -std::numeric_limits<double>::infinity();

  // State per column while it is being filled.
  std::function<void(std::size_t, std::size_t, double, double, double)> rec =
      [&](std::size_t j, std::size_t i, double col_sum, double col_rate,
          double value_so_far) {
        if (i == ns) {
          const double w = period.buyers[j].demand_kwh;
          const double y =
              (col_rate + period.rho_gs * (1.0 - col_sum)) * w;
          const double v =
              value_so_far + buyer_value(y, w, period.buyers[j].profile);
          if (j + 1 == nb) {
            if (v > best) best = v;
          } else {
            rec(j + 1, 0, 0.0, 0.0, v);
          }
          return;
        }
        const double l = period.loss_at(i, j);
        if (l >= period.l_max) {
          rec(j, i + 1, col_sum, col_rate, value_so_far);
          return;
        }
        const double w = period.buyers[j].demand_kwh;
        for (int k = 0; k <= steps; ++k) {
          const double v = static_cast<double>(k) / steps;
          if (col_sum + v > 1.0 + 1e-12) break;
          const double add = (1.0 + l) * v * w;
          if (row_used[i] + add > period.sellers[i].surplus_kwh + 1e-12) break;
          row_used[i] += add;
          rec(j, i + 1, col_sum + v, col_rate + period.sellers[i].price * v,
              value_so_far);
          row_used[i] -= add;
        }
      };

  rec(0, 0, 0.0, 0.0, 0.0);
  return best;
}

// Unique scratch directory, removed on destruction.
struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("p2pmarket_" + tag + "_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::filesystem::path file(const std::string& name) const {
    return path / name;
  }
};

}  // namespace testsup

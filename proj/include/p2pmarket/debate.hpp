#pragma once

#include <cstdint>
#include <vector>

#include "p2pmarket/market.hpp"
#include "p2pmarket/rng.hpp"

namespace p2pmarket {

// Differential-evolution controls for the allocation solver.
struct DebateParams {
  int np = 20;         // population size, >= 4
  int g_max = 10000;   // generations
  double cr = 0.9;     // crossover probability in [0, 1]
  double f = 0.5;      // differential weight in [0, 2]
  std::uint64_t seed = 0;

  void validate() const;
};

struct Population {
  std::vector<AllocationMatrix> candidates;
};

// NP candidates, each sampled uniformly in [0,1] per component and repaired
// to feasibility. A period with no buyers or no sellers yields all-zero
// matrices.
Population init_population(const MarketPeriod& period,
                           const DebateParams& params, Rng& rng);

// Binomial crossover of the donor combination x_a + f * (x_b - x_c) against
// x_k, clipped to [0,1]; one component position is always recombined.
AllocationMatrix mutate_crossover(const AllocationMatrix& xk,
                                  const AllocationMatrix& xa,
                                  const AllocationMatrix& xb,
                                  const AllocationMatrix& xc,
                                  const DebateParams& params, Rng& rng);

// Projects x onto the feasible set: zeroes excluded pairs, rescales seller
// rows that exceed capacity (loss-adjusted), then rescales buyer columns
// that exceed 1. Column rescaling only shrinks entries, so row feasibility
// is preserved.
AllocationMatrix repair(AllocationMatrix x, const MarketPeriod& period);
void repair_in_place(AllocationMatrix& x, const MarketPeriod& period);

struct DebateResult {
  AllocationMatrix best;
  double best_fitness = 0.0;
  std::vector<double> best_fitness_per_generation;
};

// Steady-state differential evolution over g_max generations: candidates are
// processed in index order and a repaired trial replaces its parent
// immediately when strictly fitter. The best-fitness trace is
// non-decreasing.
DebateResult debate_run(const MarketPeriod& period, const DebateParams& params,
                        Rng& rng);

}  // namespace p2pmarket

// Env-design sweep for the pricing sanity check. Hand-compiled scratch tool.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "p2pmarket/pqr.hpp"
#include "p2pmarket/rng.hpp"

using namespace p2pmarket;

namespace {

int run_design(const PriceGrid& grid, const std::vector<double>& revenue,
               int init, int n_seeds, bool verbose) {
  int oracle = 0;
  for (int m = 1; m < grid.n_states; ++m)
    if (revenue[m] > revenue[oracle]) oracle = m;

  std::vector<double> demand(revenue.size());
  for (int m = 0; m < grid.n_states; ++m) demand[m] = revenue[m] / grid.price(m);

  int ok = 0;
  for (std::uint64_t seed = 1; seed <= static_cast<std::uint64_t>(n_seeds);
       ++seed) {
    ProsumerProfile pr{1, 2.25, 2.25, 0.74, 0.74, 0.10};
    Rng prof_rng(mix_seed(seed, 55));
    pr.k_plus = prof_rng.uniform(2.10, 2.61);
    pr.k_minus = prof_rng.uniform(2.10, 2.61);
    pr.zeta_plus = prof_rng.uniform(0.60, 0.88);
    pr.zeta_minus = prof_rng.uniform(0.52, 1.0);
    PriceAgent agent = PriceAgent::make(1, grid, pr, 1e-2, 0.9, 1.0, 0.965);

    Rng rng(mix_seed(seed, 56));
    int s = init;
    for (int t = 0; t < 5000; ++t) {
      const PriceAction a = select_action(agent, s, rng);
      const int s_new = s + action_step(a);
      const double r = grid.price(s_new) * demand[s_new];
      const double y = td_error(agent, s, a, s_new, r);
      q_update(agent, s, a, y);
      s = s_new;
      agent.epsilon *= agent.epsilon_decay;
    }
    agent.epsilon = 0.0;
    Rng wrng(1);
    for (int k = 0; k < 40; ++k) s += action_step(select_action(agent, s, wrng));
    bool settled = s == oracle;
    for (int k = 0; settled && k < 10; ++k)
      settled = select_action(agent, s, wrng) == PriceAction::Hold;
    if (settled)
      ++ok;
    else if (verbose)
      std::printf("  seed %llu: end state %d (oracle %d)\n",
                  (unsigned long long)seed, s, oracle);
  }
  return ok;
}

}  // namespace

int main() {
  const int n_seeds = 100;

  {  // A: 5 states, geometric ratio 6, peak at 3, init 3
    const PriceGrid g = PriceGrid::make(0.06, 0.12, 0.015);
    std::vector<double> r = {0.02, 0.12, 0.7, 4.2, 0.7};
    std::printf("A init=peak : %d/%d\n", run_design(g, r, 3, n_seeds, false),
                n_seeds);
    std::printf("A init=2    : %d/%d\n", run_design(g, r, 2, n_seeds, false),
                n_seeds);
  }
  {  // B: 7 states, ratio 4, peak at 4
    const PriceGrid g = PriceGrid::make(0.06, 0.12, 0.01);
    std::vector<double> r = {0.016, 0.065, 0.26, 1.05, 4.2, 1.05, 0.26};
    std::printf("B init=peak : %d/%d\n", run_design(g, r, 4, n_seeds, false),
                n_seeds);
    std::printf("B init=3    : %d/%d\n", run_design(g, r, 3, n_seeds, false),
                n_seeds);
  }
  {  // C: 5 states, ratio 10, peak at 3
    const PriceGrid g = PriceGrid::make(0.06, 0.12, 0.015);
    std::vector<double> r = {0.004, 0.042, 0.42, 4.2, 0.42};
    std::printf("C init=peak : %d/%d\n", run_design(g, r, 3, n_seeds, false),
                n_seeds);
    std::printf("C init=2    : %d/%d\n", run_design(g, r, 2, n_seeds, false),
                n_seeds);
  }
  {  // D: 4 states, ratio 10, peak at 2 (interior), init at peak
    const PriceGrid g = PriceGrid::make(0.06, 0.12, 0.02);
    std::vector<double> r = {0.04, 0.42, 4.2, 0.42};
    std::printf("D init=peak : %d/%d\n", run_design(g, r, 2, n_seeds, false),
                n_seeds);
    std::printf("D init=1    : %d/%d\n", run_design(g, r, 1, n_seeds, true),
                n_seeds);
  }
  {  // E: 4 states, peak 20x, peak at 2 = $0.10, init at peak
    const PriceGrid g = PriceGrid::make(0.06, 0.12, 0.02);
    std::vector<double> r = {0.02, 0.2, 4.0, 0.2};
    std::printf("E init=peak : %d/%d\n", run_design(g, r, 2, n_seeds, false),
                n_seeds);
    std::printf("E init=1    : %d/%d\n", run_design(g, r, 1, n_seeds, false),
                n_seeds);
  }
  {  // F: 4 states, peak 40x
    const PriceGrid g = PriceGrid::make(0.06, 0.12, 0.02);
    std::vector<double> r = {0.01, 0.1, 4.0, 0.1};
    std::printf("F init=peak : %d/%d\n", run_design(g, r, 2, n_seeds, false),
                n_seeds);
    std::printf("F init=1    : %d/%d\n", run_design(g, r, 1, n_seeds, true),
                n_seeds);
  }
  {  // G: 5 states, ratio 10 geometric, peak at 3, init 3
    const PriceGrid g = PriceGrid::make(0.06, 0.12, 0.015);
    std::vector<double> r = {0.004, 0.04, 0.4, 4.0, 0.4};
    std::printf("G init=peak : %d/%d\n", run_design(g, r, 3, n_seeds, false),
                n_seeds);
  }
  return 0;
}

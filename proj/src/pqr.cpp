#include "p2pmarket/pqr.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace p2pmarket {

PriceGrid PriceGrid::make(double rho_gb, double rho_gs, double delta) {
  if (!(rho_gb > 0.0) || !(rho_gs > rho_gb))
    throw std::invalid_argument("grid prices must satisfy 0 < rho_gb < rho_gs");
  if (!(delta > 0.0))
    throw std::invalid_argument("delta must be positive");
  const double steps = (rho_gs - rho_gb) / delta;
  const int n = static_cast<int>(std::lround(steps));
  if (n < 1 || std::abs(steps - n) > 1e-6)
    throw std::invalid_argument(
        "price band is not an integral number of delta steps");
  return {rho_gb, rho_gs, delta, n + 1};
}

int PriceGrid::index_of(double p) const {
  const int m = static_cast<int>(std::lround((p - rho_gb) / delta));
  if (m < 0 || m >= n_states || std::abs(p - price(m)) > 1e-9)
    throw std::invalid_argument("price " + std::to_string(p) +
                                " is not on the grid");
  return m;
}

int PriceGrid::snap(double p) const {
  const int m = static_cast<int>(std::lround((p - rho_gb) / delta));
  return std::min(std::max(m, 0), n_states - 1);
}

PriceAgent PriceAgent::make(int seller_id, const PriceGrid& grid,
                            const ProsumerProfile& profile, double alpha,
                            double gamma, double epsilon0,
                            double epsilon_decay) {
  if (alpha < 0.0) throw std::invalid_argument("alpha must be non-negative");
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("gamma must be in [0, 1)");
  if (!(epsilon0 >= 0.0 && epsilon0 <= 1.0))
    throw std::invalid_argument("epsilon0 must be in [0, 1]");
  if (!(epsilon_decay > 0.0 && epsilon_decay <= 1.0))
    throw std::invalid_argument("epsilon_decay must be in (0, 1]");
  PriceAgent a;
  a.seller_id = seller_id;
  a.grid = grid;
  a.profile = profile;
  a.alpha = alpha;
  a.gamma = gamma;
  a.epsilon = epsilon0;
  a.epsilon_decay = epsilon_decay;
  a.q.assign(static_cast<std::size_t>(grid.n_states) * 3, 0.0);
  return a;
}

PriceAction select_action(const PriceAgent& agent, int state, Rng& rng) {
  if (state < 0 || state >= agent.grid.n_states)
    throw std::invalid_argument("state off the price grid");

  PriceAction admissible[3];
  int n_adm = 0;
  for (PriceAction a : kActionOrder)
    if (agent.admissible(state, a)) admissible[n_adm++] = a;

  const double u = rng.uniform();
  if (u < agent.epsilon)
    return admissible[rng.index(static_cast<std::size_t>(n_adm))];

  PriceAction best = admissible[0];
  double best_q = agent.q_at(state, best);
  for (int k = 1; k < n_adm; ++k) {
    const double q = agent.q_at(state, admissible[k]);
    if (q > best_q) {
      best = admissible[k];
      best_q = q;
    }
  }
  return best;
}

double seller_reward(std::size_t i, double price_delta,
                     const AllocationMatrix& x, const MarketPeriod& period) {
  if (i >= period.sellers.size())
    throw std::out_of_range("seller index out of range");
  if (x.sellers != period.sellers.size() || x.buyers != period.buyers.size())
    throw std::invalid_argument("allocation shape mismatch");
  double sold = 0.0;
  for (std::size_t j = 0; j < x.buyers; ++j)
    sold += x.at(i, j) * period.buyers[j].demand_kwh;
  return (period.sellers[i].price + price_delta) * sold;
}

double td_error(const PriceAgent& agent, int state, PriceAction a,
                int state_new, double reward) {
  double best_next = 0.0;
  bool any = false;
  for (PriceAction an : kActionOrder) {
    if (!agent.admissible(state_new, an)) continue;
    const double q = agent.q_at(state_new, an);
    if (!any || q > best_next) {
      best_next = q;
      any = true;
    }
  }
  return reward + agent.gamma * best_next - agent.q_at(state, a);
}

void q_update(PriceAgent& agent, int state, PriceAction a, double y) {
  agent.q_at(state, a) += agent.alpha * seller_value(y, agent.profile);
}

std::vector<double> pqr_step(std::span<PriceAgent> agents,
                             const AllocationMatrix& x,
                             const MarketPeriod& period, Rng& rng) {
  const std::uint64_t base = rng.next_u64();
  std::vector<double> new_prices(period.sellers.size());

  for (std::size_t i = 0; i < period.sellers.size(); ++i) {
    const int id = period.sellers[i].profile.id;
    PriceAgent* agent = nullptr;
    for (auto& a : agents)
      if (a.seller_id == id) {
        agent = &a;
        break;
      }
    if (agent == nullptr)
      throw std::invalid_argument("no price agent for seller " +
                                  std::to_string(id));

    Rng sub(mix_seed(base, static_cast<std::uint64_t>(id)));
    const int s = agent->grid.index_of(period.sellers[i].price);
    const PriceAction a = select_action(*agent, s, sub);
    const int s_new = s + action_step(a);
    const double r =
        seller_reward(i, action_step(a) * agent->grid.delta, x, period);
    const double y = td_error(*agent, s, a, s_new, r);
    q_update(*agent, s, a, y);
    new_prices[i] = agent->grid.price(s_new);
    agent->epsilon *= agent->epsilon_decay;
  }
  return new_prices;
}

}  // namespace p2pmarket

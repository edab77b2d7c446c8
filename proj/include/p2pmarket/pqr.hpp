#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "p2pmarket/market.hpp"
#include "p2pmarket/rng.hpp"

namespace p2pmarket {

// Discrete price ladder from rho_gb to rho_gs in steps of delta.
struct PriceGrid {
  double rho_gb = 0.0;
  double rho_gs = 0.0;
  double delta = 0.0;
  int n_states = 0;

  // Throws std::invalid_argument unless the span is an integral number of
  // steps.
  static PriceGrid make(double rho_gb, double rho_gs, double delta);

  double price(int state) const { return rho_gb + state * delta; }

  // Exact membership lookup; throws std::invalid_argument for off-grid
  // prices.
  int index_of(double price) const;

  // Nearest grid state for an arbitrary in-band price.
  int snap(double price) const;
};

enum class PriceAction : int { Up = 0, Down = 1, Hold = 2 };

// Fixed evaluation and tie-break order.
inline constexpr std::array<PriceAction, 3> kActionOrder = {
    PriceAction::Up, PriceAction::Down, PriceAction::Hold};

inline int action_step(PriceAction a) {
  switch (a) {
    case PriceAction::Up: return 1;
    case PriceAction::Down: return -1;
    default: return 0;
  }
}

// One seller's independent learner: a Q-table over price states x three
// actions plus its exploration/learning state.
struct PriceAgent {
  int seller_id = 0;
  PriceGrid grid;
  ProsumerProfile profile;
  double alpha = 0.0;
  double gamma = 0.0;
  double epsilon = 0.0;
  double epsilon_decay = 1.0;
  std::vector<double> q;  // n_states x 3, zero-initialized

  static PriceAgent make(int seller_id, const PriceGrid& grid,
                         const ProsumerProfile& profile, double alpha,
                         double gamma, double epsilon0, double epsilon_decay);

  double& q_at(int state, PriceAction a) {
    return q[static_cast<std::size_t>(state) * 3 + static_cast<int>(a)];
  }
  double q_at(int state, PriceAction a) const {
    return q[static_cast<std::size_t>(state) * 3 + static_cast<int>(a)];
  }

  bool admissible(int state, PriceAction a) const {
    const int next = state + action_step(a);
    return next >= 0 && next < grid.n_states;
  }
};

// Epsilon-greedy over admissible actions; out-of-band moves are masked at
// the boundary states. Greedy ties resolve in kActionOrder.
PriceAction select_action(const PriceAgent& agent, int state, Rng& rng);

// Revenue for period seller i at the post-action price applied to the
// energy sold under x this period.
double seller_reward(std::size_t i, double price_delta,
                     const AllocationMatrix& x, const MarketPeriod& period);

// r + gamma * max_a' Q(s_new, a') - Q(s, a), max over actions admissible at
// s_new.
double td_error(const PriceAgent& agent, int state, PriceAction a,
                int state_new, double reward);

// Q(s,a) += alpha * seller_value(y); only that entry changes.
void q_update(PriceAgent& agent, int state, PriceAction a, double y);

// One pricing round: every period seller independently selects an action,
// observes the revenue reward, applies the perception-weighted Q-update and
// moves to its new price; its exploration rate then decays. Returns the new
// price per period seller, aligned with period.sellers. Each agent draws
// from its own sub-stream keyed by seller id, so updates are independent of
// other sellers' data.
std::vector<double> pqr_step(std::span<PriceAgent> agents,
                             const AllocationMatrix& x,
                             const MarketPeriod& period, Rng& rng);

}  // namespace p2pmarket

#pragma once

#include <cstddef>
#include <vector>

namespace p2pmarket {

// Per-prosumer perception parameters and personal reference price.
// k_plus/k_minus control gain/loss weighting, zeta_plus/zeta_minus the
// curvature; ref_price is the price per kWh the prosumer considers fair
// when buying.
struct ProsumerProfile {
  int id = 0;
  double k_plus = 1.0;
  double k_minus = 1.0;
  double zeta_plus = 1.0;
  double zeta_minus = 1.0;
  double ref_price = 0.0;
};

struct BuyerEntry {
  ProsumerProfile profile;
  double demand_kwh = 0.0;
};

struct SellerEntry {
  ProsumerProfile profile;
  double surplus_kwh = 0.0;
  double price = 0.0;  // posted ask, $/kWh
};

// One trading period: participant sets, pairwise wire-loss fractions and
// grid tariffs. loss is sellers x buyers, row-major.
struct MarketPeriod {
  long period_index = 0;
  std::vector<BuyerEntry> buyers;
  std::vector<SellerEntry> sellers;
  std::vector<double> loss;
  double l_max = 1.0;
  double rho_gb = 0.0;  // price the grid pays for surplus
  double rho_gs = 0.0;  // price the grid charges

  double loss_at(std::size_t i, std::size_t j) const {
    return loss[i * buyers.size() + j];
  }

  // Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

// Decision variables: fraction x_ij of buyer j's demand supplied by seller i.
struct AllocationMatrix {
  std::size_t sellers = 0;
  std::size_t buyers = 0;
  std::vector<double> x;

  static AllocationMatrix zeros(std::size_t ns, std::size_t nb) {
    return {ns, nb, std::vector<double>(ns * nb, 0.0)};
  }

  double& at(std::size_t i, std::size_t j) { return x[i * buyers + j]; }
  double at(std::size_t i, std::size_t j) const { return x[i * buyers + j]; }

  bool operator==(const AllocationMatrix&) const = default;
};

inline constexpr double kFeasibilityTol = 1e-9;

// Checks bounds, the loss exclusion, seller capacities (loss-adjusted) and
// buyer column sums, all with `tol` absolute slack.
bool is_feasible(const AllocationMatrix& x, const MarketPeriod& period,
                 double tol = kFeasibilityTol);

// Total cost for buyer j: local purchases at posted seller prices plus the
// residual demand charged at the grid selling price.
double buyer_total_cost(std::size_t j, const AllocationMatrix& x,
                        const MarketPeriod& period);

// Same, but with an explicit per-transaction price matrix (sellers x buyers,
// row-major) instead of posted asks.
double buyer_total_cost_with_prices(std::size_t j, const AllocationMatrix& x,
                                    const std::vector<double>& prices,
                                    const MarketPeriod& period);

// Perceived value of paying y for demand_kwh, relative to the buyer's
// reference cost ref_price * demand_kwh. Gain branch below the reference,
// loss branch at or above it.
double buyer_value(double y, double demand_kwh, const ProsumerProfile& profile);

// Perceived value of a learning signal y for a seller: gain branch for
// y > 0, loss branch otherwise.
double seller_value(double y, const ProsumerProfile& profile);

// Sum of buyer perceived values under allocation x at posted prices.
double market_fitness(const AllocationMatrix& x, const MarketPeriod& period);

}  // namespace p2pmarket

#pragma once

#include <vector>

#include "p2pmarket/market.hpp"

namespace p2pmarket {

// Greedy baseline output: the allocation plus the per-transaction price for
// every traded (seller, buyer) pair (sellers x buyers, row-major; zero where
// no trade happened).
struct RuleAllocation {
  AllocationMatrix x;
  std::vector<double> prices;
};

// Processes buyers in ascending registration id; each takes energy from the
// cheapest seller with remaining capacity (loss-adjusted, and excluding
// pairs over l_max) until its demand is met or sellers are exhausted. Every
// transaction is priced at the midpoint of the seller's ask and the buyer's
// reference price. Seller price ties break toward the lower id.
RuleAllocation rule_allocate(const MarketPeriod& period);

}  // namespace p2pmarket

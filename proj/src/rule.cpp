#include "p2pmarket/rule.hpp"

#include <algorithm>
#include <numeric>

namespace p2pmarket {

RuleAllocation rule_allocate(const MarketPeriod& period) {
  const std::size_t ns = period.sellers.size();
  const std::size_t nb = period.buyers.size();
  RuleAllocation out;
  out.x = AllocationMatrix::zeros(ns, nb);
  out.prices.assign(ns * nb, 0.0);

  std::vector<double> capacity(ns);
  for (std::size_t i = 0; i < ns; ++i)
    capacity[i] = period.sellers[i].surplus_kwh;

  // Registration order: ascending prosumer id.
  std::vector<std::size_t> buyer_order(nb);
  std::iota(buyer_order.begin(), buyer_order.end(), std::size_t{0});
  std::sort(buyer_order.begin(), buyer_order.end(),
            [&](std::size_t a, std::size_t b) {
              return period.buyers[a].profile.id < period.buyers[b].profile.id;
            });

  constexpr double kEps = 1e-12;
  for (std::size_t j : buyer_order) {
    const double w = period.buyers[j].demand_kwh;
    double remaining_fraction = 1.0;
    while (remaining_fraction > kEps) {
      // Cheapest accessible seller with capacity left; ties to lower id.
      std::size_t pick = ns;
      for (std::size_t i = 0; i < ns; ++i) {
        if (capacity[i] <= kEps) continue;
        if (period.loss_at(i, j) >= period.l_max) continue;
        if (pick == ns ||
            period.sellers[i].price < period.sellers[pick].price ||
            (period.sellers[i].price == period.sellers[pick].price &&
             period.sellers[i].profile.id < period.sellers[pick].profile.id))
          pick = i;
      }
      if (pick == ns) break;

      const double unit = (1.0 + period.loss_at(pick, j)) * w;
      const double take =
          std::min(remaining_fraction, capacity[pick] / unit);
      if (take <= kEps) break;
      out.x.at(pick, j) += take;
      out.prices[pick * nb + j] =
          (period.sellers[pick].price + period.buyers[j].profile.ref_price) /
          2.0;
      capacity[pick] -= take * unit;
      remaining_fraction -= take;
    }
  }
  return out;
}

}  // namespace p2pmarket

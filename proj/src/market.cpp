#include "p2pmarket/market.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace p2pmarket {

namespace {

void validate_profile(const ProsumerProfile& p, double rho_gb, double rho_gs) {
  if (p.k_plus < 0.0 || p.k_minus < 0.0)
    throw std::invalid_argument("profile " + std::to_string(p.id) +
                                ": k parameters must be non-negative");
  if (!(p.zeta_plus > 0.0 && p.zeta_plus <= 1.0) ||
      !(p.zeta_minus > 0.0 && p.zeta_minus <= 1.0))
    throw std::invalid_argument("profile " + std::to_string(p.id) +
                                ": zeta parameters must be in (0, 1]");
  if (p.ref_price < rho_gb || p.ref_price > rho_gs)
    throw std::invalid_argument("profile " + std::to_string(p.id) +
                                ": reference price outside grid price band");
}

}  // namespace

void MarketPeriod::validate() const {
  if (!(rho_gb > 0.0) || !(rho_gs > rho_gb))
    throw std::invalid_argument("grid prices must satisfy 0 < rho_gb < rho_gs");
  if (loss.size() != sellers.size() * buyers.size())
    throw std::invalid_argument("loss matrix shape mismatch");
  for (double l : loss)
    if (!(l >= 0.0 && l < 1.0))
      throw std::invalid_argument("loss fractions must be in [0, 1)");

  std::unordered_set<int> seller_ids;
  for (const auto& s : sellers) {
    if (!(s.surplus_kwh > 0.0))
      throw std::invalid_argument("seller " + std::to_string(s.profile.id) +
                                  ": surplus must be positive");
    if (s.price < rho_gb || s.price > rho_gs)
      throw std::invalid_argument("seller " + std::to_string(s.profile.id) +
                                  ": price outside grid price band");
    validate_profile(s.profile, rho_gb, rho_gs);
    seller_ids.insert(s.profile.id);
  }
  for (const auto& b : buyers) {
    if (!(b.demand_kwh > 0.0))
      throw std::invalid_argument("buyer " + std::to_string(b.profile.id) +
                                  ": demand must be positive");
    validate_profile(b.profile, rho_gb, rho_gs);
    if (seller_ids.count(b.profile.id))
      throw std::invalid_argument("prosumer " + std::to_string(b.profile.id) +
                                  " appears as both buyer and seller");
  }
}

bool is_feasible(const AllocationMatrix& x, const MarketPeriod& period,
                 double tol) {
  const std::size_t ns = period.sellers.size();
  const std::size_t nb = period.buyers.size();
  if (x.sellers != ns || x.buyers != nb || x.x.size() != ns * nb) return false;

  for (std::size_t i = 0; i < ns; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < nb; ++j) {
      const double v = x.at(i, j);
      if (v < -tol || v > 1.0 + tol) return false;
      if (period.loss_at(i, j) >= period.l_max && v > tol) return false;
      row += (1.0 + period.loss_at(i, j)) * v * period.buyers[j].demand_kwh;
    }
    if (row > period.sellers[i].surplus_kwh + tol) return false;
  }
  for (std::size_t j = 0; j < nb; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < ns; ++i) col += x.at(i, j);
    if (col > 1.0 + tol) return false;
  }
  return true;
}

double buyer_total_cost(std::size_t j, const AllocationMatrix& x,
                        const MarketPeriod& period) {
  if (j >= period.buyers.size())
    throw std::out_of_range("buyer index " + std::to_string(j) +
                            " out of range");
  if (x.sellers != period.sellers.size() || x.buyers != period.buyers.size())
    throw std::invalid_argument("allocation shape mismatch");

  double col = 0.0;
  double rate = 0.0;
  for (std::size_t i = 0; i < x.sellers; ++i) {
    const double v = x.at(i, j);
    col += v;
    rate += period.sellers[i].price * v;
  }
  if (col > 1.0 + kFeasibilityTol)
    throw std::invalid_argument("buyer " + std::to_string(j) +
                                ": allocation column sum exceeds 1");
  const double residual = std::max(0.0, 1.0 - col);
  return (rate + period.rho_gs * residual) * period.buyers[j].demand_kwh;
}

double buyer_total_cost_with_prices(std::size_t j, const AllocationMatrix& x,
                                    const std::vector<double>& prices,
                                    const MarketPeriod& period) {
  if (j >= period.buyers.size())
    throw std::out_of_range("buyer index " + std::to_string(j) +
                            " out of range");
  if (x.sellers != period.sellers.size() || x.buyers != period.buyers.size())
    throw std::invalid_argument("allocation shape mismatch");
  if (prices.size() != x.x.size())
    throw std::invalid_argument("price matrix shape mismatch");

  double col = 0.0;
  double rate = 0.0;
  for (std::size_t i = 0; i < x.sellers; ++i) {
    const double v = x.at(i, j);
    col += v;
    rate += prices[i * x.buyers + j] * v;
  }
  if (col > 1.0 + kFeasibilityTol)
    throw std::invalid_argument("buyer " + std::to_string(j) +
                                ": allocation column sum exceeds 1");
  const double residual = std::max(0.0, 1.0 - col);
  return (rate + period.rho_gs * residual) * period.buyers[j].demand_kwh;
}

double buyer_value(double y, double demand_kwh,
                   const ProsumerProfile& profile) {
  if (!(y >= 0.0))
    throw std::invalid_argument("buyer_value: cost must be non-negative");
  if (!(demand_kwh > 0.0))
    throw std::invalid_argument("buyer_value: demand must be positive");
  const double ref_cost = profile.ref_price * demand_kwh;
  if (y < ref_cost)
    return profile.k_plus * std::pow(ref_cost - y, profile.zeta_plus);
  return -profile.k_minus * std::pow(y - ref_cost, profile.zeta_minus);
}

double seller_value(double y, const ProsumerProfile& profile) {
  if (y > 0.0) return profile.k_plus * std::pow(y, profile.zeta_plus);
  return -profile.k_minus * std::pow(-y, profile.zeta_minus);
}

double market_fitness(const AllocationMatrix& x, const MarketPeriod& period) {
  double total = 0.0;
  for (std::size_t j = 0; j < period.buyers.size(); ++j) {
    const double y = buyer_total_cost(j, x, period);
    total += buyer_value(y, period.buyers[j].demand_kwh,
                         period.buyers[j].profile);
  }
  return total;
}

}  // namespace p2pmarket

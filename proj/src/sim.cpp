#include "p2pmarket/sim.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <string>

#include "p2pmarket/debate.hpp"
#include "p2pmarket/rule.hpp"
#include "p2pmarket/version.hpp"

namespace p2pmarket {

namespace {

enum Stream : std::uint64_t {
  kProfileStream = 1,
  kLossStream = 2,
  kDebateStream = 3,
  kPqrStream = 4,
  kSynthStream = 5,
};

}  // namespace

Classified classify_prosumers(const TraceSet& traces, std::size_t t) {
  Classified out;
  for (std::size_t p = 0; p < traces.n_prosumers(); ++p) {
    if (t >= traces.consumption[p].size() || t >= traces.production[p].size())
      throw std::out_of_range("no trace entry for prosumer '" + traces.ids[p] +
                              "' at period " + std::to_string(t));
    const double net = traces.consumption[p][t] - traces.production[p][t];
    if (net > 0.0)
      out.buyers.emplace_back(static_cast<int>(p), net);
    else if (net < 0.0)
      out.sellers.emplace_back(static_cast<int>(p), -net);
  }
  return out;
}

ReportAggregates compute_aggregates(const std::vector<PeriodResult>& periods) {
  ReportAggregates agg;
  const std::size_t n = periods.size();
  agg.buyer_value.resize(n);
  agg.seller_revenue.resize(n);
  agg.cum_seller_revenue.resize(n);
  agg.ma10_buyer_value.resize(n);
  agg.ma10_seller_revenue.resize(n);

  double cum = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    double revenue = 0.0;
    for (const auto& s : periods[t].sellers) revenue += s.revenue;
    agg.buyer_value[t] = periods[t].fitness;
    agg.seller_revenue[t] = revenue;
    cum += revenue;
    agg.cum_seller_revenue[t] = cum;
    agg.total_buyer_value += periods[t].fitness;
    agg.total_grid_import_kwh += periods[t].grid_import_kwh;
    agg.total_grid_export_kwh += periods[t].grid_export_kwh;
  }
  agg.total_seller_revenue = cum;
  agg.mean_buyer_value = n ? agg.total_buyer_value / static_cast<double>(n) : 0.0;

  constexpr std::size_t kWindow = 10;
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t lo = t + 1 >= kWindow ? t + 1 - kWindow : 0;
    double sb = 0.0, ss = 0.0;
    for (std::size_t u = lo; u <= t; ++u) {
      sb += agg.buyer_value[u];
      ss += agg.seller_revenue[u];
    }
    const double len = static_cast<double>(t - lo + 1);
    agg.ma10_buyer_value[t] = sb / len;
    agg.ma10_seller_revenue[t] = ss / len;
  }
  return agg;
}

std::vector<PriceTrajectory> compute_price_trajectories(
    const std::vector<PeriodResult>& periods) {
  std::vector<PriceTrajectory> out;
  std::vector<int> slot;  // prosumer id -> index into out
  for (const auto& pr : periods) {
    for (const auto& s : pr.sellers) {
      if (static_cast<std::size_t>(s.prosumer) >= slot.size())
        slot.resize(static_cast<std::size_t>(s.prosumer) + 1, -1);
      if (slot[static_cast<std::size_t>(s.prosumer)] < 0) {
        slot[static_cast<std::size_t>(s.prosumer)] =
            static_cast<int>(out.size());
        out.push_back({s.prosumer, {}, {}});
      }
      auto& traj = out[static_cast<std::size_t>(
          slot[static_cast<std::size_t>(s.prosumer)])];
      traj.periods.push_back(pr.period_index);
      traj.prices.push_back(s.price);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const PriceTrajectory& a, const PriceTrajectory& b) {
              return a.prosumer < b.prosumer;
            });
  return out;
}

SimState init_sim_state(const SimulationConfig& config,
                        const TraceSet& traces) {
  config.validate();
  SimState st;
  st.config = config;
  st.grid = PriceGrid::make(config.rho_gb, config.rho_gs, config.pqr.delta);

  const std::size_t n = traces.n_prosumers();
  st.profiles.resize(n);
  st.ask_state.resize(n);
  st.agents.reserve(n);

  Rng prof_rng(mix_seed(config.seed, kProfileStream));
  for (std::size_t p = 0; p < n; ++p) {
    ProsumerProfile& pr = st.profiles[p];
    pr.id = static_cast<int>(p);
    pr.k_plus = prof_rng.uniform(config.k_plus_min, config.k_plus_max);
    pr.k_minus = prof_rng.uniform(config.k_minus_min, config.k_minus_max);
    pr.zeta_plus = prof_rng.uniform(config.zeta_plus_min, config.zeta_plus_max);
    pr.zeta_minus =
        prof_rng.uniform(config.zeta_minus_min, config.zeta_minus_max);
    pr.ref_price = prof_rng.uniform(config.buyer_ref_min, config.buyer_ref_max);
    st.ask_state[p] = st.grid.snap(
        prof_rng.uniform(config.seller_price_min, config.seller_price_max));
    st.agents.push_back(PriceAgent::make(
        pr.id, st.grid, pr, config.pqr.alpha, config.pqr.gamma,
        config.pqr.epsilon0, config.pqr.epsilon_decay));
  }

  Rng loss_rng(mix_seed(config.seed, kLossStream));
  st.pair_loss.assign(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      const double l = config.loss_set[loss_rng.index(config.loss_set.size())];
      st.pair_loss[a * n + b] = l;
      st.pair_loss[b * n + a] = l;
    }
  return st;
}

PeriodResult run_period(SimState& state, const TraceSet& traces,
                        std::size_t t) {
  const SimulationConfig& cfg = state.config;
  const Classified cls = classify_prosumers(traces, t);

  MarketPeriod period;
  period.period_index = static_cast<long>(t);
  period.l_max = cfg.l_max;
  period.rho_gb = cfg.rho_gb;
  period.rho_gs = cfg.rho_gs;
  period.buyers.reserve(cls.buyers.size());
  period.sellers.reserve(cls.sellers.size());
  for (const auto& [id, w] : cls.buyers)
    period.buyers.push_back({state.profiles[static_cast<std::size_t>(id)], w});
  for (const auto& [id, r] : cls.sellers)
    period.sellers.push_back(
        {state.profiles[static_cast<std::size_t>(id)], r,
         state.grid.price(state.ask_state[static_cast<std::size_t>(id)])});
  period.loss.resize(period.sellers.size() * period.buyers.size());
  for (std::size_t i = 0; i < period.sellers.size(); ++i)
    for (std::size_t j = 0; j < period.buyers.size(); ++j)
      period.loss[i * period.buyers.size() + j] = state.loss_between(
          static_cast<std::size_t>(cls.sellers[i].first),
          static_cast<std::size_t>(cls.buyers[j].first));
  period.validate();

  PeriodResult res;
  res.period_index = static_cast<long>(t);

  std::vector<double> transaction_prices;
  if (cfg.strategy == Strategy::DebatePqr) {
    Rng de_rng(mix_seed(cfg.seed, kDebateStream, t));
    DebateResult de = debate_run(period, cfg.debate, de_rng);
    res.allocation = std::move(de.best);
    transaction_prices.resize(res.allocation.x.size());
    for (std::size_t i = 0; i < period.sellers.size(); ++i)
      for (std::size_t j = 0; j < period.buyers.size(); ++j)
        transaction_prices[i * period.buyers.size() + j] =
            period.sellers[i].price;
  } else {
    RuleAllocation ra = rule_allocate(period);
    res.allocation = std::move(ra.x);
    transaction_prices = std::move(ra.prices);
  }

  res.buyers.reserve(period.buyers.size());
  for (std::size_t j = 0; j < period.buyers.size(); ++j) {
    BuyerRecord b;
    b.prosumer = period.buyers[j].profile.id;
    b.demand_kwh = period.buyers[j].demand_kwh;
    double col = 0.0;
    for (std::size_t i = 0; i < period.sellers.size(); ++i)
      col += res.allocation.at(i, j);
    b.local_kwh = col * b.demand_kwh;
    b.grid_kwh = std::max(0.0, 1.0 - col) * b.demand_kwh;
    // Buyer cost and value are evaluated at the posted asks for every
    // strategy, so fitness compares allocation quality like for like; the
    // mid-market settlement of the baseline shows up in seller revenue.
    b.cost = buyer_total_cost(j, res.allocation, period);
    b.value = buyer_value(b.cost, b.demand_kwh, period.buyers[j].profile);
    res.fitness += b.value;
    res.grid_import_kwh += b.grid_kwh;
    res.buyers.push_back(b);
  }

  res.sellers.reserve(period.sellers.size());
  for (std::size_t i = 0; i < period.sellers.size(); ++i) {
    SellerRecord s;
    s.prosumer = period.sellers[i].profile.id;
    s.surplus_kwh = period.sellers[i].surplus_kwh;
    s.price = period.sellers[i].price;
    for (std::size_t j = 0; j < period.buyers.size(); ++j) {
      const double sold = res.allocation.at(i, j) * period.buyers[j].demand_kwh;
      s.delivered_kwh += sold;
      s.loss_kwh += period.loss_at(i, j) * sold;
      s.revenue += transaction_prices[i * period.buyers.size() + j] * sold;
    }
    s.unsold_kwh = std::max(0.0, s.surplus_kwh - s.delivered_kwh - s.loss_kwh);
    res.grid_export_kwh += s.unsold_kwh;
    res.sellers.push_back(s);
  }

  if (cfg.strategy == Strategy::DebatePqr && !period.sellers.empty()) {
    Rng pqr_rng(mix_seed(cfg.seed, kPqrStream, t));
    const std::vector<double> new_prices =
        pqr_step(state.agents, res.allocation, period, pqr_rng);
    for (std::size_t i = 0; i < period.sellers.size(); ++i)
      state.ask_state[static_cast<std::size_t>(cls.sellers[i].first)] =
          state.grid.index_of(new_prices[i]);
  }
  return res;
}

SimulationReport run_simulation(const SimulationConfig& config,
                                const TraceSet& traces) {
  config.validate();
  if (traces.n_prosumers() == 0)
    throw std::invalid_argument("trace set has no prosumers");
  if (static_cast<long>(traces.n_periods()) < config.horizon)
    throw std::invalid_argument(
        "traces cover " + std::to_string(traces.n_periods()) +
        " periods but the horizon is " + std::to_string(config.horizon));

  const auto t0 = std::chrono::steady_clock::now();
  SimState state = init_sim_state(config, traces);

  SimulationReport report;
  report.version = kVersion;
  report.config = config;
  report.periods.reserve(static_cast<std::size_t>(config.horizon));
  for (long t = 0; t < config.horizon; ++t)
    report.periods.push_back(
        run_period(state, traces, static_cast<std::size_t>(t)));

  report.aggregates = compute_aggregates(report.periods);
  report.price_trajectories = compute_price_trajectories(report.periods);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

MarketPeriod sample_period(const SimulationConfig& config, std::size_t ns,
                           std::size_t nb, Rng& rng) {
  MarketPeriod period;
  period.l_max = config.l_max;
  period.rho_gb = config.rho_gb;
  period.rho_gs = config.rho_gs;
  const PriceGrid grid =
      PriceGrid::make(config.rho_gb, config.rho_gs, config.pqr.delta);

  int next_id = 0;
  const auto sample_profile = [&](double ref_lo, double ref_hi) {
    ProsumerProfile p;
    p.id = next_id++;
    p.k_plus = rng.uniform(config.k_plus_min, config.k_plus_max);
    p.k_minus = rng.uniform(config.k_minus_min, config.k_minus_max);
    p.zeta_plus = rng.uniform(config.zeta_plus_min, config.zeta_plus_max);
    p.zeta_minus = rng.uniform(config.zeta_minus_min, config.zeta_minus_max);
    p.ref_price = rng.uniform(ref_lo, ref_hi);
    return p;
  };

  for (std::size_t i = 0; i < ns; ++i) {
    SellerEntry s;
    s.profile = sample_profile(config.buyer_ref_min, config.buyer_ref_max);
    s.surplus_kwh = rng.uniform(2.0, 20.0);
    s.price = grid.price(grid.snap(
        rng.uniform(config.seller_price_min, config.seller_price_max)));
    period.sellers.push_back(s);
  }
  for (std::size_t j = 0; j < nb; ++j) {
    BuyerEntry b;
    b.profile = sample_profile(config.buyer_ref_min, config.buyer_ref_max);
    b.demand_kwh = rng.uniform(2.0, 20.0);
    period.buyers.push_back(b);
  }
  period.loss.resize(ns * nb);
  for (std::size_t k = 0; k < ns * nb; ++k)
    period.loss[k] = config.loss_set[rng.index(config.loss_set.size())];
  period.validate();
  return period;
}

}  // namespace p2pmarket

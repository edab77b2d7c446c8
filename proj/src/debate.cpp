#include "p2pmarket/debate.hpp"

#include <algorithm>
#include <stdexcept>

namespace p2pmarket {

namespace {

void mutate_crossover_into(AllocationMatrix& out, const AllocationMatrix& xk,
                           const AllocationMatrix& xa,
                           const AllocationMatrix& xb,
                           const AllocationMatrix& xc,
                           const DebateParams& params, Rng& rng) {
  const std::size_t dim = xk.x.size();
  out.sellers = xk.sellers;
  out.buyers = xk.buyers;
  out.x.resize(dim);
  const std::size_t forced = rng.index(dim);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    const double u = rng.uniform();
    if (u < params.cr || idx == forced) {
      const double v = xa.x[idx] + params.f * (xb.x[idx] - xc.x[idx]);
      out.x[idx] = std::clamp(v, 0.0, 1.0);
    } else {
      out.x[idx] = xk.x[idx];
    }
  }
}

}  // namespace

void DebateParams::validate() const {
  if (np < 4)
    throw std::invalid_argument("np must be at least 4");
  if (g_max < 1)
    throw std::invalid_argument("g_max must be at least 1");
  if (!(cr >= 0.0 && cr <= 1.0))
    throw std::invalid_argument("cr must be in [0, 1]");
  if (!(f >= 0.0 && f <= 2.0))
    throw std::invalid_argument("f must be in [0, 2]");
}

Population init_population(const MarketPeriod& period,
                           const DebateParams& params, Rng& rng) {
  params.validate();
  const std::size_t ns = period.sellers.size();
  const std::size_t nb = period.buyers.size();
  Population pop;
  pop.candidates.reserve(static_cast<std::size_t>(params.np));
  if (ns == 0 || nb == 0) {
    for (int k = 0; k < params.np; ++k)
      pop.candidates.push_back(AllocationMatrix::zeros(ns, nb));
    return pop;
  }
  for (int k = 0; k < params.np; ++k) {
    AllocationMatrix m = AllocationMatrix::zeros(ns, nb);
    for (double& v : m.x) v = rng.uniform();
    repair_in_place(m, period);
    pop.candidates.push_back(std::move(m));
  }
  return pop;
}

AllocationMatrix mutate_crossover(const AllocationMatrix& xk,
                                  const AllocationMatrix& xa,
                                  const AllocationMatrix& xb,
                                  const AllocationMatrix& xc,
                                  const DebateParams& params, Rng& rng) {
  if (xa.x.size() != xk.x.size() || xb.x.size() != xk.x.size() ||
      xc.x.size() != xk.x.size())
    throw std::invalid_argument("candidate shape mismatch");
  if (xk.x.empty())
    throw std::invalid_argument("cannot recombine empty candidates");
  AllocationMatrix out;
  mutate_crossover_into(out, xk, xa, xb, xc, params, rng);
  return out;
}

void repair_in_place(AllocationMatrix& x, const MarketPeriod& period) {
  const std::size_t ns = x.sellers;
  const std::size_t nb = x.buyers;

  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < nb; ++j)
      if (period.loss_at(i, j) >= period.l_max) x.at(i, j) = 0.0;

  // Rescaling triggers carry the feasibility slack so an already-feasible
  // matrix is a fixpoint despite rounding.
  for (std::size_t i = 0; i < ns; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < nb; ++j)
      row += (1.0 + period.loss_at(i, j)) * x.at(i, j) *
             period.buyers[j].demand_kwh;
    if (row > period.sellers[i].surplus_kwh + kFeasibilityTol) {
      const double scale = period.sellers[i].surplus_kwh / row;
      for (std::size_t j = 0; j < nb; ++j) x.at(i, j) *= scale;
    }
  }

  for (std::size_t j = 0; j < nb; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < ns; ++i) col += x.at(i, j);
    if (col > 1.0 + kFeasibilityTol) {
      for (std::size_t i = 0; i < ns; ++i) x.at(i, j) /= col;
    }
  }
}

AllocationMatrix repair(AllocationMatrix x, const MarketPeriod& period) {
  if (x.sellers != period.sellers.size() || x.buyers != period.buyers.size())
    throw std::invalid_argument("allocation shape mismatch");
  repair_in_place(x, period);
  return x;
}

DebateResult debate_run(const MarketPeriod& period, const DebateParams& params,
                        Rng& rng) {
  params.validate();
  const std::size_t ns = period.sellers.size();
  const std::size_t nb = period.buyers.size();

  DebateResult result;
  if (ns == 0 || nb == 0) {
    result.best = AllocationMatrix::zeros(ns, nb);
    result.best_fitness = market_fitness(result.best, period);
    result.best_fitness_per_generation.assign(
        static_cast<std::size_t>(params.g_max), result.best_fitness);
    return result;
  }

  Population pop = init_population(period, params, rng);
  const std::size_t np = pop.candidates.size();
  std::vector<double> fitness(np);
  for (std::size_t k = 0; k < np; ++k)
    fitness[k] = market_fitness(pop.candidates[k], period);

  result.best_fitness_per_generation.reserve(
      static_cast<std::size_t>(params.g_max));
  AllocationMatrix trial = AllocationMatrix::zeros(ns, nb);

  for (int g = 0; g < params.g_max; ++g) {
    for (std::size_t k = 0; k < np; ++k) {
      std::size_t a, b, c;
      do a = rng.index(np); while (a == k);
      do b = rng.index(np); while (b == k || b == a);
      do c = rng.index(np); while (c == k || c == a || c == b);

      mutate_crossover_into(trial, pop.candidates[k], pop.candidates[a],
                            pop.candidates[b], pop.candidates[c], params, rng);
      repair_in_place(trial, period);
      const double f_trial = market_fitness(trial, period);
      if (f_trial > fitness[k]) {
        std::swap(pop.candidates[k].x, trial.x);
        fitness[k] = f_trial;
      }
    }
    result.best_fitness_per_generation.push_back(
        *std::max_element(fitness.begin(), fitness.end()));
  }

  const std::size_t best =
      static_cast<std::size_t>(std::max_element(fitness.begin(), fitness.end()) -
                               fitness.begin());
  result.best = pop.candidates[best];
  result.best_fitness = fitness[best];
  return result;
}

}  // namespace p2pmarket

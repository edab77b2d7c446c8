#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "p2pmarket/pqr.hpp"

using namespace p2pmarket;

namespace {

PriceGrid grid13() { return PriceGrid::make(0.06, 0.12, 0.005); }

ProsumerProfile seller_profile(int id) {
  return {id, 2.25, 2.25, 0.74, 0.74, 0.10};
}

PriceAgent agent13(int id, double alpha = 0.01, double gamma = 0.9,
                   double eps = 0.0) {
  return PriceAgent::make(id, grid13(), seller_profile(id), alpha, gamma, eps,
                          0.965);
}

// Single-seller period at the given ask with one buyer demanding w.
MarketPeriod single_seller_period(double price, double w,
                                  double surplus = 1000.0) {
  MarketPeriod p;
  p.rho_gb = 0.06;
  p.rho_gs = 0.12;
  p.l_max = 0.05;
  p.buyers.push_back({{0, 2.25, 2.25, 0.74, 0.74, 0.08}, w});
  p.sellers.push_back({seller_profile(1), surplus, price});
  p.loss = {0.0};
  return p;
}

}  // namespace

TEST_CASE("price grid construction and lookup") {
  const PriceGrid g = PriceGrid::make(0.06, 0.12, 0.001);
  CHECK(g.n_states == 61);
  CHECK(g.price(0) == doctest::Approx(0.06).epsilon(1e-15));
  CHECK(g.price(60) == doctest::Approx(0.12).epsilon(1e-15));
  CHECK(g.index_of(g.price(37)) == 37);
  CHECK_THROWS_AS((void)g.index_of(0.0615), std::invalid_argument);
  CHECK_THROWS_AS((void)PriceGrid::make(0.06, 0.12, 0.0007),
                  std::invalid_argument);
  CHECK(g.snap(0.0912) == g.index_of(0.091));
  CHECK(g.snap(0.2) == 60);
}

TEST_CASE("select_action") {
  SUBCASE("pure exploitation takes the argmax") {
    PriceAgent a = agent13(1);
    a.q_at(5, PriceAction::Up) = 1.0;
    Rng rng(1);
    CHECK(select_action(a, 5, rng) == PriceAction::Up);
    a.q_at(5, PriceAction::Down) = 2.0;
    CHECK(select_action(a, 5, rng) == PriceAction::Down);
  }
  SUBCASE("ties break in fixed order") {
    PriceAgent a = agent13(1);
    Rng rng(1);
    CHECK(select_action(a, 5, rng) == PriceAction::Up);
    CHECK(select_action(a, 0, rng) == PriceAction::Up);
    // Top state masks Up; equal values fall to Down.
    CHECK(select_action(a, a.grid.n_states - 1, rng) == PriceAction::Down);
  }
  SUBCASE("boundary masks the out-of-band action even when it dominates") {
    PriceAgent a = agent13(1);
    const int top = a.grid.n_states - 1;
    a.q_at(top, PriceAction::Up) = 100.0;
    a.q_at(top, PriceAction::Hold) = 1.0;
    Rng rng(2);
    for (int k = 0; k < 50; ++k)
      CHECK(select_action(a, top, rng) == PriceAction::Hold);
    a.epsilon = 1.0;
    for (int k = 0; k < 200; ++k)
      CHECK(select_action(a, top, rng) != PriceAction::Up);
  }
  SUBCASE("full exploration is uniform over admissible actions") {
    PriceAgent a = agent13(1, 0.01, 0.9, 1.0);
    Rng rng(42);
    int counts[3] = {0, 0, 0};
    const int n = 30000;
    for (int k = 0; k < n; ++k)
      ++counts[static_cast<int>(select_action(a, 6, rng))];
    // 3 sigma for Binomial(n, 1/3).
    const double sigma = std::sqrt(n * (1.0 / 3.0) * (2.0 / 3.0));
    for (int c : counts) CHECK(std::abs(c - n / 3.0) <= 3.0 * sigma);
  }
}

TEST_CASE("seller_reward is revenue at the post-action price") {
  AllocationMatrix x = AllocationMatrix::zeros(1, 1);
  SUBCASE("nothing sold") {
    const MarketPeriod p = single_seller_period(0.10, 8.0);
    CHECK(seller_reward(0, 0.001, x, p) == 0.0);
  }
  SUBCASE("hold action") {
    const MarketPeriod p = single_seller_period(0.10, 8.0);
    x.at(0, 0) = 1.0;
    CHECK(seller_reward(0, 0.0, x, p) == doctest::Approx(0.80).epsilon(1e-12));
  }
  SUBCASE("price increase") {
    const MarketPeriod p = single_seller_period(0.10, 8.0);
    x.at(0, 0) = 1.0;
    CHECK(seller_reward(0, 0.001, x, p) ==
          doctest::Approx(0.808).epsilon(1e-12));
  }
}

TEST_CASE("td_error") {
  PriceAgent a = agent13(1);
  SUBCASE("zero table returns the reward") {
    CHECK(td_error(a, 5, PriceAction::Up, 6, 0.7) ==
          doctest::Approx(0.7).epsilon(1e-15));
  }
  SUBCASE("myopic case returns minus the current estimate") {
    a.gamma = 0.0;
    a.q_at(5, PriceAction::Hold) = 0.4;
    CHECK(td_error(a, 5, PriceAction::Hold, 5, 0.0) ==
          doctest::Approx(-0.4).epsilon(1e-15));
  }
  SUBCASE("bootstrapped case") {
    a.q_at(5, PriceAction::Up) = 0.5;
    a.q_at(6, PriceAction::Hold) = 1.0;
    CHECK(td_error(a, 5, PriceAction::Up, 6, 0.2) ==
          doctest::Approx(0.6).epsilon(1e-12));
  }
  SUBCASE("next-state max ignores masked actions") {
    const int top = a.grid.n_states - 1;
    a.q_at(top, PriceAction::Up) = 50.0;  // inadmissible at the top
    a.q_at(top, PriceAction::Down) = 2.0;
    CHECK(td_error(a, top - 1, PriceAction::Up, top, 0.0) ==
          doctest::Approx(0.9 * 2.0).epsilon(1e-12));
  }
}

TEST_CASE("q_update touches exactly one entry") {
  PriceAgent a = agent13(1, 1e-4);
  SUBCASE("zero signal leaves the table unchanged") {
    const std::vector<double> before = a.q;
    q_update(a, 4, PriceAction::Hold, 0.0);
    CHECK(a.q == before);
  }
  SUBCASE("zero learning rate leaves the table unchanged") {
    a.alpha = 0.0;
    const std::vector<double> before = a.q;
    q_update(a, 4, PriceAction::Hold, 2.0);
    CHECK(a.q == before);
  }
  SUBCASE("unit signal adds alpha times k_plus") {
    q_update(a, 4, PriceAction::Up, 1.0);
    CHECK(a.q_at(4, PriceAction::Up) ==
          doctest::Approx(1e-4 * a.profile.k_plus).epsilon(1e-12));
    int nonzero = 0;
    for (double v : a.q)
      if (v != 0.0) ++nonzero;
    CHECK(nonzero == 1);
  }
}

TEST_CASE("pqr_step") {
  SUBCASE("greedy zero-table ratchet follows the tie-break") {
    // alpha = 0 keeps the table at zero, epsilon = 0 keeps selection greedy:
    // the price must climb by one step per period, then bounce on the top.
    std::vector<PriceAgent> agents{agent13(1, 0.0, 0.9, 0.0)};
    const PriceGrid g = agents[0].grid;
    int s = g.index_of(0.105);
    Rng rng(3);
    for (int t = 0; t < 8; ++t) {
      MarketPeriod p = single_seller_period(g.price(s), 8.0);
      AllocationMatrix x{1, 1, {1.0}};
      const std::vector<double> np = pqr_step(agents, x, p, rng);
      REQUIRE(np.size() == 1);
      const int expected = s < g.n_states - 1 ? s + 1 : s - 1;
      CHECK(g.index_of(np[0]) == expected);
      s = g.index_of(np[0]);
    }
  }
  SUBCASE("prices stay on the grid across many steps") {
    std::vector<PriceAgent> agents{agent13(1, 0.01, 0.9, 1.0)};
    const PriceGrid g = agents[0].grid;
    int s = g.index_of(0.09);
    Rng rng(17);
    for (int t = 0; t < 500; ++t) {
      MarketPeriod p = single_seller_period(g.price(s), 5.0);
      AllocationMatrix x{1, 1, {1.0}};
      const std::vector<double> np = pqr_step(agents, x, p, rng);
      const int m = g.index_of(np[0]);  // throws if off-grid
      CHECK(m >= 0);
      CHECK(m < g.n_states);
      s = m;
    }
  }
  SUBCASE("epsilon decays monotonically") {
    std::vector<PriceAgent> agents{agent13(1, 0.01, 0.9, 1.0)};
    Rng rng(5);
    double prev = agents[0].epsilon;
    for (int t = 0; t < 50; ++t) {
      MarketPeriod p = single_seller_period(0.10, 5.0);
      AllocationMatrix x{1, 1, {1.0}};
      (void)pqr_step(agents, x, p, rng);
      CHECK(agents[0].epsilon <= prev);
      CHECK(agents[0].epsilon ==
            doctest::Approx(prev * 0.965).epsilon(1e-12));
      prev = agents[0].epsilon;
    }
  }
  SUBCASE("per-seller updates are isolated from other sellers") {
    const auto run_once = [](bool with_second_seller, std::uint64_t rng_seed) {
      std::vector<PriceAgent> agents;
      agents.push_back(agent13(1, 0.01, 0.9, 0.5));
      if (with_second_seller) agents.push_back(agent13(2, 0.01, 0.9, 0.5));

      MarketPeriod p;
      p.rho_gb = 0.06;
      p.rho_gs = 0.12;
      p.l_max = 0.05;
      p.buyers.push_back({{0, 2.25, 2.25, 0.74, 0.74, 0.08}, 9.0});
      p.sellers.push_back({seller_profile(1), 50.0, 0.10});
      AllocationMatrix x;
      if (with_second_seller) {
        p.sellers.push_back({seller_profile(2), 40.0, 0.115});
        p.loss = {0.0, 0.0};
        x = AllocationMatrix{2, 1, {0.6, 0.3}};
      } else {
        p.loss = {0.0};
        x = AllocationMatrix{1, 1, {0.6}};
      }
      Rng rng(rng_seed);
      // Burn the same base draw either way.
      const std::vector<double> np = pqr_step(agents, x, p, rng);
      return std::make_pair(np[0], agents[0].q);
    };
    const auto [price_a, q_a] = run_once(false, 7);
    const auto [price_b, q_b] = run_once(true, 7);
    CHECK(price_a == price_b);
    CHECK(q_a == q_b);
  }
}

TEST_CASE("perception-weighted update reduces to plain q-learning for "
          "k = zeta = 1") {
  const PriceGrid g = grid13();
  ProsumerProfile neutral{1, 1.0, 1.0, 1.0, 1.0, 0.10};
  PriceAgent agent =
      PriceAgent::make(1, g, neutral, 0.05, 0.9, 1.0, 0.99);

  // Independent reference: same protocol, classic update rule.
  std::vector<double> ref_q(static_cast<std::size_t>(g.n_states) * 3, 0.0);
  double ref_eps = 1.0;
  int ref_s = g.index_of(0.09);
  Rng ref_rng(4242);

  int s = g.index_of(0.09);
  Rng rng(4242);

  const auto demand = [](double price) { return 30.0 - 200.0 * price; };

  for (int t = 0; t < 200; ++t) {
    {
      MarketPeriod p = single_seller_period(g.price(s), demand(g.price(s)));
      p.sellers[0].profile = neutral;
      AllocationMatrix x{1, 1, {1.0}};
      const std::vector<double> np = pqr_step({&agent, 1}, x, p, rng);
      s = g.index_of(np[0]);
    }
    {
      // Mirror the per-agent stream derivation.
      const std::uint64_t base = ref_rng.next_u64();
      Rng sub(mix_seed(base, 1));
      const auto q_at = [&](int st, PriceAction a) -> double& {
        return ref_q[static_cast<std::size_t>(st) * 3 + static_cast<int>(a)];
      };
      const auto admissible = [&](int st, PriceAction a) {
        const int nxt = st + action_step(a);
        return nxt >= 0 && nxt < g.n_states;
      };
      PriceAction adm[3];
      int n_adm = 0;
      for (PriceAction a : kActionOrder)
        if (admissible(ref_s, a)) adm[n_adm++] = a;
      PriceAction act;
      const double u = sub.uniform();
      if (u < ref_eps) {
        act = adm[sub.index(static_cast<std::size_t>(n_adm))];
      } else {
        act = adm[0];
        for (int k = 1; k < n_adm; ++k)
          if (q_at(ref_s, adm[k]) > q_at(ref_s, act)) act = adm[k];
      }
      const int s_new = ref_s + action_step(act);
      const double w = demand(g.price(ref_s));
      const double r = (g.price(ref_s) + action_step(act) * g.delta) * w;
      double best_next = -1e300;
      for (PriceAction a : kActionOrder)
        if (admissible(s_new, a)) best_next = std::max(best_next, q_at(s_new, a));
      const double td = r + 0.9 * best_next - q_at(ref_s, act);
      q_at(ref_s, act) += 0.05 * td;
      ref_s = s_new;
      ref_eps *= 0.99;
    }
  }
  CHECK(s == ref_s);
  REQUIRE(agent.q.size() == ref_q.size());
  for (std::size_t k = 0; k < ref_q.size(); ++k)
    CHECK(agent.q[k] == doctest::Approx(ref_q[k]).epsilon(1e-12));
}

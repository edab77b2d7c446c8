#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "p2pmarket/debate.hpp"
#include "p2pmarket/traces.hpp"

namespace p2pmarket {

enum class Strategy { DebatePqr, Rule };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

// Learning controls for the pricing agents.
struct PqrParams {
  double alpha = 1e-4;
  double gamma = 0.9;
  double delta = 0.001;
  double epsilon0 = 1.0;
  double epsilon_decay = 0.965;
};

// Full description of one simulation run. The defaults are the reference
// desk-scale setup; serialize_config(parse_config(text)) is canonical.
struct SimulationConfig {
  long horizon = 365;
  int periods_per_day = 1;
  Strategy strategy = Strategy::DebatePqr;
  std::uint64_t seed = 1;
  std::size_t n_buyers = 20;
  std::size_t n_sellers = 20;
  std::string traces_path;  // empty: synthesize from synth params

  double rho_gb = 0.06;
  double rho_gs = 0.12;

  std::vector<double> loss_set = {0.01, 0.02, 0.03, 0.04};
  double l_max = 0.025;

  DebateParams debate;
  PqrParams pqr;

  double k_plus_min = 2.10, k_plus_max = 2.61;
  double k_minus_min = 2.10, k_minus_max = 2.61;
  double zeta_plus_min = 0.60, zeta_plus_max = 0.88;
  double zeta_minus_min = 0.52, zeta_minus_max = 1.0;
  double buyer_ref_min = 0.06, buyer_ref_max = 0.10;
  double seller_price_min = 0.09, seller_price_max = 0.12;

  SynthParams synth;

  void validate() const;  // throws std::invalid_argument
};

// Flat key = value text; '#' starts a comment. Unknown keys are rejected.
SimulationConfig parse_config_text(const std::string& text);
SimulationConfig parse_config(const std::filesystem::path& path);
std::string serialize_config(const SimulationConfig& config);
void write_config(const SimulationConfig& config,
                  const std::filesystem::path& path);

}  // namespace p2pmarket

#include "p2pmarket/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace p2pmarket {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad number '" + v +
                                "'");
  }
  if (pos != v.size())
    throw std::invalid_argument("config key '" + key + "': bad number '" + v +
                                "'");
  return out;
}

long to_long(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long out = 0;
  try {
    out = std::stol(v, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad integer '" + v +
                                "'");
  }
  if (pos != v.size())
    throw std::invalid_argument("config key '" + key + "': bad integer '" + v +
                                "'");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  unsigned long long out = 0;
  try {
    out = std::stoull(v, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad integer '" + v +
                                "'");
  }
  if (pos != v.size())
    throw std::invalid_argument("config key '" + key + "': bad integer '" + v +
                                "'");
  return out;
}

std::vector<double> to_double_list(const std::string& key,
                                   const std::string& v) {
  std::vector<double> out;
  std::istringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(to_double(key, trim(tok)));
  if (out.empty())
    throw std::invalid_argument("config key '" + key + "': empty list");
  return out;
}

}  // namespace

std::string to_string(Strategy s) {
  return s == Strategy::DebatePqr ? "debate_pqr" : "rule";
}

Strategy strategy_from_string(const std::string& s) {
  if (s == "debate_pqr") return Strategy::DebatePqr;
  if (s == "rule") return Strategy::Rule;
  throw std::invalid_argument("unknown strategy '" + s +
                              "' (expected debate_pqr or rule)");
}

void SimulationConfig::validate() const {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (periods_per_day < 1)
    throw std::invalid_argument("periods_per_day must be >= 1");
  if (!(rho_gb > 0.0) || !(rho_gs > rho_gb))
    throw std::invalid_argument("grid prices must satisfy 0 < rho_gb < rho_gs");
  for (double l : loss_set)
    if (!(l >= 0.0 && l < 1.0))
      throw std::invalid_argument("loss_set values must be in [0, 1)");
  if (!(l_max > 0.0 && l_max < 1.0))
    throw std::invalid_argument("l_max must be in (0, 1)");
  debate.validate();
  if (pqr.alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
  if (!(pqr.gamma >= 0.0 && pqr.gamma < 1.0))
    throw std::invalid_argument("gamma must be in [0, 1)");
  if (!(pqr.delta > 0.0)) throw std::invalid_argument("delta must be > 0");
  if (!(pqr.epsilon0 >= 0.0 && pqr.epsilon0 <= 1.0))
    throw std::invalid_argument("epsilon0 must be in [0, 1]");
  if (!(pqr.epsilon_decay > 0.0 && pqr.epsilon_decay <= 1.0))
    throw std::invalid_argument("epsilon_decay must be in (0, 1]");

  const auto check_range = [](const char* name, double lo, double hi) {
    if (!(lo <= hi))
      throw std::invalid_argument(std::string(name) + " range is inverted");
  };
  check_range("k_plus", k_plus_min, k_plus_max);
  check_range("k_minus", k_minus_min, k_minus_max);
  check_range("zeta_plus", zeta_plus_min, zeta_plus_max);
  check_range("zeta_minus", zeta_minus_min, zeta_minus_max);
  check_range("buyer_ref", buyer_ref_min, buyer_ref_max);
  check_range("seller_price", seller_price_min, seller_price_max);
  if (k_plus_min < 0.0 || k_minus_min < 0.0)
    throw std::invalid_argument("k ranges must be non-negative");
  if (!(zeta_plus_min > 0.0 && zeta_plus_max <= 1.0) ||
      !(zeta_minus_min > 0.0 && zeta_minus_max <= 1.0))
    throw std::invalid_argument("zeta ranges must lie in (0, 1]");
  if (buyer_ref_min < rho_gb || buyer_ref_max > rho_gs)
    throw std::invalid_argument("buyer_ref range outside grid price band");
  if (seller_price_min < rho_gb || seller_price_max > rho_gs)
    throw std::invalid_argument("seller_price range outside grid price band");
}

SimulationConfig parse_config_text(const std::string& text) {
  SimulationConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;

  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"horizon", [&](const std::string& k, const std::string& v) { cfg.horizon = to_long(k, v); }},
      {"periods_per_day", [&](const std::string& k, const std::string& v) { cfg.periods_per_day = static_cast<int>(to_long(k, v)); }},
      {"strategy", [&](const std::string&, const std::string& v) { cfg.strategy = strategy_from_string(v); }},
      {"seed", [&](const std::string& k, const std::string& v) { cfg.seed = to_u64(k, v); }},
      {"n_buyers", [&](const std::string& k, const std::string& v) { cfg.n_buyers = static_cast<std::size_t>(to_long(k, v)); }},
      {"n_sellers", [&](const std::string& k, const std::string& v) { cfg.n_sellers = static_cast<std::size_t>(to_long(k, v)); }},
      {"traces_path", [&](const std::string&, const std::string& v) { cfg.traces_path = v; }},
      {"rho_gb", [&](const std::string& k, const std::string& v) { cfg.rho_gb = to_double(k, v); }},
      {"rho_gs", [&](const std::string& k, const std::string& v) { cfg.rho_gs = to_double(k, v); }},
      {"loss_set", [&](const std::string& k, const std::string& v) { cfg.loss_set = to_double_list(k, v); }},
      {"l_max", [&](const std::string& k, const std::string& v) { cfg.l_max = to_double(k, v); }},
      {"np", [&](const std::string& k, const std::string& v) { cfg.debate.np = static_cast<int>(to_long(k, v)); }},
      {"g_max", [&](const std::string& k, const std::string& v) { cfg.debate.g_max = static_cast<int>(to_long(k, v)); }},
      {"cr", [&](const std::string& k, const std::string& v) { cfg.debate.cr = to_double(k, v); }},
      {"f", [&](const std::string& k, const std::string& v) { cfg.debate.f = to_double(k, v); }},
      {"alpha", [&](const std::string& k, const std::string& v) { cfg.pqr.alpha = to_double(k, v); }},
      {"gamma", [&](const std::string& k, const std::string& v) { cfg.pqr.gamma = to_double(k, v); }},
      {"delta", [&](const std::string& k, const std::string& v) { cfg.pqr.delta = to_double(k, v); }},
      {"epsilon0", [&](const std::string& k, const std::string& v) { cfg.pqr.epsilon0 = to_double(k, v); }},
      {"epsilon_decay", [&](const std::string& k, const std::string& v) { cfg.pqr.epsilon_decay = to_double(k, v); }},
      {"k_plus_min", [&](const std::string& k, const std::string& v) { cfg.k_plus_min = to_double(k, v); }},
      {"k_plus_max", [&](const std::string& k, const std::string& v) { cfg.k_plus_max = to_double(k, v); }},
      {"k_minus_min", [&](const std::string& k, const std::string& v) { cfg.k_minus_min = to_double(k, v); }},
      {"k_minus_max", [&](const std::string& k, const std::string& v) { cfg.k_minus_max = to_double(k, v); }},
      {"zeta_plus_min", [&](const std::string& k, const std::string& v) { cfg.zeta_plus_min = to_double(k, v); }},
      {"zeta_plus_max", [&](const std::string& k, const std::string& v) { cfg.zeta_plus_max = to_double(k, v); }},
      {"zeta_minus_min", [&](const std::string& k, const std::string& v) { cfg.zeta_minus_min = to_double(k, v); }},
      {"zeta_minus_max", [&](const std::string& k, const std::string& v) { cfg.zeta_minus_max = to_double(k, v); }},
      {"buyer_ref_min", [&](const std::string& k, const std::string& v) { cfg.buyer_ref_min = to_double(k, v); }},
      {"buyer_ref_max", [&](const std::string& k, const std::string& v) { cfg.buyer_ref_max = to_double(k, v); }},
      {"seller_price_min", [&](const std::string& k, const std::string& v) { cfg.seller_price_min = to_double(k, v); }},
      {"seller_price_max", [&](const std::string& k, const std::string& v) { cfg.seller_price_max = to_double(k, v); }},
      {"solar_base_kwh", [&](const std::string& k, const std::string& v) { cfg.synth.solar_base_kwh = to_double(k, v); }},
      {"solar_amp", [&](const std::string& k, const std::string& v) { cfg.synth.solar_amp = to_double(k, v); }},
      {"solar_phase_day", [&](const std::string& k, const std::string& v) { cfg.synth.solar_phase_day = to_double(k, v); }},
      {"solar_noise", [&](const std::string& k, const std::string& v) { cfg.synth.solar_noise = to_double(k, v); }},
      {"solar_scale_spread", [&](const std::string& k, const std::string& v) { cfg.synth.solar_scale_spread = to_double(k, v); }},
      {"cons_scale_spread", [&](const std::string& k, const std::string& v) { cfg.synth.cons_scale_spread = to_double(k, v); }},
      {"seller_cons_base_kwh", [&](const std::string& k, const std::string& v) { cfg.synth.seller_cons_base_kwh = to_double(k, v); }},
      {"seller_cons_amp", [&](const std::string& k, const std::string& v) { cfg.synth.seller_cons_amp = to_double(k, v); }},
      {"buyer_cons_base_kwh", [&](const std::string& k, const std::string& v) { cfg.synth.buyer_cons_base_kwh = to_double(k, v); }},
      {"buyer_cons_amp", [&](const std::string& k, const std::string& v) { cfg.synth.buyer_cons_amp = to_double(k, v); }},
      {"cons_noise", [&](const std::string& k, const std::string& v) { cfg.synth.cons_noise = to_double(k, v); }},
  };

  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end())
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
    it->second(key, value);
  }

  cfg.synth.periods_per_day = cfg.periods_per_day;
  cfg.validate();
  return cfg;
}

SimulationConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize_config(const SimulationConfig& c) {
  std::ostringstream o;
  o << "# simulation\n";
  o << "horizon = " << c.horizon << '\n';
  o << "periods_per_day = " << c.periods_per_day << '\n';
  o << "strategy = " << to_string(c.strategy) << '\n';
  o << "seed = " << c.seed << '\n';
  o << "n_buyers = " << c.n_buyers << '\n';
  o << "n_sellers = " << c.n_sellers << '\n';
  o << "traces_path = " << c.traces_path << '\n';
  o << "# grid tariffs\n";
  o << "rho_gb = " << fmt(c.rho_gb) << '\n';
  o << "rho_gs = " << fmt(c.rho_gs) << '\n';
  o << "# wire losses\n";
  o << "loss_set = ";
  for (std::size_t i = 0; i < c.loss_set.size(); ++i)
    o << (i ? "," : "") << fmt(c.loss_set[i]);
  o << '\n';
  o << "l_max = " << fmt(c.l_max) << '\n';
  o << "# allocation solver\n";
  o << "np = " << c.debate.np << '\n';
  o << "g_max = " << c.debate.g_max << '\n';
  o << "cr = " << fmt(c.debate.cr) << '\n';
  o << "f = " << fmt(c.debate.f) << '\n';
  o << "# pricing agents\n";
  o << "alpha = " << fmt(c.pqr.alpha) << '\n';
  o << "gamma = " << fmt(c.pqr.gamma) << '\n';
  o << "delta = " << fmt(c.pqr.delta) << '\n';
  o << "epsilon0 = " << fmt(c.pqr.epsilon0) << '\n';
  o << "epsilon_decay = " << fmt(c.pqr.epsilon_decay) << '\n';
  o << "# perception parameter ranges\n";
  o << "k_plus_min = " << fmt(c.k_plus_min) << '\n';
  o << "k_plus_max = " << fmt(c.k_plus_max) << '\n';
  o << "k_minus_min = " << fmt(c.k_minus_min) << '\n';
  o << "k_minus_max = " << fmt(c.k_minus_max) << '\n';
  o << "zeta_plus_min = " << fmt(c.zeta_plus_min) << '\n';
  o << "zeta_plus_max = " << fmt(c.zeta_plus_max) << '\n';
  o << "zeta_minus_min = " << fmt(c.zeta_minus_min) << '\n';
  o << "zeta_minus_max = " << fmt(c.zeta_minus_max) << '\n';
  o << "buyer_ref_min = " << fmt(c.buyer_ref_min) << '\n';
  o << "buyer_ref_max = " << fmt(c.buyer_ref_max) << '\n';
  o << "seller_price_min = " << fmt(c.seller_price_min) << '\n';
  o << "seller_price_max = " << fmt(c.seller_price_max) << '\n';
  o << "# synthetic traces\n";
  o << "solar_base_kwh = " << fmt(c.synth.solar_base_kwh) << '\n';
  o << "solar_amp = " << fmt(c.synth.solar_amp) << '\n';
  o << "solar_phase_day = " << fmt(c.synth.solar_phase_day) << '\n';
  o << "solar_noise = " << fmt(c.synth.solar_noise) << '\n';
  o << "solar_scale_spread = " << fmt(c.synth.solar_scale_spread) << '\n';
  o << "cons_scale_spread = " << fmt(c.synth.cons_scale_spread) << '\n';
  o << "seller_cons_base_kwh = " << fmt(c.synth.seller_cons_base_kwh) << '\n';
  o << "seller_cons_amp = " << fmt(c.synth.seller_cons_amp) << '\n';
  o << "buyer_cons_base_kwh = " << fmt(c.synth.buyer_cons_base_kwh) << '\n';
  o << "buyer_cons_amp = " << fmt(c.synth.buyer_cons_amp) << '\n';
  o << "cons_noise = " << fmt(c.synth.cons_noise) << '\n';
  return o.str();
}

void write_config(const SimulationConfig& config,
                  const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write config file " + path.string());
  out << serialize_config(config);
  if (!out) throw std::runtime_error("error while writing " + path.string());
}

}  // namespace p2pmarket

#include "p2pmarket/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "p2pmarket/debate.hpp"
#include "p2pmarket/report.hpp"
#include "p2pmarket/sim.hpp"
#include "p2pmarket/version.hpp"

namespace p2pmarket {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct CommonOpts {
  std::string config_path;
  std::string traces_path;
  std::string out = "report";
  std::string format = "json";
  std::string strategy;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool config_required) {
  auto* c = cmd->add_option("--config", o.config_path, "simulation config file");
  if (config_required) c->required();
  cmd->add_option("--traces", o.traces_path, "trace CSV (overrides config)");
  cmd->add_option("--out", o.out, "output base path");
  cmd->add_option("--format", o.format, "report format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", o.seed, "master seed (overrides config)");
}

SimulationConfig load_config(const CommonOpts& o) {
  SimulationConfig cfg =
      o.config_path.empty() ? SimulationConfig{} : parse_config(o.config_path);
  if (!o.traces_path.empty()) cfg.traces_path = o.traces_path;
  if (o.seed) cfg.seed = *o.seed;
  if (!o.strategy.empty()) cfg.strategy = strategy_from_string(o.strategy);
  cfg.validate();
  return cfg;
}

TraceSet resolve_traces(const SimulationConfig& cfg) {
  if (!cfg.traces_path.empty()) return load_traces(cfg.traces_path);
  Rng rng(mix_seed(cfg.seed, 5));  // synth stream
  SynthParams sp = cfg.synth;
  sp.periods_per_day = cfg.periods_per_day;
  return synth_traces(cfg.n_buyers, cfg.n_sellers,
                      static_cast<std::size_t>(cfg.horizon) *
                          static_cast<std::size_t>(cfg.periods_per_day),
                      rng, sp);
}

int do_run(const CommonOpts& o) {
  SimulationConfig cfg = load_config(o);
  const TraceSet traces = resolve_traces(cfg);
  const SimulationReport report = run_simulation(cfg, traces);
  write_report(report, o.out, format_from_string(o.format));
  std::cerr << "run: strategy=" << to_string(cfg.strategy)
            << " horizon=" << cfg.horizon
            << " total_buyer_value=" << fmt(report.aggregates.total_buyer_value)
            << " total_seller_revenue="
            << fmt(report.aggregates.total_seller_revenue)
            << " wall_s=" << report.wall_seconds << '\n';
  return 0;
}

int do_compare(const CommonOpts& o) {
  SimulationConfig cfg = load_config(o);
  const TraceSet traces = resolve_traces(cfg);

  SimulationConfig cfg_d = cfg;
  cfg_d.strategy = Strategy::DebatePqr;
  SimulationConfig cfg_r = cfg;
  cfg_r.strategy = Strategy::Rule;

  const SimulationReport rep_d = run_simulation(cfg_d, traces);
  const SimulationReport rep_r = run_simulation(cfg_r, traces);
  const ReportFormat format = format_from_string(o.format);
  write_report(rep_d, o.out + ".debate_pqr", format);
  write_report(rep_r, o.out + ".rule", format);

  const auto pct = [](double d, double r) {
    return r == 0.0 ? 0.0 : 100.0 * (d - r) / std::abs(r);
  };
  std::ofstream out(o.out + ".compare.csv");
  if (!out)
    throw std::runtime_error("cannot write " + o.out + ".compare.csv");
  out << "metric,debate_pqr,rule,delta_pct\n";
  out << "total_buyer_value," << fmt(rep_d.aggregates.total_buyer_value) << ','
      << fmt(rep_r.aggregates.total_buyer_value) << ','
      << fmt(pct(rep_d.aggregates.total_buyer_value,
                 rep_r.aggregates.total_buyer_value))
      << '\n';
  out << "cumulative_seller_reward,"
      << fmt(rep_d.aggregates.total_seller_revenue) << ','
      << fmt(rep_r.aggregates.total_seller_revenue) << ','
      << fmt(pct(rep_d.aggregates.total_seller_revenue,
                 rep_r.aggregates.total_seller_revenue))
      << '\n';
  out << "total_grid_import_kwh," << fmt(rep_d.aggregates.total_grid_import_kwh)
      << ',' << fmt(rep_r.aggregates.total_grid_import_kwh) << ','
      << fmt(pct(rep_d.aggregates.total_grid_import_kwh,
                 rep_r.aggregates.total_grid_import_kwh))
      << '\n';
  if (!out)
    throw std::runtime_error("error while writing " + o.out + ".compare.csv");

  std::cerr << "compare: buyer_value " << fmt(rep_d.aggregates.total_buyer_value)
            << " vs " << fmt(rep_r.aggregates.total_buyer_value)
            << ", seller_reward "
            << fmt(rep_d.aggregates.total_seller_revenue) << " vs "
            << fmt(rep_r.aggregates.total_seller_revenue) << '\n';
  return 0;
}

int do_convergence(const CommonOpts& o, const std::string& sizes_arg,
                   int n_seeds) {
  SimulationConfig cfg = load_config(o);

  std::vector<std::pair<std::size_t, std::size_t>> sizes;
  std::istringstream ss(sizes_arg);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto x = tok.find('x');
    if (x == std::string::npos)
      throw std::invalid_argument("bad size '" + tok + "' (expected NxM)");
    sizes.emplace_back(std::stoul(tok.substr(0, x)),
                       std::stoul(tok.substr(x + 1)));
  }
  if (sizes.empty()) throw std::invalid_argument("no sizes given");
  if (n_seeds < 1) throw std::invalid_argument("seeds must be >= 1");

  std::ofstream out(o.out + ".convergence.csv");
  if (!out)
    throw std::runtime_error("cannot write " + o.out + ".convergence.csv");
  out << "size,iteration,mean_best_fitness,normalized_fitness\n";

  for (const auto& [ns, nb] : sizes) {
    std::vector<double> mean(static_cast<std::size_t>(cfg.debate.g_max), 0.0);
    for (int s = 0; s < n_seeds; ++s) {
      Rng inst_rng(mix_seed(cfg.seed, 6, static_cast<std::uint64_t>(s)));
      const MarketPeriod period = sample_period(cfg, ns, nb, inst_rng);
      Rng de_rng(mix_seed(cfg.seed, 7, static_cast<std::uint64_t>(s)));
      const DebateResult res = debate_run(period, cfg.debate, de_rng);
      for (std::size_t g = 0; g < mean.size(); ++g)
        mean[g] += res.best_fitness_per_generation[g];
    }
    for (double& v : mean) v /= n_seeds;
    const double lo = *std::min_element(mean.begin(), mean.end());
    const double hi = *std::max_element(mean.begin(), mean.end());
    const double span = hi > lo ? hi - lo : 1.0;
    const std::string label = std::to_string(ns) + "x" + std::to_string(nb);
    for (std::size_t g = 0; g < mean.size(); ++g)
      out << label << ',' << (g + 1) << ',' << fmt(mean[g]) << ','
          << fmt((mean[g] - lo) / span) << '\n';
    std::cerr << "convergence " << label << ": final mean best fitness "
              << fmt(mean.back()) << '\n';
  }
  if (!out)
    throw std::runtime_error("error while writing " + o.out +
                             ".convergence.csv");
  return 0;
}

int do_synth(const CommonOpts& o, std::size_t buyers, std::size_t sellers,
             long horizon) {
  SimulationConfig cfg = load_config(o);
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  Rng rng(mix_seed(o.seed ? *o.seed : cfg.seed, 5));
  SynthParams sp = cfg.synth;
  sp.periods_per_day = cfg.periods_per_day;
  const TraceSet traces = synth_traces(
      buyers, sellers,
      static_cast<std::size_t>(horizon) *
          static_cast<std::size_t>(cfg.periods_per_day),
      rng, sp);
  write_traces(traces, o.out);
  std::cerr << "synth: wrote " << traces.n_prosumers() << " prosumers x "
            << traces.n_periods() << " periods to " << o.out << '\n';
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Prospect-aware peer-to-peer energy market simulator"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CommonOpts run_o, cmp_o, conv_o, synth_o;
  std::string sizes = "5x5,10x10,15x15";
  int conv_seeds = 10;
  std::size_t synth_buyers = 20, synth_sellers = 20;
  long synth_horizon = 365;

  auto* run_cmd =
      app.add_subcommand("run", "simulate one strategy and write a report");
  add_common(run_cmd, run_o, true);
  run_cmd->add_option("--strategy", run_o.strategy,
                      "debate_pqr or rule (overrides config)")
      ->check(CLI::IsMember({"debate_pqr", "rule"}));

  auto* cmp_cmd = app.add_subcommand(
      "compare", "run debate_pqr and rule on identical seeds and traces");
  add_common(cmp_cmd, cmp_o, true);

  auto* conv_cmd = app.add_subcommand(
      "convergence", "best-fitness vs iteration traces across system sizes");
  add_common(conv_cmd, conv_o, false);
  conv_cmd->add_option("--sizes", sizes, "comma list of SxB sizes");
  conv_cmd->add_option("--seeds", conv_seeds, "instances per size");

  auto* synth_cmd =
      app.add_subcommand("synth", "generate a synthetic trace CSV");
  add_common(synth_cmd, synth_o, false);
  synth_cmd->add_option("--buyers", synth_buyers, "number of pure consumers");
  synth_cmd->add_option("--sellers", synth_sellers,
                        "number of producing prosumers");
  synth_cmd->add_option("--horizon", synth_horizon, "days to generate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run_cmd->parsed()) return do_run(run_o);
    if (cmp_cmd->parsed()) return do_compare(cmp_o);
    if (conv_cmd->parsed()) return do_convergence(conv_o, sizes, conv_seeds);
    if (synth_cmd->parsed())
      return do_synth(synth_o, synth_buyers, synth_sellers, synth_horizon);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace p2pmarket

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "p2pmarket/rng.hpp"

namespace p2pmarket {

// Rectangular per-prosumer, per-period consumption/production table.
// Registration order is the order of first appearance.
struct TraceSet {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> consumption;  // [prosumer][period], kWh
  std::vector<std::vector<double>> production;   // [prosumer][period], kWh

  std::size_t n_prosumers() const { return ids.size(); }
  std::size_t n_periods() const {
    return consumption.empty() ? 0 : consumption.front().size();
  }
};

// Strict CSV schema: header `prosumer_id,period,consumption_kwh,production_kwh`.
// Throws std::invalid_argument with the offending line number on malformed
// rows, on negative values, and on ragged coverage (listing missing pairs).
TraceSet load_traces(const std::filesystem::path& path);

void write_traces(const TraceSet& traces, const std::filesystem::path& path);

// Synthetic trace generator used when no real dataset is supplied. Seller
// production follows a seasonal sinusoid peaking mid-year with
// multiplicative noise; consumption follows a flatter seasonal profile.
struct SynthParams {
  double solar_base_kwh = 14.0;   // mean daily production per seller
  double solar_amp = 0.55;        // seasonal amplitude
  double solar_phase_day = 80.0;  // day of year where the sinusoid crosses up
  double solar_noise = 0.15;      // multiplicative, uniform +/- this fraction
  double solar_scale_spread = 0.2;  // per-seller panel-size spread
  double seller_cons_base_kwh = 5.0;
  double seller_cons_amp = 0.1;
  double buyer_cons_base_kwh = 10.0;
  double buyer_cons_amp = 0.25;
  double cons_noise = 0.2;
  double cons_scale_spread = 0.4;  // per-household size spread
  int periods_per_day = 1;
};

// Buyers are pure consumers (ids b0..), sellers carry rooftop production
// (ids s0..). Deterministic for a given rng seed.
TraceSet synth_traces(std::size_t n_buyers, std::size_t n_sellers,
                      std::size_t horizon, Rng& rng,
                      const SynthParams& params = {});

}  // namespace p2pmarket

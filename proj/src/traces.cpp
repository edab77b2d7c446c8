#include "p2pmarket/traces.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace p2pmarket {

namespace {

constexpr const char* kHeader =
    "prosumer_id,period,consumption_kwh,production_kwh";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_double(const std::string& tok, std::size_t line_no,
                    const char* what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("line " + std::to_string(line_no) +
                                ": malformed " + what + " '" + tok + "'");
  }
  if (pos != tok.size())
    throw std::invalid_argument("line " + std::to_string(line_no) +
                                ": malformed " + what + " '" + tok + "'");
  return v;
}

long parse_period(const std::string& tok, std::size_t line_no) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(tok, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("line " + std::to_string(line_no) +
                                ": malformed period '" + tok + "'");
  }
  if (pos != tok.size() || v < 0)
    throw std::invalid_argument("line " + std::to_string(line_no) +
                                ": malformed period '" + tok + "'");
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

TraceSet load_traces(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot open trace file " + path.string());

  std::string line;
  if (!std::getline(in, line) || line != kHeader)
    throw std::invalid_argument("trace file " + path.string() +
                                ": missing or wrong header (expected '" +
                                std::string(kHeader) + "')");

  TraceSet out;
  std::unordered_map<std::string, std::size_t> index;
  // [prosumer] -> period -> (consumption, production)
  std::vector<std::map<long, std::pair<double, double>>> rows;
  long max_period = -1;
  std::size_t line_no = 1;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 4)
      throw std::invalid_argument("line " + std::to_string(line_no) +
                                  ": expected 4 fields, got " +
                                  std::to_string(fields.size()));
    const std::string& id = fields[0];
    if (id.empty())
      throw std::invalid_argument("line " + std::to_string(line_no) +
                                  ": empty prosumer_id");
    const long period = parse_period(fields[1], line_no);
    const double cons = parse_double(fields[2], line_no, "consumption_kwh");
    const double prod = parse_double(fields[3], line_no, "production_kwh");
    if (cons < 0.0 || prod < 0.0)
      throw std::invalid_argument("line " + std::to_string(line_no) +
                                  ": negative value");

    auto [it, inserted] = index.try_emplace(id, out.ids.size());
    if (inserted) {
      out.ids.push_back(id);
      rows.emplace_back();
    }
    auto [rit, fresh] = rows[it->second].try_emplace(period,
                                                     std::make_pair(cons, prod));
    if (!fresh)
      throw std::invalid_argument("line " + std::to_string(line_no) +
                                  ": duplicate record for prosumer '" + id +
                                  "' period " + std::to_string(period));
    max_period = std::max(max_period, period);
  }

  if (out.ids.empty())
    throw std::invalid_argument("trace file " + path.string() +
                                ": no records");

  // Rectangularity: every prosumer must cover periods 0..max_period.
  std::string missing;
  std::size_t n_missing = 0;
  for (std::size_t p = 0; p < out.ids.size(); ++p) {
    for (long t = 0; t <= max_period; ++t) {
      if (!rows[p].count(t)) {
        ++n_missing;
        if (n_missing <= 10)
          missing += " (" + out.ids[p] + ", " + std::to_string(t) + ")";
      }
    }
  }
  if (n_missing > 0) {
    if (n_missing > 10)
      missing += " and " + std::to_string(n_missing - 10) + " more";
    throw std::invalid_argument("trace file " + path.string() +
                                ": ragged coverage, missing" + missing);
  }

  const std::size_t horizon = static_cast<std::size_t>(max_period + 1);
  out.consumption.assign(out.ids.size(), std::vector<double>(horizon));
  out.production.assign(out.ids.size(), std::vector<double>(horizon));
  for (std::size_t p = 0; p < out.ids.size(); ++p)
    for (const auto& [t, cp] : rows[p]) {
      out.consumption[p][static_cast<std::size_t>(t)] = cp.first;
      out.production[p][static_cast<std::size_t>(t)] = cp.second;
    }
  return out;
}

void write_traces(const TraceSet& traces, const std::filesystem::path& path) {
  std::ofstream outf(path);
  if (!outf)
    throw std::runtime_error("cannot write trace file " + path.string());
  outf << kHeader << '\n';
  for (std::size_t p = 0; p < traces.n_prosumers(); ++p)
    for (std::size_t t = 0; t < traces.n_periods(); ++t)
      outf << traces.ids[p] << ',' << t << ','
           << format_double(traces.consumption[p][t]) << ','
           << format_double(traces.production[p][t]) << '\n';
  if (!outf)
    throw std::runtime_error("error while writing " + path.string());
}

TraceSet synth_traces(std::size_t n_buyers, std::size_t n_sellers,
                      std::size_t horizon, Rng& rng,
                      const SynthParams& params) {
  TraceSet out;
  const std::size_t n = n_buyers + n_sellers;
  out.ids.reserve(n);
  for (std::size_t b = 0; b < n_buyers; ++b)
    out.ids.push_back("b" + std::to_string(b));
  for (std::size_t s = 0; s < n_sellers; ++s)
    out.ids.push_back("s" + std::to_string(s));
  out.consumption.assign(n, std::vector<double>(horizon, 0.0));
  out.production.assign(n, std::vector<double>(horizon, 0.0));

  const int ppd = std::max(1, params.periods_per_day);
  const auto season = [](double day, double amp, double phase) {
    return 1.0 + amp * std::sin(2.0 * std::numbers::pi * (day - phase) / 365.0);
  };

  for (std::size_t p = 0; p < n; ++p) {
    const bool is_seller = p >= n_buyers;
    // Household and panel sizes vary per prosumer, fixed over the horizon.
    const double cons_scale =
        1.0 + params.cons_scale_spread * rng.uniform(-1.0, 1.0);
    const double solar_scale =
        is_seller ? 1.0 + params.solar_scale_spread * rng.uniform(-1.0, 1.0)
                  : 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
      const double day = static_cast<double>(t / ppd);
      const double cons_base = is_seller ? params.seller_cons_base_kwh
                                         : params.buyer_cons_base_kwh;
      const double cons_amp =
          is_seller ? params.seller_cons_amp : params.buyer_cons_amp;
      const double cu = rng.uniform(-1.0, 1.0);
      const double cons = std::max(
          0.0, cons_base * cons_scale / ppd *
                   season(day, cons_amp, params.solar_phase_day) *
                   (1.0 + params.cons_noise * cu));
      out.consumption[p][t] = cons;
      if (is_seller) {
        const double pu = rng.uniform(-1.0, 1.0);
        // Daylight weighting concentrates production in mid-day sub-periods.
        double daylight = 1.0 / ppd;
        if (ppd > 1) {
          double norm = 0.0;
          for (int k = 0; k < ppd; ++k)
            norm += std::max(
                0.0, std::sin(std::numbers::pi * (k + 0.5) / ppd));
          daylight = std::max(0.0, std::sin(std::numbers::pi *
                                            (static_cast<double>(t % ppd) +
                                             0.5) /
                                            ppd)) /
                     norm;
        }
        out.production[p][t] = std::max(
            0.0, params.solar_base_kwh * solar_scale * daylight *
                     season(day, params.solar_amp, params.solar_phase_day) *
                     (1.0 + params.solar_noise * pu));
      }
    }
  }
  return out;
}

}  // namespace p2pmarket

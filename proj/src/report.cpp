#include "p2pmarket/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace p2pmarket {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write file " + path.string());
  return out;
}

std::vector<std::vector<std::string>> read_csv_rows(
    const std::filesystem::path& path, const std::string& expected_header) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot open file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != expected_header)
    throw std::invalid_argument("file " + path.string() +
                                ": missing or wrong header");
  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    rows.push_back(std::move(fields));
  }
  return rows;
}

double csv_double(const std::string& tok) {
  return tok.empty() ? 0.0 : std::stod(tok);
}

ordered_json period_to_json(const PeriodResult& p) {
  ordered_json jp;
  jp["period"] = p.period_index;
  jp["fitness"] = p.fitness;
  jp["grid_import_kwh"] = p.grid_import_kwh;
  jp["grid_export_kwh"] = p.grid_export_kwh;
  jp["buyers"] = ordered_json::array();
  for (const auto& b : p.buyers) {
    ordered_json jb;
    jb["prosumer"] = b.prosumer;
    jb["demand_kwh"] = b.demand_kwh;
    jb["local_kwh"] = b.local_kwh;
    jb["grid_kwh"] = b.grid_kwh;
    jb["cost"] = b.cost;
    jb["value"] = b.value;
    jp["buyers"].push_back(jb);
  }
  jp["sellers"] = ordered_json::array();
  for (const auto& s : p.sellers) {
    ordered_json js;
    js["prosumer"] = s.prosumer;
    js["surplus_kwh"] = s.surplus_kwh;
    js["delivered_kwh"] = s.delivered_kwh;
    js["loss_kwh"] = s.loss_kwh;
    js["unsold_kwh"] = s.unsold_kwh;
    js["price"] = s.price;
    js["revenue"] = s.revenue;
    jp["sellers"].push_back(js);
  }
  jp["allocation"] = ordered_json::array();
  for (std::size_t i = 0; i < p.allocation.sellers; ++i) {
    ordered_json row = ordered_json::array();
    for (std::size_t j = 0; j < p.allocation.buyers; ++j)
      row.push_back(p.allocation.at(i, j));
    jp["allocation"].push_back(row);
  }
  return jp;
}

PeriodResult period_from_json(const ordered_json& jp) {
  PeriodResult p;
  p.period_index = jp.at("period").get<long>();
  p.fitness = jp.at("fitness").get<double>();
  p.grid_import_kwh = jp.at("grid_import_kwh").get<double>();
  p.grid_export_kwh = jp.at("grid_export_kwh").get<double>();
  for (const auto& jb : jp.at("buyers")) {
    BuyerRecord b;
    b.prosumer = jb.at("prosumer").get<int>();
    b.demand_kwh = jb.at("demand_kwh").get<double>();
    b.local_kwh = jb.at("local_kwh").get<double>();
    b.grid_kwh = jb.at("grid_kwh").get<double>();
    b.cost = jb.at("cost").get<double>();
    b.value = jb.at("value").get<double>();
    p.buyers.push_back(b);
  }
  for (const auto& js : jp.at("sellers")) {
    SellerRecord s;
    s.prosumer = js.at("prosumer").get<int>();
    s.surplus_kwh = js.at("surplus_kwh").get<double>();
    s.delivered_kwh = js.at("delivered_kwh").get<double>();
    s.loss_kwh = js.at("loss_kwh").get<double>();
    s.unsold_kwh = js.at("unsold_kwh").get<double>();
    s.price = js.at("price").get<double>();
    s.revenue = js.at("revenue").get<double>();
    p.sellers.push_back(s);
  }
  const auto& alloc = jp.at("allocation");
  p.allocation.sellers = alloc.size();
  p.allocation.buyers = p.buyers.size();
  if (!alloc.empty()) p.allocation.buyers = alloc.front().size();
  for (const auto& row : alloc)
    for (const auto& v : row) p.allocation.x.push_back(v.get<double>());
  return p;
}

}  // namespace

ReportFormat format_from_string(const std::string& s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  throw std::invalid_argument("unknown format '" + s +
                              "' (expected csv or json)");
}

std::string report_to_json(const SimulationReport& report) {
  ordered_json j;
  j["version"] = report.version;
  j["config_text"] = serialize_config(report.config);
  j["aggregates"] = ordered_json();
  auto& ja = j["aggregates"];
  ja["total_buyer_value"] = report.aggregates.total_buyer_value;
  ja["mean_buyer_value"] = report.aggregates.mean_buyer_value;
  ja["total_seller_revenue"] = report.aggregates.total_seller_revenue;
  ja["total_grid_import_kwh"] = report.aggregates.total_grid_import_kwh;
  ja["total_grid_export_kwh"] = report.aggregates.total_grid_export_kwh;
  ja["buyer_value"] = report.aggregates.buyer_value;
  ja["seller_revenue"] = report.aggregates.seller_revenue;
  ja["cum_seller_revenue"] = report.aggregates.cum_seller_revenue;
  ja["ma10_buyer_value"] = report.aggregates.ma10_buyer_value;
  ja["ma10_seller_revenue"] = report.aggregates.ma10_seller_revenue;
  j["price_trajectories"] = ordered_json::array();
  for (const auto& traj : report.price_trajectories) {
    ordered_json jt;
    jt["prosumer"] = traj.prosumer;
    jt["periods"] = traj.periods;
    jt["prices"] = traj.prices;
    j["price_trajectories"].push_back(jt);
  }
  j["periods"] = ordered_json::array();
  for (const auto& p : report.periods) j["periods"].push_back(period_to_json(p));
  return j.dump(1, '\t') + "\n";
}

SimulationReport read_report_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot open report " + path.string());
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::invalid_argument("report " + path.string() +
                                ": bad JSON: " + e.what());
  }
  SimulationReport report;
  report.version = j.at("version").get<std::string>();
  report.config = parse_config_text(j.at("config_text").get<std::string>());
  for (const auto& jp : j.at("periods"))
    report.periods.push_back(period_from_json(jp));
  report.aggregates = compute_aggregates(report.periods);
  report.price_trajectories = compute_price_trajectories(report.periods);
  return report;
}

void write_report(const SimulationReport& report,
                  const std::filesystem::path& base, ReportFormat format) {
  if (format == ReportFormat::Json) {
    auto out = open_out(base.string() + ".json");
    out << report_to_json(report);
    if (!out)
      throw std::runtime_error("error while writing " + base.string() +
                               ".json");
    return;
  }

  {
    auto out = open_out(base.string() + ".periods.csv");
    out << "period,prosumer,role,demand_kwh,surplus_kwh,local_kwh,sold_kwh,"
           "grid_kwh,unsold_kwh,loss_kwh,cost,revenue,value,price\n";
    for (const auto& p : report.periods) {
      for (const auto& b : p.buyers)
        out << p.period_index << ',' << b.prosumer << ",b,"
            << fmt(b.demand_kwh) << ",0," << fmt(b.local_kwh) << ",0,"
            << fmt(b.grid_kwh) << ",0,0," << fmt(b.cost) << ",0,"
            << fmt(b.value) << ",0\n";
      for (const auto& s : p.sellers)
        out << p.period_index << ',' << s.prosumer << ",s,0,"
            << fmt(s.surplus_kwh) << ",0," << fmt(s.delivered_kwh) << ",0,"
            << fmt(s.unsold_kwh) << ',' << fmt(s.loss_kwh) << ",0,"
            << fmt(s.revenue) << ",0," << fmt(s.price) << '\n';
    }
  }
  {
    auto out = open_out(base.string() + ".aggregates.csv");
    out << "period,fitness,buyer_value,seller_revenue,cum_seller_revenue,"
           "ma10_buyer_value,ma10_seller_revenue,grid_import_kwh,"
           "grid_export_kwh\n";
    const auto& a = report.aggregates;
    for (std::size_t t = 0; t < report.periods.size(); ++t)
      out << report.periods[t].period_index << ','
          << fmt(report.periods[t].fitness) << ',' << fmt(a.buyer_value[t])
          << ',' << fmt(a.seller_revenue[t]) << ','
          << fmt(a.cum_seller_revenue[t]) << ',' << fmt(a.ma10_buyer_value[t])
          << ',' << fmt(a.ma10_seller_revenue[t]) << ','
          << fmt(report.periods[t].grid_import_kwh) << ','
          << fmt(report.periods[t].grid_export_kwh) << '\n';
    out << "total," << fmt(a.total_buyer_value) << ','
        << fmt(a.total_buyer_value) << ',' << fmt(a.total_seller_revenue)
        << ',' << fmt(a.total_seller_revenue) << ",,,"
        << fmt(a.total_grid_import_kwh) << ',' << fmt(a.total_grid_export_kwh)
        << '\n';
  }
  {
    auto out = open_out(base.string() + ".prices.csv");
    out << "period,prosumer,price\n";
    for (const auto& traj : report.price_trajectories)
      for (std::size_t k = 0; k < traj.periods.size(); ++k)
        out << traj.periods[k] << ',' << traj.prosumer << ','
            << fmt(traj.prices[k]) << '\n';
  }
  write_config(report.config, base.string() + ".config");
}

std::vector<ProsumerPeriodRow> read_periods_csv(
    const std::filesystem::path& path) {
  const auto rows = read_csv_rows(
      path,
      "period,prosumer,role,demand_kwh,surplus_kwh,local_kwh,sold_kwh,"
      "grid_kwh,unsold_kwh,loss_kwh,cost,revenue,value,price");
  std::vector<ProsumerPeriodRow> out;
  for (const auto& f : rows) {
    if (f.size() != 14)
      throw std::invalid_argument("periods csv: wrong field count");
    ProsumerPeriodRow r;
    r.period = std::stol(f[0]);
    r.prosumer = std::stoi(f[1]);
    r.role = f[2].empty() ? '?' : f[2][0];
    r.demand_kwh = csv_double(f[3]);
    r.surplus_kwh = csv_double(f[4]);
    r.local_kwh = csv_double(f[5]);
    r.sold_kwh = csv_double(f[6]);
    r.grid_kwh = csv_double(f[7]);
    r.unsold_kwh = csv_double(f[8]);
    r.loss_kwh = csv_double(f[9]);
    r.cost = csv_double(f[10]);
    r.revenue = csv_double(f[11]);
    r.value = csv_double(f[12]);
    r.price = csv_double(f[13]);
    out.push_back(r);
  }
  return out;
}

std::vector<AggregateRow> read_aggregates_csv(
    const std::filesystem::path& path) {
  const auto rows = read_csv_rows(
      path,
      "period,fitness,buyer_value,seller_revenue,cum_seller_revenue,"
      "ma10_buyer_value,ma10_seller_revenue,grid_import_kwh,grid_export_kwh");
  std::vector<AggregateRow> out;
  for (const auto& f : rows) {
    if (f.size() != 9)
      throw std::invalid_argument("aggregates csv: wrong field count");
    AggregateRow r;
    r.period = f[0];
    r.fitness = csv_double(f[1]);
    r.buyer_value = csv_double(f[2]);
    r.seller_revenue = csv_double(f[3]);
    r.cum_seller_revenue = csv_double(f[4]);
    r.ma10_buyer_value = csv_double(f[5]);
    r.ma10_seller_revenue = csv_double(f[6]);
    r.grid_import_kwh = csv_double(f[7]);
    r.grid_export_kwh = csv_double(f[8]);
    out.push_back(r);
  }
  return out;
}

std::vector<PriceRow> read_prices_csv(const std::filesystem::path& path) {
  const auto rows = read_csv_rows(path, "period,prosumer,price");
  std::vector<PriceRow> out;
  for (const auto& f : rows) {
    if (f.size() != 3)
      throw std::invalid_argument("prices csv: wrong field count");
    out.push_back({std::stol(f[0]), std::stoi(f[1]), csv_double(f[2])});
  }
  return out;
}

void save_checkpoint(std::span<const PriceAgent> agents,
                     const std::filesystem::path& path) {
  ordered_json j;
  j["format"] = "p2pmarket-qtable";
  j["format_version"] = 1;
  j["agents"] = ordered_json::array();
  for (const auto& a : agents) {
    ordered_json ja;
    ja["seller_id"] = a.seller_id;
    ja["alpha"] = a.alpha;
    ja["gamma"] = a.gamma;
    ja["epsilon"] = a.epsilon;
    ja["epsilon_decay"] = a.epsilon_decay;
    ja["grid"] = {{"rho_gb", a.grid.rho_gb},
                  {"rho_gs", a.grid.rho_gs},
                  {"delta", a.grid.delta}};
    ja["profile"] = {{"id", a.profile.id},
                     {"k_plus", a.profile.k_plus},
                     {"k_minus", a.profile.k_minus},
                     {"zeta_plus", a.profile.zeta_plus},
                     {"zeta_minus", a.profile.zeta_minus},
                     {"ref_price", a.profile.ref_price}};
    ja["q"] = a.q;
    j["agents"].push_back(ja);
  }
  auto out = open_out(path);
  out << j.dump(1, '\t') << '\n';
  if (!out) throw std::runtime_error("error while writing " + path.string());
}

std::vector<PriceAgent> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot open checkpoint " + path.string());
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::invalid_argument("checkpoint " + path.string() +
                                ": bad JSON: " + e.what());
  }
  if (j.at("format").get<std::string>() != "p2pmarket-qtable")
    throw std::invalid_argument("checkpoint " + path.string() +
                                ": unknown format");
  if (j.at("format_version").get<int>() != 1)
    throw std::invalid_argument("checkpoint " + path.string() +
                                ": unsupported format_version");

  std::vector<PriceAgent> agents;
  for (const auto& ja : j.at("agents")) {
    const auto& jg = ja.at("grid");
    const PriceGrid grid =
        PriceGrid::make(jg.at("rho_gb").get<double>(),
                        jg.at("rho_gs").get<double>(),
                        jg.at("delta").get<double>());
    const auto& jp = ja.at("profile");
    ProsumerProfile profile;
    profile.id = jp.at("id").get<int>();
    profile.k_plus = jp.at("k_plus").get<double>();
    profile.k_minus = jp.at("k_minus").get<double>();
    profile.zeta_plus = jp.at("zeta_plus").get<double>();
    profile.zeta_minus = jp.at("zeta_minus").get<double>();
    profile.ref_price = jp.at("ref_price").get<double>();

    PriceAgent a = PriceAgent::make(
        ja.at("seller_id").get<int>(), grid, profile,
        ja.at("alpha").get<double>(), ja.at("gamma").get<double>(),
        ja.at("epsilon").get<double>(), ja.at("epsilon_decay").get<double>());
    const auto& q = ja.at("q");
    if (q.size() != a.q.size())
      throw std::invalid_argument("checkpoint " + path.string() +
                                  ": q-table size mismatch");
    for (std::size_t k = 0; k < a.q.size(); ++k)
      a.q[k] = q[k].get<double>();
    agents.push_back(std::move(a));
  }
  return agents;
}

}  // namespace p2pmarket

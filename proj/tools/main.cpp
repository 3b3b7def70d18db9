// densebeacon: analyze and simulate beacon collisions among hidden APs in a
// dense residential building. Subcommands: heatmap, report, drift, simulate.
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "densebeacon/scenario.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace densebeacon;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string format_mean(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

std::vector<ApartmentId> select_apartments(const Scenario& sc, const std::string& sel) {
  std::vector<ApartmentId> out;
  if (sel == "all") {
    for (int i = 0; i < sc.layout.apartment_count(); ++i)
      out.push_back(apartment_from_index(sc.layout, i));
    return out;
  }
  int f = 0, r = 0, c = 0;
  char comma1 = 0, comma2 = 0;
  std::istringstream in(sel);
  if (!(in >> f >> comma1 >> r >> comma2 >> c) || comma1 != ',' || comma2 != ',')
    throw std::invalid_argument("apartment selector must be F,R,C or all: " + sel);
  const ApartmentId apt{f, r, c};
  if (!valid_apartment(sc.layout, apt))
    throw std::invalid_argument("apartment " + sel + " outside the building");
  out.push_back(apt);
  return out;
}

std::string apartment_file_stem(const ApartmentId& apt) {
  std::ostringstream os;
  os << "f" << apt.floor << "_r" << apt.row << "_c" << apt.column;
  return os.str();
}

int cmd_heatmap(const std::string& scenario_path, const std::string& selector,
                const std::string& out_dir) {
  const Scenario sc = load_scenario_file(scenario_path);
  const std::vector<ApartmentId> apartments = select_apartments(sc, selector);
  fs::create_directories(out_dir);

  json summary;
  summary["scenario"] = scenario_to_json(sc);
  summary["apartments"] = json::array();

  std::vector<HostileMap> maps(apartments.size());
  parallel_for(static_cast<int>(apartments.size()), [&](int i) {
    maps[static_cast<std::size_t>(i)] =
        hostile_map(sc.layout, sc.radio, sc.placement, apartments[static_cast<std::size_t>(i)]);
  });

  for (std::size_t i = 0; i < apartments.size(); ++i) {
    const HostileMap& hm = maps[i];
    const std::string stem = apartment_file_stem(hm.apartment);
    write_file(fs::path(out_dir) / (sc.name + "_" + stem + ".csv"),
               hostile_map_csv(hm, sc.name));

    const auto it = std::max_element(hm.values.begin(), hm.values.end());
    const int arg = it == hm.values.end() ? 0 : static_cast<int>(it - hm.values.begin());
    json entry;
    entry["apartment"] = {hm.apartment.floor, hm.apartment.row, hm.apartment.column};
    entry["max_nlc"] = hm.max_value();
    entry["argmax_cell"] = {arg / hm.n, arg % hm.n};
    entry["mean_nlc"] = hm.mean_value();
    entry["hostile_set"] = json::array();
    for (const auto& [id, hop] : neighbor_geometry(hm))
      entry["hostile_set"].push_back(
          {{"apartment", {id.floor, id.row, id.column}}, {"hop", hop}});
    summary["apartments"].push_back(std::move(entry));
  }

  write_file(fs::path(out_dir) / (sc.name + "_summary.json"), summary.dump(2) + "\n");
  std::cout << sc.name << ": " << apartments.size() << " heatmap(s) written to "
            << out_dir << "\n";
  return 0;
}

int cmd_report(const std::string& scenario_path, int row,
               const std::vector<double>& delta_p_list, const std::string& out_path) {
  const Scenario sc = load_scenario_file(scenario_path);

  json result;
  result["scenario"] = scenario_to_json(sc);
  result["row"] = row;
  result["reports"] = json::array();

  for (double dp : delta_p_list) {
    RadioConfig radio = sc.radio;
    radio.delta_p_db = dp;
    const BuildingReport report = building_report(sc.layout, radio, sc.placement, row);
    json entry;
    entry["delta_p_db"] = dp;
    entry["max_nlc"] = report.max_nlc;
    entry["floors"] = report.floors;
    entry["columns"] = report.columns;
    json matrix = json::array();
    for (int f = 0; f < report.floors; ++f) {
      json line = json::array();
      for (int c = 0; c < report.columns; ++c)
        line.push_back(format_mean(report.at(f, c)));
      matrix.push_back(std::move(line));
    }
    entry["per_apartment_mean"] = std::move(matrix);
    result["reports"].push_back(std::move(entry));
    std::cout << sc.name << " dP=" << dp << " dB: max N_LC " << report.max_nlc << "\n";
  }

  write_file(out_path, result.dump(2) + "\n");
  return 0;
}

int cmd_drift(const std::string& scenario_path, const std::vector<double>& drifts) {
  BeaconConfig beacons;
  if (!scenario_path.empty()) beacons = load_scenario_file(scenario_path).beacons;

  std::cout << "drift_ppm,persistence_s,recurrence_s\n";
  for (double drift : drifts) {
    const double persist = collision_persistence_s(beacons, drift);
    const double recur = collision_recurrence_s(beacons, drift);
    std::cout << drift << ",";
    if (std::isinf(persist))
      std::cout << "infinite,never\n";
    else
      std::cout << format_mean(persist) << "," << format_mean(recur) << "\n";
  }
  return 0;
}

int cmd_simulate(const std::string& scenario_path, std::uint64_t seed, int runs,
                 const std::string& out_path, const std::string& event_log) {
  const Scenario sc = load_scenario_file(scenario_path);
  SimConfig cfg = sc.sim_config();
  cfg.seed = seed;
  cfg.event_log_path = event_log;

  json result;
  result["scenario"] = scenario_to_json(sc);
  result["seed"] = seed;
  result["runs"] = runs;

  if (runs == 1) {
    const TimelineStats stats = run_timeline(cfg);
    result["beacons_expected"] = stats.per_sta_beacons_expected;
    result["beacons_missed"] = stats.per_sta_beacons_missed;
    result["beacons_skipped"] = stats.per_sta_beacons_skipped;
    result["miss_rate"] = stats.miss_rate();
    result["miss_streak_max"] = stats.miss_streak_max;
    result["disassociations"] = stats.disassociations;
    result["mbca_saturated"] = stats.mbca_saturated;
    std::cout << sc.name << ": miss rate " << stats.miss_rate() << ", "
              << stats.disassociations << " disassociation(s)\n";
  } else {
    const MonteCarloResult mc = monte_carlo(cfg, runs, seed);
    result["mean_miss_rate"] = mc.mean_miss_rate;
    result["stddev_miss_rate"] = mc.stddev_miss_rate;
    result["ci95_halfwidth"] = mc.ci95_halfwidth;
    result["mean_disassociations"] = mc.mean_disassociations;
    result["total_expected"] = mc.total_expected;
    result["total_missed"] = mc.total_missed;
    std::cout << sc.name << ": mean miss rate " << mc.mean_miss_rate << " +- "
              << mc.ci95_halfwidth << " (95% CI, " << runs << " runs)\n";
  }

  if (!out_path.empty()) write_file(out_path, result.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"beacon collision analyzer and simulator for dense residential Wi-Fi"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = "out", out_path, selector = "all", event_log;
  int row = 0, runs = 1;
  std::uint64_t seed = 1;
  std::vector<double> delta_p_list{0.0, 3.0, 6.0};
  std::vector<double> drifts{1.0, 10.0, 20.0};

  auto* heatmap = app.add_subcommand("heatmap", "per-apartment N_LC heatmap CSVs");
  heatmap->add_option("--scenario", scenario_path, "scenario JSON")->required();
  heatmap->add_option("--apartment", selector, "F,R,C or all");
  heatmap->add_option("--out", out_dir, "output directory");

  auto* report = app.add_subcommand("report", "per-building mean N_LC report");
  report->add_option("--scenario", scenario_path, "scenario JSON")->required();
  report->add_option("--row", row, "apartment row to report");
  report->add_option("--delta-p", delta_p_list, "dP values in dB");
  report->add_option("--out", out_path, "output JSON path")->required();

  auto* drift = app.add_subcommand("drift", "drift persistence/recurrence table");
  drift->add_option("--scenario", scenario_path, "scenario JSON for beacon params");
  drift->add_option("--drift", drifts, "relative drifts in ppm");

  auto* simulate = app.add_subcommand("simulate", "seeded beacon-loss simulation");
  simulate->add_option("--scenario", scenario_path, "scenario JSON")->required();
  simulate->add_option("--seed", seed, "base RNG seed");
  simulate->add_option("--runs", runs, "independent seeded runs");
  simulate->add_option("--out", out_path, "output JSON path");
  simulate->add_option("--event-log", event_log, "NDJSON event log (single run only)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (heatmap->parsed()) return cmd_heatmap(scenario_path, selector, out_dir);
    if (report->parsed()) return cmd_report(scenario_path, row, delta_p_list, out_path);
    if (drift->parsed()) return cmd_drift(scenario_path, drifts);
    if (simulate->parsed()) return cmd_simulate(scenario_path, seed, runs, out_path, event_log);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

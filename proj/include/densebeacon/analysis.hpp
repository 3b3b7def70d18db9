#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "densebeacon/conditions.hpp"

namespace densebeacon {

// Per-grid-point hostile-AP counts (N_LC) for one apartment.
// values is row-major over the m x n STA grid: index i * n + j for the
// point at local (0.5 + i, 0.5 + j).
struct HostileMap {
  ApartmentId apartment;
  int m = 0;  // grid extent along x
  int n = 0;  // grid extent along y
  std::vector<int> values;
  std::vector<std::vector<ApartmentId>> hostile_sets;

  int at(int i, int j) const { return values[static_cast<std::size_t>(i) * n + j]; }
  int max_value() const {
    return values.empty() ? 0 : *std::max_element(values.begin(), values.end());
  }
  double mean_value() const {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (int v : values) sum += v;
    return sum / static_cast<double>(values.size());
  }
};

// Mean N_LC per apartment for one row of the building, floor x column.
struct BuildingReport {
  int row = 0;
  double delta_p_db = 0.0;
  Band band = Band::Band2_4;
  int floors = 0;
  int columns = 0;
  std::vector<double> per_apartment_mean;  // row-major, floor * columns + column
  int max_nlc = 0;

  double at(int floor, int column) const {
    return per_apartment_mean[static_cast<std::size_t>(floor) * columns + column];
  }
};

inline int thread_budget() {
  if (const char* env = std::getenv("DENSEBEACON_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Runs fn(0..count-1) across the thread budget. Work items must be
// independent; result placement is by index so ordering is deterministic.
template <typename Fn>
void parallel_for(int count, Fn&& fn) {
  const int workers = std::min(thread_budget(), std::max(count, 1));
  if (workers <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  std::atomic<int> next{0};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

// N_LC over the STA grid of one apartment: for every grid point, count the
// alien APs whose location condition holds. Channel and time conditions are
// deliberately excluded here.
inline HostileMap hostile_map(const BuildingLayout& layout, const RadioConfig& radio,
                              const ApPlacement& placement, const ApartmentId& apt) {
  const Point3 ap0 = ap_position(layout, apt, placement);
  const std::vector<Point3> grid = sta_grid(layout, apt);

  std::vector<std::pair<ApartmentId, Point3>> aliens;
  aliens.reserve(static_cast<std::size_t>(layout.apartment_count()) - 1);
  for (int f = 0; f < layout.floors; ++f)
    for (int r = 0; r < layout.rows; ++r)
      for (int c = 0; c < layout.apartments_per_row; ++c) {
        const ApartmentId other{f, r, c};
        if (other == apt) continue;
        aliens.emplace_back(other, ap_position(layout, other, placement));
      }

  HostileMap hm;
  hm.apartment = apt;
  hm.m = static_cast<int>(std::lround(layout.apartment_width_m));
  hm.n = static_cast<int>(std::lround(layout.apartment_depth_m));
  hm.values.resize(grid.size(), 0);
  hm.hostile_sets.resize(grid.size());

  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (const auto& [id, pos] : aliens) {
      if (location_condition(grid[g], ap0, pos, layout, radio)) {
        hm.values[g] += 1;
        hm.hostile_sets[g].push_back(id);
      }
    }
  }
  return hm;
}

// Mean N_LC per apartment for every (floor, column) of the given row.
// Apartments are independent work items; evaluated in parallel with a
// deterministic result layout.
inline BuildingReport building_report(const BuildingLayout& layout,
                                      const RadioConfig& radio,
                                      const ApPlacement& placement, int row) {
  if (row < 0 || row >= layout.rows)
    throw std::out_of_range("building_report: row out of range");

  BuildingReport report;
  report.row = row;
  report.delta_p_db = radio.delta_p_db;
  report.band = radio.band;
  report.floors = layout.floors;
  report.columns = layout.apartments_per_row;
  report.per_apartment_mean.resize(
      static_cast<std::size_t>(layout.floors) * layout.apartments_per_row, 0.0);

  const int cells = layout.floors * layout.apartments_per_row;
  std::vector<int> maxima(static_cast<std::size_t>(cells), 0);
  parallel_for(cells, [&](int idx) {
    const ApartmentId apt{idx / layout.apartments_per_row, row,
                          idx % layout.apartments_per_row};
    const HostileMap hm = hostile_map(layout, radio, placement, apt);
    report.per_apartment_mean[static_cast<std::size_t>(idx)] = hm.mean_value();
    maxima[static_cast<std::size_t>(idx)] = hm.max_value();
  });
  report.max_nlc = *std::max_element(maxima.begin(), maxima.end());
  return report;
}

// Union of hostile apartments with their Chebyshev hop distance from the
// home apartment (floor, row and column steps all count as one hop).
inline std::set<std::pair<ApartmentId, int>> neighbor_geometry(const HostileMap& hm) {
  std::set<ApartmentId> unioned;
  for (const auto& set : hm.hostile_sets)
    unioned.insert(set.begin(), set.end());
  std::set<std::pair<ApartmentId, int>> out;
  for (const auto& id : unioned) {
    const int hop = std::max({std::abs(id.floor - hm.apartment.floor),
                              std::abs(id.row - hm.apartment.row),
                              std::abs(id.column - hm.apartment.column)});
    out.emplace(id, hop);
  }
  return out;
}

// CSV matrix, row-major grid order: line i holds values for local x = 0.5+i.
inline std::string hostile_map_csv(const HostileMap& hm, const std::string& scenario_name) {
  std::ostringstream os;
  os << "# scenario=" << scenario_name << " apartment=" << to_string(hm.apartment)
     << " grid=" << hm.m << "x" << hm.n << "\n";
  for (int i = 0; i < hm.m; ++i) {
    for (int j = 0; j < hm.n; ++j) {
      if (j) os << ",";
      os << hm.at(i, j);
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace densebeacon

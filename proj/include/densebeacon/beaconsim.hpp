#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "densebeacon/analysis.hpp"
#include "densebeacon/mitigation.hpp"

namespace densebeacon {

enum class StaPositionPolicy { WorstGridPoint, AllGridPoints, Explicit };

struct SimConfig {
  BuildingLayout layout;
  RadioConfig radio;
  BeaconConfig beacons;
  ApPlacement placement;
  MitigationSpec mitigation;
  std::uint64_t seed = 1;
  double duration_s = 60.0;
  int disassociation_streak = 10;
  StaPositionPolicy sta_policy = StaPositionPolicy::WorstGridPoint;
  std::vector<std::pair<ApartmentId, Point3>> explicit_stas;
  // restricts STA evaluation to one apartment; empty = every apartment
  std::optional<ApartmentId> sta_apartment;
  bool record_timeline = false;
  std::string event_log_path;

  void validate() const {
    layout.validate();
    radio.validate();
    beacons.validate();
    mitigation.validate();
    if (!(duration_s > 0.0))
      throw std::invalid_argument("simulation: duration must be positive");
    if (disassociation_streak < 1)
      throw std::invalid_argument("simulation: disassociation streak must be >= 1");
    if (sta_policy == StaPositionPolicy::Explicit && explicit_stas.empty())
      throw std::invalid_argument("simulation: explicit STA policy needs positions");
    if (sta_apartment && !valid_apartment(layout, *sta_apartment))
      throw std::invalid_argument("simulation: sta_apartment out of range");
  }
};

// Per-STA outcome. timeline entries: 0 delivered, 1 missed, 2 skipped.
struct StaStats {
  ApartmentId apartment;
  Point3 position;
  std::int64_t beacons_expected = 0;
  std::int64_t beacons_missed = 0;
  std::int64_t beacons_skipped = 0;
  int miss_streak_max = 0;
  std::int64_t disassociations = 0;
  std::vector<std::uint8_t> timeline;
};

struct TimelineStats {
  std::int64_t per_sta_beacons_expected = 0;  // summed over all STAs
  std::int64_t per_sta_beacons_missed = 0;
  std::int64_t per_sta_beacons_skipped = 0;
  int miss_streak_max = 0;
  std::int64_t disassociations = 0;
  std::map<std::pair<int, int>, std::int64_t> per_pair_overlap_events;
  double sim_duration_s = 0.0;
  bool mbca_saturated = false;
  std::vector<StaStats> stas;

  double miss_rate() const {
    return per_sta_beacons_expected
               ? static_cast<double>(per_sta_beacons_missed) / per_sta_beacons_expected
               : 0.0;
  }
};

// Closed-form start of beacon k under linear clock drift.
inline std::int64_t k_th_beacon_start_ns(const ApState& ap, std::int64_t k) {
  const double nominal = static_cast<double>(k) * static_cast<double>(ap.beacon_interval_ns);
  return ap.tbtt_offset_ns +
         static_cast<std::int64_t>(std::llround(nominal * (1.0 + ap.drift_ppm * 1e-6)));
}

namespace detail {

inline std::mt19937_64 stream(std::uint64_t seed, std::uint64_t purpose) {
  std::seed_seq seq{seed, purpose};
  return std::mt19937_64(seq);
}

// Channel draw mirroring the scenario's two-stage 5 GHz selection:
// an 80 MHz block uniformly, then the primary 20 MHz within the block.
inline int draw_channel(std::mt19937_64& rng, const RadioConfig& radio) {
  const int n = radio.n_primary_channels;
  if (radio.band == Band::Band5 && n % 4 == 0) {
    const int blocks = n / 4;
    const int block = std::uniform_int_distribution<int>(0, blocks - 1)(rng);
    const int primary = std::uniform_int_distribution<int>(0, 3)(rng);
    return block * 4 + primary;
  }
  return std::uniform_int_distribution<int>(0, n - 1)(rng);
}

}  // namespace detail

// Draws per-run AP randomness (channel, initial phase, drift) for every
// apartment. Deterministic given cfg.seed; draw order is AP-index order.
inline std::vector<ApState> draw_ap_states(const SimConfig& cfg) {
  const std::int64_t interval_ns =
      static_cast<std::int64_t>(cfg.beacons.beacon_interval_us() * 1000.0 + 0.5);
  const std::int64_t payload_ns =
      static_cast<std::int64_t>(cfg.beacons.payload_us() * 1000.0 + 0.5);

  auto rng = detail::stream(cfg.seed, 1);
  std::vector<ApState> aps;
  aps.reserve(static_cast<std::size_t>(cfg.layout.apartment_count()));
  for (int idx = 0; idx < cfg.layout.apartment_count(); ++idx) {
    const ApartmentId id = apartment_from_index(cfg.layout, idx);
    ApState ap;
    ap.index = idx;
    ap.id = id;
    ap.position = ap_position(cfg.layout, id, cfg.placement);
    ap.primary_channel = detail::draw_channel(rng, cfg.radio);
    ap.tbtt_offset_ns =
        std::uniform_int_distribution<std::int64_t>(0, interval_ns - 1)(rng);
    ap.drift_ppm = std::uniform_real_distribution<double>(
        -cfg.beacons.drift_ppm_bound, cfg.beacons.drift_ppm_bound)(rng);
    ap.beacon_interval_ns = interval_ns;
    ap.beacon_duration_ns = payload_ns;
    aps.push_back(ap);
  }
  return aps;
}

// One (possibly gated) beacon transmission.
struct BeaconTx {
  std::int64_t start_ns;
  std::int64_t dur_ns;
  bool transmitted;
};

// Per-AP beacon transmissions over the whole run, in start order.
struct TxSchedule {
  std::vector<std::vector<BeaconTx>> per_ap;
  bool mbca_saturated = false;
};

namespace detail {

inline std::vector<std::vector<BeaconTx>> schedule_closed_form(
    const SimConfig& cfg, const std::vector<ApState>& aps, std::int64_t duration_ns) {
  std::vector<std::vector<BeaconTx>> sched(aps.size());
  const auto kind = cfg.mitigation.kind;
  for (std::size_t i = 0; i < aps.size(); ++i) {
    const ApState& ap = aps[i];
    auto gate_rng = stream(cfg.seed, 100 + static_cast<std::uint64_t>(i));
    for (std::int64_t k = 0;; ++k) {
      std::int64_t start = k_th_beacon_start_ns(ap, k);
      if (start >= duration_ns) break;
      bool transmitted = true;
      if (kind == MitigationKind::PPersistent)
        transmitted = p_persistent_gate(gate_rng, cfg.mitigation.p);
      if (kind == MitigationKind::Jitter && cfg.mitigation.max_delay_us > 0.0) {
        const auto max_ns =
            static_cast<std::int64_t>(cfg.mitigation.max_delay_us * 1000.0 + 0.5);
        start += std::uniform_int_distribution<std::int64_t>(0, max_ns)(gate_rng);
      }
      sched[i].push_back(BeaconTx{start, ap.beacon_duration_ns, transmitted});
    }
  }
  return sched;
}

template <typename RecordT>
inline bool reception_blocked(const RecordT& r, const RecordT& b, int listener,
                              const std::vector<std::vector<bool>>& audible) {
  if (&r == &b) return false;
  if (r.ap == b.ap) return false;
  if (r.channel != b.channel) return false;
  if (!(r.start_ns < b.end_ns && r.end_ns > b.start_ns)) return false;
  // the listener's own transmission blocks reception (half duplex);
  // other transmitters interfere only if audible
  return r.ap == listener || audible[listener][r.ap];
}

// Chronological engine for MBCA: beacon transmissions carry neighbor
// reports, receptions respect half-duplex and same-channel collisions,
// and each AP runs one MBCA decision per own interval.
inline std::vector<std::vector<BeaconTx>> schedule_mbca(const SimConfig& cfg,
                                                        const std::vector<ApState>& aps,
                                                        std::int64_t duration_ns,
                                                        bool& saturated) {
  const int n = static_cast<int>(aps.size());

  // who can sense whom at all
  std::vector<std::vector<bool>> audible(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j)
        audible[i][j] = received_power_dbm(aps[i].position, aps[j].position,
                                           cfg.layout, cfg.radio) >=
                        cfg.radio.sensitivity_dbm;

  struct Record {
    int ap;
    std::int64_t start_ns, end_ns;
    int channel;
    std::vector<BeaconObservation> report;  // snapshot carried in this beacon
  };
  std::vector<Record> records;
  std::int64_t max_dur_ns = 0;
  for (const auto& ap : aps) max_dur_ns = std::max(max_dur_ns, ap.beacon_duration_ns);

  struct Knowledge {
    std::map<int, NeighborBeaconReport> heard_reports;  // latest per reporter
    std::map<int, std::int64_t> heard_report_time;
    std::vector<std::pair<std::int64_t, BeaconObservation>> own_heard;  // (rx time, obs)
  };
  std::vector<Knowledge> know(static_cast<std::size_t>(n));
  std::vector<MbcaState> mbca(static_cast<std::size_t>(n));
  std::vector<std::mt19937_64> rngs;
  rngs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    rngs.push_back(stream(cfg.seed, 100 + static_cast<std::uint64_t>(i)));

  std::vector<std::vector<BeaconTx>> sched(aps.size());

  using QueueItem = std::pair<std::int64_t, int>;  // (next tbtt, ap)
  std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>> queue;
  for (int i = 0; i < n; ++i) queue.emplace(aps[i].tbtt_offset_ns, i);

  std::size_t finalized = 0;
  auto finalize_until = [&](std::int64_t now) {
    // a record's overlap set is complete once every later record starts
    // after it ends; records are appended in start order
    while (finalized < records.size() && records[finalized].end_ns <= now) {
      const Record& b = records[finalized];
      for (int listener = 0; listener < n; ++listener) {
        if (listener == b.ap || !audible[listener][b.ap]) continue;
        if (aps[listener].primary_channel != b.channel) continue;
        bool clobbered = false;
        // same-channel audible overlap, or the listener's own transmission
        for (std::size_t r = finalized; r-- > 0;) {
          if (records[r].start_ns + max_dur_ns < b.start_ns)
            break;  // sorted by start; nothing earlier can still overlap
          if (reception_blocked(records[r], b, listener, audible)) { clobbered = true; break; }
        }
        for (std::size_t r = finalized + 1; r < records.size(); ++r) {
          if (records[r].start_ns >= b.end_ns) break;
          if (reception_blocked(records[r], b, listener, audible)) { clobbered = true; break; }
        }
        if (clobbered) continue;
        BeaconObservation obs;
        obs.source_ap = b.ap;
        obs.channel = b.channel;
        obs.tbtt_ns = b.start_ns;
        obs.duration_ns = b.end_ns - b.start_ns;
        obs.interval_ns = aps[b.ap].beacon_interval_ns;
        know[listener].own_heard.emplace_back(b.end_ns, obs);
        NeighborBeaconReport report;
        report.reporter = aps[b.ap].id;
        report.reporter_ap = b.ap;
        report.entries = b.report;
        know[listener].heard_reports[b.ap] = std::move(report);
        know[listener].heard_report_time[b.ap] = b.end_ns;
      }
      ++finalized;
    }
  };

  while (!queue.empty()) {
    auto [tbtt, i] = queue.top();
    queue.pop();
    if (tbtt >= duration_ns) continue;
    finalize_until(tbtt);

    const ApState& ap = aps[i];
    Knowledge& k = know[static_cast<std::size_t>(i)];
    const std::int64_t horizon_ns =
        static_cast<std::int64_t>(cfg.mitigation.mbca.report_horizon) * ap.beacon_interval_ns;

    // prune knowledge to the report horizon
    std::erase_if(k.own_heard,
                  [&](const auto& e) { return e.first + horizon_ns < tbtt; });
    for (auto it = k.heard_report_time.begin(); it != k.heard_report_time.end();) {
      if (it->second + horizon_ns < tbtt) {
        k.heard_reports.erase(it->first);
        it = k.heard_report_time.erase(it);
      } else {
        ++it;
      }
    }

    std::vector<NeighborBeaconReport> heard;
    heard.reserve(k.heard_reports.size());
    for (const auto& [_, report] : k.heard_reports) heard.push_back(report);
    std::vector<BeaconObservation> own;
    own.reserve(k.own_heard.size());
    for (const auto& [_, obs] : k.own_heard) own.push_back(obs);

    const std::int64_t moved = mbca_step(ap, tbtt, tbtt, heard, own,
                                         cfg.mitigation.mbca,
                                         mbca[static_cast<std::size_t>(i)],
                                         rngs[static_cast<std::size_t>(i)]);
    if (moved > tbtt) {
      queue.emplace(moved, i);
      continue;
    }

    Record rec;
    rec.ap = i;
    rec.start_ns = tbtt;
    rec.end_ns = tbtt + ap.beacon_duration_ns;
    rec.channel = ap.primary_channel;
    rec.report = own;  // beacons received in the last horizon intervals
    // keep records sorted by start (the queue pops in time order)
    records.push_back(std::move(rec));
    sched[static_cast<std::size_t>(i)].push_back(
        BeaconTx{tbtt, ap.beacon_duration_ns, true});
    queue.emplace(tbtt + ap.beacon_interval_ns, i);
  }
  finalize_until(duration_ns + (std::int64_t{1} << 40));

  saturated = false;
  for (const auto& st : mbca) saturated = saturated || st.saturated;
  return sched;
}

}  // namespace detail

// Applies the mitigation pre-transforms (DSC, distinct intervals) and
// produces every AP's beacon schedule for the run.
inline TxSchedule compute_tx_schedule(const SimConfig& cfg, std::vector<ApState>& aps) {
  const auto duration_ns = static_cast<std::int64_t>(cfg.duration_s * 1e9 + 0.5);
  if (cfg.mitigation.kind == MitigationKind::DistinctIntervals)
    apply_distinct_intervals(aps, cfg.mitigation.interval_set_us);
  TxSchedule sched;
  if (cfg.mitigation.kind == MitigationKind::Mbca) {
    sched.per_ap = detail::schedule_mbca(cfg, aps, duration_ns, sched.mbca_saturated);
  } else {
    sched.per_ap = detail::schedule_closed_form(cfg, aps, duration_ns);
  }
  return sched;
}

inline TimelineStats run_timeline(const SimConfig& cfg, std::vector<ApState> aps) {
  cfg.validate();

  RadioConfig radio = cfg.radio;
  if (cfg.mitigation.sensitivity_offset_db > 0.0)
    radio = apply_dsc(radio, cfg.mitigation.sensitivity_offset_db);

  const TxSchedule schedule = compute_tx_schedule(cfg, aps);
  const auto& sched = schedule.per_ap;
  const bool saturated = schedule.mbca_saturated;

  // STA selection
  std::vector<std::pair<ApartmentId, Point3>> stas;
  if (cfg.sta_policy == StaPositionPolicy::Explicit) {
    stas = cfg.explicit_stas;
  } else {
    std::vector<ApartmentId> apartments;
    if (cfg.sta_apartment) {
      apartments.push_back(*cfg.sta_apartment);
    } else {
      for (int idx = 0; idx < cfg.layout.apartment_count(); ++idx)
        apartments.push_back(apartment_from_index(cfg.layout, idx));
    }
    for (const auto& apt : apartments) {
      const std::vector<Point3> grid = sta_grid(cfg.layout, apt);
      if (cfg.sta_policy == StaPositionPolicy::AllGridPoints) {
        for (const auto& p : grid) stas.emplace_back(apt, p);
      } else {
        const HostileMap hm = hostile_map(cfg.layout, radio, cfg.placement, apt);
        const std::size_t best =
            std::max_element(hm.values.begin(), hm.values.end()) - hm.values.begin();
        stas.emplace_back(apt, grid[hm.values.empty() ? 0 : best]);
      }
    }
  }

  std::ofstream event_log;
  if (!cfg.event_log_path.empty()) {
    event_log.open(cfg.event_log_path);
    if (!event_log)
      throw std::runtime_error("run_timeline: cannot open event log " + cfg.event_log_path);
    for (std::size_t i = 0; i < aps.size(); ++i)
      for (const auto& tx : sched[i])
        event_log << R"({"type":"tx","ap":)" << i << R"(,"channel":)"
                  << aps[i].primary_channel << R"(,"start_ns":)" << tx.start_ns
                  << R"(,"dur_ns":)" << tx.dur_ns << R"(,"transmitted":)"
                  << (tx.transmitted ? "true" : "false") << "}\n";
  }

  TimelineStats stats;
  stats.sim_duration_s = cfg.duration_s;
  stats.mbca_saturated = saturated;

  for (const auto& [apt, sta_pos] : stas) {
    const int home = apartment_index(cfg.layout, apt);
    const ApState& ap0 = aps[static_cast<std::size_t>(home)];

    // hostile same-channel aliens for this STA
    std::vector<int> hostiles;
    for (std::size_t x = 0; x < aps.size(); ++x) {
      if (static_cast<int>(x) == home) continue;
      if (aps[x].primary_channel != ap0.primary_channel) continue;
      if (location_condition(sta_pos, ap0.position, aps[x].position, cfg.layout, radio))
        hostiles.push_back(static_cast<int>(x));
    }

    StaStats ss;
    ss.apartment = apt;
    ss.position = sta_pos;
    int streak = 0;
    for (std::size_t k = 0; k < sched[static_cast<std::size_t>(home)].size(); ++k) {
      const BeaconTx& beacon = sched[static_cast<std::size_t>(home)][k];
      ss.beacons_expected += 1;
      std::uint8_t outcome = 0;
      if (!beacon.transmitted) {
        ss.beacons_skipped += 1;
        outcome = 2;
        if (cfg.mitigation.skipped_feeds_streak) ++streak;
      } else {
        bool miss = false;
        for (int x : hostiles) {
          const auto& txs = sched[static_cast<std::size_t>(x)];
          // last alien beacon starting strictly before ours is the only
          // overlap candidate (beacons are shorter than intervals)
          auto it = std::lower_bound(
              txs.begin(), txs.end(), beacon.start_ns,
              [](const BeaconTx& t, std::int64_t v) { return t.start_ns < v; });
          if (it == txs.begin()) continue;
          --it;
          if (it->transmitted && it->start_ns < beacon.start_ns &&
              it->start_ns + it->dur_ns > beacon.start_ns) {
            miss = true;
            stats.per_pair_overlap_events[{home, x}] += 1;
            if (event_log.is_open())
              event_log << R"({"type":"miss","home":)" << home << R"(,"alien":)" << x
                        << R"(,"k":)" << k << R"(,"home_start_ns":)" << beacon.start_ns
                        << "}\n";
          }
        }
        if (miss) {
          ss.beacons_missed += 1;
          outcome = 1;
          ++streak;
        } else {
          streak = 0;
        }
      }
      ss.miss_streak_max = std::max(ss.miss_streak_max, streak);
      if (streak >= cfg.disassociation_streak) {
        ss.disassociations += 1;
        streak = 0;
      }
      if (cfg.record_timeline) ss.timeline.push_back(outcome);
    }

    stats.per_sta_beacons_expected += ss.beacons_expected;
    stats.per_sta_beacons_missed += ss.beacons_missed;
    stats.per_sta_beacons_skipped += ss.beacons_skipped;
    stats.miss_streak_max = std::max(stats.miss_streak_max, ss.miss_streak_max);
    stats.disassociations += ss.disassociations;
    stats.stas.push_back(std::move(ss));
  }
  return stats;
}

inline TimelineStats run_timeline(const SimConfig& cfg) {
  return run_timeline(cfg, draw_ap_states(cfg));
}

struct MonteCarloResult {
  int n_runs = 0;
  std::uint64_t seed_base = 0;
  std::vector<double> miss_rates;
  std::vector<std::int64_t> disassociations;
  double mean_miss_rate = 0.0;
  double stddev_miss_rate = 0.0;
  double ci95_halfwidth = 0.0;
  double mean_disassociations = 0.0;
  std::int64_t total_expected = 0;
  std::int64_t total_missed = 0;
};

// Independent seeded runs; run i uses seed_base + i. Aggregation is
// index-ordered so parallel execution cannot change the result.
inline MonteCarloResult monte_carlo(const SimConfig& cfg_template, int n_runs,
                                    std::uint64_t seed_base) {
  if (n_runs < 1) throw std::invalid_argument("monte_carlo: n_runs must be >= 1");
  MonteCarloResult result;
  result.n_runs = n_runs;
  result.seed_base = seed_base;
  result.miss_rates.resize(static_cast<std::size_t>(n_runs));
  result.disassociations.resize(static_cast<std::size_t>(n_runs));

  std::vector<std::int64_t> expected(static_cast<std::size_t>(n_runs));
  std::vector<std::int64_t> missed(static_cast<std::size_t>(n_runs));
  parallel_for(n_runs, [&](int i) {
    SimConfig cfg = cfg_template;
    cfg.seed = seed_base + static_cast<std::uint64_t>(i);
    cfg.event_log_path.clear();  // per-run logs are a single-run facility
    const TimelineStats stats = run_timeline(cfg);
    result.miss_rates[static_cast<std::size_t>(i)] = stats.miss_rate();
    result.disassociations[static_cast<std::size_t>(i)] = stats.disassociations;
    expected[static_cast<std::size_t>(i)] = stats.per_sta_beacons_expected;
    missed[static_cast<std::size_t>(i)] = stats.per_sta_beacons_missed;
  });

  double sum = 0.0, sum2 = 0.0, dsum = 0.0;
  for (int i = 0; i < n_runs; ++i) {
    sum += result.miss_rates[static_cast<std::size_t>(i)];
    sum2 += result.miss_rates[static_cast<std::size_t>(i)] *
            result.miss_rates[static_cast<std::size_t>(i)];
    dsum += static_cast<double>(result.disassociations[static_cast<std::size_t>(i)]);
    result.total_expected += expected[static_cast<std::size_t>(i)];
    result.total_missed += missed[static_cast<std::size_t>(i)];
  }
  result.mean_miss_rate = sum / n_runs;
  result.mean_disassociations = dsum / n_runs;
  if (n_runs > 1) {
    const double var = std::max(0.0, (sum2 - sum * sum / n_runs) / (n_runs - 1));
    result.stddev_miss_rate = std::sqrt(var);
    result.ci95_halfwidth = 1.96 * result.stddev_miss_rate / std::sqrt(n_runs);
  }
  return result;
}

}  // namespace densebeacon

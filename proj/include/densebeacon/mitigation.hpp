#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "densebeacon/conditions.hpp"

namespace densebeacon {

// Per-AP simulator state. Times are integer nanoseconds.
struct ApState {
  int index = 0;  // position in the simulator's AP list
  ApartmentId id;
  Point3 position;
  int primary_channel = 0;
  std::int64_t tbtt_offset_ns = 0;     // initial phase in [0, B)
  double drift_ppm = 0.0;              // signed, |drift| <= bound
  std::int64_t beacon_interval_ns = 0; // per-AP, for mitigation variants
  std::int64_t beacon_duration_ns = 0;
};

enum class MitigationKind { None, DistinctIntervals, Jitter, PPersistent, Mbca, Dsc };

struct MbcaSpec {
  int report_horizon = 4;                // own intervals covered by a report
  double jitter_us = 50000.0;            // deadlock-breaking delay range
  double slot_granularity_us = 1000.0;   // TBTT relocation alignment
  int missing_report_threshold = 3;      // consecutive unreported intervals
};

struct MitigationSpec {
  MitigationKind kind = MitigationKind::None;
  std::vector<double> interval_set_us;   // DistinctIntervals
  double max_delay_us = 0.0;             // Jitter
  double p = 1.0;                        // PPersistent
  MbcaSpec mbca;                         // Mbca
  double sensitivity_offset_db = 0.0;    // Dsc
  bool skipped_feeds_streak = false;     // PPersistent: count skips as misses

  void validate() const {
    switch (kind) {
      case MitigationKind::DistinctIntervals:
        if (interval_set_us.empty())
          throw std::invalid_argument("mitigation: interval set must be non-empty");
        break;
      case MitigationKind::Jitter:
        if (max_delay_us < 0.0)
          throw std::invalid_argument("mitigation: jitter delay must be >= 0");
        break;
      case MitigationKind::PPersistent:
        if (!(p > 0.0 && p <= 1.0))
          throw std::invalid_argument("mitigation: p must be in (0, 1]");
        break;
      case MitigationKind::Dsc:
        if (sensitivity_offset_db < 0.0)
          throw std::invalid_argument("mitigation: DSC offset must be >= 0");
        break;
      default: break;
    }
  }
};

// One observed beacon as carried in an MBCA information element: channel,
// transmission time, duration and repetition interval.
struct BeaconObservation {
  int source_ap = -1;
  int channel = 0;
  std::int64_t tbtt_ns = 0;
  std::int64_t duration_ns = 0;
  std::int64_t interval_ns = 0;
};

struct NeighborBeaconReport {
  ApartmentId reporter;
  int reporter_ap = -1;
  std::vector<BeaconObservation> entries;
};

// Round-robin interval assignment by AP index. Beacon durations and
// offsets are untouched; offsets beyond a shortened interval wrap.
inline void apply_distinct_intervals(std::vector<ApState>& aps,
                                     std::span<const double> interval_set_us) {
  if (interval_set_us.empty())
    throw std::invalid_argument("apply_distinct_intervals: empty interval set");
  for (std::size_t i = 0; i < aps.size(); ++i) {
    const double us = interval_set_us[i % interval_set_us.size()];
    aps[i].beacon_interval_ns = static_cast<std::int64_t>(us * 1000.0 + 0.5);
    if (aps[i].beacon_interval_ns < aps[i].beacon_duration_ns)
      throw std::invalid_argument("apply_distinct_intervals: interval < beacon duration");
    aps[i].tbtt_offset_ns %= aps[i].beacon_interval_ns;
  }
}

// DSC raises the STA-side margin: identical to a config with a larger dP.
inline RadioConfig apply_dsc(RadioConfig radio, double offset_db) {
  if (offset_db < 0.0) throw std::invalid_argument("apply_dsc: offset must be >= 0");
  radio.delta_p_db += offset_db;
  return radio;
}

// Transmit-this-interval gate for p-persistent beaconing.
inline bool p_persistent_gate(std::mt19937_64& rng, double p) {
  if (!(p > 0.0 && p <= 1.0))
    throw std::invalid_argument("p_persistent_gate: p must be in (0, 1]");
  if (p == 1.0) return true;
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

struct MbcaState {
  int missing_streak = 0;
  bool jitter_applied = false;
  bool saturated = false;
};

namespace detail {

// Does a beacon of the periodic source overlap [start, start+dur)?
inline bool periodic_overlap(const BeaconObservation& obs, std::int64_t start,
                             std::int64_t dur) {
  if (obs.interval_ns <= 0)
    return obs.tbtt_ns < start + dur && obs.tbtt_ns + obs.duration_ns > start;
  // occurrence index nearest to `start`
  const std::int64_t j = (start - obs.tbtt_ns) / obs.interval_ns;
  for (std::int64_t k = j - 1; k <= j + 1; ++k) {
    const std::int64_t s = obs.tbtt_ns + k * obs.interval_ns;
    if (s < start + dur && s + obs.duration_ns > start) return true;
  }
  return false;
}

}  // namespace detail

// One MBCA decision for an AP about to transmit at next_tbtt_ns.
// Relocates the TBTT to the nearest clear slot-aligned offset when the
// window is known to intersect an alien beacon, and applies a random
// delay when the AP's own beacons stop appearing in neighbor reports.
// Returns the (possibly moved) absolute transmission time.
inline std::int64_t mbca_step(const ApState& ap, std::int64_t now_ns,
                              std::int64_t next_tbtt_ns,
                              std::span<const NeighborBeaconReport> heard_reports,
                              std::span<const BeaconObservation> own_heard,
                              const MbcaSpec& spec, MbcaState& state,
                              std::mt19937_64& rng) {
  const std::int64_t interval = ap.beacon_interval_ns;
  const std::int64_t dur = ap.beacon_duration_ns;
  const std::int64_t slot =
      std::max<std::int64_t>(1, static_cast<std::int64_t>(spec.slot_granularity_us * 1000.0 + 0.5));

  // Collision discovery via missing reports.
  bool own_reported = false;
  for (const auto& report : heard_reports)
    for (const auto& entry : report.entries)
      if (entry.source_ap == ap.index) { own_reported = true; break; }
  if (heard_reports.empty() || own_reported)
    state.missing_streak = 0;
  else
    state.missing_streak += 1;

  // Known alien windows on our channel.
  std::vector<BeaconObservation> aliens;
  for (const auto& report : heard_reports)
    for (const auto& entry : report.entries)
      if (entry.source_ap != ap.index && entry.channel == ap.primary_channel)
        aliens.push_back(entry);
  for (const auto& obs : own_heard)
    if (obs.source_ap != ap.index && obs.channel == ap.primary_channel)
      aliens.push_back(obs);

  auto window_clear = [&](std::int64_t start) {
    for (const auto& obs : aliens)
      if (detail::periodic_overlap(obs, start, dur)) return false;
    return true;
  };

  std::int64_t tbtt = next_tbtt_ns;
  if (!window_clear(tbtt)) {
    const std::int64_t cur_phase = ((tbtt % interval) + interval) % interval;
    std::optional<std::int64_t> best_time;
    std::int64_t best_dist = 0;
    for (std::int64_t s = 0; s < interval; s += slot) {
      std::int64_t candidate = now_ns + ((s - now_ns % interval) % interval + interval) % interval;
      if (!window_clear(candidate)) continue;
      const std::int64_t raw = std::abs(s - cur_phase);
      const std::int64_t dist = std::min(raw, interval - raw);
      // prefer the later offset on exact ties
      if (!best_time || dist < best_dist || (dist == best_dist && candidate > *best_time)) {
        best_time = candidate;
        best_dist = dist;
      }
    }
    if (best_time) {
      tbtt = *best_time;
      state.saturated = false;
    } else {
      state.saturated = true;
    }
  }

  // re-fires every `threshold` silent intervals so a persistent collision
  // cannot deadlock two mutually-deaf APs
  if (state.missing_streak > 0 &&
      state.missing_streak % spec.missing_report_threshold == 0) {
    const auto jitter_ns = static_cast<std::int64_t>(spec.jitter_us * 1000.0 + 0.5);
    tbtt += std::uniform_int_distribution<std::int64_t>(0, jitter_ns)(rng);
    state.jitter_applied = true;
  }
  return tbtt;
}

}  // namespace densebeacon

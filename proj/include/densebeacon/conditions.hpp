#pragma once

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "densebeacon/propagation.hpp"

namespace densebeacon {

struct BeaconConfig {
  double beacon_duration_us = 500.0;  // includes the preamble
  double preamble_us = 0.0;
  double beacon_interval_ms = 500.0;
  double drift_ppm_bound = 10.0;

  double beacon_interval_us() const { return beacon_interval_ms * 1000.0; }
  // l: beacon duration excluding the preamble.
  double payload_us() const { return beacon_duration_us - preamble_us; }

  void validate() const {
    if (!(beacon_duration_us > 0.0 && beacon_duration_us <= beacon_interval_us()))
      throw std::invalid_argument("beacons: duration must be in (0, interval]");
    if (!(preamble_us >= 0.0 && preamble_us < beacon_duration_us))
      throw std::invalid_argument("beacons: preamble must be in [0, duration)");
    if (!(drift_ppm_bound >= 0.0 && drift_ppm_bound <= 100.0))
      throw std::invalid_argument("beacons: drift bound must be in [0, 100] ppm");
  }
};

// Location condition: the alien apx is received at the STA with margin
// while ap0 does not sense it.
//   P(STA, APx) >= P_th + dP   and   P(AP0, APx) < P_th
inline bool location_condition(const Point3& sta, const Point3& ap0, const Point3& apx,
                               const BuildingLayout& layout, const RadioConfig& radio) {
  const double at_sta = received_power_dbm(sta, apx, layout, radio);
  if (at_sta < radio.sensitivity_dbm + radio.delta_p_db) return false;
  const double at_ap0 = received_power_dbm(ap0, apx, layout, radio);
  return at_ap0 < radio.sensitivity_dbm;
}

// Probability that one alien AP's beacon starts earlier and overlaps: l/B.
inline double time_condition_probability(const BeaconConfig& beacons) {
  const double p = beacons.payload_us() / beacons.beacon_interval_us();
  return std::clamp(p, 0.0, 1.0);
}

// Probability of sharing the primary 20 MHz channel: 1/N.
inline double channel_condition_probability(const RadioConfig& radio) {
  if (radio.n_primary_channels < 1)
    throw std::invalid_argument("channel_condition_probability: N must be >= 1");
  return 1.0 / radio.n_primary_channels;
}

// How long a continuous drift-driven collision lasts: l / relative drift.
// Zero drift yields +infinity (collision never ends).
inline double collision_persistence_s(const BeaconConfig& beacons,
                                      double relative_drift_ppm) {
  if (relative_drift_ppm < 0.0)
    throw std::invalid_argument("collision_persistence_s: drift must be >= 0");
  if (relative_drift_ppm == 0.0) return std::numeric_limits<double>::infinity();
  const double l_s = beacons.payload_us() * 1e-6;
  return l_s / (relative_drift_ppm * 1e-6);
}

// Period between collision eras: B / relative drift. Zero drift yields
// +infinity (overlap never recurs).
inline double collision_recurrence_s(const BeaconConfig& beacons,
                                     double relative_drift_ppm) {
  if (relative_drift_ppm < 0.0)
    throw std::invalid_argument("collision_recurrence_s: drift must be >= 0");
  if (relative_drift_ppm == 0.0) return std::numeric_limits<double>::infinity();
  const double b_s = beacons.beacon_interval_us() * 1e-6;
  return b_s / (relative_drift_ppm * 1e-6);
}

}  // namespace densebeacon

#include <doctest.h>

#include <cmath>

#include "densebeacon/mitigation.hpp"

using namespace densebeacon;

namespace {

ApState make_ap(int index, std::int64_t interval_ns = 500'000'000,
                std::int64_t duration_ns = 500'000) {
  ApState ap;
  ap.index = index;
  ap.id = {0, 0, index};
  ap.beacon_interval_ns = interval_ns;
  ap.beacon_duration_ns = duration_ns;
  return ap;
}

BeaconObservation alien_obs(int source, int channel, std::int64_t tbtt,
                            std::int64_t dur, std::int64_t interval) {
  BeaconObservation obs;
  obs.source_ap = source;
  obs.channel = channel;
  obs.tbtt_ns = tbtt;
  obs.duration_ns = dur;
  obs.interval_ns = interval;
  return obs;
}

}  // namespace

TEST_CASE("apply_distinct_intervals assigns round-robin by index") {
  std::vector<ApState> aps;
  for (int i = 0; i < 5; ++i) aps.push_back(make_ap(i));
  const std::vector<double> set_us{500000.0, 499000.0};
  apply_distinct_intervals(aps, set_us);
  CHECK(aps[0].beacon_interval_ns == 500'000'000);
  CHECK(aps[1].beacon_interval_ns == 499'000'000);
  CHECK(aps[2].beacon_interval_ns == 500'000'000);
  CHECK(aps[3].beacon_interval_ns == 499'000'000);
  CHECK(aps[4].beacon_interval_ns == 500'000'000);
}

TEST_CASE("apply_distinct_intervals wraps out-of-range offsets") {
  std::vector<ApState> aps{make_ap(0)};
  aps[0].tbtt_offset_ns = 499'900'000;  // beyond the shortened interval
  apply_distinct_intervals(aps, std::vector<double>{499000.0});
  CHECK(aps[0].tbtt_offset_ns == 900'000);
  CHECK(aps[0].tbtt_offset_ns < aps[0].beacon_interval_ns);
}

TEST_CASE("apply_distinct_intervals rejects bad sets") {
  std::vector<ApState> aps{make_ap(0)};
  CHECK_THROWS_AS(apply_distinct_intervals(aps, std::vector<double>{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(apply_distinct_intervals(aps, std::vector<double>{100.0}),
                  std::invalid_argument);  // interval < beacon duration
}

TEST_CASE("apply_dsc raises the margin and nothing else") {
  RadioConfig radio;
  radio.delta_p_db = 3.0;
  const RadioConfig same = apply_dsc(radio, 0.0);
  CHECK(same.delta_p_db == radio.delta_p_db);
  const RadioConfig bumped = apply_dsc(radio, 6.0);
  CHECK(bumped.delta_p_db == doctest::Approx(9.0));
  CHECK(bumped.tx_power_dbm == radio.tx_power_dbm);
  CHECK(bumped.sensitivity_dbm == radio.sensitivity_dbm);
  CHECK_THROWS_AS(apply_dsc(radio, -1.0), std::invalid_argument);
}

TEST_CASE("p_persistent_gate long-run fraction converges to p") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 100; ++i) CHECK(p_persistent_gate(rng, 1.0));

  const int n = 100000;
  const double p = 0.5;
  int sent = 0;
  for (int i = 0; i < n; ++i)
    if (p_persistent_gate(rng, p)) ++sent;
  const double sigma = std::sqrt(p * (1 - p) / n);
  CHECK(std::abs(sent / double(n) - p) < 3 * sigma);

  CHECK_THROWS_AS(p_persistent_gate(rng, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(p_persistent_gate(rng, 1.5), std::invalid_argument);
}

TEST_CASE("mbca_step leaves the TBTT alone without evidence of trouble") {
  const ApState ap = make_ap(0);
  MbcaSpec spec;
  MbcaState state;
  std::mt19937_64 rng(1);
  const std::int64_t next = 123'000'000;
  CHECK(mbca_step(ap, next, next, {}, {}, spec, state, rng) == next);
  CHECK(state.missing_streak == 0);
  CHECK_FALSE(state.saturated);
}

TEST_CASE("mbca_step relocates away from a reported alien window") {
  ApState ap = make_ap(0);
  ap.primary_channel = 2;
  MbcaSpec spec;  // 1 ms slots
  MbcaState state;
  std::mt19937_64 rng(1);

  const std::int64_t interval = ap.beacon_interval_ns;
  const std::int64_t next = 10 * interval + 7'000'000;
  NeighborBeaconReport report;
  report.reporter = {0, 0, 1};
  report.reporter_ap = 1;
  // the alien covers our window and reports us, so no jitter fires
  report.entries = {alien_obs(1, 2, 7'000'000 - 100'000, 700'000, interval),
                    alien_obs(0, 2, 0, 500'000, interval)};
  std::vector<NeighborBeaconReport> heard{report};

  const std::int64_t moved = mbca_step(ap, next, next, heard, {}, spec, state, rng);
  CHECK(moved != next);
  CHECK(moved >= next - interval);
  // slot-aligned phase inside [0, B)
  const std::int64_t slot_ns = 1'000'000;
  CHECK(moved % slot_ns == 0);
  CHECK(moved % interval >= 0);
  CHECK(moved % interval < interval);
  // the new window really is clear of the advertised alien train
  const BeaconObservation& alien = report.entries[0];
  const std::int64_t rel = ((moved - alien.tbtt_ns) % interval + interval) % interval;
  CHECK(rel >= alien.duration_ns);
  CHECK(rel + ap.beacon_duration_ns <= interval);
  CHECK_FALSE(state.saturated);
}

TEST_CASE("mbca_step raises the saturation flag when no offset is clear") {
  ApState ap = make_ap(0);
  MbcaSpec spec;
  MbcaState state;
  std::mt19937_64 rng(1);
  const std::int64_t interval = ap.beacon_interval_ns;
  // a permanently busy channel: one alien whose duration fills the interval
  NeighborBeaconReport report;
  report.reporter = {0, 0, 1};
  report.reporter_ap = 1;
  report.entries = {alien_obs(1, 0, 0, interval, interval),
                    alien_obs(0, 0, 0, 500'000, interval)};
  std::vector<NeighborBeaconReport> heard{report};
  const std::int64_t next = 5 * interval;
  CHECK(mbca_step(ap, next, next, heard, {}, spec, state, rng) == next);
  CHECK(state.saturated);
}

TEST_CASE("mbca_step jitters after enough unreported intervals and re-fires") {
  ApState ap = make_ap(0);
  ap.primary_channel = 3;
  MbcaSpec spec;  // threshold 3
  MbcaState state;
  std::mt19937_64 rng(7);

  // a neighbor is audible but never lists us; its entries sit on another
  // channel so relocation stays quiet and only the jitter path can move us
  NeighborBeaconReport report;
  report.reporter = {0, 0, 1};
  report.reporter_ap = 1;
  report.entries = {alien_obs(1, 0, 0, 500'000, ap.beacon_interval_ns)};
  std::vector<NeighborBeaconReport> heard{report};

  const std::int64_t jitter_ns = 50'000'000;  // spec default 50 ms
  int fired = 0;
  std::int64_t next = 0;
  for (int k = 1; k <= 6; ++k) {
    next += ap.beacon_interval_ns;
    const std::int64_t out = mbca_step(ap, next, next, heard, {}, spec, state, rng);
    if (k % 3 == 0) {
      CHECK(out >= next);
      CHECK(out <= next + jitter_ns);
      if (out != next) ++fired;
    } else {
      CHECK(out == next);
    }
  }
  CHECK(state.missing_streak == 6);
  CHECK(fired >= 1);  // fires at streak 3 and again at 6 (delay 0 is possible)

  // hearing a report of our own beacon resets the streak
  report.entries.push_back(alien_obs(0, 3, 0, 500'000, ap.beacon_interval_ns));
  heard = {report};
  next += ap.beacon_interval_ns;
  CHECK(mbca_step(ap, next, next, heard, {}, spec, state, rng) == next);
  CHECK(state.missing_streak == 0);
}

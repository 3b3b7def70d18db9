#include <doctest.h>

#include <cmath>
#include <limits>

#include "densebeacon/conditions.hpp"

using namespace densebeacon;

namespace {

// one long open hall, no interior walls
BuildingLayout hall() {
  BuildingLayout layout;
  layout.floors = 1;
  layout.rows = 1;
  layout.apartments_per_row = 1;
  layout.apartment_width_m = 400.0;
  layout.apartment_depth_m = 10.0;
  return layout;
}

}  // namespace

TEST_CASE("location_condition: nearby alien is sensed by the home AP") {
  const BuildingLayout layout = hall();
  RadioConfig radio;
  const Point3 sta{10, 5, 1.5};
  const Point3 ap0{14, 5, 1.5};
  const Point3 apx{12, 5, 1.5};  // 2 m from both, ~-28 dBm everywhere
  CHECK_FALSE(location_condition(sta, ap0, apx, layout, radio));
}

TEST_CASE("location_condition: far hidden alien received by the STA") {
  const BuildingLayout layout = hall();
  RadioConfig radio;
  // d(ap0,apx)=150 -> PL 105.73 -> -87.7 < -86; d(sta,apx)=50 -> -71.0 >= -86
  const Point3 apx{1, 5, 1.5};
  const Point3 sta{51, 5, 1.5};
  const Point3 ap0{151, 5, 1.5};
  CHECK(location_condition(sta, ap0, apx, layout, radio));

  // an absurd margin defeats every geometry
  radio.delta_p_db = 200.0;
  CHECK_FALSE(location_condition(sta, ap0, apx, layout, radio));
}

TEST_CASE("location_condition is monotone in delta P") {
  const BuildingLayout layout = hall();
  const Point3 apx{1, 5, 1.5};
  const Point3 sta{51, 5, 1.5};
  const Point3 ap0{151, 5, 1.5};
  bool prev = true;
  for (double dp : {0.0, 3.0, 6.0, 12.0, 25.0, 50.0}) {
    RadioConfig radio;
    radio.delta_p_db = dp;
    const bool now = location_condition(sta, ap0, apx, layout, radio);
    // once false it must stay false as dP grows
    CHECK((prev || !now));
    prev = now;
  }
}

TEST_CASE("location_condition boundary semantics") {
  const BuildingLayout layout = hall();
  RadioConfig radio;
  radio.tx_power_dbm = 18.0;
  // place apx so that P(sta, apx) == P_th exactly: PL = 104
  const double d104 = 5.0 * std::pow(10.0, (104.0 - (40.05 + 20 * std::log10(5.0))) / 35.0);
  const Point3 apx{1, 5, 1.5};
  // a hair inside the P_th contour so rounding cannot flip the >= branch
  const Point3 sta{1 + d104 * (1 - 1e-6), 5, 1.5};
  const Point3 ap0{399, 5, 1.5};
  // STA branch is >=, so equality passes; ap0 is far beyond sensing range
  CHECK(location_condition(sta, ap0, apx, layout, radio));
}

TEST_CASE("time_condition_probability") {
  BeaconConfig beacons;  // 500 us / 500 ms
  CHECK(time_condition_probability(beacons) == doctest::Approx(0.001));

  beacons.beacon_duration_us = 20.0;
  beacons.preamble_us = 20.0 - 1e-9;
  CHECK(time_condition_probability(beacons) == doctest::Approx(0.0));

  beacons = BeaconConfig{};
  beacons.beacon_duration_us = beacons.beacon_interval_us();
  CHECK(time_condition_probability(beacons) == doctest::Approx(1.0));

  // preamble shortens l
  beacons = BeaconConfig{};
  beacons.preamble_us = 20.0;
  CHECK(time_condition_probability(beacons) == doctest::Approx(480.0 / 500000.0));
}

TEST_CASE("channel_condition_probability") {
  RadioConfig radio;
  radio.n_primary_channels = 3;
  CHECK(channel_condition_probability(radio) == doctest::Approx(1.0 / 3.0));
  radio.n_primary_channels = 12;
  CHECK(channel_condition_probability(radio) == doctest::Approx(1.0 / 12.0));
  radio.n_primary_channels = 20;
  CHECK(channel_condition_probability(radio) == doctest::Approx(0.05));
  radio.n_primary_channels = 1;
  CHECK(channel_condition_probability(radio) == doctest::Approx(1.0));
}

TEST_CASE("collision persistence and recurrence closed forms") {
  BeaconConfig beacons;  // l = 0.5 ms, B = 0.5 s
  CHECK(collision_persistence_s(beacons, 20.0) == doctest::Approx(25.0));
  CHECK(collision_persistence_s(beacons, 1.0) == doctest::Approx(500.0));
  CHECK(collision_persistence_s(beacons, 40.0) == doctest::Approx(12.5));
  CHECK(collision_recurrence_s(beacons, 20.0) == doctest::Approx(25000.0));
  CHECK(collision_recurrence_s(beacons, 1.0) == doctest::Approx(500000.0));
}

TEST_CASE("zero drift yields the infinite sentinel") {
  BeaconConfig beacons;
  CHECK(std::isinf(collision_persistence_s(beacons, 0.0)));
  CHECK(std::isinf(collision_recurrence_s(beacons, 0.0)));
}

TEST_CASE("persistence times B/l equals recurrence") {
  BeaconConfig beacons;
  for (double drift : {0.5, 1.0, 7.3, 20.0, 99.0}) {
    const double ratio = collision_persistence_s(beacons, drift) /
                         collision_recurrence_s(beacons, drift);
    CHECK(ratio == doctest::Approx(time_condition_probability(beacons)));
  }
}

TEST_CASE("beacon config validation") {
  BeaconConfig beacons;
  CHECK_NOTHROW(beacons.validate());
  beacons.beacon_duration_us = 0.0;
  CHECK_THROWS_AS(beacons.validate(), std::invalid_argument);
  beacons = BeaconConfig{};
  beacons.preamble_us = 600.0;
  CHECK_THROWS_AS(beacons.validate(), std::invalid_argument);
  beacons = BeaconConfig{};
  beacons.drift_ppm_bound = 150.0;
  CHECK_THROWS_AS(beacons.validate(), std::invalid_argument);
}

#include <doctest.h>

#include <random>

#include "densebeacon/geometry.hpp"

using namespace densebeacon;

namespace {

BuildingLayout paper_layout() {
  BuildingLayout layout;
  layout.floors = 5;
  layout.rows = 2;
  layout.apartments_per_row = 10;
  layout.apartment_width_m = 10.0;
  layout.apartment_depth_m = 10.0;
  return layout;
}

}  // namespace

TEST_CASE("layout validation rejects bad dimensions") {
  BuildingLayout layout = paper_layout();
  CHECK_NOTHROW(layout.validate());
  layout.apartment_width_m = 1.5;
  CHECK_THROWS_AS(layout.validate(), std::invalid_argument);
  layout = paper_layout();
  layout.device_height_m = 3.0;
  CHECK_THROWS_AS(layout.validate(), std::invalid_argument);
  layout = paper_layout();
  layout.floors = 0;
  CHECK_THROWS_AS(layout.validate(), std::invalid_argument);
}

TEST_CASE("ap_position: center and corner placements") {
  const BuildingLayout layout = paper_layout();
  ApPlacement center{PlacementKind::Center, 1.0, MirrorPolicy::MirroredAcrossRows};

  Point3 p = ap_position(layout, {0, 0, 0}, center);
  CHECK(p.x == doctest::Approx(5.0));
  CHECK(p.y == doctest::Approx(5.0));
  CHECK(p.z == doctest::Approx(1.5));

  ApPlacement sw{PlacementKind::CornerSW, 1.0, MirrorPolicy::MirroredAcrossRows};
  p = ap_position(layout, {0, 0, 0}, sw);
  CHECK(p.x == doctest::Approx(1.0));
  CHECK(p.y == doctest::Approx(1.0));

  // coordinate arithmetic across floors and columns
  p = ap_position(layout, {2, 0, 3}, center);
  CHECK(p.x == doctest::Approx(35.0));
  CHECK(p.y == doctest::Approx(5.0));
  CHECK(p.z == doctest::Approx(7.5));
}

TEST_CASE("ap_position: mirroring reflects the second row") {
  const BuildingLayout layout = paper_layout();
  ApPlacement nw{PlacementKind::CornerNW, 1.0, MirrorPolicy::MirroredAcrossRows};

  // row 0 NW corner is near the inter-row wall; the mirrored row-1 AP must
  // also sit near the inter-row wall
  Point3 p0 = ap_position(layout, {0, 0, 0}, nw);
  Point3 p1 = ap_position(layout, {0, 1, 0}, nw);
  CHECK(p0.y == doctest::Approx(9.0));
  CHECK(p1.y == doctest::Approx(11.0));

  nw.mirror_policy = MirrorPolicy::Uniform;
  p1 = ap_position(layout, {0, 1, 0}, nw);
  CHECK(p1.y == doctest::Approx(19.0));
}

TEST_CASE("ap_position: center is fixed under mirroring") {
  const BuildingLayout layout = paper_layout();
  for (auto policy : {MirrorPolicy::Uniform, MirrorPolicy::MirroredAcrossRows}) {
    ApPlacement center{PlacementKind::Center, 1.0, policy};
    const Point3 p = ap_position(layout, {0, 1, 0}, center);
    CHECK(p.y == doctest::Approx(15.0));
  }
}

TEST_CASE("ap_position rejects invalid apartments") {
  const BuildingLayout layout = paper_layout();
  ApPlacement center{PlacementKind::Center, 1.0, MirrorPolicy::Uniform};
  CHECK_THROWS_AS(ap_position(layout, {5, 0, 0}, center), std::out_of_range);
  CHECK_THROWS_AS(ap_position(layout, {0, 2, 0}, center), std::out_of_range);
  CHECK_THROWS_AS(ap_position(layout, {0, 0, -1}, center), std::out_of_range);
}

TEST_CASE("sta_grid covers the apartment with 1 m steps and 0.5 m offsets") {
  BuildingLayout layout = paper_layout();
  auto grid = sta_grid(layout, {0, 0, 0});
  REQUIRE(grid.size() == 100);
  CHECK(grid.front().x == doctest::Approx(0.5));
  CHECK(grid.front().y == doctest::Approx(0.5));
  CHECK(grid.back().x == doctest::Approx(9.5));
  CHECK(grid.back().y == doctest::Approx(9.5));
  for (const auto& p : grid) CHECK(p.z == doctest::Approx(1.5));

  layout.apartment_width_m = 7.0;
  layout.apartment_depth_m = 12.0;
  CHECK(sta_grid(layout, {0, 0, 0}).size() == 84);

  layout.apartment_width_m = 5.0;
  layout.apartment_depth_m = 11.0;
  CHECK(sta_grid(layout, {0, 0, 0}).size() == 55);
}

TEST_CASE("sta_grid size equals width x depth for integer dimensions") {
  BuildingLayout layout = paper_layout();
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> dim(2, 15);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = dim(rng), n = dim(rng);
    layout.apartment_width_m = m;
    layout.apartment_depth_m = n;
    CHECK(sta_grid(layout, {0, 0, 0}).size() == static_cast<std::size_t>(m) * n);
  }
}

TEST_CASE("wall_crossings: basic cases") {
  const BuildingLayout layout = paper_layout();

  SUBCASE("same apartment") {
    auto wc = wall_crossings(layout, {2, 2, 1.5}, {8, 7, 1.5});
    CHECK(wc.walls == 0);
    CHECK(wc.floors == 0);
    CHECK(wc.corner_hits == 0);
  }
  SUBCASE("adjacent apartments, one shared wall off-corner") {
    auto wc = wall_crossings(layout, {5, 5, 1.5}, {15, 6, 1.5});
    CHECK(wc.walls == 1);
    CHECK(wc.floors == 0);
  }
  SUBCASE("segment through a wall junction counts two walls") {
    // diagonal through the junction at (10, 10)
    auto wc = wall_crossings(layout, {5, 5, 1.5}, {15, 15, 1.5});
    CHECK(wc.walls == 2);
    CHECK(wc.corner_hits == 1);
  }
  SUBCASE("grazing a junction while crossing one plane still counts two") {
    auto wc = wall_crossings(layout, {9.9, 9.9995, 1.5}, {10.1, 9.9998, 1.5});
    CHECK(wc.walls == 2);
    CHECK(wc.corner_hits == 1);
  }
  SUBCASE("floor difference") {
    auto wc = wall_crossings(layout, {2, 2, 1.5}, {2.5, 2.5, 7.5});
    CHECK(wc.floors == 2);
    CHECK(wc.walls == 0);
  }
  SUBCASE("degenerate segment") {
    CHECK_THROWS_AS(wall_crossings(layout, {2, 2, 1.5}, {2, 2, 1.5}),
                    std::invalid_argument);
  }
}

TEST_CASE("wall_crossings: extra inter-row walls") {
  BuildingLayout layout = paper_layout();
  layout.extra_inter_row_walls = 1;
  auto wc = wall_crossings(layout, {5, 5, 1.5}, {5, 15, 1.5});
  CHECK(wc.walls == 2);
}

TEST_CASE("wall_crossings is symmetric") {
  const BuildingLayout layout = paper_layout();
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ux(0.1, layout.width_m() - 0.1);
  std::uniform_real_distribution<double> uy(0.1, layout.depth_m() - 0.1);
  std::uniform_int_distribution<int> uf(0, layout.floors - 1);
  for (int trial = 0; trial < 200; ++trial) {
    const Point3 a{ux(rng), uy(rng), uf(rng) * 3.0 + 1.5};
    const Point3 b{ux(rng), uy(rng), uf(rng) * 3.0 + 1.5};
    if (a.x == b.x && a.y == b.y && a.z == b.z) continue;
    auto ab = wall_crossings(layout, a, b);
    auto ba = wall_crossings(layout, b, a);
    CHECK(ab.walls == ba.walls);
    CHECK(ab.floors == ba.floors);
    CHECK(ab.corner_hits == ba.corner_hits);
  }
}

TEST_CASE("wall_crossings is invariant under one-apartment x translation") {
  const BuildingLayout layout = paper_layout();
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> ux(10.1, 49.9);
  std::uniform_real_distribution<double> uy(0.1, 19.9);
  for (int trial = 0; trial < 200; ++trial) {
    Point3 a{ux(rng), uy(rng), 1.5};
    Point3 b{ux(rng), uy(rng), 1.5};
    if (a.x == b.x && a.y == b.y) continue;
    auto base = wall_crossings(layout, a, b);
    a.x += layout.apartment_width_m;
    b.x += layout.apartment_width_m;
    auto shifted = wall_crossings(layout, a, b);
    CHECK(base.walls == shifted.walls);
  }
}

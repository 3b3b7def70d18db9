#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace densebeacon {

// Continuous building coordinates in meters.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline double distance(const Point3& a, const Point3& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline double plan_distance(const Point3& a, const Point3& b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

// Rectangular multi-floor building: `rows` rows of `apartments_per_row`
// identical apartments per floor. x runs along a row, y across rows,
// z upward. Interior walls are zero-thickness axis-aligned planes at
// apartment boundaries; the row boundary is a single wall unless
// extra_inter_row_walls adds more.
struct BuildingLayout {
  int floors = 5;
  int rows = 2;
  int apartments_per_row = 10;
  double apartment_width_m = 10.0;  // x-extent
  double apartment_depth_m = 10.0;  // y-extent
  double floor_height_m = 3.0;
  double device_height_m = 1.5;
  int extra_inter_row_walls = 0;

  void validate() const {
    if (floors < 1 || rows < 1 || apartments_per_row < 1)
      throw std::invalid_argument("layout: floors/rows/apartments_per_row must be >= 1");
    if (apartment_width_m < 2.0 || apartment_depth_m < 2.0)
      throw std::invalid_argument("layout: apartment dimensions must be >= 2 m");
    if (!(device_height_m > 0.0 && device_height_m < floor_height_m))
      throw std::invalid_argument("layout: device height must lie inside a floor");
    if (extra_inter_row_walls < 0)
      throw std::invalid_argument("layout: extra_inter_row_walls must be >= 0");
  }

  double width_m() const { return apartments_per_row * apartment_width_m; }
  double depth_m() const { return rows * apartment_depth_m; }
  double height_m() const { return floors * floor_height_m; }
  int apartment_count() const { return floors * rows * apartments_per_row; }
};

struct ApartmentId {
  int floor = 0;
  int row = 0;
  int column = 0;

  friend bool operator==(const ApartmentId&, const ApartmentId&) = default;
  friend auto operator<=>(const ApartmentId&, const ApartmentId&) = default;
};

inline bool valid_apartment(const BuildingLayout& layout, const ApartmentId& apt) {
  return apt.floor >= 0 && apt.floor < layout.floors && apt.row >= 0 &&
         apt.row < layout.rows && apt.column >= 0 &&
         apt.column < layout.apartments_per_row;
}

inline int apartment_index(const BuildingLayout& layout, const ApartmentId& apt) {
  return (apt.floor * layout.rows + apt.row) * layout.apartments_per_row + apt.column;
}

inline ApartmentId apartment_from_index(const BuildingLayout& layout, int index) {
  const int per_floor = layout.rows * layout.apartments_per_row;
  return ApartmentId{index / per_floor,
                     (index % per_floor) / layout.apartments_per_row,
                     index % layout.apartments_per_row};
}

inline std::string to_string(const ApartmentId& apt) {
  return std::to_string(apt.floor) + "," + std::to_string(apt.row) + "," +
         std::to_string(apt.column);
}

enum class PlacementKind {
  Center,
  WallMidNorth,  // +y wall
  WallMidSouth,  // -y wall
  WallMidEast,   // +x wall
  WallMidWest,   // -x wall
  CornerNE,
  CornerNW,
  CornerSE,
  CornerSW,
};

enum class MirrorPolicy { Uniform, MirroredAcrossRows };

struct ApPlacement {
  PlacementKind kind = PlacementKind::CornerNW;
  double corner_inset_m = 1.0;
  MirrorPolicy mirror_policy = MirrorPolicy::MirroredAcrossRows;
};

// AP coordinate for one apartment. Under MirroredAcrossRows odd rows are
// reflected in y so corner/wall placements sit in the geometrically
// corresponding (inner or outer) position.
inline Point3 ap_position(const BuildingLayout& layout, const ApartmentId& apt,
                          const ApPlacement& placement) {
  if (!valid_apartment(layout, apt))
    throw std::out_of_range("ap_position: apartment index out of range");
  const double w = layout.apartment_width_m;
  const double d = layout.apartment_depth_m;
  const double i = placement.corner_inset_m;
  double lx = w / 2.0, ly = d / 2.0;
  switch (placement.kind) {
    case PlacementKind::Center: break;
    case PlacementKind::WallMidNorth: ly = d; break;
    case PlacementKind::WallMidSouth: ly = 0.0; break;
    case PlacementKind::WallMidEast: lx = w; break;
    case PlacementKind::WallMidWest: lx = 0.0; break;
    case PlacementKind::CornerNE: lx = w - i; ly = d - i; break;
    case PlacementKind::CornerNW: lx = i; ly = d - i; break;
    case PlacementKind::CornerSE: lx = w - i; ly = i; break;
    case PlacementKind::CornerSW: lx = i; ly = i; break;
  }
  if (placement.mirror_policy == MirrorPolicy::MirroredAcrossRows && apt.row % 2 == 1)
    ly = d - ly;
  return Point3{apt.column * w + lx, apt.row * d + ly,
                apt.floor * layout.floor_height_m + layout.device_height_m};
}

// STA evaluation grid: step 1 m, offset 0.5 m from the walls, at device
// height. Requires integer apartment dimensions.
inline std::vector<Point3> sta_grid(const BuildingLayout& layout, const ApartmentId& apt) {
  if (!valid_apartment(layout, apt))
    throw std::out_of_range("sta_grid: apartment index out of range");
  const double w = layout.apartment_width_m;
  const double d = layout.apartment_depth_m;
  const int m = static_cast<int>(std::lround(w));
  const int n = static_cast<int>(std::lround(d));
  if (std::abs(w - m) > 1e-9 || std::abs(d - n) > 1e-9)
    throw std::invalid_argument("sta_grid: apartment dimensions must be integer meters");
  const double x0 = apt.column * w;
  const double y0 = apt.row * d;
  const double z = apt.floor * layout.floor_height_m + layout.device_height_m;
  std::vector<Point3> grid;
  grid.reserve(static_cast<std::size_t>(m) * n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      grid.push_back(Point3{x0 + 0.5 + i, y0 + 0.5 + j, z});
  return grid;
}

struct WallCrossings {
  int walls = 0;
  int floors = 0;
  int corner_hits = 0;
};

namespace detail {
constexpr double kCornerEpsilonM = 1e-3;

inline int floor_index(const BuildingLayout& layout, double z) {
  return static_cast<int>(std::floor(z / layout.floor_height_m + 1e-9));
}
}  // namespace detail

// Interior wall planes crossed by segment a->b in 2D plan view. A pass
// within kCornerEpsilonM of a wall junction counts as two walls total.
// Row-boundary crossings add extra_inter_row_walls each.
inline WallCrossings wall_crossings(const BuildingLayout& layout, const Point3& a,
                                    const Point3& b) {
  if (a.x == b.x && a.y == b.y && a.z == b.z)
    throw std::invalid_argument("wall_crossings: degenerate segment");

  struct CrossPoint { double x, y; };
  std::vector<CrossPoint> crossings;
  int walls = 0;

  const double dx = b.x - a.x, dy = b.y - a.y;
  for (int k = 1; k < layout.apartments_per_row; ++k) {
    const double p = k * layout.apartment_width_m;
    if ((a.x - p) * (b.x - p) < 0.0) {
      const double t = (p - a.x) / dx;
      crossings.push_back({p, a.y + t * dy});
      walls += 1;
    }
  }
  for (int j = 1; j < layout.rows; ++j) {
    const double p = j * layout.apartment_depth_m;
    if ((a.y - p) * (b.y - p) < 0.0) {
      const double t = (p - a.y) / dy;
      crossings.push_back({a.x + t * dx, p});
      walls += 1 + layout.extra_inter_row_walls;
    }
  }

  int corner_hits = 0;
  const double len2 = dx * dx + dy * dy;
  for (int k = 1; k < layout.apartments_per_row; ++k) {
    for (int j = 1; j < layout.rows; ++j) {
      const double jx = k * layout.apartment_width_m;
      const double jy = j * layout.apartment_depth_m;
      double t = 0.0;
      if (len2 > 0.0) {
        t = ((jx - a.x) * dx + (jy - a.y) * dy) / len2;
        t = std::clamp(t, 0.0, 1.0);
      }
      const double px = a.x + t * dx - jx;
      const double py = a.y + t * dy - jy;
      if (std::sqrt(px * px + py * py) <= detail::kCornerEpsilonM) {
        ++corner_hits;
        int attributed = 0;
        for (const auto& c : crossings) {
          const double cx = c.x - jx, cy = c.y - jy;
          if (std::sqrt(cx * cx + cy * cy) <= detail::kCornerEpsilonM) ++attributed;
        }
        walls += std::max(0, 2 - attributed);
      }
    }
  }

  const int floors =
      std::abs(detail::floor_index(layout, a.z) - detail::floor_index(layout, b.z));
  return WallCrossings{walls, floors, corner_hits};
}

}  // namespace densebeacon

#pragma once

#include <cmath>
#include <stdexcept>

#include "densebeacon/geometry.hpp"

namespace densebeacon {

enum class Band { Band2_4, Band5 };

enum class DistanceModel { Slant3D, Plan2D };

struct RadioConfig {
  double tx_power_dbm = 18.0;
  double sensitivity_dbm = -86.0;
  double delta_p_db = 0.0;
  double carrier_ghz = 2.4;
  Band band = Band::Band2_4;
  int n_primary_channels = 3;
  DistanceModel distance_model = DistanceModel::Slant3D;

  void validate() const {
    if (n_primary_channels < 1)
      throw std::invalid_argument("radio: n_primary_channels must be >= 1");
    if (delta_p_db < 0.0)
      throw std::invalid_argument("radio: delta_p_db must be >= 0");
    if (carrier_ghz <= 0.0)
      throw std::invalid_argument("radio: carrier_ghz must be positive");
  }
};

// TGax residential path loss, valid for d > 1 m:
//   PL(d) = 40.05 + 20 log10(fc/2.4) + 20 log10(min(d,5))
//         + [d>5] 35 log10(d/5) + 18.3 F^((F+2)/(F+1) - 0.46) + 5 W
// The floor term is 0 at F = 0.
inline double path_loss_db(double d_m, double carrier_ghz, int floors, int walls) {
  if (!(d_m > 1.0))
    throw std::domain_error("path_loss_db: model is valid only for d > 1 m");
  if (floors < 0 || walls < 0)
    throw std::domain_error("path_loss_db: negative floor/wall count");
  double pl = 40.05 + 20.0 * std::log10(carrier_ghz / 2.4) +
              20.0 * std::log10(std::min(d_m, 5.0));
  if (d_m > 5.0) pl += 35.0 * std::log10(d_m / 5.0);
  if (floors > 0) {
    const double f = static_cast<double>(floors);
    pl += 18.3 * std::pow(f, (f + 2.0) / (f + 1.0) - 0.46);
  }
  pl += 5.0 * walls;
  return pl;
}

// P(rx, tx) = P0 - PL(d), with F and W from wall_crossings.
inline double received_power_dbm(const Point3& rx, const Point3& tx,
                                 const BuildingLayout& layout,
                                 const RadioConfig& radio) {
  const WallCrossings wc = wall_crossings(layout, rx, tx);
  double d = distance(rx, tx);
  if (radio.distance_model == DistanceModel::Plan2D) {
    // Stacked devices project to ~0 m; clamp to the model's validity edge
    // since their true separation is at least one floor height.
    d = std::max(plan_distance(rx, tx), 1.0 + 1e-3);
  }
  return radio.tx_power_dbm - path_loss_db(d, radio.carrier_ghz, wc.floors, wc.walls);
}

}  // namespace densebeacon

#pragma once

#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "densebeacon/beaconsim.hpp"

namespace densebeacon {

// A fully resolved scenario: everything the analysis and the simulator
// need, loaded from one JSON file with strict key checking.
struct Scenario {
  std::string schema_version = "1";
  std::string name = "scenario";
  BuildingLayout layout;
  RadioConfig radio;
  BeaconConfig beacons;
  ApPlacement placement;
  MitigationSpec mitigation;
  std::uint64_t seed = 1;
  double duration_s = 60.0;
  int disassociation_streak = 10;
  StaPositionPolicy sta_policy = StaPositionPolicy::WorstGridPoint;
  std::optional<ApartmentId> sta_apartment;

  SimConfig sim_config() const {
    SimConfig cfg;
    cfg.layout = layout;
    cfg.radio = radio;
    cfg.beacons = beacons;
    cfg.placement = placement;
    cfg.mitigation = mitigation;
    cfg.seed = seed;
    cfg.duration_s = duration_s;
    cfg.disassociation_streak = disassociation_streak;
    cfg.sta_policy = sta_policy;
    cfg.sta_apartment = sta_apartment;
    return cfg;
  }

  void validate() const {
    layout.validate();
    radio.validate();
    beacons.validate();
    mitigation.validate();
  }
};

namespace detail {

using json = nlohmann::json;

inline void require_keys(const json& obj, const std::string& section,
                         const std::set<std::string>& allowed) {
  for (const auto& [key, _] : obj.items())
    if (!allowed.contains(key))
      throw std::invalid_argument("scenario: unknown key \"" + key + "\" in " + section);
}

inline PlacementKind parse_placement_kind(const std::string& s) {
  if (s == "center") return PlacementKind::Center;
  if (s == "wall_mid_north") return PlacementKind::WallMidNorth;
  if (s == "wall_mid_south") return PlacementKind::WallMidSouth;
  if (s == "wall_mid_east") return PlacementKind::WallMidEast;
  if (s == "wall_mid_west") return PlacementKind::WallMidWest;
  if (s == "corner_ne") return PlacementKind::CornerNE;
  if (s == "corner_nw") return PlacementKind::CornerNW;
  if (s == "corner_se") return PlacementKind::CornerSE;
  if (s == "corner_sw") return PlacementKind::CornerSW;
  throw std::invalid_argument("scenario: unknown placement kind \"" + s + "\"");
}

inline std::string placement_kind_name(PlacementKind kind) {
  switch (kind) {
    case PlacementKind::Center: return "center";
    case PlacementKind::WallMidNorth: return "wall_mid_north";
    case PlacementKind::WallMidSouth: return "wall_mid_south";
    case PlacementKind::WallMidEast: return "wall_mid_east";
    case PlacementKind::WallMidWest: return "wall_mid_west";
    case PlacementKind::CornerNE: return "corner_ne";
    case PlacementKind::CornerNW: return "corner_nw";
    case PlacementKind::CornerSE: return "corner_se";
    case PlacementKind::CornerSW: return "corner_sw";
  }
  return "center";
}

inline MitigationKind parse_mitigation_kind(const std::string& s) {
  if (s == "none") return MitigationKind::None;
  if (s == "distinct_intervals") return MitigationKind::DistinctIntervals;
  if (s == "jitter") return MitigationKind::Jitter;
  if (s == "p_persistent") return MitigationKind::PPersistent;
  if (s == "mbca") return MitigationKind::Mbca;
  if (s == "dsc") return MitigationKind::Dsc;
  throw std::invalid_argument("scenario: unknown mitigation kind \"" + s + "\"");
}

inline std::string mitigation_kind_name(MitigationKind kind) {
  switch (kind) {
    case MitigationKind::None: return "none";
    case MitigationKind::DistinctIntervals: return "distinct_intervals";
    case MitigationKind::Jitter: return "jitter";
    case MitigationKind::PPersistent: return "p_persistent";
    case MitigationKind::Mbca: return "mbca";
    case MitigationKind::Dsc: return "dsc";
  }
  return "none";
}

}  // namespace detail

inline Scenario load_scenario_json(const nlohmann::json& j) {
  using detail::require_keys;
  Scenario sc;
  require_keys(j, "scenario",
               {"schema_version", "name", "layout", "radio", "beacons", "placement",
                "mitigation", "simulation"});
  if (j.contains("schema_version")) sc.schema_version = j.at("schema_version");
  if (sc.schema_version != "1")
    throw std::invalid_argument("scenario: unsupported schema_version " + sc.schema_version);
  if (j.contains("name")) sc.name = j.at("name");

  if (j.contains("layout")) {
    const auto& l = j.at("layout");
    require_keys(l, "layout",
                 {"floors", "rows", "apartments_per_row", "apartment_width_m",
                  "apartment_depth_m", "floor_height_m", "device_height_m",
                  "extra_inter_row_walls"});
    auto& out = sc.layout;
    if (l.contains("floors")) out.floors = l.at("floors");
    if (l.contains("rows")) out.rows = l.at("rows");
    if (l.contains("apartments_per_row")) out.apartments_per_row = l.at("apartments_per_row");
    if (l.contains("apartment_width_m")) out.apartment_width_m = l.at("apartment_width_m");
    if (l.contains("apartment_depth_m")) out.apartment_depth_m = l.at("apartment_depth_m");
    if (l.contains("floor_height_m")) out.floor_height_m = l.at("floor_height_m");
    if (l.contains("device_height_m")) out.device_height_m = l.at("device_height_m");
    if (l.contains("extra_inter_row_walls"))
      out.extra_inter_row_walls = l.at("extra_inter_row_walls");
  }

  if (j.contains("radio")) {
    const auto& r = j.at("radio");
    require_keys(r, "radio",
                 {"tx_power_dbm", "sensitivity_dbm", "delta_p_db", "carrier_ghz", "band",
                  "n_primary_channels", "distance_model"});
    auto& out = sc.radio;
    if (r.contains("tx_power_dbm")) out.tx_power_dbm = r.at("tx_power_dbm");
    if (r.contains("sensitivity_dbm")) out.sensitivity_dbm = r.at("sensitivity_dbm");
    if (r.contains("delta_p_db")) out.delta_p_db = r.at("delta_p_db");
    if (r.contains("carrier_ghz")) out.carrier_ghz = r.at("carrier_ghz");
    if (r.contains("band")) {
      const std::string band = r.at("band");
      if (band == "2.4") out.band = Band::Band2_4;
      else if (band == "5") out.band = Band::Band5;
      else throw std::invalid_argument("scenario: band must be \"2.4\" or \"5\"");
    }
    if (r.contains("n_primary_channels")) out.n_primary_channels = r.at("n_primary_channels");
    if (r.contains("distance_model")) {
      const std::string model = r.at("distance_model");
      if (model == "slant3d") out.distance_model = DistanceModel::Slant3D;
      else if (model == "plan2d") out.distance_model = DistanceModel::Plan2D;
      else throw std::invalid_argument("scenario: distance_model must be slant3d or plan2d");
    }
  }

  if (j.contains("beacons")) {
    const auto& b = j.at("beacons");
    require_keys(b, "beacons",
                 {"beacon_duration_us", "preamble_us", "beacon_interval_ms",
                  "drift_ppm_bound"});
    auto& out = sc.beacons;
    if (b.contains("beacon_duration_us")) out.beacon_duration_us = b.at("beacon_duration_us");
    if (b.contains("preamble_us")) out.preamble_us = b.at("preamble_us");
    if (b.contains("beacon_interval_ms")) out.beacon_interval_ms = b.at("beacon_interval_ms");
    if (b.contains("drift_ppm_bound")) out.drift_ppm_bound = b.at("drift_ppm_bound");
  }

  if (j.contains("placement")) {
    const auto& p = j.at("placement");
    require_keys(p, "placement", {"kind", "corner_inset_m", "mirror_policy"});
    if (p.contains("kind")) sc.placement.kind = detail::parse_placement_kind(p.at("kind"));
    if (p.contains("corner_inset_m")) sc.placement.corner_inset_m = p.at("corner_inset_m");
    if (p.contains("mirror_policy")) {
      const std::string policy = p.at("mirror_policy");
      if (policy == "uniform") sc.placement.mirror_policy = MirrorPolicy::Uniform;
      else if (policy == "mirrored_across_rows")
        sc.placement.mirror_policy = MirrorPolicy::MirroredAcrossRows;
      else
        throw std::invalid_argument(
            "scenario: mirror_policy must be uniform or mirrored_across_rows");
    }
  }

  if (j.contains("mitigation")) {
    const auto& m = j.at("mitigation");
    require_keys(m, "mitigation",
                 {"kind", "interval_set_us", "max_delay_us", "p", "sensitivity_offset_db",
                  "skipped_feeds_streak", "report_horizon", "jitter_us",
                  "slot_granularity_us", "missing_report_threshold"});
    auto& out = sc.mitigation;
    if (m.contains("kind")) out.kind = detail::parse_mitigation_kind(m.at("kind"));
    if (m.contains("interval_set_us"))
      out.interval_set_us = m.at("interval_set_us").get<std::vector<double>>();
    if (m.contains("max_delay_us")) out.max_delay_us = m.at("max_delay_us");
    if (m.contains("p")) out.p = m.at("p");
    if (m.contains("sensitivity_offset_db"))
      out.sensitivity_offset_db = m.at("sensitivity_offset_db");
    if (m.contains("skipped_feeds_streak"))
      out.skipped_feeds_streak = m.at("skipped_feeds_streak");
    if (m.contains("report_horizon")) out.mbca.report_horizon = m.at("report_horizon");
    if (m.contains("jitter_us")) out.mbca.jitter_us = m.at("jitter_us");
    if (m.contains("slot_granularity_us"))
      out.mbca.slot_granularity_us = m.at("slot_granularity_us");
    if (m.contains("missing_report_threshold"))
      out.mbca.missing_report_threshold = m.at("missing_report_threshold");
  }

  if (j.contains("simulation")) {
    const auto& s = j.at("simulation");
    require_keys(s, "simulation",
                 {"seed", "duration_s", "disassociation_streak", "sta_position_policy",
                  "sta_apartment"});
    if (s.contains("seed")) sc.seed = s.at("seed");
    if (s.contains("duration_s")) sc.duration_s = s.at("duration_s");
    if (s.contains("disassociation_streak"))
      sc.disassociation_streak = s.at("disassociation_streak");
    if (s.contains("sta_position_policy")) {
      const std::string policy = s.at("sta_position_policy");
      if (policy == "worst_grid_point") sc.sta_policy = StaPositionPolicy::WorstGridPoint;
      else if (policy == "all_grid_points") sc.sta_policy = StaPositionPolicy::AllGridPoints;
      else
        throw std::invalid_argument(
            "scenario: sta_position_policy must be worst_grid_point or all_grid_points");
    }
    if (s.contains("sta_apartment")) {
      const auto& a = s.at("sta_apartment");
      sc.sta_apartment = ApartmentId{a.at(0), a.at(1), a.at(2)};
    }
  }

  sc.validate();
  return sc;
}

inline Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("scenario: cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("scenario: " + path + ": " + e.what());
  }
  return load_scenario_json(j);
}

// Full resolved configuration (after defaults), embedded in outputs for
// provenance.
inline nlohmann::json scenario_to_json(const Scenario& sc) {
  nlohmann::json j;
  j["schema_version"] = sc.schema_version;
  j["name"] = sc.name;
  j["layout"] = {{"floors", sc.layout.floors},
                 {"rows", sc.layout.rows},
                 {"apartments_per_row", sc.layout.apartments_per_row},
                 {"apartment_width_m", sc.layout.apartment_width_m},
                 {"apartment_depth_m", sc.layout.apartment_depth_m},
                 {"floor_height_m", sc.layout.floor_height_m},
                 {"device_height_m", sc.layout.device_height_m},
                 {"extra_inter_row_walls", sc.layout.extra_inter_row_walls}};
  j["radio"] = {{"tx_power_dbm", sc.radio.tx_power_dbm},
                {"sensitivity_dbm", sc.radio.sensitivity_dbm},
                {"delta_p_db", sc.radio.delta_p_db},
                {"carrier_ghz", sc.radio.carrier_ghz},
                {"band", sc.radio.band == Band::Band5 ? "5" : "2.4"},
                {"n_primary_channels", sc.radio.n_primary_channels},
                {"distance_model",
                 sc.radio.distance_model == DistanceModel::Plan2D ? "plan2d" : "slant3d"}};
  j["beacons"] = {{"beacon_duration_us", sc.beacons.beacon_duration_us},
                  {"preamble_us", sc.beacons.preamble_us},
                  {"beacon_interval_ms", sc.beacons.beacon_interval_ms},
                  {"drift_ppm_bound", sc.beacons.drift_ppm_bound}};
  j["placement"] = {{"kind", detail::placement_kind_name(sc.placement.kind)},
                    {"corner_inset_m", sc.placement.corner_inset_m},
                    {"mirror_policy",
                     sc.placement.mirror_policy == MirrorPolicy::Uniform
                         ? "uniform"
                         : "mirrored_across_rows"}};
  j["mitigation"] = {{"kind", detail::mitigation_kind_name(sc.mitigation.kind)},
                     {"interval_set_us", sc.mitigation.interval_set_us},
                     {"max_delay_us", sc.mitigation.max_delay_us},
                     {"p", sc.mitigation.p},
                     {"sensitivity_offset_db", sc.mitigation.sensitivity_offset_db},
                     {"skipped_feeds_streak", sc.mitigation.skipped_feeds_streak},
                     {"report_horizon", sc.mitigation.mbca.report_horizon},
                     {"jitter_us", sc.mitigation.mbca.jitter_us},
                     {"slot_granularity_us", sc.mitigation.mbca.slot_granularity_us},
                     {"missing_report_threshold", sc.mitigation.mbca.missing_report_threshold}};
  j["simulation"] = {{"seed", sc.seed},
                     {"duration_s", sc.duration_s},
                     {"disassociation_streak", sc.disassociation_streak},
                     {"sta_position_policy",
                      sc.sta_policy == StaPositionPolicy::AllGridPoints ? "all_grid_points"
                                                                        : "worst_grid_point"}};
  if (sc.sta_apartment)
    j["simulation"]["sta_apartment"] = {sc.sta_apartment->floor, sc.sta_apartment->row,
                                        sc.sta_apartment->column};
  return j;
}

}  // namespace densebeacon

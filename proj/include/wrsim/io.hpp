#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wrsim/errors.hpp"
#include "wrsim/grid_model.hpp"
#include "wrsim/scenario.hpp"

namespace wrsim {

using nlohmann::json;

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return j;
}

inline BusKind parse_bus_kind(const std::string& s) {
  if (s == "slack") return BusKind::Slack;
  if (s == "generator") return BusKind::Generator;
  if (s == "load") return BusKind::Load;
  throw ConfigError("unknown bus kind '" + s + "'");
}

/// Network JSON: {mva_base, frequency_hz, buses:[{id,kind,p_load,q_load,
/// v0,delta0}], branches:[{from,to,r,x,b_charging?,tap?}], generators:
/// [{bus,p_dispatch,h_inertia}]}. slack_override moves the slack
/// designation to the given bus (it must host a machine); 0 keeps the
/// dataset designation.
inline GridModel load_network(const std::string& path,
                              int slack_override = 0) {
  json j = read_json_file(path);
  try {
    std::vector<Bus> buses;
    for (const auto& jb : j.at("buses")) {
      Bus b;
      b.id = jb.at("id").get<int>();
      b.kind = parse_bus_kind(jb.at("kind").get<std::string>());
      b.p_load = jb.value("p_load", 0.0);
      b.q_load = jb.value("q_load", 0.0);
      b.v0 = jb.value("v0", 1.0);
      b.delta0 = jb.value("delta0", 0.0);
      buses.push_back(b);
    }
    std::vector<Branch> branches;
    for (const auto& jb : j.at("branches")) {
      Branch br;
      br.from = jb.at("from").get<int>();
      br.to = jb.at("to").get<int>();
      br.r = jb.value("r", 0.0);
      br.x = jb.at("x").get<double>();
      br.b_charging = jb.value("b_charging", 0.0);
      br.tap = jb.value("tap", 1.0);
      branches.push_back(br);
    }
    std::vector<Generator> generators;
    for (const auto& jg : j.at("generators")) {
      Generator g;
      g.bus = jg.at("bus").get<int>();
      g.p_dispatch = jg.value("p_dispatch", 0.0);
      g.inertia_h = jg.at("h_inertia").get<double>();
      generators.push_back(g);
    }
    if (slack_override != 0) {
      bool has_machine = false;
      for (const Generator& g : generators)
        has_machine = has_machine || g.bus == slack_override;
      if (!has_machine)
        throw ConfigError("slack override bus " +
                          std::to_string(slack_override) +
                          " hosts no machine");
      for (Bus& b : buses) {
        if (b.kind == BusKind::Slack) b.kind = BusKind::Generator;
        if (b.id == slack_override) b.kind = BusKind::Slack;
      }
    }
    return GridModel(std::move(buses), std::move(branches),
                     std::move(generators), j.value("mva_base", 100.0),
                     j.value("frequency_hz", 60.0));
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline DisturbanceKind parse_disturbance_kind(const std::string& s) {
  if (s == "disconnect_load") return DisturbanceKind::DisconnectLoad;
  if (s == "scale_load") return DisturbanceKind::ScaleLoad;
  throw ConfigError("unknown disturbance action '" + s + "'");
}

inline Scenario scenario_from_json(const json& j) {
  try {
    Scenario sc;
    sc.h = j.at("h").get<double>();
    sc.t_end = j.at("T").get<double>();
    if (j.contains("method"))
      sc.method = parse_method(j.at("method").get<std::string>());
    if (j.contains("mode"))
      sc.mode = parse_mode(j.at("mode").get<std::string>());
    sc.partition_ref = j.value("partition", std::string());
    sc.network_path = j.value("network", std::string());
    sc.workers = j.value("workers", 0);
    if (j.contains("newton")) {
      const auto& jn = j.at("newton");
      sc.newton.tol = jn.value("tol", sc.newton.tol);
      sc.newton.max_iter = jn.value("max_iter", sc.newton.max_iter);
      sc.newton.damping = jn.value("damping", sc.newton.damping);
    }
    if (j.contains("wr")) {
      const auto& jw = j.at("wr");
      sc.wr_eps = jw.value("eps", sc.wr_eps);
      sc.wr_k_max = jw.value("k_max", sc.wr_k_max);
    }
    if (j.contains("window")) {
      sc.t_win = j.at("window").value("t_win", sc.t_win);
    }
    for (const auto& jd : j.value("disturbances", json::array())) {
      Disturbance d;
      d.kind = parse_disturbance_kind(jd.at("action").get<std::string>());
      d.bus = jd.at("bus").get<int>();
      d.t_start = jd.at("t_start").get<double>();
      d.t_end = jd.at("t_end").get<double>();
      d.factor = jd.value("factor", 1.0);
      sc.disturbances.push_back(d);
    }
    return sc;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
}

/// Loads a scenario file and resolves a relative network path against the
/// scenario file's own directory.
inline Scenario load_scenario(const std::string& path) {
  Scenario sc = scenario_from_json(read_json_file(path));
  if (!sc.network_path.empty()) {
    std::filesystem::path np(sc.network_path);
    if (np.is_relative())
      sc.network_path =
          (std::filesystem::path(path).parent_path() / np).string();
  }
  return sc;
}

/// Inverse of scenario_from_json; reparsing the result gives an equivalent
/// Scenario.
inline json scenario_to_json(const Scenario& sc) {
  json j;
  j["h"] = sc.h;
  j["T"] = sc.t_end;
  j["method"] = method_name(sc.method);
  j["mode"] = mode_name(sc.mode);
  if (!sc.partition_ref.empty()) j["partition"] = sc.partition_ref;
  if (!sc.network_path.empty()) j["network"] = sc.network_path;
  j["workers"] = sc.workers;
  j["newton"] = {{"tol", sc.newton.tol},
                 {"max_iter", sc.newton.max_iter},
                 {"damping", sc.newton.damping}};
  j["wr"] = {{"eps", sc.wr_eps}, {"k_max", sc.wr_k_max}};
  j["window"] = {{"t_win", sc.t_win}};
  j["disturbances"] = json::array();
  for (const Disturbance& d : sc.disturbances) {
    json jd;
    jd["action"] = d.kind == DisturbanceKind::DisconnectLoad
                       ? "disconnect_load"
                       : "scale_load";
    jd["bus"] = d.bus;
    jd["t_start"] = d.t_start;
    jd["t_end"] = d.t_end;
    if (d.kind == DisturbanceKind::ScaleLoad) jd["factor"] = d.factor;
    j["disturbances"].push_back(jd);
  }
  return j;
}

/// Partition from a preset name, a JSON file (array of arrays of bus ids),
/// or empty for the whole network as a single group.
inline Partition resolve_partition(const std::string& ref,
                                   const GridModel& grid) {
  if (ref.empty()) return whole_network_partition(grid);
  if (ref.rfind("table2-", 0) == 0) return named_partition(ref);
  json j = read_json_file(ref);
  if (!j.is_array()) throw ConfigError(ref + ": expected an array of arrays");
  Partition p;
  p.name = std::filesystem::path(ref).stem().string();
  try {
    for (const auto& group : j)
      p.groups.push_back(group.get<std::vector<int>>());
  } catch (const json::exception& e) {
    throw ConfigError(ref + ": " + e.what());
  }
  require_valid_partition(p, grid);
  return p;
}

}  // namespace wrsim

#pragma once

#include <string>
#include <vector>

#include "wrsim/grid_model.hpp"
#include "wrsim/io.hpp"
#include "wrsim/scenario.hpp"

namespace testutil {

inline std::string data_path(const std::string& name) {
  return std::string(WRSIM_DATA_DIR) + "/" + name;
}

inline wrsim::GridModel ne39() {
  return wrsim::load_network(data_path("ne39.json"));
}

/// The bundled three-disturbance study, truncated to an arbitrary horizon.
/// Disturbances outside [0, T] are inert, so truncation needs no pruning.
inline wrsim::Scenario study_scenario(double t_end) {
  wrsim::Scenario sc;
  sc.h = 0.05;
  sc.t_end = t_end;
  sc.disturbances = {
      {wrsim::DisturbanceKind::DisconnectLoad, 29, 0.2, 0.4, 1.0},
      {wrsim::DisturbanceKind::ScaleLoad, 25, 7.2, 7.4, 2.0},
      {wrsim::DisturbanceKind::DisconnectLoad, 23, 13.2, 13.4, 1.0},
  };
  return sc;
}

/// Single machine against a slack over one lossless line (x = 1), base
/// load 0.1 pu and dispatch 0.3 pu at the machine bus. The initial angle
/// solves sin(d0) = 0.2 exactly.
inline wrsim::GridModel toy_two_bus() {
  std::vector<wrsim::Bus> buses = {
      {1, wrsim::BusKind::Slack, 0.0, 0.0, 1.0, 0.0},
      {2, wrsim::BusKind::Generator, 0.1, 0.0, 1.0, 0.0},
  };
  std::vector<wrsim::Branch> branches = {{1, 2, 0.0, 1.0, 0.0, 1.0}};
  std::vector<wrsim::Generator> generators = {{2, 0.3, 15.0, 0.0}};
  return wrsim::GridModel(std::move(buses), std::move(branches),
                          std::move(generators));
}

/// Load scaled by 1.5 on [0.5, 2.0), h = 0.05 over [0, t_end].
inline wrsim::Scenario toy_scenario(double t_end = 3.0, double h = 0.05) {
  wrsim::Scenario sc;
  sc.h = h;
  sc.t_end = t_end;
  sc.disturbances = {
      {wrsim::DisturbanceKind::ScaleLoad, 2, 0.5, 2.0, 1.5},
  };
  return sc;
}

}  // namespace testutil

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "wrsim/errors.hpp"
#include "wrsim/grid_model.hpp"
#include "wrsim/newton.hpp"

namespace wrsim {

enum class Method { Di, Wr, Wrw };
enum class WrMode { Jacobi, Seidel };

inline Method parse_method(const std::string& s) {
  if (s == "di") return Method::Di;
  if (s == "wr") return Method::Wr;
  if (s == "wrw") return Method::Wrw;
  throw ConfigError("unknown method '" + s + "' (expected di, wr, wrw)");
}
inline const char* method_name(Method m) {
  switch (m) {
    case Method::Di: return "di";
    case Method::Wr: return "wr";
    default: return "wrw";
  }
}

inline WrMode parse_mode(const std::string& s) {
  if (s == "jacobi") return WrMode::Jacobi;
  if (s == "seidel") return WrMode::Seidel;
  throw ConfigError("unknown mode '" + s + "' (expected jacobi, seidel)");
}
inline const char* mode_name(WrMode m) {
  return m == WrMode::Jacobi ? "jacobi" : "seidel";
}

/// Everything a run needs besides the network itself. partition_ref is a
/// preset name, a JSON file path, or empty (whole network as one group).
struct Scenario {
  double h = 0.05;
  double t_end = 20.0;
  std::vector<Disturbance> disturbances;
  NewtonConfig newton;
  double wr_eps = 1e-6;
  int wr_k_max = 200;
  double t_win = 0.05;
  Method method = Method::Di;
  WrMode mode = WrMode::Jacobi;
  std::string partition_ref;
  std::string network_path;
  int workers = 0;  // 0 = one per subsystem up to hardware threads
};

/// Validates global shape and snaps disturbance times onto the step grid
/// (nearest step boundary). Returns one human-readable warning per snapped
/// time. Throws ConfigError on unfixable problems.
inline std::vector<std::string> validate_scenario(Scenario& sc) {
  std::vector<std::string> warnings;
  if (!(sc.h > 0.0)) throw ConfigError("h must be positive");
  if (!(sc.t_end > 0.0)) throw ConfigError("T must be positive");
  const double steps_real = sc.t_end / sc.h;
  if (std::abs(steps_real - std::llround(steps_real)) > 1e-9)
    throw ConfigError("T/h not integral");
  sc.newton.validate();
  if (!(sc.wr_eps > 0.0)) throw ConfigError("wr eps must be positive");
  if (sc.wr_k_max < 1) throw ConfigError("wr k_max must be >= 1");
  if (!(sc.t_win > 0.0)) throw ConfigError("window length must be positive");
  if (sc.workers < 0) throw ConfigError("workers must be >= 0");

  for (Disturbance& d : sc.disturbances) {
    auto snap = [&](double t, const char* which) {
      const double snapped = std::round(t / sc.h) * sc.h;
      if (std::abs(snapped - t) > 1e-9)
        warnings.push_back("disturbance " + std::string(which) + " " +
                           std::to_string(t) + " snapped to " +
                           std::to_string(snapped));
      return snapped;
    };
    d.t_start = snap(d.t_start, "start");
    d.t_end = snap(d.t_end, "end");
    if (!(d.t_start < d.t_end))
      throw ConfigError("disturbance interval empty after snapping");
    if (d.t_start < 0.0 || d.t_end > sc.t_end + 1e-9)
      throw ConfigError("disturbance outside [0, T]");
    if (d.kind == DisturbanceKind::ScaleLoad && !(d.factor > 0.0))
      throw ConfigError("scale factor must be positive");
  }
  return warnings;
}

}  // namespace wrsim

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "wrsim/dae_core.hpp"
#include "wrsim/errors.hpp"
#include "wrsim/trajectory.hpp"

namespace wrsim {

enum class VarKind { GenDelta, GenOmega, GenPe, BusV, BusTheta };

/// Identifies one scalar time series inside a trajectory by kind and bus.
struct VariableSelector {
  VarKind kind = VarKind::GenDelta;
  int bus = 0;
};

namespace detail {

inline int index_of(const std::vector<int>& ids, int bus) {
  auto it = std::find(ids.begin(), ids.end(), bus);
  return it == ids.end() ? -1 : static_cast<int>(it - ids.begin());
}

}  // namespace detail

/// The selected column as a dense series, one value per grid time.
inline Eigen::VectorXd variable_series(const Trajectory& t,
                                       VariableSelector sel) {
  switch (sel.kind) {
    case VarKind::GenDelta: {
      // machine angle is the generator-bus angle
      const int c = detail::index_of(t.bus_ids, sel.bus);
      if (c < 0 || detail::index_of(t.swing_bus_ids, sel.bus) < 0)
        throw UnknownGenerator(sel.bus);
      return t.theta.col(c);
    }
    case VarKind::GenOmega: {
      const int c = detail::index_of(t.swing_bus_ids, sel.bus);
      if (c < 0) throw UnknownGenerator(sel.bus);
      return t.omega.col(c);
    }
    case VarKind::GenPe: {
      const int c = detail::index_of(t.machine_bus_ids, sel.bus);
      if (c < 0) throw UnknownGenerator(sel.bus);
      return t.pe.col(c);
    }
    case VarKind::BusV: {
      const int c = detail::index_of(t.bus_ids, sel.bus);
      if (c < 0) throw UnknownBusReference(sel.bus);
      return t.v.col(c);
    }
    default: {
      const int c = detail::index_of(t.bus_ids, sel.bus);
      if (c < 0) throw UnknownBusReference(sel.bus);
      return t.theta.col(c);
    }
  }
}

/// Machine angle minus the (constant) slack reference angle.
inline Eigen::VectorXd relative_rotor_angle(const Trajectory& t,
                                            int gen_bus) {
  Eigen::VectorXd series =
      variable_series(t, {VarKind::GenDelta, gen_bus});
  const int slack_col = detail::index_of(t.bus_ids, t.slack_bus_id);
  const double ref = t.theta(0, slack_col);
  return series.array() - ref;
}

struct ErrorReport {
  double min_pct = 0.0;  // signed
  double max_pct = 0.0;
  double avg_pct = 0.0;
  double min_abs_pct = 0.0;  // over |percent error|
  double max_abs_pct = 0.0;
  double avg_abs_pct = 0.0;
  int included = 0;
  int excluded = 0;  // samples with reference magnitude below 1e-9
  Eigen::VectorXd abs_error;
};

namespace detail {

inline void require_same_grid(const Trajectory& a, const Trajectory& b) {
  if (a.times.size() != b.times.size())
    throw GridMismatch("trajectories have different lengths");
  for (size_t i = 0; i < a.times.size(); ++i)
    if (std::abs(a.times[i] - b.times[i]) > 1e-12)
      throw GridMismatch("trajectories have different time grids");
}

}  // namespace detail

/// |test - ref| per grid time for one variable.
inline Eigen::VectorXd absolute_error_series(const Trajectory& ref,
                                             const Trajectory& test,
                                             VariableSelector sel) {
  detail::require_same_grid(ref, test);
  return (variable_series(test, sel) - variable_series(ref, sel))
      .cwiseAbs();
}

/// Signed percent error statistics of one series against another. Samples
/// where |ref| < 1e-9 are excluded from min/max/average but counted; the
/// absolute-error series always covers every sample.
inline ErrorReport percent_error_series_stats(const Eigen::VectorXd& r,
                                              const Eigen::VectorXd& s) {
  if (r.size() != s.size())
    throw GridMismatch("series have different lengths");
  ErrorReport rep;
  rep.abs_error = (s - r).cwiseAbs();
  double sum = 0.0, abs_sum = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (std::abs(r[i]) < 1e-9) {
      ++rep.excluded;
      continue;
    }
    const double e = 100.0 * (s[i] - r[i]) / r[i];
    const double a = std::abs(e);
    if (rep.included == 0) {
      rep.min_pct = rep.max_pct = e;
      rep.min_abs_pct = rep.max_abs_pct = a;
    } else {
      rep.min_pct = std::min(rep.min_pct, e);
      rep.max_pct = std::max(rep.max_pct, e);
      rep.min_abs_pct = std::min(rep.min_abs_pct, a);
      rep.max_abs_pct = std::max(rep.max_abs_pct, a);
    }
    sum += e;
    abs_sum += a;
    ++rep.included;
  }
  if (rep.included == 0)
    throw AllSamplesExcluded("reference is below 1e-9 at every sample");
  rep.avg_pct = sum / rep.included;
  rep.avg_abs_pct = abs_sum / rep.included;
  return rep;
}

/// Percent error statistics on the raw values of one selected variable.
inline ErrorReport percent_error_stats(const Trajectory& ref,
                                       const Trajectory& test,
                                       VariableSelector sel) {
  detail::require_same_grid(ref, test);
  return percent_error_series_stats(variable_series(ref, sel),
                                    variable_series(test, sel));
}

/// Largest entry of the full-system implicit-step residual along a
/// trajectory, over all steps after the first row. A trajectory is a true
/// solution of the discretized equations exactly when this is small; an
/// iterate that merely stopped changing is not.
inline double max_dynamic_residual(const DaeSystem& sys, const Trajectory& tr,
                                   const std::vector<Disturbance>& dist) {
  const GridModel& grid = sys.grid();
  const auto& map = sys.full_map();
  const auto& swing = grid.swing_machines();
  std::vector<Eigen::Index> swing_bus_pos(swing.size());
  StepResidualContext ctx;
  ctx.h = tr.h;
  ctx.pm.resize(static_cast<Eigen::Index>(swing.size()));
  ctx.prev_delta.resize(static_cast<Eigen::Index>(swing.size()));
  ctx.prev_omega.resize(static_cast<Eigen::Index>(swing.size()));
  for (size_t s = 0; s < swing.size(); ++s) {
    const Generator& g = grid.generators()[static_cast<size_t>(swing[s])];
    ctx.pm[static_cast<Eigen::Index>(s)] = g.p_mech;
    swing_bus_pos[s] = grid.bus_pos(g.bus);
  }
  double worst = 0.0;
  for (int r = 1; r < tr.rows(); ++r) {
    for (size_t s = 0; s < swing.size(); ++s) {
      ctx.prev_delta[static_cast<Eigen::Index>(s)] =
          tr.theta(r - 1, swing_bus_pos[s]);
      ctx.prev_omega[static_cast<Eigen::Index>(s)] =
          tr.omega(r - 1, static_cast<Eigen::Index>(s));
    }
    effective_load(grid, dist, tr.times[static_cast<size_t>(r)], ctx.p_load,
                   ctx.q_load);
    Eigen::VectorXd x =
        sys.pack(map, tr.v.row(r).transpose(), tr.theta.row(r).transpose(),
                 tr.omega.row(r).transpose());
    worst = std::max(worst, sys.residual(map, ctx, x).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace wrsim

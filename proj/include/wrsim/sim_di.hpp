#pragma once

#include <chrono>
#include <utility>
#include <vector>

#include "wrsim/dae_core.hpp"
#include "wrsim/errors.hpp"
#include "wrsim/grid_model.hpp"
#include "wrsim/newton.hpp"
#include "wrsim/powerflow.hpp"
#include "wrsim/scenario.hpp"
#include "wrsim/trajectory.hpp"

namespace wrsim {

struct DiStats {
  double total_solve_time = 0.0;  // seconds, stepping loop only
  std::vector<int> newton_iters;  // per step
};

namespace detail {

inline double seconds_since(
    std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

/// Per-swing-machine mechanical power, in swing order.
inline Eigen::VectorXd swing_pm(const GridModel& grid) {
  Eigen::VectorXd pm(static_cast<Eigen::Index>(grid.swing_machines().size()));
  for (size_t s = 0; s < grid.swing_machines().size(); ++s)
    pm[static_cast<Eigen::Index>(s)] =
        grid.generators()[static_cast<size_t>(grid.swing_machines()[s])]
            .p_mech;
  return pm;
}

}  // namespace detail

/// Backward Euler with one full-system Newton solve per step, warm-started
/// from the previous step. The reference method all others are judged
/// against.
inline std::pair<Trajectory, DiStats> simulate_di(const GridModel& grid,
                                                  const Scenario& sc) {
  AdmittanceMatrix ybus = build_ybus(grid);
  PowerFlowSolution pf = solve_powerflow(grid, ybus);
  InitialState init = init_dynamic_state(grid, pf);
  DaeSystem sys(init.grid, ybus);

  std::vector<double> times = make_time_grid(sc.h, sc.t_end);
  Trajectory traj = make_trajectory(init.grid, times, sc.h);
  traj.set_row(0, init.point);

  DiStats stats;
  const UnknownIndexMap& map = sys.full_map();
  Eigen::VectorXd v = init.point.v;
  Eigen::VectorXd th = init.point.theta;
  Eigen::VectorXd omega = init.point.omega;
  StepResidualContext ctx;
  ctx.h = sc.h;
  ctx.pm = detail::swing_pm(init.grid);

  const auto t0 = std::chrono::steady_clock::now();
  for (size_t s = 1; s < times.size(); ++s) {
    ctx.prev_delta.resize(omega.size());
    for (size_t g = 0; g < init.grid.swing_machines().size(); ++g)
      ctx.prev_delta[static_cast<Eigen::Index>(g)] = th[init.grid.bus_pos(
          init.grid
              .generators()[static_cast<size_t>(
                  init.grid.swing_machines()[g])]
              .bus)];
    ctx.prev_omega = omega;
    effective_load(init.grid, sc.disturbances, times[s], ctx.p_load,
                   ctx.q_load);
    Eigen::VectorXd x0 = sys.pack(map, v, th, omega);
    NewtonResult nr;
    try {
      nr = newton_solve(
          [&](const Eigen::VectorXd& x) { return sys.residual(map, ctx, x); },
          [&](const Eigen::VectorXd& x) { return sys.jacobian(map, ctx, x); },
          std::move(x0), sc.newton);
    } catch (const SimError& e) {
      throw StepFailure(times[s], e.what());
    }
    sys.unpack(map, nr.x, v, th, omega);
    stats.newton_iters.push_back(nr.iterations);

    TrajectoryPoint pt;
    pt.v = v;
    pt.theta = th;
    pt.omega = omega;
    sys.recover_outputs(v, th, ctx.p_load, ctx.q_load, pt.pe, pt.qe);
    traj.set_row(static_cast<int>(s), pt);
  }
  stats.total_solve_time = detail::seconds_since(t0);
  return {std::move(traj), std::move(stats)};
}

}  // namespace wrsim

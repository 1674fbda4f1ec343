#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "wrsim/sim_wr.hpp"

namespace wrsim {

/// Uniform windows covering [0, T]. Steps and windows must tile exactly.
struct WindowPlan {
  double t_win = 0.0;
  int w_max = 0;
  int steps_per_window = 0;
  std::vector<std::pair<double, double>> bounds;
};

inline WindowPlan make_window_plan(double t_win, double t_end, double h) {
  if (!(t_win > 0.0)) throw PlanMismatch("window length must be positive");
  if (!(t_end > 0.0)) throw PlanMismatch("horizon must be positive");
  if (!(h > 0.0)) throw PlanMismatch("step size must be positive");
  const long long steps = std::llround(t_win / h);
  if (steps < 1 || std::abs(static_cast<double>(steps) * h - t_win) > 1e-12)
    throw PlanMismatch("window length is not a multiple of the step size");
  const long long w_max = std::llround(t_end / t_win);
  if (w_max < 1 ||
      std::abs(static_cast<double>(w_max) * t_win - t_end) > 1e-12)
    throw PlanMismatch("horizon is not a multiple of the window length");
  WindowPlan plan;
  plan.t_win = t_win;
  plan.w_max = static_cast<int>(w_max);
  plan.steps_per_window = static_cast<int>(steps);
  for (int w = 0; w < plan.w_max; ++w)
    plan.bounds.emplace_back(static_cast<double>(w) * t_win,
                             static_cast<double>(w + 1) * t_win);
  return plan;
}

struct WrwStats {
  std::vector<int> window_iterations;
  std::vector<double> window_parallel;  // parallel-time metric per window
  std::vector<double> window_wall;      // plain wall time per window
  std::vector<std::vector<double>> window_deltas;
  int total_iterations = 0;
  double parallel_time = 0.0;  // summed over windows
  double wall_time = 0.0;

  double avg_window_parallel() const {
    return window_parallel.empty()
               ? 0.0
               : parallel_time / static_cast<double>(window_parallel.size());
  }
  double avg_window_wall() const {
    return window_wall.empty()
               ? 0.0
               : wall_time / static_cast<double>(window_wall.size());
  }
};

/// Relaxation restarted per window, chaining each window's final values as
/// the next window's initial condition. Window grids are slices of the one
/// global step grid, so boundaries are shared bit-exactly.
inline std::pair<Trajectory, WrwStats> simulate_wrw(
    const GridModel& grid, const Scenario& sc, const Partition& part,
    const WindowPlan& plan, WrMode mode, double eps, int k_max,
    int workers = 0) {
  if (std::abs(static_cast<double>(plan.w_max) * plan.t_win - sc.t_end) >
      1e-9)
    throw PlanMismatch("window plan does not cover the scenario horizon");
  detail::WrSetup su = detail::wr_setup(grid, sc, part);
  Trajectory traj = make_trajectory(su.init.grid, su.times, sc.h);
  traj.set_row(0, su.init.point);

  WrwStats stats;
  TrajectoryPoint start = su.init.point;
  const int spw = plan.steps_per_window;
  for (int w = 0; w < plan.w_max; ++w) {
    const int s0 = w * spw;
    const std::vector<double> win_times(
        su.times.begin() + s0, su.times.begin() + s0 + spw + 1);
    const Eigen::MatrixXd p_win = su.p_eff.middleRows(s0, spw + 1);
    const Eigen::MatrixXd q_win = su.q_eff.middleRows(s0, spw + 1);

    WaveformSet wave;
    const auto t0 = std::chrono::steady_clock::now();
    WrStats ws;
    try {
      ws = wr_solve_window(su.sys, su.submaps, win_times, p_win, q_win,
                           start, mode, eps, k_max, sc.newton, workers,
                           wave);
    } catch (const SimError& e) {
      throw WindowFailure(w + 1, e.what());
    }
    const double wall = detail::seconds_since(t0);
    if (!ws.converged)
      throw WindowFailure(
          w + 1, WrDivergence(k_max, ws.deltas.back()).what());

    detail::waveform_to_trajectory(su.sys, wave, p_win, q_win, s0, 1, spw,
                                   traj);
    start.v = wave.v.row(spw).transpose();
    start.theta = wave.theta.row(spw).transpose();
    start.omega = wave.omega.row(spw).transpose();

    stats.window_iterations.push_back(ws.iterations);
    stats.window_parallel.push_back(ws.parallel_time);
    stats.window_wall.push_back(wall);
    stats.window_deltas.push_back(ws.deltas);
    stats.total_iterations += ws.iterations;
    stats.parallel_time += ws.parallel_time;
    stats.wall_time += wall;
  }
  return {std::move(traj), std::move(stats)};
}

inline std::pair<Trajectory, WrwStats> simulate_wrw(const GridModel& grid,
                                                    const Scenario& sc,
                                                    const Partition& part) {
  return simulate_wrw(grid, sc, part,
                      make_window_plan(sc.t_win, sc.t_end, sc.h), sc.mode,
                      sc.wr_eps, sc.wr_k_max, sc.workers);
}

/// One row of the horizon-scaling comparison.
struct HorizonRow {
  double t_end = 0.0;
  double di_time = 0.0;   // wall seconds
  double wr_time = 0.0;   // parallel-time metric
  double wrw_time = 0.0;  // parallel-time metric
  bool di_ok = false;
  bool wr_ok = false;
  bool wrw_ok = false;
  std::string note;
};

namespace detail {

inline void append_note(std::string& note, const char* tag,
                        const std::string& what) {
  if (!note.empty()) note += "; ";
  note += tag;
  note += what;
}

}  // namespace detail

/// Runs all three methods for each horizon. Failures are recorded in the
/// row (cell marked not-ok) instead of aborting the sweep; invalid
/// horizons are rejected up front.
inline std::vector<HorizonRow> sweep_horizon(const GridModel& grid,
                                             const Scenario& base,
                                             const Partition& part,
                                             const std::vector<double>& horizons,
                                             int workers = 0) {
  for (double t : horizons) {
    if (!(t > 0.0)) throw PlanMismatch("horizon must be positive");
    const double steps = t / base.h;
    if (std::abs(steps - std::llround(steps)) > 1e-9)
      throw PlanMismatch("horizon " + std::to_string(t) +
                         " is not a multiple of the step size");
  }
  std::vector<HorizonRow> rows;
  for (double t : horizons) {
    Scenario sc = base;
    sc.t_end = t;
    HorizonRow row;
    row.t_end = t;
    try {
      auto [traj, st] = simulate_di(grid, sc);
      row.di_time = st.total_solve_time;
      row.di_ok = true;
    } catch (const SimError& e) {
      detail::append_note(row.note, "di: ", e.what());
    }
    try {
      auto [traj, st] =
          simulate_wr(grid, sc, part, sc.mode, sc.wr_eps, sc.wr_k_max,
                      workers);
      row.wr_time = st.parallel_time;
      row.wr_ok = true;
    } catch (const SimError& e) {
      detail::append_note(row.note, "wr: ", e.what());
    }
    try {
      auto [traj, st] =
          simulate_wrw(grid, sc, part,
                       make_window_plan(sc.t_win, sc.t_end, sc.h), sc.mode,
                       sc.wr_eps, sc.wr_k_max, workers);
      row.wrw_time = st.parallel_time;
      row.wrw_ok = true;
    } catch (const SimError& e) {
      detail::append_note(row.note, "wrw: ", e.what());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace wrsim

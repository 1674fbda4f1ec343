#pragma once

#include <algorithm>
#include <chrono>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

#include "wrsim/dae_core.hpp"
#include "wrsim/errors.hpp"
#include "wrsim/grid_model.hpp"
#include "wrsim/newton.hpp"
#include "wrsim/powerflow.hpp"
#include "wrsim/scenario.hpp"
#include "wrsim/sim_di.hpp"
#include "wrsim/trajectory.hpp"

namespace wrsim {

/// One relaxation iterate over a window: per-bus magnitude/angle and
/// per-swing-machine speed at every grid point (row 0 = window start).
/// Subsystems own disjoint column sets; pinned columns (generator
/// magnitudes, slack) never change after initialization.
struct WaveformSet {
  Eigen::MatrixXd v;
  Eigen::MatrixXd theta;
  Eigen::MatrixXd omega;
  int k = 0;  // iteration index that produced the values
};

/// Infinity norm over every variable and grid point of the difference.
inline double waveform_delta(const WaveformSet& prev,
                             const WaveformSet& next) {
  if (prev.v.rows() != next.v.rows() || prev.v.cols() != next.v.cols() ||
      prev.omega.cols() != next.omega.cols())
    throw GridMismatch("waveform sets have different shapes");
  double d = (next.v - prev.v).cwiseAbs().maxCoeff();
  d = std::max(d, (next.theta - prev.theta).cwiseAbs().maxCoeff());
  if (next.omega.size() > 0)
    d = std::max(d, (next.omega - prev.omega).cwiseAbs().maxCoeff());
  return d;
}

struct WrStats {
  int iterations = 0;
  bool converged = false;
  Eigen::MatrixXd subsystem_times;  // iterations x p, seconds
  std::vector<double> deltas;       // waveform delta after each iteration
  double parallel_time = 0.0;       // sum over iterations of the row max
};

namespace detail {

/// Solves one subsystem over the whole window by sequential implicit
/// steps: externals frozen from `read`, results written into `write`'s own
/// columns (rows 1..S). read and write may alias (sequential relaxation).
/// Only cells owned by `map` are ever read from or written into `write`,
/// so concurrent sweeps of disjoint subsystems stay independent.
inline void sweep_subsystem(const DaeSystem& sys, const UnknownIndexMap& map,
                            const std::vector<double>& times,
                            const Eigen::MatrixXd& p_eff,
                            const Eigen::MatrixXd& q_eff,
                            const Eigen::VectorXd& pm,
                            const NewtonConfig& ncfg,
                            const WaveformSet& read, WaveformSet& write) {
  const int n = sys.grid().n();
  StepResidualContext ctx;
  ctx.pm = pm;
  ctx.ext_valid.assign(static_cast<size_t>(n), 1);
  ctx.prev_delta = Eigen::VectorXd::Zero(write.omega.cols());
  ctx.prev_omega = Eigen::VectorXd::Zero(write.omega.cols());
  Eigen::VectorXd v_row(n), th_row(n), om_row(write.omega.cols());
  for (size_t s = 1; s < times.size(); ++s) {
    const auto r = static_cast<Eigen::Index>(s);
    ctx.h = times[s] - times[s - 1];
    for (size_t slot = 0; slot < map.gen_buses.size(); ++slot) {
      const int b = map.gen_buses[slot];
      const int sm = map.swing_slot[slot];
      ctx.prev_delta[sm] = write.theta(r - 1, b);
      ctx.prev_omega[sm] = write.omega(r - 1, sm);
    }
    ctx.p_load = p_eff.row(r).transpose();
    ctx.q_load = q_eff.row(r).transpose();
    ctx.ext_v = read.v.row(r).transpose();
    ctx.ext_theta = read.theta.row(r).transpose();

    // Warm start from the previous iterate at the same instant; near
    // convergence that is already the answer and the sweep degenerates to
    // cheap confirmation solves. Far from convergence it can sit in a bad
    // Newton basin, so a failed solve is retried from the marching guess
    // (own values at the previous step), which tracks the subsystem's own
    // continuous trajectory.
    v_row = read.v.row(r).transpose();
    th_row = read.theta.row(r).transpose();
    om_row = read.omega.row(r).transpose();
    Eigen::VectorXd x0 = sys.pack(map, v_row, th_row, om_row);
    auto rfn = [&](const Eigen::VectorXd& x) {
      return sys.residual(map, ctx, x);
    };
    auto jfn = [&](const Eigen::VectorXd& x) {
      return sys.jacobian(map, ctx, x);
    };
    NewtonResult nr;
    try {
      nr = newton_solve(rfn, jfn, std::move(x0), ncfg);
    } catch (const SimError&) {
      for (size_t slot = 0; slot < map.gen_buses.size(); ++slot) {
        const int b = map.gen_buses[slot];
        const int sm = map.swing_slot[slot];
        th_row[b] = write.theta(r - 1, b);
        om_row[sm] = write.omega(r - 1, sm);
      }
      for (int b : map.load_buses) {
        v_row[b] = write.v(r - 1, b);
        th_row[b] = write.theta(r - 1, b);
      }
      try {
        nr = newton_solve(rfn, jfn, sys.pack(map, v_row, th_row, om_row),
                          ncfg);
      } catch (const SimError& e) {
        throw StepFailure(times[s], e.what());
      }
    }
    sys.unpack(map, nr.x, v_row, th_row, om_row);
    for (size_t slot = 0; slot < map.gen_buses.size(); ++slot) {
      const int b = map.gen_buses[slot];
      const int sm = map.swing_slot[slot];
      write.theta(r, b) = th_row[b];
      write.omega(r, sm) = om_row[sm];
    }
    for (int b : map.load_buses) {
      write.v(r, b) = v_row[b];
      write.theta(r, b) = th_row[b];
    }
  }
}

}  // namespace detail

/// Relaxation over one window. Every iterate starts from the constant
/// extension of `start`; iterations sweep all subsystems (concurrently for
/// Jacobi when workers > 1, in list order for Seidel) until the waveform
/// delta drops to eps or k_max is reached. `out` receives the last iterate
/// either way; per-subsystem wall times are recorded for every sweep.
inline WrStats wr_solve_window(const DaeSystem& sys,
                               const std::vector<UnknownIndexMap>& submaps,
                               const std::vector<double>& times,
                               const Eigen::MatrixXd& p_eff,
                               const Eigen::MatrixXd& q_eff,
                               const TrajectoryPoint& start, WrMode mode,
                               double eps, int k_max,
                               const NewtonConfig& ncfg, int workers,
                               WaveformSet& out) {
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  if (k_max < 1) throw ConfigError("k_max must be >= 1");
  const int p = static_cast<int>(submaps.size());
  const auto rows = static_cast<Eigen::Index>(times.size());
  const Eigen::VectorXd pm = detail::swing_pm(sys.grid());

  WaveformSet cur;
  cur.v = start.v.transpose().replicate(rows, 1);
  cur.theta = start.theta.transpose().replicate(rows, 1);
  cur.omega = start.omega.transpose().replicate(rows, 1);
  cur.k = 0;
  WaveformSet next = cur;

  int n_workers = workers > 0 ? workers
                              : static_cast<int>(std::max(
                                    1u, std::thread::hardware_concurrency()));
  n_workers = std::min(n_workers, p);

  WrStats stats;
  std::vector<Eigen::VectorXd> time_rows;
  for (int k = 1; k <= k_max; ++k) {
    Eigen::VectorXd sweep_times(p);
    if (mode == WrMode::Jacobi) {
      auto run_one = [&](int i) {
        const auto t0 = std::chrono::steady_clock::now();
        detail::sweep_subsystem(sys, submaps[static_cast<size_t>(i)], times,
                                p_eff, q_eff, pm, ncfg, cur, next);
        sweep_times[i] = detail::seconds_since(t0);
      };
      if (n_workers <= 1) {
        for (int i = 0; i < p; ++i) run_one(i);
      } else {
        std::vector<std::exception_ptr> errs(static_cast<size_t>(p));
        std::vector<std::thread> pool;
        for (int w = 0; w < n_workers; ++w)
          pool.emplace_back([&, w] {
            for (int i = w; i < p; i += n_workers) {
              try {
                run_one(i);
              } catch (...) {
                errs[static_cast<size_t>(i)] = std::current_exception();
              }
            }
          });
        for (auto& th : pool) th.join();
        for (auto& e : errs)
          if (e) std::rethrow_exception(e);
      }
    } else {
      cur = next;  // snapshot of iterate k-1 for the delta test
      for (int i = 0; i < p; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        detail::sweep_subsystem(sys, submaps[static_cast<size_t>(i)], times,
                                p_eff, q_eff, pm, ncfg, next, next);
        sweep_times[i] = detail::seconds_since(t0);
      }
    }
    const double delta = waveform_delta(cur, next);
    next.k = k;
    stats.iterations = k;
    stats.deltas.push_back(delta);
    time_rows.push_back(sweep_times);
    stats.parallel_time += sweep_times.maxCoeff();
    if (delta <= eps) {
      stats.converged = true;
      break;
    }
    // the freshly swept buffer becomes the read side of the next sweep
    if (mode == WrMode::Jacobi) std::swap(cur, next);
  }

  stats.subsystem_times.resize(stats.iterations, p);
  for (int k = 0; k < stats.iterations; ++k)
    stats.subsystem_times.row(k) =
        time_rows[static_cast<size_t>(k)].transpose();
  // on exhaustion the Jacobi swap leaves the newest iterate in cur
  const bool newest_in_cur = mode == WrMode::Jacobi && !stats.converged;
  out = newest_in_cur ? std::move(cur) : std::move(next);
  if (newest_in_cur) out.k = stats.iterations;
  return stats;
}

namespace detail {

struct WrSetup {
  InitialState init;
  DaeSystem sys;
  std::vector<UnknownIndexMap> submaps;
  std::vector<double> times;
  Eigen::MatrixXd p_eff;  // rows aligned with times
  Eigen::MatrixXd q_eff;
};

inline WrSetup wr_setup(const GridModel& grid, const Scenario& sc,
                        const Partition& part) {
  require_valid_partition(part, grid);
  AdmittanceMatrix ybus = build_ybus(grid);
  PowerFlowSolution pf = solve_powerflow(grid, ybus);
  InitialState init = init_dynamic_state(grid, pf);
  DaeSystem sys(init.grid, std::move(ybus));
  std::vector<UnknownIndexMap> submaps;
  for (int i = 0; i < part.size(); ++i)
    submaps.push_back(sys.subsystem_map(part, i));
  std::vector<double> times = make_time_grid(sc.h, sc.t_end);
  const int n = grid.n();
  Eigen::MatrixXd p_eff(times.size(), n), q_eff(times.size(), n);
  Eigen::VectorXd pr, qr;
  for (size_t s = 0; s < times.size(); ++s) {
    effective_load(init.grid, sc.disturbances, times[s], pr, qr);
    p_eff.row(static_cast<Eigen::Index>(s)) = pr.transpose();
    q_eff.row(static_cast<Eigen::Index>(s)) = qr.transpose();
  }
  return WrSetup{std::move(init), std::move(sys), std::move(submaps),
                 std::move(times), std::move(p_eff), std::move(q_eff)};
}

/// Copies waveform rows [first, last] into the trajectory, recovering
/// machine outputs from the loads at each instant.
inline void waveform_to_trajectory(const DaeSystem& sys,
                                   const WaveformSet& w,
                                   const Eigen::MatrixXd& p_eff,
                                   const Eigen::MatrixXd& q_eff,
                                   int row_offset, int first, int last,
                                   Trajectory& traj) {
  TrajectoryPoint pt;
  for (int r = first; r <= last; ++r) {
    pt.v = w.v.row(r).transpose();
    pt.theta = w.theta.row(r).transpose();
    pt.omega = w.omega.row(r).transpose();
    sys.recover_outputs(pt.v, pt.theta, p_eff.row(r).transpose(),
                        q_eff.row(r).transpose(), pt.pe, pt.qe);
    traj.set_row(row_offset + r, pt);
  }
}

}  // namespace detail

/// Waveform relaxation over the full horizon. Throws WrDivergence when
/// k_max sweeps do not reach eps.
inline std::pair<Trajectory, WrStats> simulate_wr(
    const GridModel& grid, const Scenario& sc, const Partition& part,
    WrMode mode, double eps, int k_max, int workers = 0) {
  detail::WrSetup su = detail::wr_setup(grid, sc, part);
  WaveformSet wave;
  WrStats stats =
      wr_solve_window(su.sys, su.submaps, su.times, su.p_eff, su.q_eff,
                      su.init.point, mode, eps, k_max, sc.newton, workers,
                      wave);
  if (!stats.converged) throw WrDivergence(k_max, stats.deltas.back());
  Trajectory traj = make_trajectory(su.init.grid, su.times, sc.h);
  detail::waveform_to_trajectory(su.sys, wave, su.p_eff, su.q_eff, 0, 0,
                                 static_cast<int>(su.times.size()) - 1, traj);
  return {std::move(traj), std::move(stats)};
}

inline std::pair<Trajectory, WrStats> simulate_wr(const GridModel& grid,
                                                  const Scenario& sc,
                                                  const Partition& part) {
  return simulate_wr(grid, sc, part, sc.mode, sc.wr_eps, sc.wr_k_max,
                     sc.workers);
}

}  // namespace wrsim

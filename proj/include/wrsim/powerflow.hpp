#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "wrsim/dae_core.hpp"
#include "wrsim/errors.hpp"
#include "wrsim/grid_model.hpp"
#include "wrsim/newton.hpp"
#include "wrsim/trajectory.hpp"

namespace wrsim {

struct PowerFlowSolution {
  Eigen::VectorXd v;      // per bus
  Eigen::VectorXd theta;  // per bus, radians
  Eigen::VectorXd pe;     // per machine, grid machine order
  Eigen::VectorXd qe;
  bool converged = false;
  int iterations = 0;
};

/// Standard PV/PQ/slack Newton power flow on the base (undisturbed) loads.
/// Machine buses hold |V| = v0 and scheduled P, load buses hold P and Q,
/// the slack holds v0/delta0. Initial guess: dataset v0/delta0 (flat for
/// load buses). Throws NonConvergence or SingularJacobian on failure.
inline PowerFlowSolution solve_powerflow(const GridModel& grid,
                                         const AdmittanceMatrix& ybus,
                                         double tol = 1e-10,
                                         int max_iter = 50) {
  const int n = grid.n();
  // Unknown layout: theta for every non-slack bus in bus order, then V for
  // every load bus in bus order. Mismatch rows in the same order.
  std::vector<int> th_col(static_cast<size_t>(n), -1);
  std::vector<int> v_col(static_cast<size_t>(n), -1);
  std::vector<int> p_row_bus, q_row_bus;
  int col = 0;
  for (int b = 0; b < n; ++b) {
    if (b == grid.slack_pos()) continue;
    th_col[static_cast<size_t>(b)] = col++;
    p_row_bus.push_back(b);
  }
  for (int b : grid.load_bus_pos()) {
    v_col[static_cast<size_t>(b)] = col++;
    q_row_bus.push_back(b);
  }
  const int n_unknowns = col;

  Eigen::VectorXd p_spec = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd q_spec = Eigen::VectorXd::Zero(n);
  for (int b = 0; b < n; ++b) {
    p_spec[b] -= grid.buses()[static_cast<size_t>(b)].p_load;
    q_spec[b] -= grid.buses()[static_cast<size_t>(b)].q_load;
  }
  for (const Generator& g : grid.generators())
    p_spec[grid.bus_pos(g.bus)] += g.p_dispatch;

  auto expand = [&](const Eigen::VectorXd& x, Eigen::VectorXd& v,
                    Eigen::VectorXd& th) {
    v.resize(n);
    th.resize(n);
    for (int b = 0; b < n; ++b) {
      const Bus& bus = grid.buses()[static_cast<size_t>(b)];
      th[b] = th_col[static_cast<size_t>(b)] >= 0
                  ? x[th_col[static_cast<size_t>(b)]]
                  : bus.delta0;
      v[b] = v_col[static_cast<size_t>(b)] >= 0
                 ? x[v_col[static_cast<size_t>(b)]]
                 : bus.v0;
    }
  };

  auto residual = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd v, th;
    expand(x, v, th);
    Eigen::VectorXd r(n_unknowns);
    int row = 0;
    for (int b : p_row_bus) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) {
        const double d = th[b] - th[j];
        acc += v[j] *
               (ybus.g(b, j) * std::cos(d) + ybus.b(b, j) * std::sin(d));
      }
      r[row++] = v[b] * acc - p_spec[b];
    }
    for (int b : q_row_bus) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) {
        const double d = th[b] - th[j];
        acc += v[j] *
               (ybus.g(b, j) * std::sin(d) - ybus.b(b, j) * std::cos(d));
      }
      r[row++] = v[b] * acc - q_spec[b];
    }
    return r;
  };

  auto jac = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd v, th;
    expand(x, v, th);
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n_unknowns, n_unknowns);
    int row = 0;
    for (int b : p_row_bus) {
      double s_p = 0.0, dth_self = 0.0;
      for (int q = 0; q < n; ++q) {
        const double d = th[b] - th[q];
        const double gc = ybus.g(b, q) * std::cos(d);
        const double gs = ybus.g(b, q) * std::sin(d);
        const double bc = ybus.b(b, q) * std::cos(d);
        const double bs = ybus.b(b, q) * std::sin(d);
        s_p += v[q] * (gc + bs);
        if (q == b) continue;
        dth_self += v[q] * (bc - gs);
        if (th_col[static_cast<size_t>(q)] >= 0)
          j(row, th_col[static_cast<size_t>(q)]) += v[b] * v[q] * (gs - bc);
        if (v_col[static_cast<size_t>(q)] >= 0)
          j(row, v_col[static_cast<size_t>(q)]) += v[b] * (gc + bs);
      }
      if (th_col[static_cast<size_t>(b)] >= 0)
        j(row, th_col[static_cast<size_t>(b)]) += v[b] * dth_self;
      if (v_col[static_cast<size_t>(b)] >= 0)
        j(row, v_col[static_cast<size_t>(b)]) += s_p + v[b] * ybus.g(b, b);
      ++row;
    }
    for (int b : q_row_bus) {
      double s_q = 0.0, dth_self = 0.0;
      for (int q = 0; q < n; ++q) {
        const double d = th[b] - th[q];
        const double gc = ybus.g(b, q) * std::cos(d);
        const double gs = ybus.g(b, q) * std::sin(d);
        const double bc = ybus.b(b, q) * std::cos(d);
        const double bs = ybus.b(b, q) * std::sin(d);
        s_q += v[q] * (gs - bc);
        if (q == b) continue;
        dth_self += v[q] * (gc + bs);
        if (th_col[static_cast<size_t>(q)] >= 0)
          j(row, th_col[static_cast<size_t>(q)]) -= v[b] * v[q] * (gc + bs);
        if (v_col[static_cast<size_t>(q)] >= 0)
          j(row, v_col[static_cast<size_t>(q)]) += v[b] * (gs - bc);
      }
      if (th_col[static_cast<size_t>(b)] >= 0)
        j(row, th_col[static_cast<size_t>(b)]) += v[b] * dth_self;
      if (v_col[static_cast<size_t>(b)] >= 0)
        j(row, v_col[static_cast<size_t>(b)]) += s_q - v[b] * ybus.b(b, b);
      ++row;
    }
    return j;
  };

  Eigen::VectorXd x0(n_unknowns);
  for (int b = 0; b < n; ++b) {
    const Bus& bus = grid.buses()[static_cast<size_t>(b)];
    if (th_col[static_cast<size_t>(b)] >= 0)
      x0[th_col[static_cast<size_t>(b)]] = bus.delta0;
    if (v_col[static_cast<size_t>(b)] >= 0)
      x0[v_col[static_cast<size_t>(b)]] = bus.v0;
  }

  NewtonConfig cfg;
  cfg.tol = tol;
  cfg.max_iter = max_iter;
  NewtonResult nr = newton_solve(residual, jac, std::move(x0), cfg);

  PowerFlowSolution sol;
  sol.converged = true;
  sol.iterations = nr.iterations;
  expand(nr.x, sol.v, sol.theta);

  // Machine injections: generation covers the bus load plus the net
  // network injection.
  DaeSystem sys(grid, ybus);
  Eigen::VectorXd p_base(n), q_base(n);
  effective_load(grid, {}, 0.0, p_base, q_base);
  sys.recover_outputs(sol.v, sol.theta, p_base, q_base, sol.pe, sol.qe);
  return sol;
}

inline PowerFlowSolution solve_powerflow(const GridModel& grid,
                                         double tol = 1e-10,
                                         int max_iter = 50) {
  return solve_powerflow(grid, build_ybus(grid), tol, max_iter);
}

/// Dynamic initial condition: machines at synchronous speed, mechanical
/// power equal to the solved electrical output (so the undisturbed system
/// is stationary), network values from the power flow.
struct InitialState {
  GridModel grid;  // copy with p_mech assigned per machine
  TrajectoryPoint point;
};

inline InitialState init_dynamic_state(const GridModel& grid,
                                       const PowerFlowSolution& pf) {
  if (!pf.converged)
    throw NotConverged("power flow did not converge; no initial state");
  InitialState st{grid.with_p_mech(pf.pe), TrajectoryPoint{}};
  st.point.v = pf.v;
  st.point.theta = pf.theta;
  st.point.omega = Eigen::VectorXd::Constant(
      static_cast<Eigen::Index>(grid.swing_machines().size()),
      grid.omega_s());
  st.point.pe = pf.pe;
  st.point.qe = pf.qe;
  return st;
}

}  // namespace wrsim

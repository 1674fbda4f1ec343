#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "wrsim/errors.hpp"
#include "wrsim/grid_model.hpp"

namespace wrsim {

/// Full system snapshot at one instant. v/theta per bus, omega per swing
/// machine, pe/qe per machine (grid machine order, slack machine included).
struct TrajectoryPoint {
  Eigen::VectorXd v;
  Eigen::VectorXd theta;
  Eigen::VectorXd omega;
  Eigen::VectorXd pe;
  Eigen::VectorXd qe;
};

/// Time-indexed records on a uniform grid. Row r of each matrix is the
/// state at times[r]. Column identities are carried alongside so consumers
/// never need the grid object.
struct Trajectory {
  double h = 0.0;
  std::vector<double> times;
  std::vector<int> bus_ids;
  std::vector<int> swing_bus_ids;    // bus of each omega column
  std::vector<int> machine_bus_ids;  // bus of each pe/qe column
  int slack_bus_id = 0;
  Eigen::MatrixXd v;
  Eigen::MatrixXd theta;
  Eigen::MatrixXd omega;
  Eigen::MatrixXd pe;
  Eigen::MatrixXd qe;

  int rows() const { return static_cast<int>(times.size()); }

  /// Column of bus `id` in v/theta.
  Eigen::Index bus_col(int id) const {
    auto it = std::find(bus_ids.begin(), bus_ids.end(), id);
    if (it == bus_ids.end()) throw UnknownBusReference(id);
    return static_cast<Eigen::Index>(it - bus_ids.begin());
  }

  /// Column of the machine at bus `id` in omega.
  Eigen::Index swing_col(int id) const {
    auto it = std::find(swing_bus_ids.begin(), swing_bus_ids.end(), id);
    if (it == swing_bus_ids.end()) throw UnknownGenerator(id);
    return static_cast<Eigen::Index>(it - swing_bus_ids.begin());
  }

  /// Column of the machine at bus `id` in pe/qe.
  Eigen::Index machine_col(int id) const {
    auto it = std::find(machine_bus_ids.begin(), machine_bus_ids.end(), id);
    if (it == machine_bus_ids.end()) throw UnknownGenerator(id);
    return static_cast<Eigen::Index>(it - machine_bus_ids.begin());
  }

  void set_row(int r, const TrajectoryPoint& p) {
    v.row(r) = p.v.transpose();
    theta.row(r) = p.theta.transpose();
    omega.row(r) = p.omega.transpose();
    pe.row(r) = p.pe.transpose();
    qe.row(r) = p.qe.transpose();
  }

  TrajectoryPoint row_point(int r) const {
    TrajectoryPoint p;
    p.v = v.row(r).transpose();
    p.theta = theta.row(r).transpose();
    p.omega = omega.row(r).transpose();
    p.pe = pe.row(r).transpose();
    p.qe = qe.row(r).transpose();
    return p;
  }
};

/// Uniform grid 0, h, 2h, ..., t_end. Validates that t_end/h is integral.
inline std::vector<double> make_time_grid(double h, double t_end) {
  if (!(h > 0.0)) throw ConfigError("step size must be positive");
  if (!(t_end > 0.0)) throw ConfigError("horizon must be positive");
  const double steps_real = t_end / h;
  const long long steps = std::llround(steps_real);
  if (steps < 1 || std::abs(steps_real - static_cast<double>(steps)) > 1e-9)
    throw ConfigError("horizon is not an integral number of steps");
  std::vector<double> times(static_cast<size_t>(steps) + 1);
  for (long long k = 0; k <= steps; ++k)
    times[static_cast<size_t>(k)] = static_cast<double>(k) * h;
  return times;
}

inline Trajectory make_trajectory(const GridModel& grid,
                                  std::vector<double> times, double h) {
  Trajectory t;
  t.h = h;
  t.times = std::move(times);
  const int rows = t.rows();
  for (const Bus& b : grid.buses()) t.bus_ids.push_back(b.id);
  for (int m : grid.swing_machines())
    t.swing_bus_ids.push_back(grid.generators()[static_cast<size_t>(m)].bus);
  for (int m : grid.machine_order())
    t.machine_bus_ids.push_back(grid.generators()[static_cast<size_t>(m)].bus);
  t.slack_bus_id = grid.slack_id();
  t.v.resize(rows, grid.n());
  t.theta.resize(rows, grid.n());
  t.omega.resize(rows, static_cast<Eigen::Index>(t.swing_bus_ids.size()));
  t.pe.resize(rows, static_cast<Eigen::Index>(t.machine_bus_ids.size()));
  t.qe.resize(rows, static_cast<Eigen::Index>(t.machine_bus_ids.size()));
  return t;
}

/// Shortest-width decimal that round-trips a double exactly.
inline std::string format_g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// One row per time point: t, machine angle/speed pairs, bus V/theta
/// pairs, machine Pe/Qe pairs. Column names carry bus ids. Deterministic
/// byte-for-byte for identical trajectories.
inline void write_trajectory_csv(const Trajectory& t, std::ostream& os) {
  os << "t";
  for (int b : t.swing_bus_ids) os << ",delta_" << b << ",omega_" << b;
  for (int b : t.bus_ids) os << ",v_" << b << ",theta_" << b;
  for (int b : t.machine_bus_ids) os << ",pe_" << b << ",qe_" << b;
  os << "\n";
  for (int r = 0; r < t.rows(); ++r) {
    os << format_g17(t.times[static_cast<size_t>(r)]);
    for (size_t c = 0; c < t.swing_bus_ids.size(); ++c) {
      // machine angle is the bus angle under the fixed-magnitude model
      os << "," << format_g17(t.theta(r, t.bus_col(t.swing_bus_ids[c])))
         << "," << format_g17(t.omega(r, static_cast<Eigen::Index>(c)));
    }
    for (size_t c = 0; c < t.bus_ids.size(); ++c)
      os << "," << format_g17(t.v(r, static_cast<Eigen::Index>(c))) << ","
         << format_g17(t.theta(r, static_cast<Eigen::Index>(c)));
    for (size_t c = 0; c < t.machine_bus_ids.size(); ++c)
      os << "," << format_g17(t.pe(r, static_cast<Eigen::Index>(c))) << ","
         << format_g17(t.qe(r, static_cast<Eigen::Index>(c)));
    os << "\n";
  }
}

}  // namespace wrsim

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "wrsim/errors.hpp"
#include "wrsim/grid_model.hpp"

namespace wrsim {

/// Mapping of the flat unknown vector for one step of the discretized
/// system. Generator buses contribute (delta, omega), non-slack load buses
/// contribute (V, delta), the slack contributes nothing. Layout: generator
/// pairs first in bus order, then load pairs in bus order.
struct UnknownIndexMap {
  std::vector<int> gen_buses;   // internal generator bus positions, ascending
  std::vector<int> load_buses;  // internal non-slack load bus positions
  std::vector<int> swing_slot;  // per gen_buses entry: index into the grid's
                                // swing machine list
  std::vector<int> col_theta;   // per bus position: angle column or -1
  std::vector<int> col_v;       // per bus position: magnitude column or -1
  std::vector<int> col_omega;   // per bus position: speed column or -1
  std::vector<std::uint8_t> is_internal;  // per bus position
  std::vector<int> required_external;     // coupled external bus positions
  int n_unknowns = 0;
};

/// Inputs for one implicit step from t to t+1. Previous-step machine state
/// and mechanical powers are indexed by the grid's swing machine order;
/// loads are per bus, already evaluated at t+1. For subsystem residuals the
/// ext_* arrays carry the frozen voltage magnitude/angle of every bus
/// outside the subsystem (ext_valid marks which entries are usable).
struct StepResidualContext {
  double h = 0.0;
  Eigen::VectorXd prev_delta;
  Eigen::VectorXd prev_omega;
  Eigen::VectorXd pm;
  Eigen::VectorXd p_load;
  Eigen::VectorXd q_load;
  Eigen::VectorXd ext_v;
  Eigen::VectorXd ext_theta;
  std::vector<std::uint8_t> ext_valid;
};

/// Assembles residuals and analytic Jacobians of the discretized equations,
/// for the whole network or for one subsystem with frozen externals.
/// Row order per generator bus m: angle update, speed update; per load bus
/// r: active balance, reactive balance. All methods are const and safe to
/// call concurrently.
class DaeSystem {
 public:
  DaeSystem(GridModel grid, AdmittanceMatrix ybus)
      : grid_(std::move(grid)), ybus_(std::move(ybus)) {
    if (ybus_.g.rows() != grid_.n() || ybus_.b.rows() != grid_.n())
      throw DimensionMismatch("admittance matrix does not match bus count");
    swing_slot_of_machine_.assign(grid_.generators().size(), -1);
    for (size_t s = 0; s < grid_.swing_machines().size(); ++s)
      swing_slot_of_machine_[static_cast<size_t>(
          grid_.swing_machines()[s])] = static_cast<int>(s);
    full_map_ = subsystem_map(whole_network_partition(grid_), 0);
  }

  const GridModel& grid() const { return grid_; }
  const AdmittanceMatrix& ybus() const { return ybus_; }
  const UnknownIndexMap& full_map() const { return full_map_; }

  /// Index map for subsystem `index` of the partition. External buses with
  /// any admittance coupling into the subsystem are recorded as required.
  UnknownIndexMap subsystem_map(const Partition& part, int index) const {
    if (index < 0 || index >= part.size())
      throw ConfigError("subsystem index out of range");
    const int n = grid_.n();
    UnknownIndexMap map;
    map.col_theta.assign(static_cast<size_t>(n), -1);
    map.col_v.assign(static_cast<size_t>(n), -1);
    map.col_omega.assign(static_cast<size_t>(n), -1);
    map.is_internal.assign(static_cast<size_t>(n), 0);
    for (int id : part.groups[static_cast<size_t>(index)])
      map.is_internal[static_cast<size_t>(grid_.bus_pos(id))] = 1;

    int col = 0;
    for (int b = 0; b < n; ++b) {
      if (!map.is_internal[static_cast<size_t>(b)]) continue;
      if (grid_.buses()[static_cast<size_t>(b)].kind != BusKind::Generator)
        continue;
      map.gen_buses.push_back(b);
      map.swing_slot.push_back(
          swing_slot_of_machine_[static_cast<size_t>(grid_.machine_at(b))]);
      map.col_theta[static_cast<size_t>(b)] = col++;
      map.col_omega[static_cast<size_t>(b)] = col++;
    }
    for (int b = 0; b < n; ++b) {
      if (!map.is_internal[static_cast<size_t>(b)]) continue;
      if (grid_.buses()[static_cast<size_t>(b)].kind != BusKind::Load)
        continue;
      map.load_buses.push_back(b);
      map.col_v[static_cast<size_t>(b)] = col++;
      map.col_theta[static_cast<size_t>(b)] = col++;
    }
    map.n_unknowns = col;

    for (int e = 0; e < n; ++e) {
      if (map.is_internal[static_cast<size_t>(e)]) continue;
      if (e == grid_.slack_pos()) continue;  // pinned, never a waveform value
      bool coupled = false;
      for (int b : map.gen_buses)
        coupled = coupled || ybus_.g(b, e) != 0.0 || ybus_.b(b, e) != 0.0;
      for (int b : map.load_buses)
        coupled = coupled || ybus_.g(b, e) != 0.0 || ybus_.b(b, e) != 0.0;
      if (coupled) map.required_external.push_back(e);
    }
    return map;
  }

  Eigen::VectorXd residual(const UnknownIndexMap& map,
                           const StepResidualContext& ctx,
                           const Eigen::VectorXd& x) const {
    Eigen::VectorXd v, th;
    fill_bus_values(map, ctx, x, v, th);
    Eigen::VectorXd r(map.n_unknowns);
    const double h = ctx.h;
    for (size_t slot = 0; slot < map.gen_buses.size(); ++slot) {
      const int b = map.gen_buses[slot];
      const int sm = map.swing_slot[slot];
      const int machine = grid_.swing_machines()[static_cast<size_t>(sm)];
      const double m_const = grid_.machine_m(machine);
      const double omega_next = x[map.col_omega[static_cast<size_t>(b)]];
      const double pe = ctx.p_load[b] + v[b] * p_sum(b, v, th);
      const int row = map.col_theta[static_cast<size_t>(b)];
      r[row] = th[b] - ctx.prev_delta[sm] - h * (omega_next - grid_.omega_s());
      r[row + 1] = omega_next - ctx.prev_omega[sm] -
                   (h / m_const) * (ctx.pm[sm] - pe);
    }
    for (int b : map.load_buses) {
      const int row = map.col_v[static_cast<size_t>(b)];
      r[row] = ctx.p_load[b] + v[b] * p_sum(b, v, th);
      r[row + 1] = ctx.q_load[b] + v[b] * q_sum(b, v, th);
    }
    return r;
  }

  Eigen::MatrixXd jacobian(const UnknownIndexMap& map,
                           const StepResidualContext& ctx,
                           const Eigen::VectorXd& x) const {
    Eigen::VectorXd v, th;
    fill_bus_values(map, ctx, x, v, th);
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(map.n_unknowns, map.n_unknowns);
    const double h = ctx.h;
    for (size_t slot = 0; slot < map.gen_buses.size(); ++slot) {
      const int b = map.gen_buses[slot];
      const int machine = grid_.swing_machines()[static_cast<size_t>(
          map.swing_slot[slot])];
      const double scale = h / grid_.machine_m(machine);
      const int row = map.col_theta[static_cast<size_t>(b)];
      j(row, row) = 1.0;
      j(row, map.col_omega[static_cast<size_t>(b)]) = -h;
      const int wrow = row + 1;
      j(wrow, map.col_omega[static_cast<size_t>(b)]) = 1.0;
      add_p_partials(map, b, v, th, scale, wrow, j);
    }
    for (int b : map.load_buses) {
      const int prow = map.col_v[static_cast<size_t>(b)];
      add_p_partials(map, b, v, th, 1.0, prow, j);
      add_q_partials(map, b, v, th, 1.0, prow + 1, j);
    }
    return j;
  }

  Eigen::VectorXd residual_full(const StepResidualContext& ctx,
                                const Eigen::VectorXd& x) const {
    return residual(full_map_, ctx, x);
  }
  Eigen::MatrixXd jacobian_full(const StepResidualContext& ctx,
                                const Eigen::VectorXd& x) const {
    return jacobian(full_map_, ctx, x);
  }
  Eigen::VectorXd residual_subsystem(const StepResidualContext& ctx,
                                     const Partition& part, int index,
                                     const Eigen::VectorXd& x) const {
    return residual(subsystem_map(part, index), ctx, x);
  }
  Eigen::MatrixXd jacobian_subsystem(const StepResidualContext& ctx,
                                     const Partition& part, int index,
                                     const Eigen::VectorXd& x) const {
    return jacobian(subsystem_map(part, index), ctx, x);
  }

  /// Machine P/Q outputs implied by a full bus voltage profile and the
  /// effective loads at the same instant, in grid machine order.
  void recover_outputs(const Eigen::VectorXd& v, const Eigen::VectorXd& th,
                       const Eigen::VectorXd& p_load_eff,
                       const Eigen::VectorXd& q_load_eff,
                       Eigen::VectorXd& pe_out,
                       Eigen::VectorXd& qe_out) const {
    const auto& order = grid_.machine_order();
    pe_out.resize(static_cast<Eigen::Index>(order.size()));
    qe_out.resize(static_cast<Eigen::Index>(order.size()));
    for (size_t i = 0; i < order.size(); ++i) {
      const int b = grid_.bus_pos(
          grid_.generators()[static_cast<size_t>(order[i])].bus);
      pe_out[static_cast<Eigen::Index>(i)] =
          p_load_eff[b] + v[b] * p_sum(b, v, th);
      qe_out[static_cast<Eigen::Index>(i)] =
          q_load_eff[b] + v[b] * q_sum(b, v, th);
    }
  }

  /// Pulls the unknowns of `map` out of a full bus profile (warm starts).
  Eigen::VectorXd pack(const UnknownIndexMap& map, const Eigen::VectorXd& v,
                       const Eigen::VectorXd& th,
                       const Eigen::VectorXd& omega_swing) const {
    Eigen::VectorXd x(map.n_unknowns);
    for (size_t slot = 0; slot < map.gen_buses.size(); ++slot) {
      const int b = map.gen_buses[slot];
      x[map.col_theta[static_cast<size_t>(b)]] = th[b];
      x[map.col_omega[static_cast<size_t>(b)]] =
          omega_swing[map.swing_slot[slot]];
    }
    for (int b : map.load_buses) {
      x[map.col_v[static_cast<size_t>(b)]] = v[b];
      x[map.col_theta[static_cast<size_t>(b)]] = th[b];
    }
    return x;
  }

  /// Writes the unknowns of `map` back into full bus arrays; only internal
  /// positions are touched.
  void unpack(const UnknownIndexMap& map, const Eigen::VectorXd& x,
              Eigen::VectorXd& v, Eigen::VectorXd& th,
              Eigen::VectorXd& omega_swing) const {
    for (size_t slot = 0; slot < map.gen_buses.size(); ++slot) {
      const int b = map.gen_buses[slot];
      th[b] = x[map.col_theta[static_cast<size_t>(b)]];
      omega_swing[map.swing_slot[slot]] =
          x[map.col_omega[static_cast<size_t>(b)]];
    }
    for (int b : map.load_buses) {
      v[b] = x[map.col_v[static_cast<size_t>(b)]];
      th[b] = x[map.col_theta[static_cast<size_t>(b)]];
    }
  }

 private:
  // Resolves every bus to (V, theta) at t+1: pinned values for slack and
  // generator magnitudes, unknowns for internal buses, frozen externals
  // otherwise. Uncoupled externals may be absent; they only ever multiply
  // zero admittance entries, so any finite placeholder works.
  void fill_bus_values(const UnknownIndexMap& map,
                       const StepResidualContext& ctx,
                       const Eigen::VectorXd& x, Eigen::VectorXd& v,
                       Eigen::VectorXd& th) const {
    if (x.size() != map.n_unknowns)
      throw DimensionMismatch("unknown vector length mismatch");
    if (!(ctx.h > 0.0)) throw ConfigError("step size must be positive");
    const int n = grid_.n();
    for (int e : map.required_external)
      if (ctx.ext_valid.empty() || !ctx.ext_valid[static_cast<size_t>(e)])
        throw MissingExternalValue(grid_.buses()[static_cast<size_t>(e)].id);
    v.resize(n);
    th.resize(n);
    const bool have_ext = !ctx.ext_valid.empty();
    for (int b = 0; b < n; ++b) {
      const Bus& bus = grid_.buses()[static_cast<size_t>(b)];
      const bool ext =
          have_ext && ctx.ext_valid[static_cast<size_t>(b)] != 0;
      switch (bus.kind) {
        case BusKind::Slack:
          v[b] = bus.v0;
          th[b] = bus.delta0;
          break;
        case BusKind::Generator:
          v[b] = bus.v0;
          if (map.col_theta[static_cast<size_t>(b)] >= 0)
            th[b] = x[map.col_theta[static_cast<size_t>(b)]];
          else
            th[b] = ext ? ctx.ext_theta[b] : bus.delta0;
          break;
        case BusKind::Load:
          if (map.col_v[static_cast<size_t>(b)] >= 0) {
            v[b] = x[map.col_v[static_cast<size_t>(b)]];
            th[b] = x[map.col_theta[static_cast<size_t>(b)]];
          } else if (ext) {
            v[b] = ctx.ext_v[b];
            th[b] = ctx.ext_theta[b];
          } else {
            v[b] = bus.v0;
            th[b] = bus.delta0;
          }
          break;
      }
    }
  }

  double p_sum(int b, const Eigen::VectorXd& v,
               const Eigen::VectorXd& th) const {
    double acc = 0.0;
    for (int j = 0; j < grid_.n(); ++j) {
      const double d = th[b] - th[j];
      acc += v[j] * (ybus_.b(b, j) * std::sin(d) + ybus_.g(b, j) * std::cos(d));
    }
    return acc;
  }

  double q_sum(int b, const Eigen::VectorXd& v,
               const Eigen::VectorXd& th) const {
    double acc = 0.0;
    for (int j = 0; j < grid_.n(); ++j) {
      const double d = th[b] - th[j];
      acc += v[j] * (ybus_.g(b, j) * std::sin(d) - ybus_.b(b, j) * std::cos(d));
    }
    return acc;
  }

  // d(scale * P_inj(b))/d(unknowns) added into row `row`.
  void add_p_partials(const UnknownIndexMap& map, int b,
                      const Eigen::VectorXd& v, const Eigen::VectorXd& th,
                      double scale, int row, Eigen::MatrixXd& j) const {
    const int ct_b = map.col_theta[static_cast<size_t>(b)];
    const int cv_b = map.col_v[static_cast<size_t>(b)];
    double dtheta_self = 0.0;
    for (int q = 0; q < grid_.n(); ++q) {
      if (q == b) continue;
      const double d = th[b] - th[q];
      const double gc = ybus_.g(b, q) * std::cos(d);
      const double gs = ybus_.g(b, q) * std::sin(d);
      const double bc = ybus_.b(b, q) * std::cos(d);
      const double bs = ybus_.b(b, q) * std::sin(d);
      dtheta_self += v[q] * (bc - gs);
      const int ct_q = map.col_theta[static_cast<size_t>(q)];
      if (ct_q >= 0) j(row, ct_q) += scale * v[b] * v[q] * (gs - bc);
      const int cv_q = map.col_v[static_cast<size_t>(q)];
      if (cv_q >= 0) j(row, cv_q) += scale * v[b] * (gc + bs);
    }
    if (ct_b >= 0) j(row, ct_b) += scale * v[b] * dtheta_self;
    if (cv_b >= 0)
      j(row, cv_b) += scale * (p_sum(b, v, th) + v[b] * ybus_.g(b, b));
  }

  // d(scale * Q_inj(b))/d(unknowns) added into row `row`.
  void add_q_partials(const UnknownIndexMap& map, int b,
                      const Eigen::VectorXd& v, const Eigen::VectorXd& th,
                      double scale, int row, Eigen::MatrixXd& j) const {
    const int ct_b = map.col_theta[static_cast<size_t>(b)];
    const int cv_b = map.col_v[static_cast<size_t>(b)];
    double dtheta_self = 0.0;
    for (int q = 0; q < grid_.n(); ++q) {
      if (q == b) continue;
      const double d = th[b] - th[q];
      const double gc = ybus_.g(b, q) * std::cos(d);
      const double gs = ybus_.g(b, q) * std::sin(d);
      const double bc = ybus_.b(b, q) * std::cos(d);
      const double bs = ybus_.b(b, q) * std::sin(d);
      dtheta_self += v[q] * (gc + bs);
      const int ct_q = map.col_theta[static_cast<size_t>(q)];
      if (ct_q >= 0) j(row, ct_q) += scale * (-v[b] * v[q] * (gc + bs));
      const int cv_q = map.col_v[static_cast<size_t>(q)];
      if (cv_q >= 0) j(row, cv_q) += scale * v[b] * (gs - bc);
    }
    if (ct_b >= 0) j(row, ct_b) += scale * v[b] * dtheta_self;
    if (cv_b >= 0)
      j(row, cv_b) += scale * (q_sum(b, v, th) - v[b] * ybus_.b(b, b));
  }

  GridModel grid_;
  AdmittanceMatrix ybus_;
  std::vector<int> swing_slot_of_machine_;
  UnknownIndexMap full_map_;
};

}  // namespace wrsim

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "wrsim/errors.hpp"

namespace wrsim {

enum class BusKind { Slack, Generator, Load };

/// Static bus record. v0/delta0 are the values pinned during dynamics for
/// slack and generator buses; for load buses they only seed initial guesses.
struct Bus {
  int id = 0;            // external 1-based id, unique
  BusKind kind = BusKind::Load;
  double p_load = 0.0;   // pu on system base
  double q_load = 0.0;
  double v0 = 1.0;       // pu
  double delta0 = 0.0;   // rad
};

/// Pi-model branch. tap != 1 puts the off-nominal turns ratio on the from
/// side; b_charging is the total line charging susceptance.
struct Branch {
  int from = 0;
  int to = 0;
  double r = 0.0;
  double x = 0.0;
  double b_charging = 0.0;
  double tap = 1.0;
};

/// Machine at a slack or generator bus. p_mech is assigned from the initial
/// operating point before dynamic simulation and stays constant afterwards.
struct Generator {
  int bus = 0;
  double p_dispatch = 0.0;  // scheduled active output, pu
  double inertia_h = 0.0;   // s, on system base
  double p_mech = 0.0;      // pu, set by init_dynamic_state
};

/// Dense nodal admittance matrix split into conductance and susceptance.
struct AdmittanceMatrix {
  Eigen::MatrixXd g;
  Eigen::MatrixXd b;
};

enum class DisturbanceKind { DisconnectLoad, ScaleLoad };

/// Load event active on the half-open interval [t_start, t_end).
struct Disturbance {
  DisturbanceKind kind = DisturbanceKind::DisconnectLoad;
  int bus = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  double factor = 1.0;  // ScaleLoad only
};

/// Disjoint bus groups covering every bus exactly once.
struct Partition {
  std::string name;
  std::vector<std::vector<int>> groups;  // external bus ids

  int size() const { return static_cast<int>(groups.size()); }
};

struct PartitionViolation {
  enum Kind { UnknownBus, DuplicateBus, MissingBus, EmptyGroup } kind;
  int bus = 0;     // offending bus id, 0 for EmptyGroup
  int group = -1;  // group index when applicable
  std::string message;
};

/// Immutable network description with index lookups precomputed.
///
/// Ordering rules used throughout: buses keep their input order, machines
/// are sorted by bus position, "swing" machines are those at Generator
/// buses (the slack machine, if present, is excluded from swing dynamics).
class GridModel {
 public:
  GridModel() = default;

  GridModel(std::vector<Bus> buses, std::vector<Branch> branches,
            std::vector<Generator> generators, double mva_base = 100.0,
            double frequency_hz = 60.0)
      : buses_(std::move(buses)),
        branches_(std::move(branches)),
        generators_(std::move(generators)),
        mva_base_(mva_base),
        omega_s_(2.0 * M_PI * frequency_hz) {
    validate_and_index();
  }

  int n() const { return static_cast<int>(buses_.size()); }
  const std::vector<Bus>& buses() const { return buses_; }
  const std::vector<Branch>& branches() const { return branches_; }
  const std::vector<Generator>& generators() const { return generators_; }
  double mva_base() const { return mva_base_; }
  double omega_s() const { return omega_s_; }

  /// 0-based position of a bus id; throws UnknownBusReference.
  int bus_pos(int id) const {
    auto it = pos_of_id_.find(id);
    if (it == pos_of_id_.end()) throw UnknownBusReference(id);
    return it->second;
  }
  bool has_bus(int id) const { return pos_of_id_.count(id) != 0; }

  int slack_pos() const { return slack_pos_; }
  int slack_id() const { return buses_[slack_pos_].id; }

  /// Bus positions of kind Generator, ascending.
  const std::vector<int>& gen_bus_pos() const { return gen_bus_pos_; }
  /// Non-slack bus positions of kind Load, ascending.
  const std::vector<int>& load_bus_pos() const { return load_bus_pos_; }

  /// All machines sorted by bus position (slack machine included).
  const std::vector<int>& machine_order() const { return machine_order_; }
  /// Machines at Generator buses, sorted by bus position. Index into
  /// generators().
  const std::vector<int>& swing_machines() const { return swing_machines_; }

  /// Machine index at bus position, or -1.
  int machine_at(int bus_position) const {
    return machine_at_[static_cast<size_t>(bus_position)];
  }

  /// M = 2 H / omega_s for a machine.
  double machine_m(int machine_index) const {
    return 2.0 * generators_[static_cast<size_t>(machine_index)].inertia_h /
           omega_s_;
  }

  /// Copy with mechanical powers assigned per machine (machine order of
  /// generators()).
  GridModel with_p_mech(const Eigen::VectorXd& pm) const {
    if (pm.size() != static_cast<Eigen::Index>(generators_.size()))
      throw DimensionMismatch("p_mech length does not match machine count");
    GridModel out = *this;
    for (Eigen::Index i = 0; i < pm.size(); ++i)
      out.generators_[static_cast<size_t>(i)].p_mech = pm[i];
    return out;
  }

 private:
  void validate_and_index() {
    if (buses_.empty()) throw ConfigError("network has no buses");
    int slack_count = 0;
    for (size_t p = 0; p < buses_.size(); ++p) {
      const Bus& b = buses_[p];
      if (!pos_of_id_.emplace(b.id, static_cast<int>(p)).second)
        throw ConfigError("duplicate bus id " + std::to_string(b.id));
      if (b.kind == BusKind::Slack) {
        slack_pos_ = static_cast<int>(p);
        ++slack_count;
      }
      if (b.v0 <= 0.0)
        throw ConfigError("bus " + std::to_string(b.id) +
                          " has non-positive v0");
    }
    if (slack_count != 1)
      throw ConfigError("network must have exactly one slack bus, found " +
                        std::to_string(slack_count));
    for (const Branch& br : branches_) {
      if (!pos_of_id_.count(br.from)) throw UnknownBusReference(br.from);
      if (!pos_of_id_.count(br.to)) throw UnknownBusReference(br.to);
      if (br.r == 0.0 && br.x == 0.0) throw ZeroImpedance(br.from, br.to);
      if (br.tap <= 0.0)
        throw ConfigError("branch " + std::to_string(br.from) + "-" +
                          std::to_string(br.to) + " has non-positive tap");
    }

    machine_at_.assign(buses_.size(), -1);
    for (size_t m = 0; m < generators_.size(); ++m) {
      const Generator& g = generators_[m];
      int p = bus_pos(g.bus);
      BusKind k = buses_[static_cast<size_t>(p)].kind;
      if (k == BusKind::Load)
        throw ConfigError("machine at bus " + std::to_string(g.bus) +
                          " which is a load bus");
      if (machine_at_[static_cast<size_t>(p)] != -1)
        throw ConfigError("two machines at bus " + std::to_string(g.bus));
      if (g.inertia_h <= 0.0)
        throw ConfigError("machine at bus " + std::to_string(g.bus) +
                          " has non-positive inertia");
      machine_at_[static_cast<size_t>(p)] = static_cast<int>(m);
    }

    for (size_t p = 0; p < buses_.size(); ++p) {
      switch (buses_[p].kind) {
        case BusKind::Generator:
          if (machine_at_[p] < 0)
            throw ConfigError("generator bus " + std::to_string(buses_[p].id) +
                              " has no machine");
          gen_bus_pos_.push_back(static_cast<int>(p));
          break;
        case BusKind::Load:
          load_bus_pos_.push_back(static_cast<int>(p));
          break;
        case BusKind::Slack:
          break;
      }
      if (machine_at_[p] >= 0) {
        machine_order_.push_back(machine_at_[p]);
        if (buses_[p].kind == BusKind::Generator)
          swing_machines_.push_back(machine_at_[p]);
      }
    }
  }

  std::vector<Bus> buses_;
  std::vector<Branch> branches_;
  std::vector<Generator> generators_;
  double mva_base_ = 100.0;
  double omega_s_ = 2.0 * M_PI * 60.0;

  std::map<int, int> pos_of_id_;
  int slack_pos_ = -1;
  std::vector<int> gen_bus_pos_;
  std::vector<int> load_bus_pos_;
  std::vector<int> machine_order_;
  std::vector<int> swing_machines_;
  std::vector<int> machine_at_;
};

/// Dense Y-bus from pi-model branches. For a branch with series admittance
/// y = 1/(r+jx), tap a and total charging b: from-diagonal gains y/a^2 +
/// j b/2, to-diagonal gains y + j b/2, both off-diagonals gain -y/a.
inline AdmittanceMatrix build_ybus(const GridModel& grid) {
  const int n = grid.n();
  AdmittanceMatrix y;
  y.g = Eigen::MatrixXd::Zero(n, n);
  y.b = Eigen::MatrixXd::Zero(n, n);
  for (const Branch& br : grid.branches()) {
    const int f = grid.bus_pos(br.from);
    const int t = grid.bus_pos(br.to);
    const double den = br.r * br.r + br.x * br.x;
    const double gs = br.r / den;
    const double bs = -br.x / den;
    const double a = br.tap;
    y.g(f, f) += gs / (a * a);
    y.b(f, f) += bs / (a * a) + br.b_charging / 2.0;
    y.g(t, t) += gs;
    y.b(t, t) += bs + br.b_charging / 2.0;
    y.g(f, t) -= gs / a;
    y.b(f, t) -= bs / a;
    y.g(t, f) -= gs / a;
    y.b(t, f) -= bs / a;
  }
  return y;
}

/// Load vectors at time t with disturbances applied. Intervals are
/// half-open: active when t_start <= t < t_end.
inline void effective_load(const GridModel& grid,
                           const std::vector<Disturbance>& disturbances,
                           double t, Eigen::VectorXd& p_out,
                           Eigen::VectorXd& q_out) {
  const int n = grid.n();
  p_out.resize(n);
  q_out.resize(n);
  for (int i = 0; i < n; ++i) {
    p_out[i] = grid.buses()[static_cast<size_t>(i)].p_load;
    q_out[i] = grid.buses()[static_cast<size_t>(i)].q_load;
  }
  for (const Disturbance& d : disturbances) {
    if (t < d.t_start || t >= d.t_end) continue;
    const int p = grid.bus_pos(d.bus);
    switch (d.kind) {
      case DisturbanceKind::DisconnectLoad:
        p_out[p] = 0.0;
        q_out[p] = 0.0;
        break;
      case DisturbanceKind::ScaleLoad:
        p_out[p] *= d.factor;
        q_out[p] *= d.factor;
        break;
    }
  }
}

/// Checks that a partition covers every bus exactly once with no unknown
/// ids and no empty groups. Returns all violations found.
inline std::vector<PartitionViolation> validate_partition(
    const Partition& part, const GridModel& grid) {
  std::vector<PartitionViolation> out;
  std::map<int, int> seen;  // bus id -> first group
  for (int g = 0; g < part.size(); ++g) {
    const auto& group = part.groups[static_cast<size_t>(g)];
    if (group.empty()) {
      out.push_back({PartitionViolation::EmptyGroup, 0, g,
                     "group " + std::to_string(g) + " is empty"});
      continue;
    }
    for (int id : group) {
      if (!grid.has_bus(id)) {
        out.push_back({PartitionViolation::UnknownBus, id, g,
                       "group " + std::to_string(g) + " references unknown bus " +
                           std::to_string(id)});
        continue;
      }
      auto ins = seen.emplace(id, g);
      if (!ins.second)
        out.push_back({PartitionViolation::DuplicateBus, id, g,
                       "bus " + std::to_string(id) + " appears in groups " +
                           std::to_string(ins.first->second) + " and " +
                           std::to_string(g)});
    }
  }
  for (const Bus& b : grid.buses()) {
    if (!seen.count(b.id))
      out.push_back({PartitionViolation::MissingBus, b.id, -1,
                     "bus " + std::to_string(b.id) + " is in no group"});
  }
  return out;
}

/// Throwing wrapper around validate_partition.
inline void require_valid_partition(const Partition& part,
                                    const GridModel& grid) {
  auto v = validate_partition(part, grid);
  if (!v.empty()) throw ConfigError("invalid partition: " + v.front().message);
}

/// Single group holding the whole network.
inline Partition whole_network_partition(const GridModel& grid) {
  Partition p;
  p.name = "whole";
  p.groups.emplace_back();
  for (const Bus& b : grid.buses()) p.groups.back().push_back(b.id);
  return p;
}

namespace detail {

/// Buses 1..39 not in any of the given groups, ascending.
inline std::vector<int> rest_of_39(
    const std::vector<std::vector<int>>& groups) {
  std::vector<int> rest;
  for (int id = 1; id <= 39; ++id) {
    bool taken = false;
    for (const auto& g : groups)
      if (std::find(g.begin(), g.end(), id) != g.end()) taken = true;
    if (!taken) rest.push_back(id);
  }
  return rest;
}

}  // namespace detail

/// Built-in 39-bus decompositions for the benchmark, keyed "table2-2" ..
/// "table2-7" by subsystem count. Group order is the sweep order for
/// sequential relaxation; the last group always holds the remaining buses.
inline Partition named_partition(const std::string& name) {
  Partition p;
  p.name = name;
  if (name == "table2-2") {
    p.groups = {{1, 2, 9, 25, 30, 37}};
  } else if (name == "table2-3") {
    p.groups = {{1, 2, 25, 30, 37}, {22, 23, 35, 36}};
  } else if (name == "table2-4") {
    p.groups = {{1, 2, 25, 30, 37, 39},
                {19, 20, 33, 34},
                {21, 22, 23, 24, 35, 36}};
  } else if (name == "table2-5") {
    p.groups = {{38, 29, 28, 26, 27, 17, 15, 14, 16, 24},
                {39, 1, 2, 30, 25, 37},
                {18, 3, 4, 5, 6, 7, 8, 9, 31, 11, 12, 13, 10, 32},
                {19, 20, 33, 34}};
  } else if (name == "table2-6") {
    p.groups = {{38, 29, 28, 26, 27, 17},
                {37, 25, 2, 30, 1, 39, 3, 18},
                {4, 5, 6, 7, 8, 9, 31, 11, 12, 10, 32, 13},
                {19, 20, 33, 34},
                {23, 24, 36}};
  } else if (name == "table2-7") {
    p.groups = {{1, 2, 25, 30, 37, 39},
                {38, 29, 28, 26, 27},
                {36, 23, 24, 16, 21, 22, 35},
                {19, 20, 33, 34},
                {11, 12, 13, 10, 32},
                {6, 31, 4, 5, 7, 8, 9}};
  } else {
    throw ConfigError("unknown partition preset " + name);
  }
  p.groups.push_back(detail::rest_of_39(p.groups));
  return p;
}

}  // namespace wrsim

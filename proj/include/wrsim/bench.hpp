#pragma once

#include <Eigen/Core>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "wrsim/io.hpp"
#include "wrsim/metrics.hpp"
#include "wrsim/sim_di.hpp"
#include "wrsim/sim_wr.hpp"
#include "wrsim/sim_wrw.hpp"

namespace wrsim {

struct BenchOptions {
  std::vector<std::string> presets = {"table2-2", "table2-3", "table2-4",
                                      "table2-5", "table2-6", "table2-7"};
  std::vector<double> horizons = {5.0, 10.0, 15.0, 20.0};
  int workers = 0;
  bool relative_angles = false;  // percent errors of angles on the
                                 // slack-referenced series instead of raw
};

struct BenchTimingRow {
  std::string preset;
  int p = 0;
  double wr_time = 0.0;   // parallel-time metric
  double wrw_time = 0.0;  // parallel-time metric
  int wr_iterations = 0;
  int wrw_total_iterations = 0;
  bool wr_ok = false;
  bool wrw_ok = false;
  std::string note;
};

struct BenchErrorRow {
  std::string variable;
  ErrorReport wr;
  ErrorReport wrw;
  bool wr_ok = false;  // a stat column is meaningful only if its run finished
  bool wrw_ok = false;
};

struct BenchReport {
  double di_time = 0.0;
  std::vector<BenchTimingRow> timings;
  std::vector<BenchErrorRow> errors;  // vs the scenario partition runs
  std::vector<HorizonRow> horizon;
  double wrw_avg_window_parallel = 0.0;
  double wrw_avg_window_wall = 0.0;
  std::string error_partition;
};

namespace detail {

inline std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  return os;
}

/// Failure notes carry solver messages with embedded commas.
inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline void write_error_row(std::ofstream& os, const BenchErrorRow& row) {
  os << row.variable << "," << (row.wr_ok ? 1 : 0) << ","
     << format_g17(row.wr.min_abs_pct) << ","
     << format_g17(row.wr.max_abs_pct) << ","
     << format_g17(row.wr.avg_abs_pct) << "," << (row.wrw_ok ? 1 : 0) << ","
     << format_g17(row.wrw.min_abs_pct) << ","
     << format_g17(row.wrw.max_abs_pct) << ","
     << format_g17(row.wrw.avg_abs_pct) << "," << row.wr.excluded << ","
     << row.wrw.excluded << "\n";
}

}  // namespace detail

/// Full reproduction suite on one scenario: reference run, solve-time table
/// over the named presets, error statistics against the reference, horizon
/// sweep, per-window averages. Individual WR/WRW failures are recorded in
/// their row; only a reference-run failure propagates. Writes
/// bench_timings.csv, bench_errors.csv, bench_horizon.csv and
/// bench_summary.json under out_dir.
inline BenchReport bench_paper(const GridModel& grid, const Scenario& sc,
                               const std::string& out_dir,
                               const BenchOptions& opt = {}) {
  BenchReport rep;
  rep.error_partition =
      sc.partition_ref.empty() ? "table2-3" : sc.partition_ref;

  auto [di_traj, di_stats] = simulate_di(grid, sc);
  rep.di_time = di_stats.total_solve_time;

  std::optional<Trajectory> err_wr_traj, err_wrw_traj;
  WrStats err_wr_stats;
  WrwStats err_wrw_stats;

  auto run_pair = [&](const std::string& name, const Partition& part) {
    BenchTimingRow row;
    row.preset = name;
    row.p = part.size();
    std::optional<Trajectory> wr_traj, wrw_traj;
    try {
      auto [traj, st] = simulate_wr(grid, sc, part, sc.mode, sc.wr_eps,
                                    sc.wr_k_max, opt.workers);
      row.wr_time = st.parallel_time;
      row.wr_iterations = st.iterations;
      row.wr_ok = true;
      wr_traj = std::move(traj);
      if (name == rep.error_partition) err_wr_stats = std::move(st);
    } catch (const SimError& e) {
      detail::append_note(row.note, "wr: ", e.what());
    }
    try {
      auto [traj, st] =
          simulate_wrw(grid, sc, part,
                       make_window_plan(sc.t_win, sc.t_end, sc.h), sc.mode,
                       sc.wr_eps, sc.wr_k_max, opt.workers);
      row.wrw_time = st.parallel_time;
      row.wrw_total_iterations = st.total_iterations;
      row.wrw_ok = true;
      wrw_traj = std::move(traj);
      if (name == rep.error_partition) err_wrw_stats = std::move(st);
    } catch (const SimError& e) {
      detail::append_note(row.note, "wrw: ", e.what());
    }
    if (name == rep.error_partition) {
      err_wr_traj = std::move(wr_traj);
      err_wrw_traj = std::move(wrw_traj);
    }
    rep.timings.push_back(std::move(row));
  };

  bool error_partition_seen = false;
  for (const std::string& name : opt.presets) {
    run_pair(name, resolve_partition(name, grid));
    error_partition_seen =
        error_partition_seen || name == rep.error_partition;
  }
  if (!error_partition_seen)
    run_pair(rep.error_partition,
             resolve_partition(rep.error_partition, grid));

  if (err_wr_traj || err_wrw_traj) {
    const std::vector<std::pair<VarKind, const char*>> kinds = {
        {VarKind::GenDelta, "delta"},
        {VarKind::GenOmega, "omega"},
        {VarKind::GenPe, "pe"}};
    for (auto [kind, label] : kinds) {
      for (int bus : {36, 37, 38}) {
        BenchErrorRow row;
        row.variable = std::string(label) + "_" + std::to_string(bus);
        const bool rel = kind == VarKind::GenDelta && opt.relative_angles;
        if (rel) row.variable += "_rel";
        auto stats = [&](const Trajectory& t) {
          if (rel)
            return percent_error_series_stats(
                relative_rotor_angle(di_traj, bus),
                relative_rotor_angle(t, bus));
          return percent_error_stats(di_traj, t, {kind, bus});
        };
        if (err_wr_traj) {
          row.wr = stats(*err_wr_traj);
          row.wr_ok = true;
        }
        if (err_wrw_traj) {
          row.wrw = stats(*err_wrw_traj);
          row.wrw_ok = true;
        }
        rep.errors.push_back(std::move(row));
      }
    }
  }
  if (err_wrw_traj) {
    rep.wrw_avg_window_parallel = err_wrw_stats.avg_window_parallel();
    rep.wrw_avg_window_wall = err_wrw_stats.avg_window_wall();
  }

  rep.horizon = sweep_horizon(grid, sc,
                              resolve_partition(rep.error_partition, grid),
                              opt.horizons, opt.workers);

  const std::string dir = out_dir.empty() ? "." : out_dir;
  std::filesystem::create_directories(dir);
  {
    auto os = detail::open_out(dir + "/bench_timings.csv");
    os << "preset,p,wr_time,wrw_time,wr_iterations,wrw_total_iterations,"
          "wr_ok,wrw_ok,note\n";
    os << "di,1," << format_g17(rep.di_time) << "," << format_g17(rep.di_time)
       << ",,,1,1,reference wall time\n";
    for (const auto& r : rep.timings)
      os << r.preset << "," << r.p << "," << format_g17(r.wr_time) << ","
         << format_g17(r.wrw_time) << "," << r.wr_iterations << ","
         << r.wrw_total_iterations << "," << (r.wr_ok ? 1 : 0) << ","
         << (r.wrw_ok ? 1 : 0) << "," << detail::csv_quote(r.note) << "\n";
  }
  {
    auto os = detail::open_out(dir + "/bench_errors.csv");
    os << "variable,wr_ok,wr_min_abs_pct,wr_max_abs_pct,wr_avg_abs_pct,"
          "wrw_ok,wrw_min_abs_pct,wrw_max_abs_pct,wrw_avg_abs_pct,"
          "wr_excluded,wrw_excluded\n";
    for (const auto& r : rep.errors) detail::write_error_row(os, r);
  }
  {
    auto os = detail::open_out(dir + "/bench_horizon.csv");
    os << "T,di_time,wr_time,wrw_time,di_ok,wr_ok,wrw_ok,note\n";
    for (const auto& r : rep.horizon)
      os << format_g17(r.t_end) << "," << format_g17(r.di_time) << ","
         << format_g17(r.wr_time) << "," << format_g17(r.wrw_time) << ","
         << (r.di_ok ? 1 : 0) << "," << (r.wr_ok ? 1 : 0) << ","
         << (r.wrw_ok ? 1 : 0) << "," << detail::csv_quote(r.note) << "\n";
  }
  {
    json j;
    j["di_time"] = rep.di_time;
    j["error_partition"] = rep.error_partition;
    j["wrw_avg_window_parallel"] = rep.wrw_avg_window_parallel;
    j["wrw_avg_window_wall"] = rep.wrw_avg_window_wall;
    j["scenario"] = scenario_to_json(sc);
    j["machine"] = {
        {"hardware_threads", std::thread::hardware_concurrency()},
        {"compiler", __VERSION__},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                      std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)}};
    auto os = detail::open_out(dir + "/bench_summary.json");
    os << j.dump(2) << "\n";
  }
  return rep;
}

}  // namespace wrsim

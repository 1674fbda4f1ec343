// Command line front end: run one simulation, reproduce the benchmark
// tables, sweep the horizon, dump the initial operating point, or just
// validate a configuration.
//
// Exit codes: 0 success, 1 configuration problem, 2 solver divergence or
// numeric failure, 3 file I/O problem.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "wrsim/wrsim.hpp"

namespace fs = std::filesystem;
using namespace wrsim;

namespace {

struct Args {
  std::string scenario;
  std::string network;  // overrides the scenario's network path
  std::string method;
  std::string mode;
  std::string partition;
  double window = 0.0;  // overrides t_win when > 0
  double eps = 0.0;     // overrides wr eps when > 0
  std::string out = "out";
  int workers = -1;  // overrides when >= 0
  bool relative_angles = false;
};

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw IoError("cannot write " + p.string());
  return os;
}

/// Scenario file plus command line overrides, validated. Warnings go to
/// stderr so stdout stays machine-readable.
Scenario effective_scenario(const Args& a) {
  Scenario sc = load_scenario(a.scenario);
  if (!a.method.empty()) sc.method = parse_method(a.method);
  if (!a.mode.empty()) sc.mode = parse_mode(a.mode);
  if (!a.partition.empty()) sc.partition_ref = a.partition;
  if (!a.network.empty()) sc.network_path = a.network;
  if (a.window > 0.0) sc.t_win = a.window;
  if (a.eps > 0.0) sc.wr_eps = a.eps;
  if (a.workers >= 0) sc.workers = a.workers;
  for (const std::string& w : validate_scenario(sc))
    std::cerr << "warning: " << w << "\n";
  if (sc.network_path.empty())
    throw ConfigError(
        "no network file: set \"network\" in the scenario or pass --network");
  return sc;
}

json machine_info() {
  return {{"hardware_threads", std::thread::hardware_concurrency()},
          {"compiler", __VERSION__},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                        std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)}};
}

void write_metadata(const fs::path& dir, const Scenario& sc) {
  json j = scenario_to_json(sc);
  j["machine"] = machine_info();
  auto os = open_out(dir / "metadata.json");
  os << j.dump(2) << "\n";
}

void cmd_run(const Args& a) {
  Scenario sc = effective_scenario(a);
  GridModel grid = load_network(sc.network_path);
  Partition part = resolve_partition(sc.partition_ref, grid);
  fs::create_directories(a.out);
  const fs::path dir(a.out);

  Trajectory traj;
  if (sc.method == Method::Di) {
    auto [t, st] = simulate_di(grid, sc);
    traj = std::move(t);
    const long total_newton = std::accumulate(st.newton_iters.begin(),
                                              st.newton_iters.end(), 0L);
    {
      auto os = open_out(dir / "stats.csv");
      os << "method,steps,newton_iters,solve_time\n";
      os << "di," << traj.rows() - 1 << "," << total_newton << ","
         << format_g17(st.total_solve_time) << "\n";
    }
    {
      auto os = open_out(dir / "run_log.csv");
      os << "step,newton_iters\n";
      for (std::size_t i = 0; i < st.newton_iters.size(); ++i)
        os << i + 1 << "," << st.newton_iters[i] << "\n";
    }
    std::cout << "di: " << traj.rows() - 1 << " steps, "
              << total_newton << " corrector iterations, "
              << st.total_solve_time << " s solve time\n";
  } else if (sc.method == Method::Wr) {
    auto [t, st] = simulate_wr(grid, sc, part);
    traj = std::move(t);
    {
      auto os = open_out(dir / "stats.csv");
      os << "method,partition,p,mode,eps,k_max,iterations,converged,"
            "parallel_time\n";
      os << "wr," << part.name << "," << part.size() << ","
         << mode_name(sc.mode) << "," << format_g17(sc.wr_eps) << ","
         << sc.wr_k_max << "," << st.iterations << ","
         << (st.converged ? 1 : 0) << "," << format_g17(st.parallel_time)
         << "\n";
    }
    {
      auto os = open_out(dir / "run_log.csv");
      os << "k,delta";
      for (int i = 1; i <= part.size(); ++i) os << ",t_sub_" << i;
      os << "\n";
      for (int k = 0; k < st.iterations; ++k) {
        os << k + 1 << "," << format_g17(st.deltas[static_cast<size_t>(k)]);
        for (int i = 0; i < part.size(); ++i)
          os << "," << format_g17(st.subsystem_times(k, i));
        os << "\n";
      }
    }
    std::cout << "wr: " << st.iterations << " sweeps, parallel time "
              << st.parallel_time << " s\n";
  } else {
    auto [t, st] = simulate_wrw(grid, sc, part);
    traj = std::move(t);
    WindowPlan plan = make_window_plan(sc.t_win, sc.t_end, sc.h);
    int max_it = 0;
    for (int k : st.window_iterations) max_it = std::max(max_it, k);
    {
      auto os = open_out(dir / "stats.csv");
      os << "method,partition,p,mode,eps,k_max,windows,total_iterations,"
            "max_window_iterations,parallel_time,wall_time,"
            "avg_window_parallel\n";
      os << "wrw," << part.name << "," << part.size() << ","
         << mode_name(sc.mode) << "," << format_g17(sc.wr_eps) << ","
         << sc.wr_k_max << "," << plan.w_max << "," << st.total_iterations
         << "," << max_it << "," << format_g17(st.parallel_time) << ","
         << format_g17(st.wall_time) << ","
         << format_g17(st.avg_window_parallel()) << "\n";
    }
    {
      auto os = open_out(dir / "run_log.csv");
      os << "window,t_start,t_end,iterations,parallel,wall\n";
      for (size_t w = 0; w < st.window_iterations.size(); ++w)
        os << w + 1 << "," << format_g17(plan.bounds[w].first) << ","
           << format_g17(plan.bounds[w].second) << ","
           << st.window_iterations[w] << ","
           << format_g17(st.window_parallel[w]) << ","
           << format_g17(st.window_wall[w]) << "\n";
    }
    std::cout << "wrw: " << plan.w_max << " windows, "
              << st.total_iterations << " sweeps total, parallel time "
              << st.parallel_time << " s\n";
  }

  {
    auto os = open_out(dir / "trajectory.csv");
    write_trajectory_csv(traj, os);
  }
  write_metadata(dir, sc);
  std::cout << "outputs in " << dir.string() << "\n";
}

void cmd_bench(const Args& a) {
  Scenario sc = effective_scenario(a);
  GridModel grid = load_network(sc.network_path);
  BenchOptions opt;
  opt.workers = sc.workers;
  opt.relative_angles = a.relative_angles;
  BenchReport rep = bench_paper(grid, sc, a.out, opt);

  std::cout << "reference run: " << rep.di_time << " s\n";
  for (const auto& r : rep.timings) {
    std::cout << r.preset << " (p=" << r.p << "): wr ";
    if (r.wr_ok)
      std::cout << r.wr_time << " s / " << r.wr_iterations << " sweeps";
    else
      std::cout << "failed";
    std::cout << ", wrw ";
    if (r.wrw_ok)
      std::cout << r.wrw_time << " s / " << r.wrw_total_iterations
                << " sweeps";
    else
      std::cout << "failed";
    if (!r.note.empty()) std::cout << "  [" << r.note << "]";
    std::cout << "\n";
  }
  std::cout << "wrw avg window parallel time: "
            << rep.wrw_avg_window_parallel << " s\n";
  std::cout << "outputs in " << a.out << "\n";
}

void cmd_sweep(const Args& a) {
  Scenario sc = effective_scenario(a);
  GridModel grid = load_network(sc.network_path);
  Partition part = resolve_partition(sc.partition_ref, grid);
  const std::vector<double> horizons = {5.0, 10.0, 15.0, 20.0};
  auto rows = sweep_horizon(grid, sc, part, horizons, sc.workers);

  fs::create_directories(a.out);
  auto os = open_out(fs::path(a.out) / "horizon.csv");
  os << "T,di_time,wr_time,wrw_time,di_ok,wr_ok,wrw_ok,note\n";
  for (const auto& r : rows) {
    os << format_g17(r.t_end) << "," << format_g17(r.di_time) << ","
       << format_g17(r.wr_time) << "," << format_g17(r.wrw_time) << ","
       << (r.di_ok ? 1 : 0) << "," << (r.wr_ok ? 1 : 0) << ","
       << (r.wrw_ok ? 1 : 0) << "," << detail::csv_quote(r.note) << "\n";
    std::cout << "T=" << r.t_end << ": di " << r.di_time << " s, wr ";
    if (r.wr_ok)
      std::cout << r.wr_time << " s";
    else
      std::cout << "failed";
    std::cout << ", wrw ";
    if (r.wrw_ok)
      std::cout << r.wrw_time << " s";
    else
      std::cout << "failed";
    std::cout << "\n";
  }
  std::cout << "table in " << (fs::path(a.out) / "horizon.csv").string()
            << "\n";
}

void cmd_dump_init(const Args& a) {
  GridModel grid = [&] {
    if (!a.scenario.empty()) {
      Scenario sc = effective_scenario(a);
      return load_network(sc.network_path);
    }
    if (a.network.empty())
      throw ConfigError("dump-init needs --scenario or --network");
    return load_network(a.network);
  }();
  AdmittanceMatrix ybus = build_ybus(grid);
  PowerFlowSolution pf = solve_powerflow(grid, ybus);
  InitialState init = init_dynamic_state(grid, pf);

  fs::create_directories(a.out);
  auto os = open_out(fs::path(a.out) / "init.csv");
  os << "bus,kind,v,theta,p_load,q_load,pe,qe,p_mech\n";
  const auto& gens = init.grid.generators();
  for (int pos = 0; pos < grid.n(); ++pos) {
    const Bus& b = grid.buses()[static_cast<size_t>(pos)];
    os << b.id << ","
       << (b.kind == BusKind::Slack
               ? "slack"
               : b.kind == BusKind::Generator ? "generator" : "load")
       << "," << format_g17(pf.v[pos]) << "," << format_g17(pf.theta[pos])
       << "," << format_g17(b.p_load) << "," << format_g17(b.q_load);
    int machine = -1;
    const auto& order = grid.machine_order();
    for (size_t m = 0; m < order.size(); ++m)
      if (gens[static_cast<size_t>(order[m])].bus == b.id)
        machine = static_cast<int>(m);
    if (machine >= 0) {
      const auto mi = static_cast<Eigen::Index>(machine);
      os << "," << format_g17(pf.pe[mi]) << "," << format_g17(pf.qe[mi])
         << ","
         << format_g17(
                gens[static_cast<size_t>(order[static_cast<size_t>(machine)])]
                    .p_mech);
    } else {
      os << ",,,";
    }
    os << "\n";
  }

  double total_load = 0.0;
  for (const Bus& b : grid.buses()) total_load += b.p_load;
  std::cout << "power flow converged in " << pf.iterations
            << " iterations\n";
  std::cout << "total load " << total_load << " pu, total generation "
            << pf.pe.sum() << " pu, losses " << pf.pe.sum() - total_load
            << " pu\n";
  std::cout << "initial point in "
            << (fs::path(a.out) / "init.csv").string() << "\n";
}

void cmd_validate(const Args& a) {
  Scenario sc = effective_scenario(a);
  GridModel grid = load_network(sc.network_path);
  Partition part = resolve_partition(sc.partition_ref, grid);
  PowerFlowSolution pf = solve_powerflow(grid);
  std::cout << "scenario: h=" << sc.h << " T=" << sc.t_end << " method="
            << method_name(sc.method) << " mode=" << mode_name(sc.mode)
            << " partition=" << (part.name.empty() ? "whole" : part.name)
            << " (p=" << part.size() << ")\n";
  std::cout << "network: " << grid.n() << " buses, "
            << grid.branches().size() << " branches, "
            << grid.generators().size() << " machines, slack bus "
            << grid.slack_id() << "\n";
  std::cout << "power flow converged in " << pf.iterations
            << " iterations\n";
  std::cout << "ok\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"swing-equation dynamics by direct integration and "
               "waveform relaxation"};
  app.require_subcommand(1);

  Args args;
  auto add_common = [&](CLI::App* cmd, bool scenario_required) {
    auto* s = cmd->add_option("--scenario", args.scenario,
                              "scenario JSON file");
    if (scenario_required) s->required();
    cmd->add_option("--network", args.network,
                    "network JSON file (overrides the scenario)");
    cmd->add_option("--out", args.out, "output directory")
        ->capture_default_str();
    cmd->add_option("--workers", args.workers,
                    "worker threads (0 = one per subsystem)");
  };

  auto* run = app.add_subcommand("run", "simulate one scenario");
  add_common(run, true);
  run->add_option("--method", args.method, "di, wr, or wrw");
  run->add_option("--mode", args.mode, "jacobi or seidel");
  run->add_option("--partition", args.partition,
                  "preset name or JSON file of bus groups");
  run->add_option("--window", args.window, "window length in seconds");
  run->add_option("--eps", args.eps, "relaxation stopping tolerance");
  run->callback([&] { cmd_run(args); });

  auto* bench = app.add_subcommand(
      "bench-paper", "timing and accuracy tables over the preset splits");
  add_common(bench, true);
  bench->add_option("--mode", args.mode, "jacobi or seidel");
  bench->add_option("--partition", args.partition,
                    "partition used for the error table");
  bench->add_option("--window", args.window, "window length in seconds");
  bench->add_option("--eps", args.eps, "relaxation stopping tolerance");
  bench->add_flag("--relative-angles", args.relative_angles,
                  "percent errors on slack-referenced angles");
  bench->callback([&] { cmd_bench(args); });

  auto* sweep = app.add_subcommand(
      "sweep-horizon", "method timings at T = 5, 10, 15, 20 s");
  add_common(sweep, true);
  sweep->add_option("--mode", args.mode, "jacobi or seidel");
  sweep->add_option("--partition", args.partition,
                    "preset name or JSON file of bus groups");
  sweep->add_option("--window", args.window, "window length in seconds");
  sweep->add_option("--eps", args.eps, "relaxation stopping tolerance");
  sweep->callback([&] { cmd_sweep(args); });

  auto* dump = app.add_subcommand(
      "dump-init", "solve the power flow and write the initial point");
  add_common(dump, false);
  dump->callback([&] { cmd_dump_init(args); });

  auto* val = app.add_subcommand(
      "validate", "check a configuration without simulating");
  add_common(val, true);
  val->add_option("--method", args.method, "di, wr, or wrw");
  val->add_option("--mode", args.mode, "jacobi or seidel");
  val->add_option("--partition", args.partition,
                  "preset name or JSON file of bus groups");
  val->add_option("--window", args.window, "window length in seconds");
  val->add_option("--eps", args.eps, "relaxation stopping tolerance");
  val->callback([&] { cmd_validate(args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const NonConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SingularJacobian& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NotConverged& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const StepFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const WrDivergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const WindowFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const MissingExternalValue& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SimError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "wrsim/sim_di.hpp"
#include "wrsim/sim_wrw.hpp"

using namespace wrsim;
using testutil::ne39;
using testutil::study_scenario;

TEST_CASE("window plans tile the horizon exactly") {
  WindowPlan plan = make_window_plan(0.05, 20.0, 0.05);
  CHECK(plan.w_max == 400);
  CHECK(plan.steps_per_window == 1);
  REQUIRE(plan.bounds.size() == 400);
  CHECK(plan.bounds.front().first == 0.0);
  CHECK(plan.bounds.front().second == Catch::Approx(0.05));
  CHECK(plan.bounds.back().first == Catch::Approx(19.95));
  CHECK(plan.bounds.back().second == Catch::Approx(20.0));

  WindowPlan coarse = make_window_plan(0.25, 1.0, 0.05);
  CHECK(coarse.w_max == 4);
  CHECK(coarse.steps_per_window == 5);

  CHECK_THROWS_AS(make_window_plan(0.3, 20.0, 0.05), PlanMismatch);
  CHECK_THROWS_AS(make_window_plan(0.07, 20.0, 0.05), PlanMismatch);
  CHECK_THROWS_AS(make_window_plan(0.0, 20.0, 0.05), PlanMismatch);
  CHECK_THROWS_AS(make_window_plan(-0.05, 20.0, 0.05), PlanMismatch);
}

TEST_CASE("a single window degenerates to plain relaxation") {
  GridModel g = ne39();
  Scenario sc = study_scenario(1.0);
  Partition p3 = named_partition("table2-3");
  auto [wr, wr_stats] = simulate_wr(g, sc, p3, WrMode::Jacobi, 1e-6, 400, 0);
  auto [wrw, wrw_stats] =
      simulate_wrw(g, sc, p3, make_window_plan(1.0, 1.0, 0.05),
                   WrMode::Jacobi, 1e-6, 400, 0);
  REQUIRE(wrw_stats.window_iterations.size() == 1);
  CHECK(wrw_stats.window_iterations[0] == wr_stats.iterations);
  CHECK(wrw.v == wr.v);
  CHECK(wrw.theta == wr.theta);
  CHECK(wrw.omega == wr.omega);
  CHECK((wrw.pe - wr.pe).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((wrw.qe - wr.qe).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("one subsystem and one step per window degenerates to DI") {
  GridModel g = ne39();
  Scenario sc = study_scenario(1.0);
  auto [di, di_stats] = simulate_di(g, sc);
  auto [wrw, stats] =
      simulate_wrw(g, sc, whole_network_partition(g),
                   make_window_plan(sc.h, 1.0, sc.h), WrMode::Jacobi, 1e-6,
                   50, 0);
  CHECK(stats.window_iterations.size() == 20);
  CHECK((wrw.theta - di.theta).cwiseAbs().maxCoeff() <= 1e-7);
  CHECK((wrw.v - di.v).cwiseAbs().maxCoeff() <= 1e-7);
  CHECK((wrw.omega - di.omega).cwiseAbs().maxCoeff() <= 1e-7);
}

TEST_CASE("windows chain through each other's final values") {
  GridModel g = ne39();
  Scenario sc = study_scenario(1.0);
  auto [di, di_stats] = simulate_di(g, sc);
  auto [wrw, stats] =
      simulate_wrw(g, sc, named_partition("table2-3"),
                   make_window_plan(0.25, 1.0, 0.05), WrMode::Jacobi, 1e-8,
                   400, 0);
  REQUIRE(wrw.rows() == 21);
  for (int r = 1; r < 21; ++r) CHECK(wrw.times[r] > wrw.times[r - 1]);
  CHECK(stats.window_iterations.size() == 4);
  CHECK((wrw.theta - di.theta).cwiseAbs().maxCoeff() <= 1e-4);
  CHECK((wrw.omega - di.omega).cwiseAbs().maxCoeff() <= 1e-3);
}

TEST_CASE("full-horizon windowed run on the study system") {
  GridModel g = ne39();
  Scenario sc = study_scenario(20.0);
  auto [traj, st] =
      simulate_wrw(g, sc, named_partition("table2-3"),
                   make_window_plan(0.05, 20.0, 0.05), WrMode::Jacobi, 1e-6,
                   200, 0);
  REQUIRE(st.window_iterations.size() == 400);
  CHECK(st.total_iterations ==
        std::accumulate(st.window_iterations.begin(),
                        st.window_iterations.end(), 0));
  double par = 0.0;
  for (double w : st.window_parallel) par += w;
  CHECK(st.parallel_time == Catch::Approx(par).epsilon(1e-12));
  CHECK(st.avg_window_parallel() == st.parallel_time / 400.0);
  CHECK(st.avg_window_wall() == st.wall_time / 400.0);

  // pre-disturbance windows sit at equilibrium and converge immediately
  CHECK(st.window_iterations.front() == 1);
  int max_it = 0;
  for (int k : st.window_iterations) max_it = std::max(max_it, k);
  CHECK(max_it > 1);
  CHECK(max_it <= 60);

  // the windowed waveform tracks direct integration closely
  auto [di, di_stats] = simulate_di(g, sc);
  CHECK((traj.theta - di.theta).cwiseAbs().maxCoeff() <= 1e-4);
  CHECK((traj.omega - di.omega).cwiseAbs().maxCoeff() <= 1e-3);
}

TEST_CASE("a window that cannot converge names itself") {
  GridModel g = ne39();
  Scenario sc = study_scenario(20.0);
  try {
    simulate_wrw(g, sc, named_partition("table2-3"),
                 make_window_plan(0.05, 20.0, 0.05), WrMode::Jacobi, 1e-6, 5,
                 0);
    FAIL("expected WindowFailure");
  } catch (const WindowFailure& e) {
    // windows 1..3 precede the first load change and converge in one
    // sweep; window 4 ends at t=0.2 where the load step lands
    CHECK(e.window >= 4);
    CHECK(e.window <= 12);
  }
}

TEST_CASE("a plan for a different horizon is rejected") {
  GridModel g = ne39();
  Scenario sc = study_scenario(2.0);
  CHECK_THROWS_AS(simulate_wrw(g, sc, named_partition("table2-3"),
                               make_window_plan(0.5, 1.0, 0.05),
                               WrMode::Jacobi, 1e-6, 50, 0),
                  PlanMismatch);
}

TEST_CASE("horizon sweep records per-cell outcomes") {
  GridModel g = ne39();
  Scenario sc = study_scenario(0.5);
  sc.wr_k_max = 400;
  Partition p3 = named_partition("table2-3");

  CHECK_THROWS_AS(sweep_horizon(g, sc, p3, {0.0}), PlanMismatch);
  CHECK_THROWS_AS(sweep_horizon(g, sc, p3, {0.23}), PlanMismatch);

  auto rows = sweep_horizon(g, sc, p3, {0.25, 0.5}, 0);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.di_ok);
    CHECK(r.wr_ok);
    CHECK(r.wrw_ok);
    CHECK(r.note.empty());
    CHECK(r.di_time > 0.0);
    CHECK(r.wr_time > 0.0);
    CHECK(r.wrw_time > 0.0);
  }
  CHECK(rows[0].t_end == 0.25);
  CHECK(rows[1].t_end == 0.5);
}

TEST_CASE("horizon sweep marks diverging cells instead of aborting") {
  GridModel g = ne39();
  Scenario sc = study_scenario(5.0);
  sc.wr_k_max = 60;  // bounded budget: the full-horizon iteration blows up
  auto rows = sweep_horizon(g, sc, named_partition("table2-3"), {5.0}, 0);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].di_ok);
  CHECK_FALSE(rows[0].wr_ok);
  CHECK(rows[0].wrw_ok);
  CHECK(rows[0].note.find("wr:") != std::string::npos);
}

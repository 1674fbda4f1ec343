#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "helpers.hpp"
#include "wrsim/metrics.hpp"
#include "wrsim/powerflow.hpp"
#include "wrsim/sim_di.hpp"

using namespace wrsim;
using testutil::ne39;
using testutil::study_scenario;

TEST_CASE("percent error statistics") {
  SECTION("identical series report zero everywhere") {
    Eigen::VectorXd r(3);
    r << 1.0, -2.0, 0.5;
    ErrorReport rep = percent_error_series_stats(r, r);
    CHECK(rep.min_pct == 0.0);
    CHECK(rep.max_pct == 0.0);
    CHECK(rep.avg_pct == 0.0);
    CHECK(rep.avg_abs_pct == 0.0);
    CHECK(rep.included == 3);
    CHECK(rep.excluded == 0);
    CHECK(rep.abs_error.maxCoeff() == 0.0);
  }

  SECTION("a one percent offset reads as one percent") {
    Eigen::VectorXd r(1), s(1);
    r << 2.0;
    s << 2.02;
    ErrorReport rep = percent_error_series_stats(r, s);
    CHECK(rep.avg_pct == Catch::Approx(1.0).margin(1e-12));
    CHECK(rep.max_abs_pct == Catch::Approx(1.0).margin(1e-12));
    s << 1.98;
    rep = percent_error_series_stats(r, s);
    CHECK(rep.avg_pct == Catch::Approx(-1.0).margin(1e-12));
    CHECK(rep.avg_abs_pct == Catch::Approx(1.0).margin(1e-12));
  }

  SECTION("signed errors cancel, absolute errors do not") {
    Eigen::VectorXd r(2), s(2);
    r << 1.0, 1.0;
    s << 1.01, 0.99;
    ErrorReport rep = percent_error_series_stats(r, s);
    CHECK(rep.avg_pct == Catch::Approx(0.0).margin(1e-12));
    CHECK(rep.avg_abs_pct == Catch::Approx(1.0).margin(1e-12));
    CHECK(rep.min_pct == Catch::Approx(-1.0).margin(1e-12));
    CHECK(rep.max_pct == Catch::Approx(1.0).margin(1e-12));
    CHECK(rep.min_abs_pct == Catch::Approx(1.0).margin(1e-12));
  }

  SECTION("near-zero reference samples are excluded but still counted") {
    Eigen::VectorXd r(3), s(3);
    r << 1.0, 0.0, 2.0;
    s << 1.01, 5.0, 2.02;
    ErrorReport rep = percent_error_series_stats(r, s);
    CHECK(rep.included == 2);
    CHECK(rep.excluded == 1);
    CHECK(rep.avg_pct == Catch::Approx(1.0).margin(1e-12));
    // the absolute-error series covers the excluded sample too
    CHECK(rep.abs_error[1] == 5.0);
  }

  SECTION("an all-zero reference is an error, not a NaN") {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(4);
    Eigen::VectorXd s = Eigen::VectorXd::Ones(4);
    CHECK_THROWS_AS(percent_error_series_stats(r, s), AllSamplesExcluded);
  }

  SECTION("length mismatch is rejected") {
    Eigen::VectorXd r(2), s(3);
    r.setOnes();
    s.setOnes();
    CHECK_THROWS_AS(percent_error_series_stats(r, s), GridMismatch);
  }
}

TEST_CASE("variable selectors address trajectory columns") {
  GridModel g = ne39();
  Scenario sc = study_scenario(0.5);
  auto [t, st] = simulate_di(g, sc);

  SECTION("generator angle is the generator-bus angle column") {
    Eigen::VectorXd d = variable_series(t, {VarKind::GenDelta, 30});
    CHECK(d == t.theta.col(t.bus_col(30)));
    Eigen::VectorXd w = variable_series(t, {VarKind::GenOmega, 30});
    CHECK(w == t.omega.col(t.swing_col(30)));
    Eigen::VectorXd p = variable_series(t, {VarKind::GenPe, 30});
    CHECK(p == t.pe.col(t.machine_col(30)));
    Eigen::VectorXd v = variable_series(t, {VarKind::BusV, 16});
    CHECK(v == t.v.col(t.bus_col(16)));
  }

  SECTION("machine selectors reject load buses and unknown ids") {
    CHECK_THROWS_AS(variable_series(t, {VarKind::GenDelta, 5}),
                    UnknownGenerator);
    CHECK_THROWS_AS(variable_series(t, {VarKind::GenDelta, 99}),
                    UnknownGenerator);
    CHECK_THROWS_AS(variable_series(t, {VarKind::GenOmega, 99}),
                    UnknownGenerator);
    CHECK_THROWS_AS(variable_series(t, {VarKind::BusV, 99}),
                    UnknownBusReference);
    CHECK_THROWS_AS(variable_series(t, {VarKind::BusTheta, 99}),
                    UnknownBusReference);
  }

  SECTION("relative rotor angle subtracts the fixed slack reference") {
    Eigen::VectorXd rel = relative_rotor_angle(t, 36);
    Eigen::VectorXd raw = variable_series(t, {VarKind::GenDelta, 36});
    const double ref = t.theta(0, t.bus_col(39));
    CHECK((rel - (raw.array() - ref).matrix()).cwiseAbs().maxCoeff() == 0.0);
    // the slack machine's angle is pinned, so it is not a swing variable
    CHECK_THROWS_AS(relative_rotor_angle(t, 39), UnknownGenerator);
  }

  SECTION("comparing different time grids is rejected") {
    auto [shorter, st2] = simulate_di(g, study_scenario(0.25));
    CHECK_THROWS_AS(percent_error_stats(t, shorter, {VarKind::BusV, 16}),
                    GridMismatch);
    CHECK_THROWS_AS(absolute_error_series(t, shorter, {VarKind::BusV, 16}),
                    GridMismatch);
  }

  SECTION("absolute error of a run against itself vanishes") {
    Eigen::VectorXd e = absolute_error_series(t, t, {VarKind::GenOmega, 36});
    CHECK(e.maxCoeff() == 0.0);
  }
}

TEST_CASE("the dynamic residual certifies a trajectory") {
  GridModel g0 = ne39();
  AdmittanceMatrix y = build_ybus(g0);
  PowerFlowSolution pf = solve_powerflow(g0, y);
  InitialState init = init_dynamic_state(g0, pf);
  DaeSystem sys(init.grid, build_ybus(init.grid));

  SECTION("direct integration satisfies the step equations") {
    Scenario sc = study_scenario(1.0);
    auto [t, st] = simulate_di(init.grid, sc);
    CHECK(max_dynamic_residual(sys, t, sc.disturbances) <= 1e-7);
  }

  SECTION("an equilibrium trajectory has residual at the powerflow level") {
    Scenario sc;
    sc.h = 0.05;
    sc.t_end = 1.0;
    auto [t, st] = simulate_di(init.grid, sc);
    CHECK(max_dynamic_residual(sys, t, sc.disturbances) <= 1e-9);
  }
}

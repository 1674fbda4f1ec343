#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "helpers.hpp"
#include "wrsim/powerflow.hpp"

using namespace wrsim;
using testutil::ne39;

TEST_CASE("39-bus power flow matches the independent oracle") {
  GridModel g = ne39();
  PowerFlowSolution pf = solve_powerflow(g);
  REQUIRE(pf.converged);
  CHECK(pf.iterations == 4);

  auto vth = [&](int id) {
    return std::pair(pf.v[g.bus_pos(id)], pf.theta[g.bus_pos(id)]);
  };
  const struct {
    int bus;
    double v, theta;
  } expected[] = {
      {1, 1.039383643147, 0.017429795414},
      {8, 0.997872318601, 0.020933655216},
      {16, 1.032520259358, 0.078573075860},
      {20, 0.991010543610, 0.134636019149},
      {25, 1.057682748121, 0.107617332634},
      {29, 1.050114902116, 0.198363303063},
  };
  for (const auto& e : expected) {
    auto [v, th] = vth(e.bus);
    CHECK(v == Catch::Approx(e.v).margin(1e-9));
    CHECK(th == Catch::Approx(e.theta).margin(1e-9));
  }

  // machine bus angles and outputs, grid machine order is bus order 30..39
  const struct {
    int bus;
    double theta, pe, qe;
  } machines[] = {
      {30, 0.125048997794, 2.5, 1.617616439814},
      {31, 0.253687993455, 6.77871, 2.215744532960},
      {32, 0.250399177544, 6.5, 2.069648469505},
      {33, 0.250316508454, 6.32, 1.082927851306},
      {34, 0.225219641361, 5.08, 1.666883690040},
      {35, 0.284693932838, 6.5, 2.106613822941},
      {36, 0.331676984582, 5.6, 1.001647914757},
      {37, 0.226061251270, 5.4, -0.013694479537},
      {38, 0.321630529997, 8.3, 0.217327285241},
      {39, 0.0, 10.000001241752, 0.784673409449},
  };
  int mi = 0;
  for (const auto& m : machines) {
    CHECK(pf.theta[g.bus_pos(m.bus)] == Catch::Approx(m.theta).margin(1e-9));
    CHECK(pf.pe[mi] == Catch::Approx(m.pe).margin(1e-9));
    CHECK(pf.qe[mi] == Catch::Approx(m.qe).margin(1e-9));
    ++mi;
  }

  // network losses: total generation minus total load, in per unit
  double gen = pf.pe.sum(), load = 0.0;
  for (const Bus& b : g.buses()) load += b.p_load;
  CHECK(gen - load == Catch::Approx(0.436411).margin(1e-5));

  // magnitude envelope of the solved profile
  CHECK(pf.v.minCoeff() == Catch::Approx(0.982).margin(1e-3));
  CHECK(pf.v.maxCoeff() == Catch::Approx(1.0636).margin(1e-3));
}

TEST_CASE("two-bus case pinned against the bisection oracle") {
  // slack V=1 angle 0, one line r=0 x=0.1, load 0.5+j0 at bus 2
  std::vector<Bus> buses = {
      {1, BusKind::Slack, 0.0, 0.0, 1.0, 0.0},
      {2, BusKind::Load, 0.5, 0.0, 1.0, 0.0},
  };
  std::vector<Branch> branches = {{1, 2, 0.0, 0.1, 0.0, 1.0}};
  std::vector<Generator> generators = {{1, 0.0, 10.0, 0.0}};
  GridModel g(std::move(buses), std::move(branches), std::move(generators));
  PowerFlowSolution pf = solve_powerflow(g);
  REQUIRE(pf.converged);
  CHECK(pf.theta[1] == Catch::Approx(-0.050083710580780).margin(1e-10));
  CHECK(pf.v[1] == Catch::Approx(0.998746073110333).margin(1e-10));
  CHECK(pf.theta[0] == 0.0);
  CHECK(pf.v[0] == 1.0);
}

TEST_CASE("an unloaded network is already solved") {
  std::vector<Bus> buses = {
      {1, BusKind::Slack, 0.0, 0.0, 1.0, 0.0},
      {2, BusKind::Load, 0.0, 0.0, 1.0, 0.0},
  };
  std::vector<Branch> branches = {{1, 2, 0.0, 0.1, 0.0, 1.0}};
  std::vector<Generator> generators = {{1, 0.0, 10.0, 0.0}};
  GridModel g(std::move(buses), std::move(branches), std::move(generators));
  PowerFlowSolution pf = solve_powerflow(g);
  CHECK(pf.iterations == 0);
  CHECK(pf.v[1] == 1.0);
  CHECK(pf.theta[1] == 0.0);
}

TEST_CASE("infeasible loading is diagnosed") {
  // far beyond the maximum transfer of a 0.5 pu line
  std::vector<Bus> buses = {
      {1, BusKind::Slack, 0.0, 0.0, 1.0, 0.0},
      {2, BusKind::Load, 50.0, 10.0, 1.0, 0.0},
  };
  std::vector<Branch> branches = {{1, 2, 0.0, 0.5, 0.0, 1.0}};
  std::vector<Generator> generators = {{1, 0.0, 10.0, 0.0}};
  GridModel g(std::move(buses), std::move(branches), std::move(generators));
  CHECK_THROWS_AS(solve_powerflow(g), SimError);
  CHECK_THROWS_AS(init_dynamic_state(g, PowerFlowSolution{}), NotConverged);
}

TEST_CASE("initial dynamic state balances every machine") {
  GridModel g = ne39();
  PowerFlowSolution pf = solve_powerflow(g);
  InitialState init = init_dynamic_state(g, pf);

  // synchronous speed everywhere, mechanical power matching electrical
  for (Eigen::Index i = 0; i < init.point.omega.size(); ++i)
    CHECK(init.point.omega[i] == g.omega_s());
  int mi = 0;
  for (int m : init.grid.machine_order()) {
    CHECK(init.grid.generators()[static_cast<size_t>(m)].p_mech ==
          pf.pe[mi]);
    ++mi;
  }
  CHECK(init.point.v == pf.v);
  CHECK(init.point.theta == pf.theta);
}

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "wrsim/newton.hpp"

using namespace wrsim;

namespace {

Eigen::VectorXd vec1(double x) {
  Eigen::VectorXd v(1);
  v[0] = x;
  return v;
}

}  // namespace

TEST_CASE("scalar root x^2 = 4") {
  auto residual = [](const Eigen::VectorXd& x) {
    return vec1(x[0] * x[0] - 4.0);
  };
  auto jacobian = [](const Eigen::VectorXd& x) {
    Eigen::MatrixXd j(1, 1);
    j(0, 0) = 2.0 * x[0];
    return j;
  };
  NewtonResult r = newton_solve(residual, jacobian, vec1(1.0), {});
  CHECK(r.x[0] == Catch::Approx(2.0).margin(1e-10));
  CHECK(r.iterations <= 6);
  CHECK(r.residual_norm <= 1e-8);
}

TEST_CASE("linear systems take exactly one iteration") {
  Eigen::MatrixXd a(2, 2);
  a << 3.0, 1.0, 1.0, 2.0;
  Eigen::VectorXd b(2);
  b << 1.0, -2.0;
  auto residual = [&](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(a * x - b);
  };
  auto jacobian = [&](const Eigen::VectorXd&) { return a; };
  NewtonResult r =
      newton_solve(residual, jacobian, Eigen::VectorXd::Zero(2), {});
  CHECK(r.iterations == 1);
  CHECK((a * r.x - b).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("a solved system is accepted without iterating") {
  auto residual = [](const Eigen::VectorXd& x) {
    return vec1(x[0] * x[0] - 4.0);
  };
  auto jacobian = [](const Eigen::VectorXd& x) {
    Eigen::MatrixXd j(1, 1);
    j(0, 0) = 2.0 * x[0];
    return j;
  };
  NewtonResult r = newton_solve(residual, jacobian, vec1(2.0), {});
  CHECK(r.iterations == 0);
  CHECK(r.x[0] == 2.0);  // untouched, bit for bit
}

TEST_CASE("two coupled equations") {
  // x^2 + y^2 = 1 and x = y, root at sqrt(1/2)
  auto residual = [](const Eigen::VectorXd& v) {
    Eigen::VectorXd r(2);
    r[0] = v[0] * v[0] + v[1] * v[1] - 1.0;
    r[1] = v[0] - v[1];
    return r;
  };
  auto jacobian = [](const Eigen::VectorXd& v) {
    Eigen::MatrixXd j(2, 2);
    j << 2.0 * v[0], 2.0 * v[1], 1.0, -1.0;
    return j;
  };
  Eigen::VectorXd x0(2);
  x0 << 1.0, 0.5;
  NewtonResult r = newton_solve(residual, jacobian, x0, {});
  CHECK(r.x[0] == Catch::Approx(std::sqrt(0.5)).margin(1e-10));
  CHECK(r.x[1] == Catch::Approx(std::sqrt(0.5)).margin(1e-10));
}

TEST_CASE("step damping rescues an overshooting start") {
  // undamped Newton on atan from x0 = 2 overshoots and oscillates outward;
  // halving the step must recover it
  auto residual = [](const Eigen::VectorXd& x) {
    return vec1(std::atan(x[0]));
  };
  auto jacobian = [](const Eigen::VectorXd& x) {
    Eigen::MatrixXd j(1, 1);
    j(0, 0) = 1.0 / (1.0 + x[0] * x[0]);
    return j;
  };
  NewtonResult r = newton_solve(residual, jacobian, vec1(2.0), {});
  CHECK(std::abs(r.x[0]) <= 1e-8);
  CHECK(r.iterations < 25);
}

TEST_CASE("non-convergence reports iterations and norm") {
  auto residual = [](const Eigen::VectorXd& x) {
    return vec1(x[0] * x[0] + 1.0);  // no real root
  };
  auto jacobian = [](const Eigen::VectorXd& x) {
    Eigen::MatrixXd j(1, 1);
    j(0, 0) = 2.0 * x[0];
    return j;
  };
  try {
    newton_solve(residual, jacobian, vec1(3.0), {});
    FAIL("expected NonConvergence");
  } catch (const NonConvergence& e) {
    CHECK(e.iterations == 25);
    CHECK(e.residual_norm >= 0.0);
  }
}

TEST_CASE("singular Jacobian is diagnosed, not divided by") {
  // residual is nonzero at the start point, so the solver must factor the
  // (zero) Jacobian there instead of declaring victory
  auto residual = [](const Eigen::VectorXd& x) {
    return vec1(x[0] * x[0] + 1.0);
  };
  auto jacobian = [](const Eigen::VectorXd& x) {
    Eigen::MatrixXd j(1, 1);
    j(0, 0) = 2.0 * x[0];
    return j;
  };
  CHECK_THROWS_AS(newton_solve(residual, jacobian, vec1(0.0), {}),
                  SingularJacobian);
}

TEST_CASE("empty systems are trivially solved") {
  auto residual = [](const Eigen::VectorXd&) { return Eigen::VectorXd(); };
  auto jacobian = [](const Eigen::VectorXd&) { return Eigen::MatrixXd(); };
  NewtonResult r =
      newton_solve(residual, jacobian, Eigen::VectorXd(), {});
  CHECK(r.iterations == 0);
  CHECK(r.residual_norm == 0.0);
}

TEST_CASE("configuration validation") {
  NewtonConfig c;
  c.tol = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.max_iter = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.damping = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.damping = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  CHECK_NOTHROW(c.validate());
}

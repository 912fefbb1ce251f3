#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace milpacq;
using testutil::worked_example_model;

TEST_CASE("solve_lp finds the fractional vertex of the worked example") {
  // Hand-computed vertex of {40x1+30x2<=240, 20x1+40x2<=240}: the rows
  // intersect at (2.4, 4.8) with value 134.4, which beats every other vertex
  // (0,0)=0, (6,0)=120, (0,6)=108.
  const SolveOutcome out = solve_lp(worked_example_model());
  REQUIRE(out.status == SolveStatus::optimal);
  REQUIRE(out.value == Catch::Approx(134.4).margin(1e-9));
  REQUIRE(out.point[0] == Catch::Approx(2.4).margin(1e-9));
  REQUIRE(out.point[1] == Catch::Approx(4.8).margin(1e-9));
}

TEST_CASE("solve_lp detects an empty polytope") {
  MilpModel m;
  m.A = {{1.0}, {-1.0}};
  m.b = {1.0, -2.0};  // x <= 1 and x >= 2
  m.c = {1.0};
  m.integer_mask = {false};
  m.domain_box = {{0.0, 10.0}};
  REQUIRE(solve_lp(m).status == SolveStatus::infeasible);
}

TEST_CASE("solve_lp reaches the box corner without rows") {
  MilpModel m;
  m.A = {};
  m.b = {};
  m.c = {1.0, 0.0, 0.0};
  m.integer_mask = {false, false, false};
  m.domain_box = {{0.0, 10.0}, {0.0, 10.0}, {0.0, 10.0}};
  const SolveOutcome out = solve_lp(m);
  REQUIRE(out.status == SolveStatus::optimal);
  REQUIRE(out.value == Catch::Approx(10.0).margin(1e-9));
  REQUIRE(out.point[0] == Catch::Approx(10.0).margin(1e-9));
}

TEST_CASE("solve_milp reproduces the worked-example optima") {
  const MilpModel m = worked_example_model();

  const SolveOutcome global = solve_milp(m, {});
  REQUIRE(global.status == SolveStatus::optimal);
  REQUIRE(global.value == Catch::Approx(132.0).margin(1e-9));
  REQUIRE(global.point[0] == Catch::Approx(3.0).margin(1e-9));
  REQUIRE(global.point[1] == Catch::Approx(4.0).margin(1e-9));

  const SolveOutcome restricted = solve_milp(m, testutil::worked_example_context());
  REQUIRE(restricted.status == SolveStatus::optimal);
  REQUIRE(restricted.value == Catch::Approx(120.0).margin(1e-9));
  REQUIRE(restricted.point[0] == Catch::Approx(6.0).margin(1e-9));
  REQUIRE(restricted.point[1] == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("solve_milp reports contradictory contexts as infeasible") {
  Context impossible;
  impossible.S = {{1.0, 0.0}, {-1.0, 0.0}};
  impossible.t = {1.0, -2.0};
  REQUIRE(solve_milp(worked_example_model(), impossible).status == SolveStatus::infeasible);
}

TEST_CASE("enumerate_optimum agrees with the worked example and reports ties") {
  const EnumerationResult r = enumerate_optimum(worked_example_model(), {});
  REQUIRE(r.outcome.status == SolveStatus::optimal);
  REQUIRE(r.outcome.value == Catch::Approx(132.0).margin(1e-9));
  REQUIRE(r.optimizers.size() == 1);
  REQUIRE(r.optimizers[0] == Vec{3.0, 4.0});

  MilpModel axis;
  axis.A = {};
  axis.b = {};
  axis.c = {1.0, 0.0};
  axis.integer_mask = {true, true};
  axis.domain_box = {{0.0, 2.0}, {0.0, 2.0}};
  const EnumerationResult ties = enumerate_optimum(axis, {});
  REQUIRE(ties.outcome.value == Catch::Approx(2.0));
  REQUIRE(ties.optimizers == std::vector<Vec>{{2.0, 0.0}, {2.0, 1.0}, {2.0, 2.0}});
}

TEST_CASE("enumerate_optimum rejects continuous variables and huge boxes") {
  MilpModel m = worked_example_model();
  m.integer_mask = {true, false};
  REQUIRE_THROWS_AS(enumerate_optimum(m, {}), std::invalid_argument);

  MilpModel big = worked_example_model();
  big.domain_box = {{0.0, 1e5}, {0.0, 1e5}};
  REQUIRE_THROWS_AS(enumerate_optimum(big, {}), std::invalid_argument);
}

TEST_CASE("is_feasible matches the worked example") {
  const MilpModel m = worked_example_model();
  REQUIRE(is_feasible(m, {}, {3.0, 4.0}));
  REQUIRE_FALSE(is_feasible(m, testutil::worked_example_context(), {3.0, 4.0}));
  REQUIRE_FALSE(is_feasible(m, {}, {3.0, 11.0}));   // outside the box
  REQUIRE_FALSE(is_feasible(m, {}, {2.5, 2.5}));    // violates integrality
}

TEST_CASE("branch and bound agrees with the enumeration oracle") {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> dim(1, 3);
  int optimal_seen = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = dim(rng);
    const MilpModel m = testutil::random_model(n, 3, 6.0, rng);
    Context ctx;
    if (trial % 2 == 1) ctx = testutil::random_context(n, rng, 0.0, 6.0);

    SolveStats stats;
    SolveOutcome bb;
    bool budget_hit = false;
    try {
      bb = solve_milp(m, ctx, &stats);
    } catch (const std::runtime_error&) {
      budget_hit = true;
    }
    REQUIRE_FALSE(budget_hit);
    REQUIRE(stats.nodes < kNodeBudget);
    const EnumerationResult oracle = enumerate_optimum(m, ctx);
    REQUIRE(bb.status == oracle.outcome.status);
    REQUIRE(bb.status != SolveStatus::unbounded);
    if (bb.status == SolveStatus::optimal) {
      ++optimal_seen;
      REQUIRE(bb.value == Catch::Approx(oracle.outcome.value).margin(1e-6));
      REQUIRE(is_feasible(m, ctx, bb.point));
    }
  }
  REQUIRE(optimal_seen > 5);
}

TEST_CASE("adding a context row never increases the optimum") {
  std::mt19937_64 rng(103);
  int compared = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const MilpModel m = testutil::random_model(3, 3, 6.0, rng);
    const Context ctx = testutil::random_context(3, rng, 0.0, 10.0);
    const SolveOutcome base = solve_milp(m, {});
    const SolveOutcome restricted = solve_milp(m, ctx);
    if (base.status == SolveStatus::optimal && restricted.status == SolveStatus::optimal) {
      REQUIRE(restricted.value <= base.value + 1e-9);
      ++compared;
    }
    if (base.status == SolveStatus::infeasible) REQUIRE(restricted.status == SolveStatus::infeasible);
  }
  REQUIRE(compared > 20);
}

TEST_CASE("solve_milp is deterministic") {
  std::mt19937_64 rng(107);
  for (int trial = 0; trial < 10; ++trial) {
    const MilpModel m = testutil::random_model(3, 4, 6.0, rng);
    const Context ctx = testutil::random_context(3, rng, 0.0, 8.0);
    const SolveOutcome a = solve_milp(m, ctx);
    const SolveOutcome b = solve_milp(m, ctx);
    REQUIRE(a.status == b.status);
    if (a.status == SolveStatus::optimal) {
      REQUIRE(a.value == b.value);
      REQUIRE(a.point == b.point);
    }
  }
}

TEST_CASE("lp relaxation bounds the integer optimum") {
  const SolveOutcome lp = solve_lp(worked_example_model());
  const SolveOutcome ip = solve_milp(worked_example_model(), {});
  REQUIRE(lp.value >= ip.value - 1e-9);
}

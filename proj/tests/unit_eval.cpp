#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace milpacq;

namespace {

MilpModel halfspace_model(double bound, double cost_sign = 1.0) {
  // x1 <= bound over the integer box [0,8]^2.
  MilpModel m;
  m.A = {{1.0, 0.0}};
  m.b = {bound};
  m.c = {cost_sign, 0.0};
  m.integer_mask = {true, true};
  m.domain_box = {{0.0, 8.0}, {0.0, 8.0}};
  return m;
}

}  // namespace

TEST_CASE("evaluate is exact on the identity") {
  std::mt19937_64 rng(301);
  const DatasetBundle bundle = generate_dataset(testutil::small_gen_config(301), rng);
  const EvalReport r = evaluate(bundle.truth, bundle.truth, bundle.test_contexts);
  REQUIRE(r.recall == 1.0);
  REQUIRE(r.precision == 1.0);
  REQUIRE(r.infeasibility == 0.0);
  REQUIRE(r.mean_regret == 0.0);
  REQUIRE(r.num_test_contexts == bundle.test_contexts.size());
  REQUIRE(r.num_feasible_contexts == bundle.test_contexts.size());
}

TEST_CASE("a strictly smaller learned region has precision 1 and recall below 1") {
  const auto [recall, precision] = region_metrics(halfspace_model(3.0), halfspace_model(6.0));
  REQUIRE(precision == 1.0);
  REQUIRE(recall < 1.0);
  REQUIRE(recall == Catch::Approx((4.0 * 9.0) / (7.0 * 9.0)));  // 4 of 7 lattice columns
}

TEST_CASE("a learned region covering the whole box has the counting precision") {
  std::mt19937_64 rng(303);
  const GenConfig cfg = testutil::small_gen_config(303);
  const MilpModel truth = generate_ground_truth(cfg, rng);
  MilpModel everything = truth;
  everything.A = {Vec(cfg.n, 0.0)};
  everything.A[0][0] = 1.0;
  everything.b = {cfg.domain.hi + 5.0};  // non-binding row: region == box

  const auto [recall, precision] = region_metrics(everything, truth);
  const double truth_count = static_cast<double>(enumerate_feasible(truth, {}).size());
  const double box_count = static_cast<double>(lattice_point_count(truth.domain_box));
  REQUIRE(recall == 1.0);
  REQUIRE(precision == Catch::Approx(truth_count / box_count));
}

TEST_CASE("region metrics swap under argument exchange") {
  std::mt19937_64 rng(305);
  const MilpModel a = testutil::random_model(3, 3, 8.0, rng);
  const MilpModel b = testutil::random_model(3, 3, 8.0, rng);
  const auto [recall_ab, precision_ab] = region_metrics(a, b);
  const auto [recall_ba, precision_ba] = region_metrics(b, a);
  REQUIRE(recall_ab == Catch::Approx(precision_ba));
  REQUIRE(precision_ab == Catch::Approx(recall_ba));
}

TEST_CASE("region metrics insist on shared boxes and integer masks") {
  MilpModel a = halfspace_model(3.0);
  MilpModel b = halfspace_model(6.0);
  b.domain_box[0] = {0.0, 9.0};
  REQUIRE_THROWS_AS(region_metrics(a, b), std::invalid_argument);
  b = halfspace_model(6.0);
  b.integer_mask[1] = false;
  REQUIRE_THROWS_AS(region_metrics(a, b), std::invalid_argument);
}

TEST_CASE("flipped cost over the true region gives zero infeasibility and positive regret") {
  std::mt19937_64 rng(307);
  const GenConfig cfg = testutil::small_gen_config(307, 3, 3, 8.0, 10, 20);
  const DatasetBundle bundle = generate_dataset(cfg, rng);
  MilpModel flipped = bundle.truth;
  for (double& v : flipped.c) v = -v;

  const ContextualMetrics cm = contextual_metrics(flipped, bundle.truth, bundle.test_contexts);
  REQUIRE(cm.infeasibility == 0.0);  // same feasible region, optima always truth-feasible
  REQUIRE(cm.feasible_contexts == bundle.test_contexts.size());

  // The enumeration oracle decides which contexts can show regret at all.
  bool some_context_has_spread = false;
  for (const Context& ctx : bundle.test_contexts) {
    const EnumerationResult best = enumerate_optimum(bundle.truth, ctx);
    MilpModel anti = bundle.truth;
    for (double& v : anti.c) v = -v;
    const EnumerationResult worst = enumerate_optimum(anti, ctx);
    if (best.outcome.value - dot(bundle.truth.c, worst.outcome.point) > 1e-9) some_context_has_spread = true;
  }
  REQUIRE(some_context_has_spread);
  REQUIRE(cm.mean_regret > 0.0);
}

TEST_CASE("disjoint learned regions are fully infeasible") {
  // Truth lives at x1 >= 5 (via -x1 <= -5); the learned model at x1 <= 2.
  MilpModel truth = halfspace_model(2.0);
  truth.A = {{-1.0, 0.0}};
  truth.b = {-5.0};
  const MilpModel learned = halfspace_model(2.0);

  std::vector<Context> contexts(4);  // empty contexts
  const ContextualMetrics cm = contextual_metrics(learned, truth, contexts);
  REQUIRE(cm.infeasibility == 1.0);
  REQUIRE(cm.feasible_contexts == 0);
  REQUIRE(cm.mean_regret == 0.0);  // flagged by feasible_contexts == 0
}

TEST_CASE("report fields stay in range on fuzzed learned models") {
  std::mt19937_64 rng(311);
  const GenConfig cfg = testutil::small_gen_config(311, 3, 3, 8.0, 10, 10);
  const DatasetBundle bundle = generate_dataset(cfg, rng);
  for (int trial = 0; trial < 50; ++trial) {
    const MilpModel learned = testutil::random_model(3, 3, 8.0, rng);
    const EvalReport r = evaluate(learned, bundle.truth, bundle.test_contexts);
    REQUIRE(r.recall >= 0.0);
    REQUIRE(r.recall <= 1.0);
    REQUIRE(r.precision >= 0.0);
    REQUIRE(r.precision <= 1.0);
    REQUIRE(r.infeasibility >= 0.0);
    REQUIRE(r.infeasibility <= 1.0);
    REQUIRE(r.mean_regret >= 0.0);
    REQUIRE(std::isfinite(r.mean_regret));
    REQUIRE(r.num_test_contexts == bundle.test_contexts.size());
  }
}

TEST_CASE("mean regret is invariant under positive rescaling of the learned cost") {
  std::mt19937_64 rng(313);
  const GenConfig cfg = testutil::small_gen_config(313, 3, 3, 8.0, 10, 15);
  const DatasetBundle bundle = generate_dataset(cfg, rng);
  const MilpModel learned = testutil::random_model(3, 3, 8.0, rng);
  MilpModel scaled = learned;
  for (double& v : scaled.c) v *= 37.5;

  // The learned argmax set itself is scale-invariant...
  for (const Context& ctx : bundle.test_contexts) {
    const EnumerationResult a = enumerate_optimum(learned, ctx);
    const EnumerationResult b = enumerate_optimum(scaled, ctx);
    REQUIRE(a.outcome.status == b.outcome.status);
    if (a.outcome.status == SolveStatus::optimal) REQUIRE(a.optimizers == b.optimizers);
  }
  // ...hence the evaluation metrics agree.
  const EvalReport ra = evaluate(learned, bundle.truth, bundle.test_contexts);
  const EvalReport rb = evaluate(scaled, bundle.truth, bundle.test_contexts);
  REQUIRE(ra.mean_regret == Catch::Approx(rb.mean_regret).margin(1e-12));
  REQUIRE(ra.infeasibility == rb.infeasibility);
}

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace milpacq;

TEST_CASE("ground truth generation is certified") {
  std::mt19937_64 rng(201);
  const GenConfig cfg = testutil::small_gen_config(201);
  const MilpModel truth = generate_ground_truth(cfg, rng);
  REQUIRE(truth.num_vars() == cfg.n);
  REQUIRE(truth.num_rows() == cfg.m);
  for (bool masked : truth.integer_mask) REQUIRE(masked);
  REQUIRE(validate_model(truth).ok());
  REQUIRE(enumerate_feasible(truth, {}).size() >= kMinFeasiblePoints);
  REQUIRE(solve_milp(truth, {}).status == SolveStatus::optimal);
}

TEST_CASE("default-size ground truth matches the experiment protocol") {
  GenConfig cfg;  // defaults: n = 5, m = 5, box [0,10]
  cfg.seed = 202;
  std::mt19937_64 rng(cfg.seed);
  const MilpModel truth = generate_ground_truth(cfg, rng);
  REQUIRE(truth.num_vars() == 5);
  REQUIRE(truth.num_rows() == 5);
  REQUIRE(truth.domain_box == Box(5, {0.0, 10.0}));
  REQUIRE(enumerate_feasible(truth, {}).size() >= 50);
}

TEST_CASE("generated contexts keep the truth feasible") {
  std::mt19937_64 rng(203);
  const GenConfig cfg = testutil::small_gen_config(203);
  const MilpModel truth = generate_ground_truth(cfg, rng);
  const std::vector<Vec> feasible = enumerate_feasible(truth, {});
  for (int k = 0; k < 50; ++k) {
    const Context ctx = generate_context(truth, cfg, rng, &feasible);
    REQUIRE(ctx.rows() == cfg.context_rows);
    REQUIRE(solve_milp(truth, ctx).status == SolveStatus::optimal);
  }
}

TEST_CASE("multi-row contexts keep the truth feasible") {
  std::mt19937_64 rng(205);
  GenConfig cfg = testutil::small_gen_config(205);
  cfg.context_rows = 3;
  const MilpModel truth = generate_ground_truth(cfg, rng);
  for (int k = 0; k < 10; ++k) {
    const Context ctx = generate_context(truth, cfg, rng);
    REQUIRE(ctx.rows() == 3);
    REQUIRE(solve_milp(truth, ctx).status == SolveStatus::optimal);
  }
}

TEST_CASE("sampled examples follow the worked example") {
  const MilpModel truth = normalize_model(testutil::worked_example_model());
  GenConfig cfg;
  cfg.n = 2;
  cfg.m = 2;
  cfg.domain = {0.0, 10.0};
  cfg.pos_per_context = 1;
  cfg.neg_per_context = 2;
  std::mt19937_64 rng(207);

  const auto empty_ctx = sample_examples(truth, {}, cfg, rng);
  REQUIRE(empty_ctx.size() == 3);
  REQUIRE(empty_ctx[0].label == 1);
  REQUIRE(empty_ctx[0].point == Vec{3.0, 4.0});

  const auto restricted = sample_examples(truth, testutil::worked_example_context(), cfg, rng);
  REQUIRE(restricted[0].label == 1);
  REQUIRE(restricted[0].point == Vec{6.0, 0.0});
}

TEST_CASE("every sampled example is consistent with its label") {
  std::mt19937_64 rng(209);
  const GenConfig cfg = testutil::small_gen_config(209, 3, 3, 8.0, 20, 5);
  const DatasetBundle bundle = generate_dataset(cfg, rng);
  REQUIRE(validate_dataset(bundle.data).ok());
  ContextCache cache;
  for (const ContextualExample& ex : bundle.data.examples)
    REQUIRE(classify(bundle.truth, ex.context, ex.point, &cache) == ex.label);
  REQUIRE(zero_one_loss(bundle.truth, bundle.data) == 0.0);
}

TEST_CASE("dataset size and label ratio follow the config") {
  std::mt19937_64 rng(211);
  GenConfig cfg = testutil::small_gen_config(211, 3, 3, 8.0, 12, 4);
  cfg.pos_per_context = 2;
  cfg.neg_per_context = 3;
  const DatasetBundle bundle = generate_dataset(cfg, rng);
  REQUIRE(bundle.data.size() == 12 * 5);
  std::size_t pos = 0, neg = 0;
  for (const ContextualExample& ex : bundle.data.examples) (ex.label == 1 ? pos : neg)++;
  REQUIRE(pos * 3 == neg * 2);  // exactly pos_per_context : neg_per_context
  REQUIRE(bundle.test_contexts.size() == cfg.num_test_contexts);
  for (const Context& ctx : bundle.test_contexts) REQUIRE(solve_milp(bundle.truth, ctx).status == SolveStatus::optimal);
}

TEST_CASE("default config yields 250 x 3 examples") {
  GenConfig cfg;  // paper-sized protocol: 250 contexts, 1 positive + 2 negatives
  cfg.seed = 213;
  cfg.num_test_contexts = 5;  // keep the test quick; training size is the point
  std::mt19937_64 rng(cfg.seed);
  const DatasetBundle bundle = generate_dataset(cfg, rng);
  REQUIRE(bundle.data.size() == 750);
}

TEST_CASE("generation is deterministic given the seed") {
  const GenConfig cfg = testutil::small_gen_config(215, 2, 2, 12.0, 8, 3);
  std::mt19937_64 rng_a(cfg.seed);
  std::mt19937_64 rng_b(cfg.seed);
  const DatasetBundle a = generate_dataset(cfg, rng_a);
  const DatasetBundle b = generate_dataset(cfg, rng_b);
  REQUIRE(a.truth == b.truth);
  REQUIRE(a.data == b.data);
  REQUIRE(a.test_contexts == b.test_contexts);
  REQUIRE(dataset_to_json(a.data).dump() == dataset_to_json(b.data).dump());
}

TEST_CASE("gen config validation rejects bad values") {
  GenConfig cfg;
  cfg.n = 0;
  REQUIRE_THROWS_AS(validate_gen_config(cfg), std::invalid_argument);
  cfg = GenConfig{};
  cfg.domain = {3.0, 3.0};
  REQUIRE_THROWS_AS(validate_gen_config(cfg), std::invalid_argument);
  cfg = GenConfig{};
  cfg.num_contexts = 0;
  REQUIRE_THROWS_AS(validate_gen_config(cfg), std::invalid_argument);
}

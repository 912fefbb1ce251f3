#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "milpacq/loss.hpp"
#include "milpacq/search.hpp"

namespace milpacq {

struct GenConfig {
  std::size_t n = 5;
  std::size_t m = 5;
  std::size_t num_contexts = 250;
  std::size_t pos_per_context = 1;
  std::size_t neg_per_context = 2;
  std::size_t num_models = 5;
  std::size_t seeds_per_model = 5;
  Interval domain{0.0, 10.0};  // applied per variable
  std::size_t context_rows = 1;
  std::uint64_t seed = 0;
  std::size_t num_test_contexts = 100;
};

inline void validate_gen_config(const GenConfig& cfg) {
  if (cfg.n == 0 || cfg.m == 0) throw std::invalid_argument("gen config: n and m must be >= 1");
  if (cfg.num_contexts == 0 || cfg.pos_per_context == 0 || cfg.neg_per_context == 0)
    throw std::invalid_argument("gen config: context and example counts must be >= 1");
  if (cfg.num_models == 0 || cfg.seeds_per_model == 0) throw std::invalid_argument("gen config: model and seed counts must be >= 1");
  if (cfg.context_rows == 0) throw std::invalid_argument("gen config: context_rows must be >= 1");
  if (!(cfg.domain.lo < cfg.domain.hi)) throw std::invalid_argument("gen config: empty domain interval");
}

inline constexpr std::size_t kMinFeasiblePoints = 50;
inline constexpr std::size_t kGeneratorAttempts = 100;
inline constexpr std::size_t kContextRowAttempts = 50;
inline constexpr std::size_t kNegativeDrawAttempts = 1000;
inline constexpr std::size_t kContextProjectionSamples = 200;

// All-integer ground truth: unit-sphere rows whose offsets keep a reference
// point in the central half of the box feasible with margin u ~ U(0.5, 2),
// and a unit-sphere cost.  Certified to admit at least kMinFeasiblePoints
// integer points and a bounded nonempty optimum; resampled otherwise.
inline MilpModel generate_ground_truth(const GenConfig& cfg, std::mt19937_64& rng) {
  validate_gen_config(cfg);
  std::uniform_real_distribution<double> margin(0.5, 2.0);
  const double quarter = 0.25 * (cfg.domain.hi - cfg.domain.lo);
  std::uniform_real_distribution<double> central(cfg.domain.lo + quarter, cfg.domain.hi - quarter);

  for (std::size_t attempt = 0; attempt < kGeneratorAttempts; ++attempt) {
    MilpModel model;
    model.integer_mask.assign(cfg.n, true);
    model.domain_box.assign(cfg.n, cfg.domain);

    Vec z(cfg.n);
    for (double& v : z) v = central(rng);
    for (std::size_t j = 0; j < cfg.m; ++j) {
      Vec a = sample_unit_vector(cfg.n, rng);
      model.b.push_back(dot(a, z) + margin(rng));
      model.A.push_back(std::move(a));
    }
    model.c = sample_unit_vector(cfg.n, rng);

    if (!validate_model(model).ok()) continue;
    model = normalize_model(model);
    if (enumerate_feasible(model, {}).size() < kMinFeasiblePoints) continue;
    if (solve_milp(model, {}).status != SolveStatus::optimal) continue;
    return model;
  }
  throw std::runtime_error("degenerate generator config");
}

// One random context of cfg.context_rows half-spaces, each offset drawn
// between the min and max projection of sampled truth-feasible points so the
// context keeps at least one feasible integer point.  `feasible_points` may
// pass a precomputed lattice of truth-feasible points.
inline Context generate_context(const MilpModel& truth, const GenConfig& cfg, std::mt19937_64& rng,
                                const std::vector<Vec>* feasible_points = nullptr) {
  std::vector<Vec> local;
  if (!feasible_points) {
    local = enumerate_feasible(truth, {});
    feasible_points = &local;
  }
  if (feasible_points->empty()) throw std::runtime_error("generate_context: truth has no feasible integer point");

  Context ctx;
  std::vector<Vec> remaining = *feasible_points;
  for (std::size_t r = 0; r < cfg.context_rows; ++r) {
    bool placed = false;
    for (std::size_t attempt = 0; attempt < kContextRowAttempts && !placed; ++attempt) {
      Vec s = sample_unit_vector(truth.num_vars(), rng);
      std::uniform_int_distribution<std::size_t> pick(0, remaining.size() - 1);
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < kContextProjectionSamples; ++k) {
        const double v = dot(s, remaining[pick(rng)]);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      std::uniform_real_distribution<double> offset(lo, hi);
      const double t = (hi > lo) ? offset(rng) : lo;

      std::vector<Vec> kept;
      for (const Vec& p : remaining)
        if (dot(s, p) <= t + kFeasTol) kept.push_back(p);
      if (kept.empty()) continue;  // retains nothing; resample the row

      ctx.S.push_back(std::move(s));
      ctx.t.push_back(t);
      remaining = std::move(kept);
      placed = true;
    }
    if (!placed) throw std::runtime_error("generate_context: row resampling exhausted");
  }
  return ctx;
}

// pos_per_context contextual optima labeled 1 followed by neg_per_context
// uniform integer points rejected until the truth classifies them 0.
// Negatives may be infeasible or feasible-but-suboptimal; no distinction is
// recorded.  `truth` must be normalized (generated truths are).
inline std::vector<ContextualExample> sample_examples(const MilpModel& truth, const Context& ctx, const GenConfig& cfg,
                                                      std::mt19937_64& rng, ContextCache* cache = nullptr) {
  ContextCache local;
  ContextCache& c = cache ? *cache : local;
  const SolveOutcome& opt = solve_in_context(truth, ctx, c);
  if (opt.status != SolveStatus::optimal) throw std::invalid_argument("sample_examples: context infeasible for truth");

  // Snap masked coordinates to the integers the solver already reached.
  Vec pos = opt.point;
  for (std::size_t i = 0; i < pos.size(); ++i)
    if (truth.integer_mask[i]) pos[i] = std::round(pos[i]);
  if (detail::classify_normalized(truth, ctx, pos, c) != 1) throw std::logic_error("sample_examples: optimum not classified positive");

  std::vector<ContextualExample> out;
  for (std::size_t k = 0; k < cfg.pos_per_context; ++k) out.push_back({ctx, pos, 1});

  const long lo = static_cast<long>(std::ceil(cfg.domain.lo - 1e-9));
  const long hi = static_cast<long>(std::floor(cfg.domain.hi + 1e-9));
  std::uniform_int_distribution<long> coord(lo, hi);
  for (std::size_t k = 0; k < cfg.neg_per_context; ++k) {
    bool found = false;
    for (std::size_t draw = 0; draw < kNegativeDrawAttempts && !found; ++draw) {
      Vec x(truth.num_vars());
      for (double& v : x) v = static_cast<double>(coord(rng));
      if (detail::classify_normalized(truth, ctx, x, c) == 0) {
        out.push_back({ctx, std::move(x), 0});
        found = true;
      }
    }
    if (!found) throw std::runtime_error("sample_examples: no negative found");
  }
  return out;
}

// Training examples over num_contexts fresh contexts plus a held-out set of
// test contexts, all certified feasible for the truth.
inline std::pair<Dataset, std::vector<Context>> generate_contextual_data(const MilpModel& truth, const GenConfig& cfg,
                                                                         std::mt19937_64& rng) {
  validate_gen_config(cfg);
  const std::vector<Vec> feasible = enumerate_feasible(truth, {});
  if (feasible.size() < kMinFeasiblePoints) throw std::invalid_argument("generate_contextual_data: truth not certified");

  Dataset data;
  data.n = truth.num_vars();
  data.integer_mask = truth.integer_mask;
  data.domain_box = truth.domain_box;

  ContextCache cache;
  for (std::size_t k = 0; k < cfg.num_contexts; ++k) {
    Context ctx = generate_context(truth, cfg, rng, &feasible);
    std::vector<ContextualExample> ex = sample_examples(truth, ctx, cfg, rng, &cache);
    data.examples.insert(data.examples.end(), std::make_move_iterator(ex.begin()), std::make_move_iterator(ex.end()));
  }

  std::vector<Context> test_contexts;
  test_contexts.reserve(cfg.num_test_contexts);
  for (std::size_t k = 0; k < cfg.num_test_contexts; ++k) test_contexts.push_back(generate_context(truth, cfg, rng, &feasible));
  return {std::move(data), std::move(test_contexts)};
}

struct DatasetBundle {
  MilpModel truth;
  Dataset data;
  std::vector<Context> test_contexts;
};

inline DatasetBundle generate_dataset(const GenConfig& cfg, std::mt19937_64& rng) {
  DatasetBundle bundle;
  bundle.truth = generate_ground_truth(cfg, rng);
  auto [data, test] = generate_contextual_data(bundle.truth, cfg, rng);
  bundle.data = std::move(data);
  bundle.test_contexts = std::move(test);
  return bundle;
}

}  // namespace milpacq

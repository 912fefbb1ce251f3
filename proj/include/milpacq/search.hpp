#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "milpacq/loss.hpp"

namespace milpacq {

enum class Strategy { missle, sgd, sls };

inline const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::missle: return "missle";
    case Strategy::sgd: return "sgd";
    case Strategy::sls: return "sls";
  }
  return "?";
}

inline Strategy strategy_from_name(const std::string& s) {
  if (s == "missle") return Strategy::missle;
  if (s == "sgd") return Strategy::sgd;
  if (s == "sls") return Strategy::sls;
  throw std::invalid_argument("unknown strategy: " + s);
}

struct SearchConfig {
  std::size_t max_rows = 5;           // constraint rows in the hypothesis
  double restart_probability = 0.05;  // p
  double cutoff_seconds = 60.0;       // wall-clock budget
  double target_accuracy = 1.0;       // alpha: stop once 1 - L_S(theta) >= alpha
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::missle;
  std::size_t max_iterations = 0;  // 0 = unlimited; makes runs reproducible in tests
};

inline void validate_search_config(const SearchConfig& cfg) {
  if (cfg.max_rows == 0) throw std::invalid_argument("search config: m must be >= 1");
  if (cfg.restart_probability < 0.0 || cfg.restart_probability > 1.0) throw std::invalid_argument("search config: p must be in [0,1]");
  if (!(cfg.target_accuracy > 0.0) || cfg.target_accuracy > 1.0) throw std::invalid_argument("search config: alpha must be in (0,1]");
  if (!std::isfinite(cfg.cutoff_seconds)) throw std::invalid_argument("search config: cutoff must be finite");
}

enum class SearchAction { step, restart };

struct TraceRow {
  std::size_t iter = 0;
  double seconds = 0.0;
  double zero_one = 0.0;
  double surrogate = 0.0;
  double lambda = 0.0;
  SearchAction action = SearchAction::step;
};

struct SearchTrace {
  std::vector<TraceRow> iterations;
  double initial_zero_one = 1.0;
  double best_zero_one = 1.0;
  SolveStats stats;
};

struct SearchResult {
  MilpModel model;  // best-so-far hypothesis
  SearchTrace trace;
};

// Adaptive step length: large when the 0-1 loss is high, shrinking towards
// 0.05 as the loss approaches zero.
inline double learning_rate(double zero_one) {
  return 0.5 / std::sqrt(std::max(100.0 * (1.0 - zero_one), 1.0));
}

namespace detail {

// Randomized facet search: a subset of n positive points spans a candidate
// hyperplane; it is a hull facet iff all positives lie on one side.  Facets
// are oriented to contain every positive point.
struct FoundFacet {
  Vec a;
  double b = 0.0;
};

inline std::vector<FoundFacet> hull_facets(const std::vector<Vec>& positives, std::size_t want, std::mt19937_64& rng) {
  std::vector<FoundFacet> facets;
  const std::size_t n = positives[0].size();
  const std::size_t s = positives.size();
  if (s < n) return facets;

  std::vector<std::string> seen;
  auto facet_key = [n](const Vec& a, double b) {
    std::string key;
    key.reserve((n + 1) * 12);
    for (double v : a) key += std::to_string(std::llround(v * 1e7)) + ",";
    key += std::to_string(std::llround(b * 1e7));
    return key;
  };

  std::vector<std::size_t> idx(s);
  for (std::size_t i = 0; i < s; ++i) idx[i] = i;

  const std::size_t attempts = std::max<std::size_t>(400, 200 * want);
  std::vector<Vec> subset(n);
  for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
    // Partial Fisher-Yates: the first n entries become the random subset.
    for (std::size_t i = 0; i < n; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, s - 1);
      std::swap(idx[i], idx[pick(rng)]);
      subset[i] = positives[idx[i]];
    }
    auto normal = hyperplane_normal(subset);
    if (!normal) continue;

    const double b0 = dot(*normal, subset[0]);
    double maxv = -std::numeric_limits<double>::infinity();
    double minv = std::numeric_limits<double>::infinity();
    for (const Vec& p : positives) {
      const double v = dot(*normal, p);
      maxv = std::max(maxv, v);
      minv = std::min(minv, v);
    }
    FoundFacet f;
    if (maxv <= b0 + 1e-7) {
      f.a = *normal;
      f.b = b0;
    } else if (minv >= b0 - 1e-7) {
      f.a = *normal;
      for (double& v : f.a) v = -v;
      f.b = -b0;
    } else {
      continue;  // positives on both sides: not a facet
    }
    std::string key = facet_key(f.a, f.b);
    if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
      seen.push_back(std::move(key));
      facets.push_back(std::move(f));
    }
  }
  return facets;
}

}  // namespace detail

// Initial hypothesis: m rows sampled from the facets of the convex hull of
// the positive points (each containing the hull), a cost direction drawn
// uniformly from the unit sphere, and the dataset's mask and box.  When the
// hull is degenerate, rows are random hyperplanes tangent to the bounding
// sphere of the positives.
inline MilpModel initial_candidate(const Dataset& data, std::size_t m, std::mt19937_64& rng) {
  std::vector<Vec> positives;
  for (const ContextualExample& ex : data.examples)
    if (ex.label == 1) positives.push_back(ex.point);
  if (positives.empty()) throw std::invalid_argument("initial_candidate: no positive examples");
  const std::size_t n = data.n;

  std::vector<detail::FoundFacet> facets = detail::hull_facets(positives, m, rng);

  MilpModel model;
  model.integer_mask = data.integer_mask;
  model.domain_box = data.domain_box;

  if (facets.empty()) {
    Vec center(n, 0.0);
    for (const Vec& p : positives)
      for (std::size_t i = 0; i < n; ++i) center[i] += p[i];
    for (double& v : center) v /= static_cast<double>(positives.size());
    double radius = 0.0;
    for (const Vec& p : positives) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) d2 += (p[i] - center[i]) * (p[i] - center[i]);
      radius = std::max(radius, std::sqrt(d2));
    }
    for (std::size_t j = 0; j < m; ++j) {
      Vec a = sample_unit_vector(n, rng);
      model.b.push_back(dot(a, center) + radius);
      model.A.push_back(std::move(a));
    }
  } else if (facets.size() >= m) {
    // m facets uniformly without replacement.
    std::vector<std::size_t> order(facets.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = 0; i < m; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
      std::swap(order[i], order[pick(rng)]);
      model.A.push_back(facets[order[i]].a);
      model.b.push_back(facets[order[i]].b);
    }
  } else {
    // Fewer facets than rows: reuse with replacement.
    for (const detail::FoundFacet& f : facets) {
      model.A.push_back(f.a);
      model.b.push_back(f.b);
    }
    std::uniform_int_distribution<std::size_t> pick(0, facets.size() - 1);
    while (model.A.size() < m) {
      const detail::FoundFacet& f = facets[pick(rng)];
      model.A.push_back(f.a);
      model.b.push_back(f.b);
    }
  }

  model.c = sample_unit_vector(n, rng);
  return normalize_model(model);
}

namespace detail {

// One step on a parameter block, renormalizing only the touched parts so
// untouched blocks stay bitwise identical.  `delta` holds the (scaled)
// subtrahend per block; a step that would zero out c or a row keeps the
// original value.
enum class MoveBlock { cost, rows, offsets, all };

inline MilpModel apply_step(const MilpModel& m, const Gradient& delta, double lambda, MoveBlock block) {
  const bool step_c = block == MoveBlock::cost || block == MoveBlock::all;
  const bool step_rows = block == MoveBlock::rows || block == MoveBlock::all;
  const bool step_offsets = block == MoveBlock::offsets || block == MoveBlock::all;

  MilpModel out = m;
  if (step_offsets)
    for (std::size_t j = 0; j < m.num_rows(); ++j) out.b[j] -= lambda * delta.d_b[j];
  if (step_rows) {
    for (std::size_t j = 0; j < m.num_rows(); ++j) {
      Vec row = m.A[j];
      for (std::size_t i = 0; i < row.size(); ++i) row[i] -= lambda * delta.d_A[j][i];
      const double nrm = norm2(row);
      if (nrm > kDegenerateNorm) {
        for (double& v : row) v /= nrm;
        out.A[j] = std::move(row);
        out.b[j] /= nrm;
      }
    }
  }
  // An offsets-only step leaves the (unit-norm) rows alone, so the rows need
  // no renormalization there.
  if (step_c) {
    Vec c = m.c;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= lambda * delta.d_c[i];
    const double nrm = norm2(c);
    if (nrm > kDegenerateNorm) {
      for (double& v : c) v /= nrm;
      out.c = std::move(c);
    }
  }
  return out;
}

}  // namespace detail

// The three gradient-defined neighbors: a descent step of length lambda on c
// only, on A only, and on b only, each renormalized afterwards.
inline std::array<MilpModel, 3> neighborhood(const MilpModel& model, const Dataset& data, double lambda, ContextCache* cache = nullptr) {
  const Gradient g = surrogate_gradient(model, data, cache);
  return {detail::apply_step(model, g, lambda, detail::MoveBlock::cost),
          detail::apply_step(model, g, lambda, detail::MoveBlock::rows),
          detail::apply_step(model, g, lambda, detail::MoveBlock::offsets)};
}

namespace detail {

struct ModelEval {
  LossBreakdown breakdown;
  ContextCache cache;
};

inline ModelEval evaluate_model(const MilpModel& m, const Dataset& data) {
  ModelEval e;
  e.breakdown = surrogate_loss(m, data, &e.cache);
  return e;
}

// Greedy pick: minimal true loss, then minimal surrogate, then the fixed
// candidate order (c-move, A-move, b-move).
inline std::size_t pick_candidate(const std::vector<ModelEval>& evals) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < evals.size(); ++i) {
    const LossBreakdown& a = evals[i].breakdown;
    const LossBreakdown& b = evals[best].breakdown;
    if (a.zero_one < b.zero_one || (a.zero_one == b.zero_one && a.surrogate < b.surrogate)) best = i;
  }
  return best;
}

// Moves the current hypothesis to the greedy pick among `cands`, charging the
// dropped candidates' solver work to `stats`.
inline void adopt_best(MilpModel& current, ModelEval& eval, std::vector<MilpModel>& cands, const Dataset& data, SolveStats& stats) {
  std::vector<ModelEval> evals;
  evals.reserve(cands.size());
  for (const MilpModel& cand : cands) evals.push_back(evaluate_model(cand, data));
  const std::size_t pick = pick_candidate(evals);
  for (std::size_t i = 0; i < evals.size(); ++i) {
    if (i == pick) continue;
    stats.nodes += evals[i].cache.stats.nodes;
    stats.lp_solves += evals[i].cache.stats.lp_solves;
    stats.pivots += evals[i].cache.stats.pivots;
  }
  current = std::move(cands[pick]);
  eval = std::move(evals[pick]);
}

// Shared search skeleton: initial candidate, wall-clock cutoff checked
// between iterations, accuracy stop, optional random restarts, best-so-far
// tracking.  The successor produced by `step` is adopted unconditionally;
// the best-so-far tracker protects the result.
template <class StepFn>
inline SearchResult search_loop(const Dataset& data, const SearchConfig& cfg, bool restarts, StepFn&& step) {
  validate_search_config(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  MilpModel current = initial_candidate(data, cfg.max_rows, rng);
  ModelEval eval = evaluate_model(current, data);

  SearchResult res;
  res.trace.initial_zero_one = eval.breakdown.zero_one;
  res.model = current;
  res.trace.best_zero_one = eval.breakdown.zero_one;

  auto charge = [&res](const SolveStats& s) {
    res.trace.stats.nodes += s.nodes;
    res.trace.stats.lp_solves += s.lp_solves;
    res.trace.stats.pivots += s.pivots;
  };
  charge(eval.cache.stats);

  std::size_t iter = 0;
  while (elapsed() < cfg.cutoff_seconds && (1.0 - eval.breakdown.zero_one) < cfg.target_accuracy &&
         (cfg.max_iterations == 0 || iter < cfg.max_iterations)) {
    const double lambda = learning_rate(eval.breakdown.zero_one);
    SearchAction action = SearchAction::step;
    if (restarts && coin(rng) < cfg.restart_probability) {
      current = initial_candidate(data, cfg.max_rows, rng);
      eval = evaluate_model(current, data);
      action = SearchAction::restart;
    } else {
      step(current, eval, lambda, rng, res.trace.stats);
    }
    charge(eval.cache.stats);
    if (eval.breakdown.zero_one < res.trace.best_zero_one) {
      res.trace.best_zero_one = eval.breakdown.zero_one;
      res.model = current;
    }
    ++iter;
    res.trace.iterations.push_back({iter, elapsed(), eval.breakdown.zero_one, eval.breakdown.surrogate, lambda, action});
  }
  return res;
}

}  // namespace detail

// Gradient-guided stochastic local search: per iteration, either restart with
// probability p or move to the neighbor with minimal true 0-1 loss among the
// three gradient moves.
inline SearchResult missle_search(const Dataset& data, const SearchConfig& cfg) {
  return detail::search_loop(data, cfg, /*restarts=*/true,
                             [&data](MilpModel& current, detail::ModelEval& eval, double lambda, std::mt19937_64&, SolveStats& stats) {
                               std::array<MilpModel, 3> moves = neighborhood(current, data, lambda, &eval.cache);
                               std::vector<MilpModel> cands(std::make_move_iterator(moves.begin()), std::make_move_iterator(moves.end()));
                               detail::adopt_best(current, eval, cands, data, stats);
                             });
}

// Pure gradient descent on the surrogate: one joint step on c, A and b per
// iteration, renormalized; no neighborhood selection, no restarts.
inline SearchResult sgd_baseline(const Dataset& data, const SearchConfig& cfg) {
  return detail::search_loop(data, cfg, /*restarts=*/false,
                             [&data](MilpModel& current, detail::ModelEval& eval, double lambda, std::mt19937_64&, SolveStats&) {
                               const Gradient g = surrogate_gradient(current, data, &eval.cache);
                               current = detail::apply_step(current, g, lambda, detail::MoveBlock::all);
                               eval = detail::evaluate_model(current, data);
                             });
}

// Uninformed stochastic local search: the three neighbors perturb c, A and b
// (respectively) with isotropic Gaussian noise of scale lambda; greedy
// selection on the true loss and the same restart rule as missle_search.
inline SearchResult sls_baseline(const Dataset& data, const SearchConfig& cfg) {
  return detail::search_loop(data, cfg, /*restarts=*/true,
                             [&data](MilpModel& current, detail::ModelEval& eval, double lambda, std::mt19937_64& rng, SolveStats& stats) {
                               std::normal_distribution<double> gauss(0.0, 1.0);
                               const std::size_t n = current.num_vars();
                               const std::size_t m = current.num_rows();
                               // Fixed draw order: c noise, A noise, b noise.
                               // apply_step subtracts, which only mirrors the
                               // symmetric noise.
                               Gradient noise{Vec(n), Mat(m, Vec(n)), Vec(m)};
                               for (double& v : noise.d_c) v = gauss(rng);
                               for (Vec& row : noise.d_A)
                                 for (double& v : row) v = gauss(rng);
                               for (double& v : noise.d_b) v = gauss(rng);
                               std::vector<MilpModel> cands;
                               cands.push_back(detail::apply_step(current, noise, lambda, detail::MoveBlock::cost));
                               cands.push_back(detail::apply_step(current, noise, lambda, detail::MoveBlock::rows));
                               cands.push_back(detail::apply_step(current, noise, lambda, detail::MoveBlock::offsets));
                               detail::adopt_best(current, eval, cands, data, stats);
                             });
}

inline SearchResult run_search(const Dataset& data, const SearchConfig& cfg) {
  switch (cfg.strategy) {
    case Strategy::missle: return missle_search(data, cfg);
    case Strategy::sgd: return sgd_baseline(data, cfg);
    case Strategy::sls: return sls_baseline(data, cfg);
  }
  throw std::invalid_argument("run_search: bad strategy");
}

}  // namespace milpacq

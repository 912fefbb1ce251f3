#pragma once

#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "milpacq/solver.hpp"

namespace milpacq {

// Optimality slack of the contextual classifier, absolute on a unit-norm cost
// vector: a feasible point counts as optimal when c.x >= v* - eps_opt.
inline constexpr double kEpsOpt = 1e-6;

inline constexpr std::size_t kNoRow = static_cast<std::size_t>(-1);

enum class CaseTag { correct, pos_feasible_subopt, pos_infeasible, neg_predicted_optimal };

inline const char* case_tag_name(CaseTag t) {
  switch (t) {
    case CaseTag::correct: return "correct";
    case CaseTag::pos_feasible_subopt: return "pos_feasible_subopt";
    case CaseTag::pos_infeasible: return "pos_infeasible";
    case CaseTag::neg_predicted_optimal: return "neg_predicted_optimal";
  }
  return "?";
}

struct ExampleLoss {
  CaseTag tag = CaseTag::correct;
  double contribution = 0.0;
  // Set when the model is infeasible in a positive example's context while
  // the point satisfies every model row: the regret and dist(x*) terms are
  // dropped because no contextual optimum exists.
  bool missing_optimum = false;
};

struct LossBreakdown {
  double zero_one = 0.0;   // fraction of misclassified examples
  double surrogate = 0.0;  // mean of per-example contributions
  std::vector<ExampleLoss> per_example;
};

struct Gradient {
  Vec d_c;
  Mat d_A;
  Vec d_b;
};

// Memo of contextual solves for one fixed model.  Keys are the raw bytes of
// the context, so a cache must never be shared between different models.
struct ContextCache {
  std::unordered_map<std::string, SolveOutcome> solved;
  SolveStats stats;
};

inline std::string context_key(const Context& ctx) {
  std::string key;
  key.reserve((ctx.S.size() * (ctx.S.empty() ? 0 : ctx.S[0].size()) + ctx.t.size()) * sizeof(double));
  auto put = [&key](double v) {
    char buf[sizeof(double)];
    std::memcpy(buf, &v, sizeof(double));
    key.append(buf, sizeof(double));
  };
  for (const Vec& row : ctx.S)
    for (double v : row) put(v);
  key.push_back('|');
  for (double v : ctx.t) put(v);
  return key;
}

inline const SolveOutcome& solve_in_context(const MilpModel& model, const Context& ctx, ContextCache& cache) {
  const std::string key = context_key(ctx);
  auto it = cache.solved.find(key);
  if (it != cache.solved.end()) return it->second;
  SolveOutcome out = solve_milp(model, ctx, &cache.stats);
  return cache.solved.emplace(std::move(key), std::move(out)).first->second;
}

// Euclidean distance from x to the hyperplane of row j: |a_j.x - b_j| / ||a_j||.
inline double distance_to_hyperplane(const MilpModel& m, std::size_t j, const Vec& x) {
  if (j >= m.num_rows()) throw std::invalid_argument("distance_to_hyperplane: row out of range");
  const double nrm = norm2(m.A[j]);
  if (nrm < kDegenerateNorm) throw std::runtime_error("degenerate constraint row " + std::to_string(j));
  return std::fabs(dot(m.A[j], x) - m.b[j]) / nrm;
}

// Objective gap c.(x* - x) under the model's own cost vector; the caller
// supplies a contextual optimum x*.
inline double regret(const MilpModel& m, const Vec& x, const Vec& x_star) {
  return dot(m.c, x_star) - dot(m.c, x);
}

namespace detail {

inline std::size_t argmin_distance(const MilpModel& m, const Vec& x) {
  std::size_t jmin = kNoRow;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m.num_rows(); ++j) {
    const double d = distance_to_hyperplane(m, j, x);
    if (d < best) {  // strict: smallest row index wins ties
      best = d;
      jmin = j;
    }
  }
  return jmin;
}

// Classifier on a model that is already normalized.
inline int classify_normalized(const MilpModel& m, const Context& ctx, const Vec& x, ContextCache& cache) {
  const SolveOutcome& out = solve_in_context(m, ctx, cache);
  if (out.status != SolveStatus::optimal) return 0;
  if (!is_feasible(m, ctx, x)) return 0;
  return dot(m.c, x) >= out.value - kEpsOpt ? 1 : 0;
}

struct ExampleAnalysis {
  CaseTag tag = CaseTag::correct;
  double contribution = 0.0;
  bool missing_optimum = false;
  const Vec* x_star = nullptr;         // points into the cache outcome
  double reg = 0.0;                    // c.(x* - x), when x_star is set
  std::size_t jmin_x = kNoRow;         // argmin_j dist_j(x)
  std::size_t jmin_x_star = kNoRow;    // argmin_j dist_j(x*)
  std::vector<std::size_t> violated;   // rows with a_j.x > b_j + feas_tol
};

// One example against the model as given (no internal renormalization, so the
// surrogate stays differentiable in the raw parameters).  Case membership
// follows the classifier semantics with eps_opt / feas_tol.
inline ExampleAnalysis analyze_example(const MilpModel& m, const ContextualExample& ex, ContextCache& cache) {
  ExampleAnalysis a;
  const SolveOutcome& out = solve_in_context(m, ex.context, cache);
  const bool model_feasible = out.status == SolveStatus::optimal;
  const bool x_feasible = is_feasible(m, ex.context, ex.point);
  const int predicted = (model_feasible && x_feasible && dot(m.c, ex.point) >= out.value - kEpsOpt) ? 1 : 0;

  if (predicted == ex.label) return a;  // correct, contributes 0

  if (ex.label == 1) {
    for (std::size_t j = 0; j < m.num_rows(); ++j)
      if (dot(m.A[j], ex.point) > m.b[j] + kFeasTol) a.violated.push_back(j);

    if (!a.violated.empty()) {
      // Positive predicted infeasible: enlarge the region by pulling every
      // violated hyperplane towards the point.
      a.tag = CaseTag::pos_infeasible;
      for (std::size_t j : a.violated) a.contribution += distance_to_hyperplane(m, j, ex.point);
      return a;
    }

    a.tag = CaseTag::pos_feasible_subopt;
    a.jmin_x = argmin_distance(m, ex.point);
    const double dist_x = (a.jmin_x == kNoRow) ? 0.0 : distance_to_hyperplane(m, a.jmin_x, ex.point);
    if (!model_feasible) {
      // No contextual optimum exists: keep only the boundary term.
      a.missing_optimum = true;
      a.contribution = dist_x;
      return a;
    }
    // Positive, feasible, suboptimal: raise its estimated cost, push the
    // current optimum out, and bring the point towards the boundary.
    a.x_star = &out.point;
    a.reg = out.value - dot(m.c, ex.point);
    a.jmin_x_star = argmin_distance(m, out.point);
    const double dist_xs = (a.jmin_x_star == kNoRow) ? 0.0 : distance_to_hyperplane(m, a.jmin_x_star, out.point);
    a.contribution = a.reg + dist_xs + dist_x;
    return a;
  }

  // Negative predicted optimal: make it suboptimal or infeasible.  The exp
  // keeps the cost term lower-bounded by 0.
  a.tag = CaseTag::neg_predicted_optimal;
  a.x_star = &out.point;
  a.reg = out.value - dot(m.c, ex.point);
  a.jmin_x = argmin_distance(m, ex.point);
  const double dist_x = (a.jmin_x == kNoRow) ? 0.0 : distance_to_hyperplane(m, a.jmin_x, ex.point);
  a.contribution = std::exp(-std::fabs(a.reg)) + dist_x;
  return a;
}

}  // namespace detail

// h(x, ctx) = 1 iff x is a contextual optimum of the model.  The threshold is
// applied after renormalization, making the classification invariant under
// positive rescaling of c.
inline int classify(const MilpModel& model, const Context& ctx, const Vec& x, ContextCache* cache = nullptr) {
  const MilpModel norm = normalize_model(model);
  if (cache) return detail::classify_normalized(norm, ctx, x, *cache);
  ContextCache local;
  return detail::classify_normalized(norm, ctx, x, local);
}

// Fraction of examples where classify() disagrees with the label.
inline double zero_one_loss(const MilpModel& model, const Dataset& data, ContextCache* cache = nullptr) {
  if (data.examples.empty()) throw std::invalid_argument("zero_one_loss: empty dataset");
  const MilpModel norm = normalize_model(model);
  ContextCache local;
  ContextCache& c = cache ? *cache : local;
  std::size_t wrong = 0;
  for (const ContextualExample& ex : data.examples)
    if (detail::classify_normalized(norm, ex.context, ex.point, c) != ex.label) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

// Case-wise surrogate of the 0-1 loss.  Expects a normalized model; each
// misclassified example contributes per its case, correct examples contribute
// exactly 0.  x* is recomputed per context through the solver.
inline LossBreakdown surrogate_loss(const MilpModel& model, const Dataset& data, ContextCache* cache = nullptr) {
  if (data.examples.empty()) throw std::invalid_argument("surrogate_loss: empty dataset");
  ContextCache local;
  ContextCache& c = cache ? *cache : local;
  LossBreakdown out;
  out.per_example.reserve(data.size());
  std::size_t wrong = 0;
  double total = 0.0;
  for (const ContextualExample& ex : data.examples) {
    const detail::ExampleAnalysis a = detail::analyze_example(model, ex, c);
    if (a.tag != CaseTag::correct) ++wrong;
    total += a.contribution;
    out.per_example.push_back({a.tag, a.contribution, a.missing_optimum});
  }
  out.zero_one = static_cast<double>(wrong) / static_cast<double>(data.size());
  out.surrogate = total / static_cast<double>(data.size());
  return out;
}

namespace detail {

// d/d(a_j), d/d(b_j) of dist_j(x) = |a_j.x - b_j| / ||a_j||, including the
// quotient-rule dependence on ||a_j|| (A itself is being learned).  Uses
// subgradient 0 at the kink r = 0.
inline void add_distance_gradient(Gradient& g, const MilpModel& m, std::size_t j, const Vec& x, double weight) {
  if (j == kNoRow) return;
  const double r = dot(m.A[j], x) - m.b[j];
  const double rho = norm2(m.A[j]);
  const double s = sign0(r);
  const double rho3 = rho * rho * rho;
  for (std::size_t i = 0; i < x.size(); ++i)
    g.d_A[j][i] += weight * (s * x[i] / rho - std::fabs(r) * m.A[j][i] / rho3);
  g.d_b[j] += weight * (-s / rho);
}

}  // namespace detail

// Exact analytical gradient of the surrogate, holding each x* fixed (envelope
// treatment: the argmax is never differentiated through).  min_j picks the
// smallest row index on ties, matching surrogate_loss.
inline Gradient surrogate_gradient(const MilpModel& model, const Dataset& data, ContextCache* cache = nullptr) {
  if (data.examples.empty()) throw std::invalid_argument("surrogate_gradient: empty dataset");
  ContextCache local;
  ContextCache& c = cache ? *cache : local;
  const std::size_t n = model.num_vars();
  const std::size_t m = model.num_rows();
  Gradient g{Vec(n, 0.0), Mat(m, Vec(n, 0.0)), Vec(m, 0.0)};

  for (const ContextualExample& ex : data.examples) {
    const detail::ExampleAnalysis a = detail::analyze_example(model, ex, c);
    switch (a.tag) {
      case CaseTag::correct:
        break;
      case CaseTag::pos_feasible_subopt:
        if (!a.missing_optimum) {
          for (std::size_t i = 0; i < n; ++i) g.d_c[i] += (*a.x_star)[i] - ex.point[i];
          detail::add_distance_gradient(g, model, a.jmin_x_star, *a.x_star, 1.0);
        }
        detail::add_distance_gradient(g, model, a.jmin_x, ex.point, 1.0);
        break;
      case CaseTag::pos_infeasible:
        for (std::size_t j : a.violated) detail::add_distance_gradient(g, model, j, ex.point, 1.0);
        break;
      case CaseTag::neg_predicted_optimal: {
        const double e = std::exp(-std::fabs(a.reg));
        const double s = sign0(a.reg);
        for (std::size_t i = 0; i < n; ++i) g.d_c[i] += e * (-s) * ((*a.x_star)[i] - ex.point[i]);
        detail::add_distance_gradient(g, model, a.jmin_x, ex.point, 1.0);
        break;
      }
    }
  }

  const double inv_s = 1.0 / static_cast<double>(data.size());
  for (double& v : g.d_c) v *= inv_s;
  for (Vec& row : g.d_A)
    for (double& v : row) v *= inv_s;
  for (double& v : g.d_b) v *= inv_s;
  return g;
}

}  // namespace milpacq

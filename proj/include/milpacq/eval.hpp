#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "milpacq/solver.hpp"

namespace milpacq {

struct EvalReport {
  double recall = 0.0;
  double precision = 0.0;
  double infeasibility = 0.0;
  double mean_regret = 0.0;  // relative, against the true optimal value
  std::size_t num_test_contexts = 0;
  std::size_t num_feasible_contexts = 0;  // contexts entering the regret mean
};

// Region overlap over the integer lattice of the shared box:
//   recall    = |F_learned and F_truth| / |F_truth|
//   precision = |F_learned and F_truth| / |F_learned|
// with the convention 1.0 when the respective denominator set is empty.
inline std::pair<double, double> region_metrics(const MilpModel& learned, const MilpModel& truth) {
  if (learned.num_vars() != truth.num_vars()) throw std::invalid_argument("region_metrics: dimension mismatch");
  if (learned.domain_box != truth.domain_box) throw std::invalid_argument("region_metrics: models must share the domain box");
  for (std::size_t i = 0; i < truth.num_vars(); ++i)
    if (!learned.integer_mask[i] || !truth.integer_mask[i]) throw std::invalid_argument("region_metrics: models must be all-integer");
  if (lattice_point_count(truth.domain_box) > kMaxLatticePoints) throw std::invalid_argument("region_metrics: box too large");

  long n_truth = 0, n_learned = 0, n_both = 0;
  const Context empty;
  detail::for_each_lattice_point(truth.domain_box, [&](const Vec& x) {
    const bool ft = is_feasible(truth, empty, x);
    const bool fl = is_feasible(learned, empty, x);
    n_truth += ft;
    n_learned += fl;
    n_both += ft && fl;
  });
  const double recall = (n_truth == 0) ? 1.0 : static_cast<double>(n_both) / static_cast<double>(n_truth);
  const double precision = (n_learned == 0) ? 1.0 : static_cast<double>(n_both) / static_cast<double>(n_learned);
  return {recall, precision};
}

struct ContextualMetrics {
  double infeasibility = 0.0;
  double mean_regret = 0.0;
  std::size_t feasible_contexts = 0;
};

// Per held-out context: the learned model's optimum either violates the truth
// (counted infeasible) or scores a relative regret under the TRUE cost
// against the true contextual optimum.  0/0 regret is 0.
inline ContextualMetrics contextual_metrics(const MilpModel& learned, const MilpModel& truth, const std::vector<Context>& test_contexts) {
  ContextualMetrics out;
  if (test_contexts.empty()) return out;

  std::size_t infeasible = 0;
  double regret_sum = 0.0;
  for (const Context& ctx : test_contexts) {
    const SolveOutcome learned_opt = solve_milp(learned, ctx);
    if (learned_opt.status != SolveStatus::optimal || !is_feasible(truth, ctx, learned_opt.point)) {
      ++infeasible;
      continue;
    }
    const SolveOutcome true_opt = solve_milp(truth, ctx);
    if (true_opt.status != SolveStatus::optimal) throw std::invalid_argument("contextual_metrics: test context infeasible for truth");
    const double gap = dot(truth.c, true_opt.point) - dot(truth.c, learned_opt.point);
    const double denom = std::fabs(dot(truth.c, true_opt.point));
    regret_sum += (gap == 0.0) ? 0.0 : gap / std::max(denom, 1e-12);
    ++out.feasible_contexts;
  }
  out.infeasibility = static_cast<double>(infeasible) / static_cast<double>(test_contexts.size());
  out.mean_regret = (out.feasible_contexts > 0) ? regret_sum / static_cast<double>(out.feasible_contexts) : 0.0;
  return out;
}

inline EvalReport evaluate(const MilpModel& learned, const MilpModel& truth, const std::vector<Context>& test_contexts) {
  EvalReport report;
  const auto [recall, precision] = region_metrics(learned, truth);
  report.recall = recall;
  report.precision = precision;
  const ContextualMetrics cm = contextual_metrics(learned, truth, test_contexts);
  report.infeasibility = cm.infeasibility;
  report.mean_regret = cm.mean_regret;
  report.num_test_contexts = test_contexts.size();
  report.num_feasible_contexts = cm.feasible_contexts;
  return report;
}

}  // namespace milpacq

#pragma once

// Shared fixtures and independent test oracles.  Everything here must stay
// independent of the implementation paths it is used to check: the gradient
// oracle uses central finite differences over the loss value only, and the
// worked-example model is written out from its raw coefficients.

#include <cmath>
#include <random>
#include <vector>

#include "milpacq/milpacq.hpp"

namespace testutil {

using namespace milpacq;

// Two products, two machine-capacity rows; integer optimum (3,4) value 132,
// and (6,0) value 120 once x2 <= 3 is imposed.
inline MilpModel worked_example_model() {
  MilpModel m;
  m.A = {{40.0, 30.0}, {20.0, 40.0}};
  m.b = {240.0, 240.0};
  m.c = {20.0, 18.0};
  m.integer_mask = {true, true};
  m.domain_box = {{0.0, 10.0}, {0.0, 10.0}};
  return m;
}

inline Context worked_example_context() {
  Context ctx;
  ctx.S = {{0.0, 1.0}};
  ctx.t = {3.0};
  return ctx;
}

inline GenConfig small_gen_config(std::uint64_t seed, std::size_t n = 3, std::size_t m = 3, double hi = 8.0,
                                  std::size_t contexts = 25, std::size_t test_contexts = 10) {
  GenConfig cfg;
  cfg.n = n;
  cfg.m = m;
  cfg.domain = {0.0, hi};
  cfg.num_contexts = contexts;
  cfg.num_test_contexts = test_contexts;
  cfg.seed = seed;
  return cfg;
}

// Random all-integer model in the generator's family, without certification.
inline MilpModel random_model(std::size_t n, std::size_t m, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> margin(0.5, 2.0);
  std::uniform_real_distribution<double> central(0.25 * hi, 0.75 * hi);
  MilpModel model;
  model.integer_mask.assign(n, true);
  model.domain_box.assign(n, {0.0, hi});
  Vec z(n);
  for (double& v : z) v = central(rng);
  for (std::size_t j = 0; j < m; ++j) {
    Vec a = sample_unit_vector(n, rng);
    model.b.push_back(dot(a, z) + margin(rng));
    model.A.push_back(std::move(a));
  }
  model.c = sample_unit_vector(n, rng);
  return normalize_model(model);
}

inline Context random_context(std::size_t n, std::mt19937_64& rng, double offset_lo = 0.0, double offset_hi = 8.0) {
  std::uniform_real_distribution<double> off(offset_lo, offset_hi);
  Context ctx;
  ctx.S.push_back(sample_unit_vector(n, rng));
  ctx.t.push_back(off(rng));
  return ctx;
}

// Flattened view of the model parameters for finite differencing: c first,
// then A row-major, then b.
inline std::size_t parameter_count(const MilpModel& m) {
  return m.num_vars() + m.num_rows() * m.num_vars() + m.num_rows();
}

inline double get_parameter(const MilpModel& m, std::size_t idx) {
  const std::size_t n = m.num_vars();
  if (idx < n) return m.c[idx];
  idx -= n;
  if (idx < m.num_rows() * n) return m.A[idx / n][idx % n];
  idx -= m.num_rows() * n;
  return m.b[idx];
}

inline void set_parameter(MilpModel& m, std::size_t idx, double v) {
  const std::size_t n = m.num_vars();
  if (idx < n) {
    m.c[idx] = v;
    return;
  }
  idx -= n;
  if (idx < m.num_rows() * n) {
    m.A[idx / n][idx % n] = v;
    return;
  }
  idx -= m.num_rows() * n;
  m.b[idx] = v;
}

inline double gradient_component(const Gradient& g, std::size_t idx, std::size_t n, std::size_t rows) {
  if (idx < n) return g.d_c[idx];
  idx -= n;
  if (idx < rows * n) return g.d_A[idx / n][idx % n];
  idx -= rows * n;
  return g.d_b[idx];
}

// Central finite differences of the surrogate loss value.
inline double fd_component(const MilpModel& model, const Dataset& data, std::size_t idx, double h) {
  MilpModel plus = model;
  set_parameter(plus, idx, get_parameter(model, idx) + h);
  MilpModel minus = model;
  set_parameter(minus, idx, get_parameter(model, idx) - h);
  const double fp = surrogate_loss(plus, data).surrogate;
  const double fm = surrogate_loss(minus, data).surrogate;
  return (fp - fm) / (2.0 * h);
}

// Case signature used to position FD checks away from case boundaries: the
// per-example tags plus quantized contextual optima.
inline std::vector<long> case_signature(const MilpModel& model, const Dataset& data) {
  std::vector<long> sig;
  ContextCache cache;
  const LossBreakdown b = surrogate_loss(model, data, &cache);
  for (const ExampleLoss& e : b.per_example) {
    sig.push_back(static_cast<long>(e.tag));
    sig.push_back(e.missing_optimum ? 1 : 0);
  }
  for (const ContextualExample& ex : data.examples) {
    const SolveOutcome& out = solve_in_context(model, ex.context, cache);
    if (out.status == SolveStatus::optimal)
      for (double v : out.point) sig.push_back(std::lround(v * 1e6));
    else
      sig.push_back(-999999);
  }
  return sig;
}

// True iff every per-coordinate perturbation of +-delta leaves the case
// signature unchanged (the FD stencil never crosses a kink).
inline bool cases_stable(const MilpModel& model, const Dataset& data, double delta) {
  const std::vector<long> base = case_signature(model, data);
  for (std::size_t idx = 0; idx < parameter_count(model); ++idx) {
    for (double s : {-delta, delta}) {
      MilpModel pert = model;
      set_parameter(pert, idx, get_parameter(model, idx) + s);
      if (case_signature(pert, data) != base) return false;
    }
  }
  return true;
}

}  // namespace testutil

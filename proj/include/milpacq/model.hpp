#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "milpacq/linalg.hpp"

namespace milpacq {

// Rows/cost below this 2-norm are treated as degenerate.
inline constexpr double kDegenerateNorm = 1e-12;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Interval&) const = default;
};
using Box = std::vector<Interval>;

// The learnable hypothesis: maximize c.x subject to A x <= b, the finite
// domain box, and integrality on masked variables.
struct MilpModel {
  Mat A;
  Vec b;
  Vec c;
  std::vector<bool> integer_mask;
  Box domain_box;

  std::size_t num_vars() const { return c.size(); }
  std::size_t num_rows() const { return A.size(); }
  bool operator==(const MilpModel&) const = default;
};

// A temporary restriction S x <= t conjoined to a model. q = 0 is the
// empty context.
struct Context {
  Mat S;
  Vec t;

  std::size_t rows() const { return S.size(); }
  bool empty() const { return S.empty(); }
  bool operator==(const Context&) const = default;
};

struct ContextualExample {
  Context context;
  Vec point;
  int label = 0;  // y in {0,1}
  bool operator==(const ContextualExample&) const = default;
};

struct Dataset {
  std::vector<ContextualExample> examples;
  std::size_t n = 0;
  std::vector<bool> integer_mask;
  Box domain_box;

  std::size_t size() const { return examples.size(); }
  bool operator==(const Dataset&) const = default;
};

struct ValidationResult {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Collects every invariant violation; violations are data, not faults.
// A model without constraint rows (m = 0) is accepted: the domain box alone
// defines the feasible set.
inline ValidationResult validate_model(const MilpModel& m) {
  ValidationResult r;
  const std::size_t n = m.c.size();
  if (n == 0) r.violations.push_back("empty cost vector (n = 0)");
  if (m.b.size() != m.A.size()) r.violations.push_back("dimension mismatch: b has " + std::to_string(m.b.size()) + " entries for " + std::to_string(m.A.size()) + " rows");
  for (std::size_t j = 0; j < m.A.size(); ++j)
    if (m.A[j].size() != n) r.violations.push_back("dimension mismatch: row " + std::to_string(j) + " has " + std::to_string(m.A[j].size()) + " columns, expected " + std::to_string(n));
  if (m.integer_mask.size() != n) r.violations.push_back("dimension mismatch: integer_mask");
  if (m.domain_box.size() != n) r.violations.push_back("dimension mismatch: domain_box");
  if (!all_finite(m.A) || !all_finite(m.b) || !all_finite(m.c)) r.violations.push_back("non-finite entry in A, b or c");
  for (const Interval& iv : m.domain_box) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
      r.violations.push_back("non-finite domain_box bound");
      break;
    }
  }
  for (std::size_t i = 0; i < m.domain_box.size(); ++i)
    if (m.domain_box[i].lo > m.domain_box[i].hi) r.violations.push_back("domain_box lo > hi at variable " + std::to_string(i));
  if (n > 0 && norm2(m.c) < kDegenerateNorm) r.violations.push_back("zero cost vector");
  return r;
}

// Divides row j of (A, b) by ||a_j|| and c by ||c||.  Leaves the feasible
// set and the optimizer set unchanged (objective values rescale).
inline MilpModel normalize_model(const MilpModel& m) {
  MilpModel out = m;
  for (std::size_t j = 0; j < out.A.size(); ++j) {
    const double nrm = norm2(out.A[j]);
    if (nrm < kDegenerateNorm) throw std::runtime_error("degenerate constraint row " + std::to_string(j));
    for (double& x : out.A[j]) x /= nrm;
    out.b[j] /= nrm;
  }
  const double cn = norm2(out.c);
  if (cn < kDegenerateNorm) throw std::runtime_error("zero cost vector");
  for (double& x : out.c) x /= cn;
  return out;
}

// Row-wise concatenation [A; S], [b; t]; cost, integrality and box unchanged.
inline MilpModel apply_context(const MilpModel& m, const Context& ctx) {
  if (ctx.t.size() != ctx.S.size()) throw std::invalid_argument("context dimension mismatch: t vs S");
  for (const Vec& row : ctx.S)
    if (row.size() != m.num_vars()) throw std::invalid_argument("context dimension mismatch: S columns");
  MilpModel out = m;
  out.A.insert(out.A.end(), ctx.S.begin(), ctx.S.end());
  out.b.insert(out.b.end(), ctx.t.begin(), ctx.t.end());
  return out;
}

inline ValidationResult validate_dataset(const Dataset& d) {
  ValidationResult r;
  if (d.examples.empty()) r.violations.push_back("empty dataset");
  if (d.integer_mask.size() != d.n) r.violations.push_back("dimension mismatch: integer_mask");
  if (d.domain_box.size() != d.n) r.violations.push_back("dimension mismatch: domain_box");
  bool has_positive = false;
  for (std::size_t k = 0; k < d.examples.size(); ++k) {
    const ContextualExample& ex = d.examples[k];
    if (ex.point.size() != d.n) {
      r.violations.push_back("example " + std::to_string(k) + ": point dimension mismatch");
      continue;
    }
    if (ex.label != 0 && ex.label != 1) r.violations.push_back("example " + std::to_string(k) + ": label not in {0,1}");
    if (ex.context.t.size() != ex.context.S.size()) r.violations.push_back("example " + std::to_string(k) + ": context dimension mismatch");
    for (const Vec& row : ex.context.S)
      if (row.size() != d.n) r.violations.push_back("example " + std::to_string(k) + ": context column mismatch");
    for (std::size_t i = 0; i < d.n && i < d.domain_box.size(); ++i) {
      if (ex.point[i] < d.domain_box[i].lo - 1e-9 || ex.point[i] > d.domain_box[i].hi + 1e-9) {
        r.violations.push_back("example " + std::to_string(k) + ": point outside domain_box");
        break;
      }
    }
    if (ex.label == 1) has_positive = true;
  }
  if (!d.examples.empty() && !has_positive) r.violations.push_back("no positive example");
  return r;
}

}  // namespace milpacq

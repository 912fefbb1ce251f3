#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "milpacq/model.hpp"

namespace milpacq {

// Solver tolerances.  feas_tol is absolute on normalized rows; int_tol bounds
// the distance of masked variables from the nearest integer; bound_tol is the
// branch-and-bound pruning slack.
inline constexpr double kFeasTol = 1e-6;
inline constexpr double kIntTol = 1e-5;
inline constexpr double kBoundTol = 1e-9;
inline constexpr long kNodeBudget = 100000;
inline constexpr long kMaxLatticePoints = 10000000;  // enumeration guard

enum class SolveStatus { optimal, infeasible, unbounded };

struct SolveOutcome {
  SolveStatus status = SolveStatus::infeasible;
  Vec point;           // present iff optimal
  double value = 0.0;  // c.point, present iff optimal
};

struct SolveStats {
  long nodes = 0;
  long lp_solves = 0;
  long pivots = 0;
};

// True iff x satisfies every model row, every context row and the box within
// feas_tol, and masked variables are within int_tol of an integer.
inline bool is_feasible(const MilpModel& m, const Context& ctx, const Vec& x) {
  const std::size_t n = m.num_vars();
  if (x.size() != n) throw std::invalid_argument("is_feasible: point dimension mismatch");
  for (std::size_t j = 0; j < m.A.size(); ++j)
    if (dot(m.A[j], x) > m.b[j] + kFeasTol) return false;
  for (std::size_t j = 0; j < ctx.S.size(); ++j) {
    if (ctx.S[j].size() != n) throw std::invalid_argument("is_feasible: context dimension mismatch");
    if (dot(ctx.S[j], x) > ctx.t[j] + kFeasTol) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] < m.domain_box[i].lo - kFeasTol || x[i] > m.domain_box[i].hi + kFeasTol) return false;
    if (m.integer_mask[i] && std::fabs(x[i] - std::round(x[i])) > kIntTol) return false;
  }
  return true;
}

namespace detail {

inline constexpr double kPivotEps = 1e-9;
inline constexpr double kRatioEps = 1e-12;
inline constexpr double kPhase1Tol = 1e-8;
inline constexpr long kPivotCap = 20000;

struct StdLpResult {
  SolveStatus status = SolveStatus::infeasible;
  Vec y;
  double value = 0.0;
  long pivots = 0;
};

// Two-phase primal dense-tableau simplex for  max c.y  s.t.  M y <= d, y >= 0.
// Entering variable by Dantzig's rule; after 10*(rows+cols) degenerate pivots
// the rule switches to Bland's, which cannot cycle.  Leaving row always breaks
// ties on the smallest basis index.
inline StdLpResult simplex_std(const Mat& M, const Vec& d, const Vec& c) {
  const std::size_t m = M.size();
  const std::size_t n = c.size();

  std::size_t n_art = 0;
  for (double v : d)
    if (v < 0.0) ++n_art;

  const std::size_t K = n + m + n_art;  // structurals, slacks, artificials
  Mat T(m + 1, Vec(K + 1, 0.0));
  std::vector<std::size_t> basis(m);

  std::size_t art = n + m;
  for (std::size_t j = 0; j < m; ++j) {
    const double sgn = (d[j] < 0.0) ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) T[j][i] = sgn * M[j][i];
    T[j][n + j] = sgn;
    T[j][K] = sgn * d[j];
    if (d[j] < 0.0) {
      T[j][art] = 1.0;
      basis[j] = art++;
    } else {
      basis[j] = n + j;
    }
  }

  std::vector<char> allowed(K, 1);
  StdLpResult res;
  long degenerate = 0;
  bool bland = false;
  const long bland_after = 10 * static_cast<long>(m + K);

  auto pivot = [&](std::size_t r, std::size_t s) {
    const double piv = T[r][s];
    for (std::size_t k = 0; k <= K; ++k) T[r][k] /= piv;
    T[r][s] = 1.0;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == r) continue;
      const double f = T[i][s];
      if (f == 0.0) continue;
      for (std::size_t k = 0; k <= K; ++k) T[i][k] -= f * T[r][k];
      T[i][s] = 0.0;
    }
    basis[r] = s;
    ++res.pivots;
    if (res.pivots > kPivotCap) throw std::runtime_error("simplex stall");
  };

  // Runs one phase of min f.w on the current tableau; returns false on
  // unboundedness.  The cost row holds reduced costs; T[m][K] == -objective.
  auto run_phase = [&](const Vec& f) -> bool {
    for (std::size_t k = 0; k <= K; ++k) T[m][k] = (k < K) ? f[k] : 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double fb = f[basis[j]];
      if (fb == 0.0) continue;
      for (std::size_t k = 0; k <= K; ++k) T[m][k] -= fb * T[j][k];
    }
    for (;;) {
      std::size_t enter = K;
      if (bland) {
        for (std::size_t k = 0; k < K; ++k) {
          if (allowed[k] && T[m][k] < -kPivotEps) {
            enter = k;
            break;
          }
        }
      } else {
        double best = -kPivotEps;
        for (std::size_t k = 0; k < K; ++k) {
          if (allowed[k] && T[m][k] < best) {
            best = T[m][k];
            enter = k;
          }
        }
      }
      if (enter == K) return true;  // optimal

      std::size_t leave = m;
      double best_ratio = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        if (T[j][enter] <= kPivotEps) continue;
        const double ratio = T[j][K] / T[j][enter];
        if (leave == m || ratio < best_ratio - kRatioEps ||
            (ratio < best_ratio + kRatioEps && basis[j] < basis[leave])) {
          leave = j;
          best_ratio = ratio;
        }
      }
      if (leave == m) return false;  // unbounded in this phase

      if (best_ratio < kRatioEps && ++degenerate > bland_after) bland = true;
      pivot(leave, enter);
    }
  };

  if (n_art > 0) {
    Vec f1(K, 0.0);
    for (std::size_t k = n + m; k < K; ++k) f1[k] = 1.0;
    if (!run_phase(f1)) throw std::runtime_error("simplex stall");  // phase 1 is bounded below
    if (-T[m][K] > kPhase1Tol) {
      res.status = SolveStatus::infeasible;
      return res;
    }
    // Drive remaining basic artificials (value 0) out of the basis; rows with
    // no admissible pivot are redundant and stay pinned at zero.
    for (std::size_t j = 0; j < m; ++j) {
      if (basis[j] < n + m) continue;
      for (std::size_t k = 0; k < n + m; ++k) {
        if (std::fabs(T[j][k]) > kPivotEps) {
          pivot(j, k);
          break;
        }
      }
    }
    for (std::size_t k = n + m; k < K; ++k) allowed[k] = 0;
  }

  Vec f2(K, 0.0);
  for (std::size_t k = 0; k < n; ++k) f2[k] = -c[k];
  if (!run_phase(f2)) {
    res.status = SolveStatus::unbounded;
    return res;
  }

  res.status = SolveStatus::optimal;
  res.value = T[m][K];  // max c.y == -min(-c.y)
  res.y.assign(n, 0.0);
  for (std::size_t j = 0; j < m; ++j)
    if (basis[j] < n) res.y[basis[j]] = T[j][K];
  return res;
}

// LP over explicit rows and a per-node box: max c.x s.t. rows.x <= rhs,
// lo <= x <= hi.  Shifts to y = x - lo and adds the upper bounds as rows.
inline SolveOutcome lp_over_box(const Mat& rows, const Vec& rhs, const Vec& c, const Box& box, SolveStats* stats = nullptr) {
  const std::size_t n = c.size();
  for (std::size_t i = 0; i < n; ++i)
    if (box[i].hi < box[i].lo) return {SolveStatus::infeasible, {}, 0.0};

  Mat M;
  Vec d;
  M.reserve(rows.size() + n);
  d.reserve(rows.size() + n);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    Vec row = rows[j];
    double shift = 0.0;
    for (std::size_t i = 0; i < n; ++i) shift += row[i] * box[i].lo;
    M.push_back(std::move(row));
    d.push_back(rhs[j] - shift);
  }
  for (std::size_t i = 0; i < n; ++i) {
    Vec row(n, 0.0);
    row[i] = 1.0;
    M.push_back(std::move(row));
    d.push_back(box[i].hi - box[i].lo);
  }

  StdLpResult lp = simplex_std(M, d, c);
  if (stats) {
    ++stats->lp_solves;
    stats->pivots += lp.pivots;
  }
  SolveOutcome out;
  out.status = lp.status;
  if (lp.status == SolveStatus::optimal) {
    out.point.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.point[i] = box[i].lo + lp.y[i];
    out.value = dot(c, out.point);
  }
  return out;
}

}  // namespace detail

// LP relaxation of the model (integrality ignored, box enforced).  Returns a
// vertex-optimal point, or infeasible.
inline SolveOutcome solve_lp(const MilpModel& m, SolveStats* stats = nullptr) {
  if (m.b.size() != m.A.size() || m.domain_box.size() != m.num_vars())
    throw std::invalid_argument("solve_lp: dimension mismatch");
  return detail::lp_over_box(m.A, m.b, m.c, m.domain_box, stats);
}

// Exact MILP optimum of the contextualized model by depth-first branch and
// bound on the LP relaxation.  Branches on the masked variable farthest from
// an integer (lowest index on ties), floor branch first; prunes nodes whose
// LP bound cannot beat the incumbent by more than bound_tol.
inline SolveOutcome solve_milp(const MilpModel& model, const Context& ctx, SolveStats* stats = nullptr) {
  const MilpModel full = apply_context(model, ctx);
  const std::size_t n = full.num_vars();

  SolveOutcome best;
  best.status = SolveStatus::infeasible;
  bool have_incumbent = false;

  std::vector<Box> stack;
  stack.push_back(full.domain_box);
  long nodes = 0;

  while (!stack.empty()) {
    const Box node_box = std::move(stack.back());
    stack.pop_back();
    if (++nodes > kNodeBudget) throw std::runtime_error("budget exhausted");
    if (stats) ++stats->nodes;

    SolveOutcome relax = detail::lp_over_box(full.A, full.b, full.c, node_box, stats);
    if (relax.status == SolveStatus::infeasible) continue;
    if (relax.status == SolveStatus::unbounded) return relax;  // impossible with a finite box
    if (have_incumbent && relax.value <= best.value + kBoundTol) continue;

    // Masked variable farthest from an integer; none -> integer-feasible.
    std::size_t branch_var = n;
    double worst = kIntTol;
    for (std::size_t i = 0; i < n; ++i) {
      if (!full.integer_mask[i]) continue;
      const double frac = std::fabs(relax.point[i] - std::round(relax.point[i]));
      if (frac > worst) {
        worst = frac;
        branch_var = i;
      }
    }

    if (branch_var == n) {
      if (!have_incumbent || relax.value > best.value) {
        best = relax;
        best.status = SolveStatus::optimal;
        have_incumbent = true;
      }
      continue;
    }

    const double v = relax.point[branch_var];
    Box ceil_box = node_box;
    ceil_box[branch_var].lo = std::floor(v) + 1.0;
    Box floor_box = node_box;
    floor_box[branch_var].hi = std::floor(v);
    if (ceil_box[branch_var].lo <= ceil_box[branch_var].hi) stack.push_back(std::move(ceil_box));
    if (floor_box[branch_var].hi >= floor_box[branch_var].lo) stack.push_back(std::move(floor_box));
  }
  return best;
}

inline long lattice_point_count(const Box& box) {
  long count = 1;
  for (const Interval& iv : box) {
    const long from = static_cast<long>(std::ceil(iv.lo - 1e-9));
    const long to = static_cast<long>(std::floor(iv.hi + 1e-9));
    if (to < from) return 0;
    const long span = to - from + 1;
    if (count > kMaxLatticePoints / span) return kMaxLatticePoints + 1;
    count *= span;
  }
  return count;
}

namespace detail {

template <class F>
inline void for_each_lattice_point(const Box& box, F&& fn) {
  const std::size_t n = box.size();
  std::vector<long> lo(n), hi(n), cur(n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = static_cast<long>(std::ceil(box[i].lo - 1e-9));
    hi[i] = static_cast<long>(std::floor(box[i].hi + 1e-9));
    if (hi[i] < lo[i]) return;
    cur[i] = lo[i];
  }
  Vec x(n);
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(cur[i]);
    fn(x);
    std::size_t i = n;
    while (i-- > 0) {
      if (++cur[i] <= hi[i]) break;
      cur[i] = lo[i];
      if (i == 0) return;
    }
  }
}

}  // namespace detail

struct EnumerationResult {
  SolveOutcome outcome;
  std::vector<Vec> optimizers;  // all argmaxes (value within 1e-9 of the max)
  long feasible_count = 0;
};

// Brute-force oracle: exhaustively scans every integer lattice point of the
// box.  Requires an all-integer mask and at most kMaxLatticePoints points.
// Independent of the simplex/branch-and-bound path by construction.
inline EnumerationResult enumerate_optimum(const MilpModel& model, const Context& ctx) {
  for (bool masked : model.integer_mask)
    if (!masked) throw std::invalid_argument("enumerate_optimum: all variables must be integral");
  if (lattice_point_count(model.domain_box) > kMaxLatticePoints) throw std::invalid_argument("enumerate_optimum: box too large");

  EnumerationResult res;
  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  detail::for_each_lattice_point(model.domain_box, [&](const Vec& x) {
    if (!is_feasible(model, ctx, x)) return;
    ++res.feasible_count;
    const double v = dot(model.c, x);
    if (!any || v > best) {
      best = v;
      any = true;
    }
  });
  if (!any) {
    res.outcome.status = SolveStatus::infeasible;
    return res;
  }
  detail::for_each_lattice_point(model.domain_box, [&](const Vec& x) {
    if (!is_feasible(model, ctx, x)) return;
    if (dot(model.c, x) >= best - 1e-9) res.optimizers.push_back(x);
  });
  res.outcome.status = SolveStatus::optimal;
  res.outcome.point = res.optimizers.front();
  res.outcome.value = best;
  return res;
}

// All feasible lattice points of an all-integer model under a context.
inline std::vector<Vec> enumerate_feasible(const MilpModel& model, const Context& ctx) {
  for (bool masked : model.integer_mask)
    if (!masked) throw std::invalid_argument("enumerate_feasible: all variables must be integral");
  if (lattice_point_count(model.domain_box) > kMaxLatticePoints) throw std::invalid_argument("enumerate_feasible: box too large");
  std::vector<Vec> pts;
  detail::for_each_lattice_point(model.domain_box, [&](const Vec& x) {
    if (is_feasible(model, ctx, x)) pts.push_back(x);
  });
  return pts;
}

}  // namespace milpacq

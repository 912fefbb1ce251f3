#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace milpacq {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;  // dense, row-major list of rows

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

inline bool all_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline bool all_finite(const Mat& m) {
  for (const Vec& row : m)
    if (!all_finite(row)) return false;
  return true;
}

// sign with sign(0) = 0; the subgradient selection used throughout the loss.
inline double sign0(double x) { return (x > 0.0) ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Deterministic seed derivation (splitmix64 step), used to give every
// (model, data-seed, strategy, cutoff) cell of an experiment grid its own
// independent RNG stream.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform direction on the unit sphere in R^n.
inline Vec sample_unit_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(n);
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) v[i] = gauss(rng);
    const double nrm = norm2(v);
    if (nrm > 1e-12) {
      for (double& x : v) x /= nrm;
      return v;
    }
  }
}

namespace detail {

// Unit normal of the hyperplane spanned by `points` (n affinely independent
// points in R^n), or nullopt when the affine span is degenerate.  Found as a
// null vector of the (n-1) x n difference matrix via Gaussian elimination.
inline std::optional<Vec> hyperplane_normal(const std::vector<Vec>& points) {
  if (points.empty()) return std::nullopt;
  const std::size_t n = points[0].size();
  if (points.size() != n) return std::nullopt;
  if (n == 1) return Vec{1.0};

  Mat d(n - 1, Vec(n));
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i][j] = points[i + 1][j] - points[0][j];

  // Row echelon with partial pivoting; track pivot columns.
  std::vector<std::size_t> pivot_col;
  std::size_t row = 0;
  for (std::size_t col = 0; col < n && row < n - 1; ++col) {
    std::size_t best = row;
    for (std::size_t i = row + 1; i < n - 1; ++i)
      if (std::fabs(d[i][col]) > std::fabs(d[best][col])) best = i;
    if (std::fabs(d[best][col]) < 1e-9) continue;
    std::swap(d[row], d[best]);
    for (std::size_t i = row + 1; i < n - 1; ++i) {
      const double f = d[i][col] / d[row][col];
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) d[i][j] -= f * d[row][j];
    }
    pivot_col.push_back(col);
    ++row;
  }
  if (row < n - 1) return std::nullopt;  // affinely degenerate subset

  // One free column remains; set it to 1 and back-substitute.
  std::vector<bool> is_pivot(n, false);
  for (std::size_t c : pivot_col) is_pivot[c] = true;
  std::size_t free_col = 0;
  while (free_col < n && is_pivot[free_col]) ++free_col;

  Vec a(n, 0.0);
  a[free_col] = 1.0;
  for (std::size_t i = n - 1; i-- > 0;) {
    const std::size_t pc = pivot_col[i];
    double s = 0.0;
    for (std::size_t j = pc + 1; j < n; ++j) s += d[i][j] * a[j];
    a[pc] = -s / d[i][pc];
  }
  const double nrm = norm2(a);
  if (!(nrm > 1e-12) || !all_finite(a)) return std::nullopt;
  for (double& x : a) x /= nrm;
  return a;
}

}  // namespace detail

}  // namespace milpacq

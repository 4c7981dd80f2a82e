//
// file: simplex.hpp
//
// Geometric primitives on unit simplices: feasibility checks, coordinate
// moves that preserve the block sum, sparsity redistribution, and uniform
// sampling. Everything here is a pure function; no shared state.
//

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace simplexopt {

/// One point of a unit simplex, stored densely. Entries are nonnegative
/// and sum to 1 (within feasibility_tol).
using SimplexVector = std::vector<double>;

/// A candidate solution: one simplex vector per block.
using BlockPoint = std::vector<SimplexVector>;

/// Tolerance used for all internal feasibility checks.
inline constexpr double feasibility_tol = 1e-12;

/// Block sizes (n_1,...,n_B) of a product-of-simplices domain.
struct BlockShape {
  std::vector<int> sizes;

  BlockShape() = default;
  BlockShape(std::initializer_list<int> s) : sizes(s) { validate(); }
  explicit BlockShape(std::vector<int> s) : sizes(std::move(s)) { validate(); }

  int block_count() const { return static_cast<int>(sizes.size()); }

  /// Total number of coordinates across all blocks.
  int total_size() const { return std::accumulate(sizes.begin(), sizes.end(), 0); }

  int max_block_size() const { return *std::max_element(sizes.begin(), sizes.end()); }

  void validate() const {
    if (sizes.empty())
      throw std::invalid_argument("BlockShape: at least one block required");
    for (int n : sizes)
      if (n < 1) throw std::invalid_argument("BlockShape: block sizes must be >= 1");
  }

  bool matches(const BlockPoint& p) const {
    if (static_cast<int>(p.size()) != block_count()) return false;
    for (int j = 0; j < block_count(); ++j)
      if (static_cast<int>(p[j].size()) != sizes[j]) return false;
    return true;
  }

  bool operator==(const BlockShape&) const = default;
};

inline BlockShape shape_of(const BlockPoint& p) {
  std::vector<int> sizes;
  sizes.reserve(p.size());
  for (const auto& b : p) sizes.push_back(static_cast<int>(b.size()));
  return BlockShape(std::move(sizes));
}

/// True iff min(v) >= -tol and |sum(v) - 1| <= tol.
inline bool is_feasible(const SimplexVector& v, double tol = feasibility_tol) {
  if (v.empty()) throw std::invalid_argument("is_feasible: empty vector");
  double sum = 0.0;
  double lo = v.front();
  for (double x : v) {
    sum += x;
    lo = std::min(lo, x);
  }
  return lo >= -tol && std::abs(sum - 1.0) <= tol;
}

inline bool is_feasible(const BlockPoint& p, double tol = feasibility_tol) {
  if (p.empty()) throw std::invalid_argument("is_feasible: empty point");
  for (const auto& b : p)
    if (!is_feasible(b, tol)) return false;
  return true;
}

/// Indices l != exclude with v[l] > lambda (the "significant" positions
/// that donate or receive redistributed mass). Indices are 0-based.
inline std::vector<int> significant_indices(const SimplexVector& v, int exclude,
                                            double lambda) {
  if (exclude < 0 || exclude >= static_cast<int>(v.size()))
    throw std::out_of_range("significant_indices: exclude index out of range");
  std::vector<int> s;
  s.reserve(v.size());
  for (int l = 0; l < static_cast<int>(v.size()); ++l)
    if (l != exclude && v[l] > lambda) s.push_back(l);
  return s;
}

/// Increment v[i] by s, removing s/K equally from the K significant
/// positions. Sum is preserved; the result may be infeasible (the caller
/// is responsible for checking and shrinking s).
inline SimplexVector positive_move(const SimplexVector& v, int i, double s,
                                   double lambda) {
  auto sig = significant_indices(v, i, lambda);
  if (sig.empty())
    throw std::domain_error("positive_move: no significant positions to donate");
  SimplexVector out = v;
  out[i] += s;
  const double share = s / static_cast<double>(sig.size());
  for (int l : sig) out[l] -= share;
  return out;
}

/// Decrement v[i] by s, adding s/K equally to the K significant positions.
inline SimplexVector negative_move(const SimplexVector& v, int i, double s,
                                   double lambda) {
  auto sig = significant_indices(v, i, lambda);
  if (sig.empty())
    throw std::domain_error("negative_move: no significant positions to receive");
  SimplexVector out = v;
  out[i] -= s;
  const double share = s / static_cast<double>(sig.size());
  for (int l : sig) out[l] += share;
  return out;
}

/// Zero out entries <= lambda and add their total, split equally, to the
/// entries > lambda. Idempotent; preserves the unit sum.
inline SimplexVector sparsify(const SimplexVector& v, double lambda) {
  int significant = 0;
  double garbage = 0.0;
  for (double x : v) {
    if (x > lambda)
      ++significant;
    else
      garbage += x;
  }
  if (significant == 0)
    throw std::domain_error("sparsify: no entry above lambda");
  if (significant == static_cast<int>(v.size())) return v;
  SimplexVector out(v.size());
  const double share = garbage / static_cast<double>(significant);
  for (std::size_t l = 0; l < v.size(); ++l)
    out[l] = v[l] > lambda ? v[l] + share : 0.0;
  return out;
}

/// Clamp roundoff negatives in [-tol, 0) to exact zero; the introduced
/// surplus is taken back from the largest entry so the sum is unchanged.
inline void clamp_small_negatives(SimplexVector& v, double tol = feasibility_tol) {
  double deficit = 0.0;
  for (double& x : v) {
    if (x < 0.0 && x >= -tol) {
      deficit += x;
      x = 0.0;
    }
  }
  if (deficit != 0.0) {
    auto it = std::max_element(v.begin(), v.end());
    *it += deficit;
  }
}

namespace detail {

/// Uniform double in [0, 1) from 53 random bits; avoids the
/// implementation-defined behavior of std::uniform_real_distribution so
/// that sampling is bit-reproducible across standard libraries.
template <class Rng>
double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// One draw from the flat Dirichlet on Delta^{n-1}: normalize n
/// independent unit-rate exponentials.
template <class Rng>
SimplexVector sample_uniform_block(int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_uniform_block: n must be >= 1");
  if (n == 1) return {1.0};
  SimplexVector v(n);
  double sum = 0.0;
  do {
    sum = 0.0;
    for (double& x : v) {
      x = -std::log1p(-detail::uniform01(rng));
      sum += x;
    }
  } while (sum <= 0.0);
  for (double& x : v) x /= sum;
  return v;
}

template <class Rng>
BlockPoint sample_uniform(const BlockShape& shape, Rng& rng) {
  shape.validate();
  BlockPoint p;
  p.reserve(shape.sizes.size());
  for (int n : shape.sizes) p.push_back(sample_uniform_block(n, rng));
  return p;
}

/// Seeded convenience overload; identical output for identical seeds.
inline BlockPoint sample_uniform(const BlockShape& shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_uniform(shape, rng);
}

}  // namespace simplexopt

#pragma once
// Majorization order on real vectors and generators of comparable pairs.
//
// Comparisons in the rest of the library are always made between squared coordinate
// vectors: a unit weight vector a is "more spread out" than b when
// (a_1^2, ..., a_n^2) is majorized by (b_1^2, ..., b_n^2).

#include <algorithm>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gmix/numerics.hpp"
#include "gmix/random.hpp"

namespace gmix {

class WeightVector {
 public:
  WeightVector() = default;
  explicit WeightVector(std::vector<double> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) throw std::invalid_argument("WeightVector: needs at least one coordinate");
  }
  WeightVector(std::initializer_list<double> coords) : WeightVector(std::vector<double>(coords)) {}

  std::size_t size() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const { return coords_; }

  double sum() const { return compensated_sum(coords_); }

  double sum_squares() const {
    CompensatedSum s;
    for (double x : coords_) s.add(x * x);
    return s.value();
  }

  double norm() const { return std::sqrt(sum_squares()); }

  WeightVector squared() const {
    std::vector<double> sq(coords_.size());
    std::transform(coords_.begin(), coords_.end(), sq.begin(), [](double x) { return x * x; });
    return WeightVector(std::move(sq));
  }

  /// Coordinatewise square root of a nonnegative vector; maps a probability vector to
  /// the unit weight vector whose squares it lists.
  WeightVector sqrt() const {
    std::vector<double> r(coords_.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (coords_[i] < 0.0) throw DomainError("WeightVector::sqrt: negative coordinate");
      r[i] = std::sqrt(coords_[i]);
    }
    return WeightVector(std::move(r));
  }

  WeightVector normalized() const {
    const double n = norm();
    if (!(n > 0.0)) throw DomainError("WeightVector::normalized: zero vector");
    std::vector<double> r(coords_);
    for (double& x : r) x /= n;
    return WeightVector(std::move(r));
  }

  /// Coordinates in nonincreasing order.
  std::vector<double> decreasing() const {
    std::vector<double> r(coords_);
    std::sort(r.begin(), r.end(), std::greater<>());
    return r;
  }

  bool operator==(const WeightVector&) const = default;

 private:
  std::vector<double> coords_;
};

inline constexpr double kMajorizationTol = 1e-12;

/// True iff a is majorized by b: every prefix sum of the nonincreasing rearrangement
/// of a is at most the corresponding one of b (within tol) and the totals agree.
inline bool majorizes(const WeightVector& b, const WeightVector& a, double tol = kMajorizationTol) {
  if (a.size() != b.size()) throw std::invalid_argument("majorizes: length mismatch");
  if (tol < 0.0) throw std::invalid_argument("majorizes: negative tolerance");
  const auto as = a.decreasing();
  const auto bs = b.decreasing();
  CompensatedSum pa, pb;
  for (std::size_t k = 0; k < as.size(); ++k) {
    pa.add(as[k]);
    pb.add(bs[k]);
    if (pa.value() > pb.value() + tol) return false;
  }
  return std::abs(pa.value() - pb.value()) <= tol;
}

/// (1/k, ..., 1/k, 0, ..., 0) for k = 1..n; each element majorizes the next.
inline std::vector<WeightVector> diagonal_chain(std::size_t n) {
  if (n == 0) throw std::invalid_argument("diagonal_chain: n must be positive");
  std::vector<WeightVector> chain;
  chain.reserve(n);
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<double> v(n, 0.0);
    std::fill(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), 1.0 / static_cast<double>(k));
    chain.emplace_back(std::move(v));
  }
  return chain;
}

/// Moves fraction * (v_i - v_j) / 2 from coordinate i to coordinate j (v_i >= v_j).
/// fraction = 1 averages the two coordinates; the order between them never flips.
inline WeightVector robin_hood_transfer(const WeightVector& v, std::size_t i, std::size_t j, double fraction) {
  if (i >= v.size() || j >= v.size()) throw std::out_of_range("robin_hood_transfer: index");
  if (fraction < 0.0 || fraction > 1.0) throw DomainError("robin_hood_transfer: fraction outside [0,1]");
  std::vector<double> r(v.coords().begin(), v.coords().end());
  if (r[i] < r[j]) std::swap(i, j);
  const double delta = fraction * (r[i] - r[j]) / 2.0;
  r[i] -= delta;
  r[j] += delta;
  return WeightVector(std::move(r));
}

/// Applies `transfers` random Robin-Hood transfers to b; the result is majorized by b.
inline WeightVector random_transfers(const WeightVector& b, std::size_t transfers, RandomStream& stream) {
  WeightVector a = b;
  if (b.size() < 2) return a;
  for (std::size_t t = 0; t < transfers; ++t) {
    const auto i = static_cast<std::size_t>(stream.below(b.size()));
    auto j = static_cast<std::size_t>(stream.below(b.size() - 1));
    if (j >= i) ++j;
    a = robin_hood_transfer(a, i, j, stream.uniform());
  }
  return a;
}

struct MajorizationPair {
  WeightVector a;  // the majorized (more balanced) vector
  WeightVector b;
};

/// A random probability vector b and a vector a obtained from it by 1..3n random
/// Robin-Hood transfers, so that a is majorized by b.
inline MajorizationPair random_majorization_pair(std::size_t n, RandomStream& stream) {
  if (n < 2) throw std::invalid_argument("random_majorization_pair: n must be at least 2");
  std::vector<double> raw(n);
  for (double& x : raw) x = stream.exponential();
  const double total = compensated_sum(raw);
  for (double& x : raw) x /= total;
  WeightVector b(std::move(raw));
  const std::size_t transfers = 1 + static_cast<std::size_t>(stream.below(3 * n));
  WeightVector a = random_transfers(b, transfers, stream);
  return {std::move(a), std::move(b)};
}

}  // namespace gmix

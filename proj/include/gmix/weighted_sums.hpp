#pragma once
// Moments of weighted sums sum_i a_i X_i of i.i.d. Gaussian mixtures, the sharp
// Khintchine constants, and uniform points of the l_q unit ball.
//
// The reduced estimator uses E|sum a_i X_i|^p = gamma_p^p E(sum a_i^2 Y_i^2)^{p/2},
// which holds because sum a_i Y_i Z_i has the law of (sum a_i^2 Y_i^2)^{1/2} Z.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmix/estimate.hpp"
#include "gmix/majorization.hpp"
#include "gmix/mixtures.hpp"
#include "gmix/numerics.hpp"
#include "gmix/random.hpp"

namespace gmix {

enum class MomentMethod { reduced_mc, direct_mc, quadrature };

struct MomentSpec {
  MixtureFamily family;
  WeightVector weights;
  double p;
  MomentMethod method = MomentMethod::reduced_mc;
};

/// Rejects p <= -1 and moments that diverge for the family.
inline void check_moment_order(const MixtureFamily& family, double p) {
  if (!(p > -1.0)) throw DomainError("moment order must exceed -1 (negative moments of order <= -1 are infinite)");
  if (p >= family.moment_limit())
    throw DomainError("E|X|^p is infinite for " + family.name() + " at p = " + std::to_string(p) +
                      " (stable laws have moments only below their index)");
}

/// |s|^p, or log|s| at p = 0.
inline double power_value(double abs_s, double p) {
  if (p == 0.0) return std::log(abs_s);
  if (p == 1.0) return abs_s;
  if (p == 2.0) return abs_s * abs_s;
  return std::pow(abs_s, p);
}

/// (r2)^{p/2}, or log(r2)/2 at p = 0.
inline double half_power_value(double r2, double p) {
  if (p == 0.0) return 0.5 * std::log(r2);
  if (p == 1.0) return std::sqrt(r2);
  if (p == 2.0) return r2;
  if (p == 3.0) return r2 * std::sqrt(r2);
  return std::pow(r2, p / 2.0);
}

/// A frozen sample of n-tuples of squared mixing factors (Y_1^2, ..., Y_n^2) with the
/// product importance weight of each tuple. Reused across coefficient vectors for
/// common-random-number comparisons.
struct MixingPool {
  SampleMatrix squares;

  static MixingPool draw(const MixtureFamily& family, std::size_t dim, std::size_t n, const RandomStream& stream) {
    return draw(std::vector<MixtureFamily>(dim, family), n, stream);
  }

  /// Coordinate j draws its factor from families[j].
  static MixingPool draw(const std::vector<MixtureFamily>& families, std::size_t n, const RandomStream& stream) {
    bool exact = true;
    for (const auto& f : families) exact = exact && f.exact_mixing();
    MixingPool pool;
    pool.squares = generate_samples(
        families.size(), n, stream,
        [&families](RandomStream& rs, std::span<double> row) {
          double w = 1.0;
          for (std::size_t j = 0; j < row.size(); ++j) {
            const auto s = draw_mixing(families[j], rs);
            row[j] = s.value * s.value;
            w *= s.weight;
          }
          return w;
        },
        !exact);
    return pool;
  }

  std::size_t dim() const { return squares.dim; }
  std::size_t size() const { return squares.size(); }
  std::span<const double> weights() const { return squares.weights; }

  /// R_i^2 = sum_j a_j^2 Y_{ij}^2 for every tuple.
  std::vector<double> radii_squared(const WeightVector& a) const {
    if (a.size() != dim()) throw std::invalid_argument("MixingPool: coefficient length mismatch");
    std::vector<double> r2(size());
    for (std::size_t i = 0; i < r2.size(); ++i) {
      const auto row = squares.row(i);
      double s = 0.0;
      for (std::size_t j = 0; j < row.size(); ++j) s += a[j] * a[j] * row[j];
      r2[i] = s;
    }
    return r2;
  }

  /// Per-tuple values (R^2)^{p/2}, whose weighted mean times gamma_p^p is E|sum a X|^p.
  std::vector<double> moment_values(const WeightVector& a, double p) const {
    auto v = radii_squared(a);
    for (double& x : v) x = half_power_value(x, p);
    return v;
  }
};

/// Estimate of the p-norm ||sum a_i X_i||_p from a pool (reduced estimator).
inline Estimate pool_moment(const MixingPool& pool, const WeightVector& a, double p, const RandomStream& stream) {
  const auto v = pool.moment_values(a, p);
  return to_estimate(norm_from_power_mean(v, pool.weights(), p, gaussian_norm(p)), stream);
}

/// ||sum b X||_p - ||sum a X||_p on one pool.
inline PairedDifference pool_moment_difference(const MixingPool& pool, const WeightVector& a, const WeightVector& b,
                                               double p) {
  const auto va = pool.moment_values(a, p);
  const auto vb = pool.moment_values(b, p);
  return compare_power_means(va, vb, pool.weights(), p, gaussian_norm(p));
}

namespace detail {

/// E R^p for a discrete scale mixture by enumerating all scale tuples.
inline double discrete_exact_half_power(const DiscreteScaleMixture& d, const WeightVector& a, double p) {
  const std::size_t n = a.size(), k = d.scales.size();
  double combos = 1.0;
  for (std::size_t i = 0; i < n; ++i) combos *= static_cast<double>(k);
  if (combos > 4e6) throw DomainError("quadrature moment: too many scale combinations to enumerate");
  std::vector<std::size_t> idx(n, 0);
  CompensatedSum total;
  while (true) {
    double prob = 1.0, r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      prob *= d.probs[idx[i]];
      r2 += a[i] * a[i] * d.scales[idx[i]] * d.scales[idx[i]];
    }
    total.add(prob * (p == 0.0 ? 0.5 * std::log(r2) : std::pow(r2, p / 2.0)));
    std::size_t i = 0;
    while (i < n && ++idx[i] == k) idx[i++] = 0;
    if (i == n) break;
  }
  return total.value();
}

}  // namespace detail

/// ||sum a_i X_i||_p by spec.method. The quadrature method is exact but only
/// available when the law of the sum is explicit: a single nonzero coefficient, a
/// Gaussian family, or a discrete scale mixture (by enumeration).
inline Estimate weighted_moment(const MomentSpec& spec, std::size_t n_samples, const RandomStream& stream) {
  check_moment_order(spec.family, spec.p);
  const WeightVector& a = spec.weights;
  const double p = spec.p;
  if (!(a.norm() > 0.0)) throw DomainError("weighted_moment: zero coefficient vector");
  switch (spec.method) {
    case MomentMethod::reduced_mc: {
      const auto pool = MixingPool::draw(spec.family, a.size(), n_samples, stream);
      return pool_moment(pool, a, p, stream);
    }
    case MomentMethod::direct_mc: {
      const auto xs = generate_samples(
          a.size(), n_samples, stream,
          [&spec](RandomStream& rs, std::span<double> row) {
            for (double& x : row) x = draw_direct(spec.family, rs);
            return 1.0;
          },
          false);
      std::vector<double> v(n_samples);
      for (std::size_t i = 0; i < n_samples; ++i) {
        const auto row = xs.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) s += a[j] * row[j];
        v[i] = power_value(std::abs(s), p);
      }
      return to_estimate(norm_from_power_mean(v, {}, p, 1.0), stream);
    }
    case MomentMethod::quadrature: {
      std::size_t nonzero = 0;
      double single = 0.0;
      for (double x : a.coords())
        if (x != 0.0) {
          ++nonzero;
          single = std::abs(x);
        }
      if (nonzero == 1) return Estimate::exact(single * abs_norm(spec.family, p));
      if (const auto* g = std::get_if<GaussianScale>(&spec.family.variant()))
        return Estimate::exact(g->sigma * a.norm() * gaussian_norm(p));
      if (const auto* d = std::get_if<DiscreteScaleMixture>(&spec.family.variant())) {
        const double m = detail::discrete_exact_half_power(*d, a, p);
        return Estimate::exact(gaussian_norm(p) * (p == 0.0 ? std::exp(m) : std::pow(m, 1.0 / p)));
      }
      throw DomainError("weighted_moment: quadrature method needs one nonzero coefficient or an explicit sum law");
    }
  }
  throw std::logic_error("weighted_moment: unknown method");
}

struct KhintchineConstants {
  double lower;  // A_p
  double upper;  // B_p
};

/// Sharp constants in A_p ||sum a X||_2 <= ||sum a X||_p <= B_p ||sum a X||_2.
inline KhintchineConstants khintchine_constants(const MixtureFamily& family, double p) {
  check_moment_order(family, p);
  if (family.moment_limit() <= 2.0) throw DomainError("khintchine_constants: needs a finite second moment");
  if (p == 2.0) return {1.0, 1.0};
  const double ratio = abs_norm(family, p) / abs_norm(family, 2.0);
  const double g = gaussian_norm(p);
  return p > 2.0 ? KhintchineConstants{g, ratio} : KhintchineConstants{ratio, g};
}

// ---------------------------------------------------------------------------
// Uniform points of B_q^n

struct BallUniformSpec {
  double q;
  std::size_t n;

  void validate() const {
    if (!(q > 0.0 && q <= 2.0)) throw DomainError("BallUniformSpec: q must lie in (0, 2]");
    if (n < 1) throw DomainError("BallUniformSpec: dimension must be positive");
  }
};

/// Y / (sum |Y_i|^q + E)^{1/q} with Y_i i.i.d. of density c_q e^{-|t|^q} and E standard
/// exponential is uniform on B_q^n. Works for any q > 0 (BallUniformSpec itself admits q <= 2).
inline void draw_ball_uniform(double q, std::span<double> row, RandomStream& rs) {
  double s = 0.0;
  for (double& y : row) {
    y = exponential_power_draw(q, rs);
    s += std::pow(std::abs(y), q);
  }
  const double scale = std::pow(s + rs.exponential(), -1.0 / q);
  for (double& y : row) y *= scale;
}

inline SampleMatrix ball_uniform_sample(const BallUniformSpec& spec, std::size_t n_samples, const RandomStream& stream) {
  spec.validate();
  return generate_samples(
      spec.n, n_samples, stream,
      [q = spec.q](RandomStream& rs, std::span<double> row) {
        draw_ball_uniform(q, row, rs);
        return 1.0;
      },
      false);
}

/// Values |<a, x>|^p (log at p = 0) over the rows of a sample.
inline std::vector<double> projection_power_values(const SampleMatrix& xs, const WeightVector& a, double p) {
  if (a.size() != xs.dim) throw std::invalid_argument("projection_power_values: length mismatch");
  std::vector<double> v(xs.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto row = xs.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) s += a[j] * row[j];
    v[i] = power_value(std::abs(s), p);
  }
  return v;
}

/// ||X_1||_r for X uniform on B_q^n. The first coordinate has density proportional to
/// (1 - |x|^q)^{(n-1)/q} on [-1, 1], so
/// E|X_1|^r = B((r+1)/q, (n+q-1)/q) / B(1/q, (n+q-1)/q).
inline double ball_marginal_norm(double q, std::size_t n, double r) {
  BallUniformSpec{q, n}.validate();
  if (!(r > -1.0)) throw DomainError("ball_marginal_norm: requires r > -1");
  const double b = (static_cast<double>(n) + q - 1.0) / q;
  if (r == 0.0) return std::exp((digamma(1.0 / q) - digamma(1.0 / q + b)) / q);
  const double log_moment = log_gamma((r + 1.0) / q) - log_gamma((r + 1.0) / q + b) - log_gamma(1.0 / q) +
                            log_gamma(1.0 / q + b);
  return std::exp(log_moment / r);
}

inline KhintchineConstants ball_khintchine_constants(double q, std::size_t n, double p) {
  if (!(p > -1.0)) throw DomainError("ball_khintchine_constants: requires p > -1");
  if (p == 2.0) return {1.0, 1.0};
  const double ratio = ball_marginal_norm(q, n, p) / ball_marginal_norm(q, n, 2.0);
  const double g = gaussian_norm(p);
  return p > 2.0 ? KhintchineConstants{g, ratio} : KhintchineConstants{ratio, g};
}

}  // namespace gmix

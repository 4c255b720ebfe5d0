#pragma once
// Shannon and Renyi entropies of weighted sums sum_j a_j X_j of independent Gaussian
// mixtures, and the comparison reports built on them.
//
// The density of the sum is a Gaussian scale mixture with R^2 = sum a_j^2 Y_j^2. It is
// evaluated through a frozen pool of M mixing tuples:
//   f(x) = sum_k w_k phi(x / R_k) / R_k / sum_k w_k,
// in log-sum-exp form so that far tails are carried by the dominant (widest)
// component instead of underflowing. Entropies are plug-in averages over N direct
// draws of the sum. The pool bias is reported as half the change of the estimate when
// only the first half of the pool is used.
//
// Evaluating the pool density costs M exponentials per point, so log f is tabulated on
// a grid that is uniform in log(1 + |x|/c) and interpolated with cubic Hermite splines
// using the exact derivative. The grid is refined until the interpolation error at
// check points is below 1e-7.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "gmix/estimate.hpp"
#include "gmix/majorization.hpp"
#include "gmix/mixtures.hpp"
#include "gmix/numerics.hpp"
#include "gmix/random.hpp"
#include "gmix/report.hpp"
#include "gmix/weighted_sums.hpp"

namespace gmix {

/// sum_j a_j X_j with X_j independent, X_j ~ families[j].
struct MixtureSum {
  std::vector<MixtureFamily> families;
  WeightVector weights;

  static MixtureSum iid(const MixtureFamily& family, WeightVector a) {
    std::vector<MixtureFamily> fs(a.size(), family);
    return MixtureSum{std::move(fs), std::move(a)};
  }

  std::size_t size() const { return families.size(); }

  void validate() const {
    if (families.empty() || families.size() != weights.size())
      throw std::invalid_argument("MixtureSum: one family per coefficient required");
    if (!(weights.norm() > 0.0)) throw DomainError("MixtureSum: zero coefficient vector");
  }
};

/// Direct draws of the independent components, one row per sample.
inline SampleMatrix sample_components(const std::vector<MixtureFamily>& families, std::size_t n,
                                      const RandomStream& stream) {
  return generate_samples(
      families.size(), n, stream,
      [&families](RandomStream& rs, std::span<double> row) {
        for (std::size_t j = 0; j < row.size(); ++j) row[j] = draw_direct(families[j], rs);
        return 1.0;
      },
      false);
}

inline std::vector<double> combine_rows(const SampleMatrix& xs, const WeightVector& a) {
  if (a.size() != xs.dim) throw std::invalid_argument("combine_rows: length mismatch");
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto row = xs.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) s += a[j] * row[j];
    out[i] = s;
  }
  return out;
}

/// Log density and its derivative, for the full pool and for its first half.
struct LogDensityValue {
  double full = 0.0;
  double half = 0.0;
  double d_full = 0.0;
  double d_half = 0.0;
};

/// Frozen Gaussian scale-mixture density of a weighted sum.
class DensityPool {
 public:
  /// The pool density of sum a_j X_j over the tuples of a mixing pool.
  static DensityPool from_mixing(const MixingPool& pool, const WeightVector& a) {
    if (pool.size() < 2) throw std::invalid_argument("DensityPool: pool needs at least two tuples");
    DensityPool d;
    const auto r2 = pool.radii_squared(a);
    const std::size_t m = r2.size();
    d.half_ = m / 2;
    d.neg_half_inv_var_.resize(m);
    d.log_coef_.resize(m);
    d.radius_.resize(m);
    CompensatedSum w_full, w_half;
    double log_w_max = -kInf;
    std::vector<double> log_w(m);
    for (std::size_t k = 0; k < m; ++k) {
      if (!(r2[k] > 0.0)) throw DomainError("DensityPool: zero mixing radius");
      log_w[k] = pool.squares.weighted() ? std::log(pool.squares.weights[k]) : 0.0;
      log_w_max = std::max(log_w_max, log_w[k]);
    }
    for (std::size_t k = 0; k < m; ++k) {
      const double w = std::exp(log_w[k] - log_w_max);
      w_full.add(w);
      if (k < d.half_) w_half.add(w);
      d.radius_[k] = std::sqrt(r2[k]);
      d.neg_half_inv_var_[k] = -0.5 / r2[k];
      d.log_coef_[k] = (log_w[k] - log_w_max) - 0.5 * std::log(r2[k]) - 0.5 * std::log(2.0 * std::numbers::pi);
    }
    d.log_norm_full_ = std::log(w_full.value());
    d.log_norm_half_ = std::log(w_half.value());
    return d;
  }

  static DensityPool draw(const MixtureSum& sum, std::size_t pool_size, const RandomStream& stream) {
    sum.validate();
    return from_mixing(MixingPool::draw(sum.families, pool_size, stream), sum.weights);
  }

  std::size_t size() const { return log_coef_.size(); }
  std::span<const double> radii() const { return radius_; }

  LogDensityValue evaluate(double x) const {
    const double x2 = x * x;
    const auto [m1, s1, t1] = accumulate(0, half_, x2);
    const auto [m2, s2, t2] = accumulate(half_, size(), x2);
    // t = sum e^{l - m} / R^2, so d/dx log f = -x t / s
    LogDensityValue v;
    v.half = m1 + std::log(s1) - log_norm_half_;
    v.d_half = -x * t1 / s1;
    const double m = std::max(m1, m2);
    const double a = std::exp(m1 - m), b = std::exp(m2 - m);
    const double s = s1 * a + s2 * b;
    v.full = m + std::log(s) - log_norm_full_;
    v.d_full = -x * (t1 * a + t2 * b) / s;
    return v;
  }

  double log_density(double x) const { return evaluate(x).full; }
  double density(double x) const { return std::exp(log_density(x)); }

 private:
  struct Partial {
    double max, sum, slope;
  };

  Partial accumulate(std::size_t begin, std::size_t end, double x2) const {
    double m = -kInf;
    for (std::size_t k = begin; k < end; ++k) m = std::max(m, log_coef_[k] + neg_half_inv_var_[k] * x2);
    double s = 0.0, t = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
      const double e = std::exp(log_coef_[k] + neg_half_inv_var_[k] * x2 - m);
      s += e;
      t += e * (-2.0 * neg_half_inv_var_[k]);
    }
    return {m, s, t};
  }

  std::size_t half_ = 0;
  std::vector<double> neg_half_inv_var_;
  std::vector<double> log_coef_;
  std::vector<double> radius_;
  double log_norm_full_ = 0.0;
  double log_norm_half_ = 0.0;
};

/// Density of sum a_j X_j at x over a frozen mixing pool of the same dimension.
inline double sum_density(const WeightVector& a, double x, const MixingPool& pool) {
  if (pool.size() == 0) throw std::invalid_argument("sum_density: empty pool");
  const auto r2 = pool.radii_squared(a);
  CompensatedSum num, den;
  for (std::size_t k = 0; k < r2.size(); ++k) {
    const double w = pool.squares.weighted() ? pool.squares.weights[k] : 1.0;
    const double r = std::sqrt(r2[k]);
    num.add(w * normal_pdf(x / r) / r);
    den.add(w);
  }
  return num.value() / den.value();
}

/// Cubic Hermite table of the pool log density on [0, x_max] (the density is even).
class LogDensityTable {
 public:
  static constexpr double kTolerance = 1e-7;

  LogDensityTable(const DensityPool& pool, double x_max) : pool_(&pool) {
    const auto radii = pool.radii();
    std::vector<double> sorted(radii.begin(), radii.end());
    std::nth_element(sorted.begin(), sorted.begin(), sorted.end());
    const double r_min = sorted.front();
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
    const double r_med = sorted[sorted.size() / 2];
    scale_ = std::max(r_min, 1e-6 * r_med) / 4.0;
    s_max_ = std::log1p(std::max(x_max, 4.0 * r_med) / scale_);
    for (std::size_t nodes = 512;; nodes *= 2) {
      build(nodes);
      if (max_check_error() <= kTolerance || nodes >= (std::size_t{1} << 18)) break;
    }
  }

  /// (log f, log f restricted to the first half of the pool) at x; exact outside the table.
  std::pair<double, double> operator()(double x) const {
    const double u = std::abs(x);
    const double s = std::log1p(u / scale_);
    if (!(s < s_max_)) {
      const auto v = pool_->evaluate(u);
      return {v.full, v.half};
    }
    const auto k = std::min(static_cast<std::size_t>(s / ds_), nodes_.size() - 2);
    return {hermite(k, u, &Node::full, &Node::d_full), hermite(k, u, &Node::half, &Node::d_half)};
  }

  std::size_t nodes() const { return nodes_.size(); }
  double max_error() const { return check_error_; }

 private:
  struct Node {
    double u, full, half, d_full, d_half;
  };

  void build(std::size_t count) {
    ds_ = s_max_ / static_cast<double>(count - 1);
    nodes_.resize(count);
    for_each_chunk(count, [&](std::size_t, std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k) {
        const double u = scale_ * std::expm1(static_cast<double>(k) * ds_);
        const auto v = pool_->evaluate(u);
        nodes_[k] = {u, v.full, v.half, v.d_full, v.d_half};
      }
    });
  }

  double hermite(std::size_t k, double u, double Node::*val, double Node::*der) const {
    const Node& a = nodes_[k];
    const Node& b = nodes_[k + 1];
    const double h = b.u - a.u;
    const double t = std::clamp((u - a.u) / h, 0.0, 1.0);
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * (a.*val) + (t3 - 2 * t2 + t) * h * (a.*der) + (-2 * t3 + 3 * t2) * (b.*val) +
           (t3 - t2) * h * (b.*der);
  }

  double max_check_error() {
    // midpoints of 97 intervals spread over the table
    check_error_ = 0.0;
    const std::size_t n = nodes_.size() - 1;
    for (std::size_t i = 0; i < 97; ++i) {
      const std::size_t k = (i * 7919) % n;
      const double u = 0.5 * (nodes_[k].u + nodes_[k + 1].u);
      const auto exact = pool_->evaluate(u);
      check_error_ = std::max({check_error_, std::abs(exact.full - hermite(k, u, &Node::full, &Node::d_full)),
                               std::abs(exact.half - hermite(k, u, &Node::half, &Node::d_half))});
    }
    return check_error_;
  }

  const DensityPool* pool_;
  double scale_ = 1.0;
  double s_max_ = 1.0;
  double ds_ = 1.0;
  double check_error_ = 0.0;
  std::vector<Node> nodes_;
};

/// Per-sample log densities of the pool density at the points xs.
struct LogDensityTerms {
  std::vector<double> full;
  std::vector<double> half;
};

inline LogDensityTerms log_density_terms(const DensityPool& pool, std::span<const double> xs) {
  double x_max = 0.0;
  for (double x : xs) x_max = std::max(x_max, std::abs(x));
  const LogDensityTable table(pool, x_max);
  LogDensityTerms t;
  t.full.resize(xs.size());
  t.half.resize(xs.size());
  for_each_chunk(xs.size(), [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) std::tie(t.full[i], t.half[i]) = table(xs[i]);
  });
  return t;
}

/// An entropy value with the per-sample influence values that linearize it.
struct EntropyFunctional {
  double value = 0.0;
  std::vector<double> influence;
};

/// h_alpha from log densities at draws of X: -mean(log f) for alpha = 1, otherwise
/// log(mean f^{alpha-1}) / (1 - alpha).
inline EntropyFunctional entropy_functional(std::span<const double> log_f, double alpha) {
  const std::size_t n = log_f.size();
  EntropyFunctional out;
  out.influence.resize(n);
  if (alpha == 1.0) {
    CompensatedSum s;
    for (double l : log_f) s.add(-l);
    out.value = s.value() / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out.influence[i] = -log_f[i] - out.value;
    return out;
  }
  // scale by the largest term so f^{alpha-1} cannot overflow
  double shift = -kInf;
  for (double l : log_f) shift = std::max(shift, (alpha - 1.0) * l);
  std::vector<double> e(n);
  CompensatedSum s;
  for (std::size_t i = 0; i < n; ++i) {
    e[i] = std::exp((alpha - 1.0) * log_f[i] - shift);
    s.add(e[i]);
  }
  const double m = s.value() / static_cast<double>(n);
  out.value = (std::log(m) + shift) / (1.0 - alpha);
  for (std::size_t i = 0; i < n; ++i) out.influence[i] = (e[i] - m) / ((1.0 - alpha) * m);
  return out;
}

inline double influence_std_error(std::span<const double> influence) {
  CompensatedSum ss;
  for (double v : influence) ss.add(v * v);
  return std::sqrt(ss.value()) / static_cast<double>(influence.size());
}

struct EntropySpec {
  MixtureSum sum;
  double alpha = 1.0;  // 1 is Shannon
  std::size_t pool_size = std::size_t{1} << 15;
  std::size_t n_samples = 100000;

  void validate() const {
    sum.validate();
    if (!(alpha >= 1.0)) throw DomainError("EntropySpec: alpha must be at least 1");
    if (pool_size < 2 || n_samples < 2) throw DomainError("EntropySpec: pool and sample sizes must be at least 2");
  }
};

struct EntropyEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double pool_bias = 0.0;  // half the change under pool halving
  std::uint64_t n_samples = 0;
  std::uint64_t pool_size = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  double total_error() const { return std_error + pool_bias; }
  Estimate estimate() const { return Estimate{value, std_error, n_samples, seed, stream_id}; }
};

namespace detail {

inline RandomStream pool_stream(const RandomStream& s) { return s.child(0xE17A0001ull); }
inline RandomStream sample_stream(const RandomStream& s) { return s.child(0xE17A0002ull); }

}  // namespace detail

/// h_alpha of spec.sum (Shannon when alpha = 1).
inline EntropyEstimate entropy(const EntropySpec& spec, const RandomStream& stream) {
  spec.validate();
  const auto pool = DensityPool::draw(spec.sum, spec.pool_size, detail::pool_stream(stream));
  const auto xs = combine_rows(sample_components(spec.sum.families, spec.n_samples, detail::sample_stream(stream)),
                               spec.sum.weights);
  const auto terms = log_density_terms(pool, xs);
  const auto full = entropy_functional(terms.full, spec.alpha);
  const auto half = entropy_functional(terms.half, spec.alpha);
  EntropyEstimate e;
  e.value = full.value;
  e.std_error = influence_std_error(full.influence);
  e.pool_bias = 0.5 * std::abs(full.value - half.value);
  e.n_samples = spec.n_samples;
  e.pool_size = spec.pool_size;
  e.seed = stream.seed();
  e.stream_id = stream.stream_id();
  return e;
}

inline EntropyEstimate shannon_entropy(EntropySpec spec, const RandomStream& stream) {
  spec.alpha = 1.0;
  return entropy(spec, stream);
}

inline EntropyEstimate renyi_entropy(const EntropySpec& spec, const RandomStream& stream) {
  if (!(spec.alpha > 1.0)) throw DomainError("renyi_entropy: alpha must exceed 1");
  return entropy(spec, stream);
}

/// h(second) - h(first) from log densities at paired draws, with the paired standard
/// error and the pool-halving bias of the difference.
struct EntropyDifference {
  double difference = 0.0;
  double std_error = 0.0;
  double pool_bias = 0.0;
  EntropyEstimate first;
  EntropyEstimate second;
};

inline EntropyDifference entropy_difference(const LogDensityTerms& first, const LogDensityTerms& second,
                                            double alpha) {
  const auto f1 = entropy_functional(first.full, alpha), f2 = entropy_functional(second.full, alpha);
  const auto h1 = entropy_functional(first.half, alpha), h2 = entropy_functional(second.half, alpha);
  std::vector<double> diff(f1.influence.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = f2.influence[i] - f1.influence[i];
  EntropyDifference d;
  d.difference = f2.value - f1.value;
  d.std_error = influence_std_error(diff);
  d.pool_bias = 0.5 * std::abs((f2.value - f1.value) - (h2.value - h1.value));
  d.first.value = f1.value;
  d.first.std_error = influence_std_error(f1.influence);
  d.first.pool_bias = 0.5 * std::abs(f1.value - h1.value);
  d.second.value = f2.value;
  d.second.std_error = influence_std_error(f2.influence);
  d.second.pool_bias = 0.5 * std::abs(f2.value - h2.value);
  const std::uint64_t n = f1.influence.size();
  d.first.n_samples = d.second.n_samples = n;
  return d;
}

struct EntropyBudget {
  std::size_t pool_size = std::size_t{1} << 15;
  std::size_t n_samples = 100000;
};

/// h(sum b X) - h(sum a X) for i.i.d. X ~ family on a shared pool and shared draws.
inline EntropyDifference paired_entropy_difference(const MixtureFamily& family, const WeightVector& a,
                                                   const WeightVector& b, double alpha, const EntropyBudget& budget,
                                                   const RandomStream& stream) {
  if (a.size() != b.size()) throw std::invalid_argument("paired_entropy_difference: length mismatch");
  const std::vector<MixtureFamily> families(a.size(), family);
  const auto mixing = MixingPool::draw(families, budget.pool_size, detail::pool_stream(stream));
  const auto xs = sample_components(families, budget.n_samples, detail::sample_stream(stream));
  const auto pa = DensityPool::from_mixing(mixing, a);
  const auto pb = DensityPool::from_mixing(mixing, b);
  const auto ta = log_density_terms(pa, combine_rows(xs, a));
  const auto tb = log_density_terms(pb, combine_rows(xs, b));
  auto d = entropy_difference(ta, tb, alpha);
  for (auto* e : {&d.first, &d.second}) {
    e->pool_size = budget.pool_size;
    e->seed = stream.seed();
    e->stream_id = stream.stream_id();
  }
  return d;
}

/// Asserts h_alpha(sum a X) >= h_alpha(sum b X) when a^2 is majorized by b^2. The
/// margin's error is the paired standard error plus the pool bias.
inline VerificationReport entropy_schur_report(const MixtureFamily& family, const WeightVector& a,
                                               const WeightVector& b, double alpha, const EntropyBudget& budget,
                                               const RandomStream& stream) {
  if (!(alpha >= 1.0)) throw DomainError("entropy_schur_report: alpha must be at least 1");
  if (!majorizes(b.squared(), a.squared(), 1e-9))
    throw std::invalid_argument("entropy_schur_report: a^2 must be majorized by b^2");
  const auto d = paired_entropy_difference(family, a, b, alpha, budget, stream);
  VerificationReport r;
  r.claim = "entropy-schur";
  r.add_param("family", family.name());
  r.add_param("alpha", std::to_string(alpha));
  r.seed = stream.seed();
  r.n_samples = budget.n_samples;
  r.add_estimate("h(a)", d.first.estimate());
  r.add_estimate("h(b)", d.second.estimate());
  r.require_at_least("h(a) >= h(b)", d.first.value, d.second.value, d.std_error + d.pool_bias);
  r.finalize();
  return r;
}

/// Asserts Ent(X1 + X2) <= Ent(X1 + G), G Gaussian with the variance of X2. Both sums
/// share the X1 pool and draws.
inline VerificationReport swap_report(const MixtureFamily& first, const MixtureFamily& second,
                                      const EntropyBudget& budget, const RandomStream& stream) {
  const double var = second.variance();
  if (!std::isfinite(var)) throw DomainError("swap_report: the second family needs a finite variance");
  const auto gauss = MixtureFamily::gaussian(std::sqrt(var));
  const WeightVector ones{1.0, 1.0};
  const std::vector<MixtureFamily> mixed{first, second}, swapped{first, gauss};
  const auto m1 = MixingPool::draw(mixed, budget.pool_size, detail::pool_stream(stream));
  const auto m2 = MixingPool::draw(swapped, budget.pool_size, detail::pool_stream(stream));
  const auto x1 = sample_components(mixed, budget.n_samples, detail::sample_stream(stream));
  const auto x2 = sample_components(swapped, budget.n_samples, detail::sample_stream(stream));
  const auto t1 = log_density_terms(DensityPool::from_mixing(m1, ones), combine_rows(x1, ones));
  const auto t2 = log_density_terms(DensityPool::from_mixing(m2, ones), combine_rows(x2, ones));
  const auto d = entropy_difference(t1, t2, 1.0);
  VerificationReport r;
  r.claim = "entropy-swap";
  r.add_param("first", first.name());
  r.add_param("second", second.name());
  r.seed = stream.seed();
  r.n_samples = budget.n_samples;
  r.add_estimate("Ent(X1+X2)", d.first.estimate());
  r.add_estimate("Ent(X1+G)", d.second.estimate());
  r.require_at_least("Ent(X1+G) >= Ent(X1+X2)", d.second.value, d.first.value, d.std_error + d.pool_bias);
  r.finalize();
  return r;
}

}  // namespace gmix

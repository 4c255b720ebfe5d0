#pragma once
// Special functions, deterministic quadrature and compensated summation.
//
// Everything here is pure and safe to call concurrently.

#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace gmix {

/// Raised when an argument lies outside the domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when an iterative numerical routine exhausts its budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kEulerGamma = std::numbers::egamma;

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

inline double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive, got " + std::to_string(x));
  return std::lgamma(x);
}

/// Euler Beta function through log-gamma, so large arguments do not overflow.
inline double beta_fn(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta_fn: arguments must be positive");
  return std::exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b));
}

inline double digamma(double x) {
  if (!(x > 0.0)) throw DomainError("digamma: argument must be positive");
  return boost::math::digamma(x);
}

/// Regularized lower incomplete gamma P(a, x).
inline double regularized_gamma_lower(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw DomainError("regularized_gamma_lower: bad argument");
  if (x == kInf) return 1.0;
  return boost::math::gamma_p(a, x);
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), accurate in the tail.
inline double regularized_gamma_upper(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw DomainError("regularized_gamma_upper: bad argument");
  if (x == kInf) return 0.0;
  return boost::math::gamma_q(a, x);
}

/// The p-norm of a standard Gaussian, (E|Z|^p)^{1/p}, for p > -1.
///
/// At p = 0 this is the geometric mean exp(E log|Z|) = exp(-(euler_gamma + log 2) / 2),
/// the continuous extension of the p != 0 formula.
inline double gaussian_norm(double p) {
  if (!(p > -1.0)) throw DomainError("gaussian_norm: requires p > -1 (moment is infinite otherwise)");
  if (p == 0.0) return std::exp(-(kEulerGamma + std::numbers::ln2) / 2.0);
  if (p == 2.0) return 1.0;
  if (p <= 40.0 && std::floor(p / 2.0) == p / 2.0) {
    // E Z^{2k} = (2k - 1)!!
    double double_factorial = 1.0;
    for (double j = p - 1.0; j > 1.0; j -= 2.0) double_factorial *= j;
    return std::pow(double_factorial, 1.0 / p);
  }
  const double log_moment_over_2p2 = log_gamma((p + 1.0) / 2.0) - 0.5 * std::log(std::numbers::pi);
  return std::numbers::sqrt2 * std::exp(log_moment_over_2p2 / p);
}

/// E|Z|^p for a standard Gaussian Z, p > -1.
inline double gaussian_abs_moment(double p) {
  if (!(p > -1.0)) throw DomainError("gaussian_abs_moment: requires p > -1");
  return std::exp(0.5 * p * std::numbers::ln2 + log_gamma((p + 1.0) / 2.0) -
                  0.5 * std::log(std::numbers::pi));
}

/// Normalizing constant of the density c e^{-|t|^p}: (2 Gamma(1 + 1/p))^{-1}.
inline double exp_power_constant(double p) {
  if (!(p > 0.0)) throw DomainError("exp_power_constant: requires p > 0");
  return 0.5 * std::exp(-log_gamma(1.0 + 1.0 / p));
}

/// Gaussian mass of [0, s]: (2 pi)^{-1/2} int_0^s e^{-x^2/2} dx.
inline double half_gaussian_mass(double s) {
  if (s < 0.0) throw DomainError("half_gaussian_mass: requires s >= 0");
  if (s == kInf) return 0.5;
  return 0.5 * std::erf(s / std::numbers::sqrt2);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  unsigned max_subdivisions = 4000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

namespace detail {

/// 31-point Kronrod rule with its embedded 15-point Gauss rule on [lo, hi];
/// error estimate |K - G|.
template <class F>
QuadratureResult gauss_kronrod_31(F& f, double lo, double hi) {
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;
  using Gauss = boost::math::quadrature::gauss<double, 15>;
  const auto& x = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  const double f0 = f(mid);
  double k = f0 * wk[0], g = f0 * wg[0];
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double pair = f(mid + half * x[i]) + f(mid - half * x[i]);
    k += pair * wk[i];
    if (i % 2 == 0) g += pair * wg[i / 2];
  }
  return {k * half, std::abs((k - g) * half)};
}

/// Global adaptive bisection on a finite interval: always splits the segment with
/// the largest error estimate.
template <class F>
QuadratureResult adaptive_finite(F& f, double lo, double hi, const QuadratureOptions& opts) {
  struct Segment {
    double lo, hi;
    QuadratureResult r;
    bool operator<(const Segment& o) const { return r.error < o.r.error; }
  };
  std::priority_queue<Segment> heap;
  heap.push({lo, hi, gauss_kronrod_31(f, lo, hi)});
  double value = heap.top().r.value, error = heap.top().r.error;
  for (unsigned it = 0; it < opts.max_subdivisions; ++it) {
    if (!std::isfinite(value)) break;
    if (error <= std::max(opts.rel_tol * std::abs(value), opts.abs_tol)) return {value, error};
    const Segment worst = heap.top();
    const double m = 0.5 * (worst.lo + worst.hi);
    if (!(m > worst.lo && m < worst.hi)) break;
    heap.pop();
    const Segment left{worst.lo, m, gauss_kronrod_31(f, worst.lo, m)};
    const Segment right{m, worst.hi, gauss_kronrod_31(f, m, worst.hi)};
    value += left.r.value + right.r.value - worst.r.value;
    error += left.r.error + right.r.error - worst.r.error;
    heap.push(left);
    heap.push(right);
  }
  // re-sum to shed drift from the running updates
  CompensatedSum v, e;
  while (!heap.empty()) {
    v.add(heap.top().r.value);
    e.add(heap.top().r.error);
    heap.pop();
  }
  return {v.value(), e.value()};
}

}  // namespace detail

/// Integral of f over [lo, hi] with its error estimate, without the convergence
/// check. Infinite endpoints are mapped to finite ones by x = a + t / (1 - t).
template <class F>
QuadratureResult integrate_with_error(F&& f, double lo, double hi, const QuadratureOptions& opts = {}) {
  if (!(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0))
    throw DomainError("integrate: tolerances must be positive");
  if (std::isnan(lo) || std::isnan(hi)) throw DomainError("integrate: NaN endpoint");
  if (lo == hi) return {};
  if (lo > hi) {
    auto r = integrate_with_error(f, hi, lo, opts);
    return {-r.value, r.error};
  }
  if (lo == -kInf && hi == kInf) {
    auto a = integrate_with_error(f, -kInf, 0.0, opts);
    auto b = integrate_with_error(f, 0.0, kInf, opts);
    return {a.value + b.value, a.error + b.error};
  }
  if (hi == kInf) {
    auto g = [&f, lo](double t) -> double {
      const double s = 1.0 - t;
      if (!(s > 0.0)) return 0.0;
      return f(lo + t / s) / (s * s);
    };
    return detail::adaptive_finite(g, 0.0, 1.0, opts);
  }
  if (lo == -kInf) {
    auto g = [&f, hi](double t) -> double {
      const double s = 1.0 - t;
      if (!(s > 0.0)) return 0.0;
      return f(hi - t / s) / (s * s);
    };
    return detail::adaptive_finite(g, 0.0, 1.0, opts);
  }
  auto g = [&f](double x) -> double { return f(x); };
  return detail::adaptive_finite(g, lo, hi, opts);
}

/// Adaptive Gauss-Kronrod (15/31) integral of f over [lo, hi]; either endpoint may be
/// infinite. Throws ConvergenceError when the error estimate still exceeds
/// max(rel_tol * |I|, abs_tol) after max_subdivisions bisections.
template <class F>
double integrate(F&& f, double lo, double hi, const QuadratureOptions& opts = {}) {
  const auto r = integrate_with_error(f, lo, hi, opts);
  if (!std::isfinite(r.value)) throw ConvergenceError("integrate: non-finite result");
  if (r.error > std::max(opts.rel_tol * std::abs(r.value), opts.abs_tol))
    throw ConvergenceError("integrate: error estimate " + std::to_string(r.error) + " for value " +
                           std::to_string(r.value) + " exceeds tolerance after " +
                           std::to_string(opts.max_subdivisions) + " subdivisions");
  return r.value;
}

/// Integral over consecutive segments [b_0, b_1], [b_1, b_2], ... ; used to keep
/// kinks and singularities on segment endpoints.
/// The tolerance applies to the total, not to each segment: when the segments cancel
/// (oscillatory integrands) a second pass tightens the per-segment relative tolerance
/// to the size of the total.
template <class F>
double integrate_pieces(F&& f, std::span<const double> breakpoints, const QuadratureOptions& opts = {}) {
  auto pass = [&](const QuadratureOptions& piece_opts, double& magnitude) {
    CompensatedSum total, error, mag;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
      const auto r = integrate_with_error(f, breakpoints[i], breakpoints[i + 1], piece_opts);
      total.add(r.value);
      error.add(r.error);
      mag.add(std::abs(r.value));
    }
    magnitude = mag.value();
    return QuadratureResult{total.value(), error.value()};
  };
  auto converged = [&opts](const QuadratureResult& r) {
    return r.error <= std::max(opts.rel_tol * std::abs(r.value), opts.abs_tol);
  };
  double magnitude = 0.0;
  QuadratureResult r = pass(opts, magnitude);
  if (!converged(r) && std::isfinite(r.value) && magnitude > 0.0) {
    QuadratureOptions tight = opts;
    const double target = std::max(opts.rel_tol * std::abs(r.value), opts.abs_tol);
    tight.rel_tol = std::max(target / magnitude, 1e-15);
    tight.abs_tol = std::max(opts.abs_tol / static_cast<double>(breakpoints.size()), 1e-300);
    r = pass(tight, magnitude);
  }
  if (!std::isfinite(r.value)) throw ConvergenceError("integrate_pieces: non-finite result");
  if (!converged(r))
    throw ConvergenceError("integrate_pieces: error estimate " + std::to_string(r.error) + " for value " +
                           std::to_string(r.value) + " exceeds tolerance");
  return r.value;
}

}  // namespace gmix

#pragma once
// Symmetric Gaussian-mixture laws X = Y Z (Y > 0 independent of a standard Gaussian Z):
// direct samplers, samplers of the mixing factor Y, densities, closed-form moments and
// a finite-difference complete-monotonicity test for x -> f(sqrt(x)).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "gmix/estimate.hpp"
#include "gmix/numerics.hpp"
#include "gmix/random.hpp"

namespace gmix {

/// Density c_p e^{-|t|^p}, p in (0, 2].
struct ExponentialPower {
  double p;
};

/// Characteristic function e^{-|t|^p}, p in (0, 2]. p = 1 is Cauchy, p = 2 is N(0, 2).
struct SymmetricStable {
  double p;
};

/// sigma_j Z with probability prob_j.
struct DiscreteScaleMixture {
  std::vector<double> scales;
  std::vector<double> probs;
};

/// sigma Z.
struct GaussianScale {
  double sigma;
};

class MixtureFamily {
 public:
  using Variant = std::variant<ExponentialPower, SymmetricStable, DiscreteScaleMixture, GaussianScale>;

  static MixtureFamily exponential_power(double p) {
    if (!(p > 0.0 && p <= 2.0)) throw DomainError("ExponentialPower: p must lie in (0, 2]");
    return MixtureFamily(ExponentialPower{p});
  }

  static MixtureFamily symmetric_stable(double p) {
    if (!(p > 0.0 && p <= 2.0)) throw DomainError("SymmetricStable: p must lie in (0, 2]");
    return MixtureFamily(SymmetricStable{p});
  }

  static MixtureFamily discrete(std::vector<double> scales, std::vector<double> probs) {
    if (scales.empty() || scales.size() != probs.size())
      throw DomainError("DiscreteScaleMixture: scales and probabilities must be nonempty and equal length");
    for (std::size_t j = 0; j < scales.size(); ++j)
      if (!(scales[j] > 0.0) || !(probs[j] > 0.0))
        throw DomainError("DiscreteScaleMixture: scales and probabilities must be positive");
    if (std::abs(compensated_sum(probs) - 1.0) > 1e-12)
      throw DomainError("DiscreteScaleMixture: probabilities must sum to 1");
    return MixtureFamily(DiscreteScaleMixture{std::move(scales), std::move(probs)});
  }

  static MixtureFamily gaussian(double sigma = 1.0) {
    if (!(sigma > 0.0)) throw DomainError("GaussianScale: sigma must be positive");
    return MixtureFamily(GaussianScale{sigma});
  }

  const Variant& variant() const { return v_; }

  template <class T>
  bool is() const {
    return std::holds_alternative<T>(v_);
  }

  std::string name() const {
    return std::visit(
        [](const auto& f) -> std::string {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, ExponentialPower>) return "exp-power(" + fmt(f.p) + ")";
          if constexpr (std::is_same_v<T, SymmetricStable>) return "stable(" + fmt(f.p) + ")";
          if constexpr (std::is_same_v<T, DiscreteScaleMixture>) return "discrete(" + std::to_string(f.scales.size()) + ")";
          if constexpr (std::is_same_v<T, GaussianScale>) return "gaussian(" + fmt(f.sigma) + ")";
        },
        v_);
  }

  /// True when sample_mixing_factor returns unit weights.
  bool exact_mixing() const {
    if (const auto* e = std::get_if<ExponentialPower>(&v_)) return e->p == 1.0 || e->p == 2.0;
    return true;
  }

  /// Moments E|X|^r are finite exactly for r < moment_limit().
  double moment_limit() const {
    if (const auto* s = std::get_if<SymmetricStable>(&v_)) return s->p < 2.0 ? s->p : kInf;
    return kInf;
  }

  double variance() const;

 private:
  explicit MixtureFamily(Variant v) : v_(std::move(v)) {}
  static std::string fmt(double x) {
    std::string s = std::to_string(x);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }

  Variant v_;
};

struct WeightedSample {
  double value;
  double weight;
};

// ---------------------------------------------------------------------------
// Samplers

/// Standard positive alpha-stable variable (Laplace transform e^{-s^alpha}),
/// alpha in (0, 1], by Kanter's transform of a uniform angle and an exponential.
inline double positive_stable(double alpha, RandomStream& rs) {
  if (alpha == 1.0) return 1.0;
  const double u = std::numbers::pi * rs.uniform();
  const double e = rs.exponential();
  const double one_minus = 1.0 - alpha;
  const double zolotarev = std::pow(std::sin(alpha * u), alpha / one_minus) * std::sin(one_minus * u) /
                           std::pow(std::sin(u), 1.0 / one_minus);
  return std::pow(zolotarev / e, one_minus / alpha);
}

/// Standard symmetric p-stable variable (characteristic function e^{-|t|^p}) by the
/// Chambers-Mallows-Stuck transform.
inline double symmetric_stable_draw(double p, RandomStream& rs) {
  const double v = std::numbers::pi * (rs.uniform() - 0.5);
  if (p == 1.0) return std::tan(v);
  const double e = rs.exponential();
  return std::sin(p * v) / std::pow(std::cos(v), 1.0 / p) * std::pow(std::cos((1.0 - p) * v) / e, (1.0 - p) / p);
}

/// Draw from the density c_p e^{-|t|^p} for any p > 0: |X|^p is Gamma(1/p, 1).
inline double exponential_power_draw(double p, RandomStream& rs) {
  const double g = rs.gamma(1.0 / p);
  return rs.sign() * std::pow(g, 1.0 / p);
}

inline std::size_t pick_index(std::span<const double> probs, RandomStream& rs) {
  double u = rs.uniform();
  for (std::size_t j = 0; j + 1 < probs.size(); ++j) {
    if (u < probs[j]) return j;
    u -= probs[j];
  }
  return probs.size() - 1;
}

inline double draw_direct(const MixtureFamily& family, RandomStream& rs) {
  return std::visit(
      [&rs](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ExponentialPower>) {
          return exponential_power_draw(f.p, rs);
        } else if constexpr (std::is_same_v<T, SymmetricStable>) {
          return symmetric_stable_draw(f.p, rs);
        } else if constexpr (std::is_same_v<T, DiscreteScaleMixture>) {
          const std::size_t j = pick_index(f.probs, rs);
          return f.scales[j] * rs.normal();
        } else {
          return f.sigma * rs.normal();
        }
      },
      family.variant());
}

/// One draw of the mixing factor Y. For ExponentialPower(p), p < 2, the factor is
/// (2V)^{-1/2} with V of density proportional to t^{-1/2} g_{p/2}(t); it is realized by
/// drawing W from g_{p/2} and attaching the importance weight W^{-1/2}. At p = 1 the
/// factor is exactly sqrt(2 E) with E standard exponential, at p = 2 it is 1/sqrt(2).
inline WeightedSample draw_mixing(const MixtureFamily& family, RandomStream& rs) {
  return std::visit(
      [&rs](const auto& f) -> WeightedSample {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ExponentialPower>) {
          if (f.p == 1.0) return {std::sqrt(2.0 * rs.exponential()), 1.0};
          const double w = positive_stable(f.p / 2.0, rs);
          return {1.0 / std::sqrt(2.0 * w), 1.0 / std::sqrt(w)};
        } else if constexpr (std::is_same_v<T, SymmetricStable>) {
          return {std::sqrt(2.0 * positive_stable(f.p / 2.0, rs)), 1.0};
        } else if constexpr (std::is_same_v<T, DiscreteScaleMixture>) {
          return {f.scales[pick_index(f.probs, rs)], 1.0};
        } else {
          return {f.sigma, 1.0};
        }
      },
      family.variant());
}

inline std::vector<double> sample_direct(const MixtureFamily& family, std::size_t n, const RandomStream& stream) {
  std::vector<double> out(n);
  for_each_chunk(n, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    RandomStream rs = stream.child(chunk);
    for (std::size_t i = begin; i < end; ++i) out[i] = draw_direct(family, rs);
  });
  return out;
}

inline std::vector<WeightedSample> sample_mixing_factor(const MixtureFamily& family, std::size_t n,
                                                        const RandomStream& stream) {
  std::vector<WeightedSample> out(n);
  for_each_chunk(n, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    RandomStream rs = stream.child(chunk);
    for (std::size_t i = begin; i < end; ++i) out[i] = draw_mixing(family, rs);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Densities

namespace detail {

/// Series in 1/|x| for the symmetric stable density (convergent for p < 1,
/// asymptotic for p in (1, 2)). Empty when it fails to settle to ~1e-15.
inline std::optional<double> stable_density_tail_series(double p, double x) {
  const double ax = std::abs(x);
  const double log_ax = std::log(ax);
  double sum = 0.0;
  double prev_mag = kInf;
  for (int k = 1; k <= 400; ++k) {
    const double log_mag = std::lgamma(k * p + 1.0) - std::lgamma(k + 1.0) - (k * p + 1.0) * log_ax;
    const double mag = std::exp(log_mag);
    const double term = ((k % 2 == 1) ? 1.0 : -1.0) * std::sin(k * std::numbers::pi * p / 2.0) * mag;
    sum += term;
    if (k >= 2 && mag < 1e-17 * std::abs(sum)) return sum / std::numbers::pi;
    if (p > 1.0 && mag > prev_mag) return std::nullopt;
    prev_mag = mag;
  }
  return std::nullopt;
}

/// (1/pi) int_0^T cos(t x) e^{-t^p} dt with T where e^{-t^p} < 1e-16, integrated over
/// half periods of the cosine (and a geometric partition that follows the decay).
inline double stable_density_fourier(double p, double x) {
  const double ax = std::abs(x);
  const double cutoff = std::pow(-std::log(1e-16), 1.0 / p);
  if (ax * cutoff > 1e7) throw ConvergenceError("stable_density_fourier: too many oscillations");
  std::vector<double> breaks{0.0};
  for (double b = 0.25; b < cutoff; b *= 2.0) breaks.push_back(b);
  if (ax > 0.0) {
    const double half_period = std::numbers::pi / ax;
    for (double b = half_period; b < cutoff; b += half_period) breaks.push_back(b);
  }
  breaks.push_back(cutoff);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  QuadratureOptions opts;
  opts.rel_tol = 1e-11;
  opts.abs_tol = 1e-14;
  const double v = integrate_pieces([p, ax](double t) { return std::cos(t * ax) * std::exp(-std::pow(t, p)); },
                                    breaks, opts);
  return v / std::numbers::pi;
}

/// Zolotarev's non-oscillatory integral over an angle in (0, pi/2), x != 0, p != 1:
/// f(x) = p x^{1/(p-1)} / (pi |p-1|) int V(t) exp(-x^{p/(p-1)} V(t)) dt,
/// V(t) = (cos t / sin(p t))^{p/(p-1)} cos((p-1) t) / cos t.
inline double stable_density_zolotarev(double p, double x) {
  const double ax = std::abs(x);
  const double e = p / (p - 1.0);
  const double scale = std::pow(ax, e);
  auto integrand = [p, e, scale](double t) {
    const double v = std::pow(std::cos(t) / std::sin(p * t), e) * std::cos((p - 1.0) * t) / std::cos(t);
    const double z = scale * v;
    return z > 700.0 ? 0.0 : v * std::exp(-z);
  };
  std::vector<double> breaks;
  for (int k = 0; k <= 8; ++k) breaks.push_back(std::numbers::pi / 2.0 * k / 8.0);
  QuadratureOptions opts;
  opts.rel_tol = 1e-12;
  opts.abs_tol = 1e-300;
  const double integral = integrate_pieces(integrand, breaks, opts);
  return p * std::pow(ax, 1.0 / (p - 1.0)) / (std::numbers::pi * std::abs(p - 1.0)) * integral;
}

}  // namespace detail

inline double symmetric_stable_density(double p, double x) {
  if (p == 1.0) return 1.0 / (std::numbers::pi * (1.0 + x * x));
  if (p == 2.0) return std::exp(-x * x / 4.0) / (2.0 * std::sqrt(std::numbers::pi));
  if (x == 0.0) return std::exp(log_gamma(1.0 + 1.0 / p)) / std::numbers::pi;
  if (std::isinf(x)) return 0.0;
  if (std::abs(x) >= 3.0) {
    if (auto s = detail::stable_density_tail_series(p, x)) return *s;
  }
  // the Fourier integral needs (37)^{1/p} units of t; below p = 1/2 use the angular form
  if (p < 0.5) return detail::stable_density_zolotarev(p, x);
  return detail::stable_density_fourier(p, x);
}

inline double density(const MixtureFamily& family, double x) {
  return std::visit(
      [x](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ExponentialPower>) {
          return exp_power_constant(f.p) * std::exp(-std::pow(std::abs(x), f.p));
        } else if constexpr (std::is_same_v<T, SymmetricStable>) {
          return symmetric_stable_density(f.p, x);
        } else if constexpr (std::is_same_v<T, DiscreteScaleMixture>) {
          double s = 0.0;
          for (std::size_t j = 0; j < f.scales.size(); ++j) s += f.probs[j] * normal_pdf(x / f.scales[j]) / f.scales[j];
          return s;
        } else {
          return normal_pdf(x / f.sigma) / f.sigma;
        }
      },
      family.variant());
}

/// Distribution function. Closed forms except for stable p not in {1, 2}, which
/// integrates the density from 0.
inline double cdf(const MixtureFamily& family, double x) {
  return std::visit(
      [x, &family](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ExponentialPower>) {
          const double tail = 0.5 * regularized_gamma_upper(1.0 / f.p, std::pow(std::abs(x), f.p));
          return x >= 0.0 ? 1.0 - tail : tail;
        } else if constexpr (std::is_same_v<T, SymmetricStable>) {
          if (f.p == 1.0) return 0.5 + std::atan(x) / std::numbers::pi;
          if (f.p == 2.0) return normal_cdf(x / std::numbers::sqrt2);
          const double half = integrate([&family](double t) { return density(family, t); }, 0.0, std::abs(x));
          return x >= 0.0 ? 0.5 + half : 0.5 - half;
        } else if constexpr (std::is_same_v<T, DiscreteScaleMixture>) {
          double s = 0.0;
          for (std::size_t j = 0; j < f.scales.size(); ++j) s += f.probs[j] * normal_cdf(x / f.scales[j]);
          return s;
        } else {
          return normal_cdf(x / f.sigma);
        }
      },
      family.variant());
}

// ---------------------------------------------------------------------------
// Moments

/// E|X|^r, r > -1; +infinity when the moment diverges.
inline double abs_moment(const MixtureFamily& family, double r) {
  if (!(r > -1.0)) throw DomainError("abs_moment: requires r > -1");
  return std::visit(
      [r](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ExponentialPower>) {
          return std::exp(log_gamma((r + 1.0) / f.p) - log_gamma(1.0 / f.p));
        } else if constexpr (std::is_same_v<T, SymmetricStable>) {
          if (f.p == 2.0) return std::pow(2.0, r / 2.0) * gaussian_abs_moment(r);
          if (r >= f.p) return kInf;
          // E|X|^r = 2^{r/2} E W^{r/2} E|Z|^r with E W^s = Gamma(1 - s/alpha) / Gamma(1 - s)
          return std::pow(2.0, r / 2.0) * gaussian_abs_moment(r) *
                 std::exp(std::lgamma(1.0 - r / f.p) - std::lgamma(1.0 - r / 2.0));
        } else if constexpr (std::is_same_v<T, DiscreteScaleMixture>) {
          double s = 0.0;
          for (std::size_t j = 0; j < f.scales.size(); ++j) s += f.probs[j] * std::pow(f.scales[j], r);
          return s * gaussian_abs_moment(r);
        } else {
          return std::pow(f.sigma, r) * gaussian_abs_moment(r);
        }
      },
      family.variant());
}

/// E log|X|.
inline double log_abs_mean(const MixtureFamily& family) {
  const double log_z = -(kEulerGamma + std::numbers::ln2) / 2.0;
  return std::visit(
      [log_z](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ExponentialPower>) {
          return digamma(1.0 / f.p) / f.p;
        } else if constexpr (std::is_same_v<T, SymmetricStable>) {
          return kEulerGamma * (1.0 / f.p - 1.0);
        } else if constexpr (std::is_same_v<T, DiscreteScaleMixture>) {
          double s = 0.0;
          for (std::size_t j = 0; j < f.scales.size(); ++j) s += f.probs[j] * std::log(f.scales[j]);
          return s + log_z;
        } else {
          return std::log(f.sigma) + log_z;
        }
      },
      family.variant());
}

/// ||X||_r = (E|X|^r)^{1/r}; at r = 0 the geometric mean exp(E log|X|).
inline double abs_norm(const MixtureFamily& family, double r) {
  if (r == 0.0) return std::exp(log_abs_mean(family));
  const double m = abs_moment(family, r);
  if (m == kInf) return kInf;
  return std::pow(m, 1.0 / r);
}

inline double MixtureFamily::variance() const { return abs_moment(*this, 2.0); }

// ---------------------------------------------------------------------------
// Complete monotonicity

struct MonotonicityViolation {
  int order;
  double x;
  double value;  // (-1)^k Delta_h^k g(x), below -allowance
};

struct MonotonicityResult {
  bool passed = true;
  std::optional<MonotonicityViolation> violation;
};

inline std::vector<double> log_spaced_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) throw std::invalid_argument("log_spaced_grid: bad range");
  std::vector<double> g(count);
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) g[i] = lo * std::exp(step * static_cast<double>(i));
  return g;
}

/// Necessary-condition test for complete monotonicity of g on (0, inf): checks
/// (-1)^k Delta_h^k g(x) >= -eps_k for k = 0..max_order at each grid point, with forward
/// differences of step h = x/16 and rounding allowance eps_k = 1e-8 * max|g| * 2^k.
/// Reports the violation of lowest order (then smallest x). Passing does not prove
/// complete monotonicity.
template <class G>
MonotonicityResult complete_monotonicity_check(G&& g, std::span<const double> grid, int max_order) {
  if (max_order < 2) throw std::invalid_argument("complete_monotonicity_check: order must be at least 2");
  if (grid.empty() || !(grid.front() > 0.0)) throw std::invalid_argument("complete_monotonicity_check: grid must be positive");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("complete_monotonicity_check: grid must be increasing");

  const auto k_max = static_cast<std::size_t>(max_order);
  std::vector<std::vector<double>> values(grid.size(), std::vector<double>(k_max + 1));
  double g_max = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double h = grid[i] / 16.0;
    for (std::size_t j = 0; j <= k_max; ++j) {
      values[i][j] = g(grid[i] + static_cast<double>(j) * h);
      g_max = std::max(g_max, std::abs(values[i][j]));
    }
  }

  for (std::size_t k = 0; k <= k_max; ++k) {
    const double allowance = 1e-8 * g_max * std::ldexp(1.0, static_cast<int>(k));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      // (-1)^k Delta^k g(x) = sum_j (-1)^j C(k, j) g(x + j h)
      double diff = 0.0;
      double binom = 1.0;
      for (std::size_t j = 0; j <= k; ++j) {
        diff += ((j % 2 == 0) ? 1.0 : -1.0) * binom * values[i][j];
        binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
      }
      if (diff < -allowance) return {false, MonotonicityViolation{static_cast<int>(k), grid[i], diff}};
    }
  }
  return {};
}

}  // namespace gmix

#pragma once
// Verification reports: Schur comparisons of the library's functionals, the
// B-inequality, correlation inequalities (product mixtures, stable vectors, sphere),
// the strip computation for mu_p with p > 2, and the small-ball estimate for mu_1^n.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "gmix/convex.hpp"
#include "gmix/entropy.hpp"
#include "gmix/estimate.hpp"
#include "gmix/lpball.hpp"
#include "gmix/majorization.hpp"
#include "gmix/mixtures.hpp"
#include "gmix/report.hpp"
#include "gmix/weighted_sums.hpp"

namespace gmix {

namespace detail {

inline std::string format_vector(std::span<const double> v) {
  std::ostringstream os;
  os.precision(6);
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ')';
  return os.str();
}

inline std::string format_number(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Schur comparisons

struct SchurFunctional {
  enum class Kind { moment, shannon, renyi, section_volume, projection_volume, laplace_functional };

  Kind kind = Kind::moment;
  MixtureFamily family = MixtureFamily::gaussian();
  double order = 2.0;   // p for moments, alpha for Renyi, q for the l_q functionals
  double lambda = 1.0;  // Laplace functional only

  static SchurFunctional moment(const MixtureFamily& f, double p) { return {Kind::moment, f, p, 1.0}; }
  static SchurFunctional shannon(const MixtureFamily& f) { return {Kind::shannon, f, 1.0, 1.0}; }
  static SchurFunctional renyi(const MixtureFamily& f, double alpha) { return {Kind::renyi, f, alpha, 1.0}; }
  static SchurFunctional section_volume(double q) {
    return {Kind::section_volume, MixtureFamily::gaussian(), q, 1.0};
  }
  static SchurFunctional projection_volume(double q) {
    return {Kind::projection_volume, MixtureFamily::gaussian(), q, 1.0};
  }
  static SchurFunctional laplace_functional(double q, double lambda) {
    return {Kind::laplace_functional, MixtureFamily::gaussian(), q, lambda};
  }

  std::string name() const {
    switch (kind) {
      case Kind::moment: return "moment(p=" + detail::format_number(order) + ", " + family.name() + ")";
      case Kind::shannon: return "shannon(" + family.name() + ")";
      case Kind::renyi: return "renyi(alpha=" + detail::format_number(order) + ", " + family.name() + ")";
      case Kind::section_volume: return "section_volume(q=" + detail::format_number(order) + ")";
      case Kind::projection_volume: return "projection_volume(q=" + detail::format_number(order) + ")";
      case Kind::laplace_functional:
        return "laplace_functional(q=" + detail::format_number(order) + ", lambda=" + detail::format_number(lambda) +
               ")";
    }
    return "unknown";
  }

  /// True when a^2 majorized by b^2 implies value(a) <= value(b).
  bool increasing_toward_b() const {
    switch (kind) {
      case Kind::moment: return order >= 2.0;
      case Kind::shannon:
      case Kind::renyi:
      case Kind::projection_volume: return false;
      case Kind::section_volume:
      case Kind::laplace_functional: return true;
    }
    return true;
  }
};

struct Budget {
  std::size_t n_samples = 100000;
  std::size_t pool_size = std::size_t{1} << 15;  // entropy density pools
};

/// Evaluates the functional at a and b on common random numbers and asserts the
/// ordering implied by a^2 majorized by b^2.
inline VerificationReport schur_compare(const SchurFunctional& fn, const WeightVector& a, const WeightVector& b,
                                        const Budget& budget, const RandomStream& stream) {
  if (a.size() != b.size()) throw std::invalid_argument("schur_compare: length mismatch");
  if (std::abs(a.sum_squares() - 1.0) > 1e-9 || std::abs(b.sum_squares() - 1.0) > 1e-9)
    throw DomainError("schur_compare: a and b must be unit vectors");
  if (!majorizes(b.squared(), a.squared(), 1e-9))
    throw std::invalid_argument("schur_compare: a^2 must be majorized by b^2");

  VerificationReport r;
  r.claim = "schur:" + fn.name();
  r.add_param("a", detail::format_vector(a.coords()));
  r.add_param("b", detail::format_vector(b.coords()));
  r.seed = stream.seed();
  r.n_samples = budget.n_samples;

  using Kind = SchurFunctional::Kind;
  Estimate va, vb;
  PairedDifference diff;  // value(b) - value(a)
  switch (fn.kind) {
    case Kind::moment: {
      check_moment_order(fn.family, fn.order);
      const auto pool = MixingPool::draw(fn.family, a.size(), budget.n_samples, stream);
      va = pool_moment(pool, a, fn.order, stream);
      vb = pool_moment(pool, b, fn.order, stream);
      diff = pool_moment_difference(pool, a, b, fn.order);
      break;
    }
    case Kind::shannon:
    case Kind::renyi: {
      const double alpha = fn.kind == Kind::shannon ? 1.0 : fn.order;
      if (fn.kind == Kind::renyi && !(alpha > 1.0)) throw DomainError("schur_compare: Renyi order must exceed 1");
      const auto d =
          paired_entropy_difference(fn.family, a, b, alpha, EntropyBudget{budget.pool_size, budget.n_samples}, stream);
      va = d.first.estimate();
      vb = d.second.estimate();
      diff = {d.difference, d.std_error + d.pool_bias};
      r.notes.push_back("entropy margins include the pool-halving bias " + detail::format_number(d.pool_bias));
      break;
    }
    case Kind::section_volume: {
      const HyperplaneSpec ha(a), hb(b);
      va = section_volume(fn.order, ha, budget.n_samples, stream);
      vb = section_volume(fn.order, hb, budget.n_samples, stream);
      diff = section_volume_difference(fn.order, ha, hb, budget.n_samples, stream);
      break;
    }
    case Kind::projection_volume: {
      const HyperplaneSpec ha(a), hb(b);
      va = projection_volume(fn.order, ha, budget.n_samples, stream);
      vb = projection_volume(fn.order, hb, budget.n_samples, stream);
      diff = projection_volume_difference(fn.order, ha, hb, budget.n_samples, stream);
      break;
    }
    case Kind::laplace_functional: {
      const HyperplaneSpec ha(a), hb(b);
      va = laplace_gaussian_functional(fn.order, fn.lambda, ha, budget.n_samples, stream);
      vb = laplace_gaussian_functional(fn.order, fn.lambda, hb, budget.n_samples, stream);
      diff = laplace_gaussian_difference(fn.order, fn.lambda, ha, hb, budget.n_samples, stream);
      break;
    }
  }
  r.add_estimate("value(a)", va);
  r.add_estimate("value(b)", vb);
  if (fn.increasing_toward_b())
    r.require_nonnegative("value(b) - value(a) >= 0", diff);
  else
    r.require_nonnegative("value(a) - value(b) >= 0", PairedDifference{-diff.difference, diff.std_error});
  r.finalize();
  return r;
}

/// Runs report(n) and, when the verdict is inconclusive, once more with 2n samples.
inline VerificationReport with_escalation(const std::function<VerificationReport(std::size_t)>& report,
                                          std::size_t n_samples) {
  auto r = report(n_samples);
  if (r.verdict != Verdict::inconclusive) return r;
  auto again = report(2 * n_samples);
  again.notes.push_back("inconclusive at n = " + std::to_string(n_samples) + "; rerun with doubled sample size");
  return again;
}

// ---------------------------------------------------------------------------
// Indicator statistics on shared draws

namespace detail {

inline std::vector<double> indicators(const SymmetricConvexBody& k, const SampleMatrix& xs) {
  if (xs.dim != k.dim()) throw std::invalid_argument("indicators: dimension mismatch");
  std::vector<double> h(xs.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = k.contains(xs.row(i)) ? 1.0 : 0.0;
  return h;
}

inline std::vector<double> both(std::span<const double> x, std::span<const double> y) {
  std::vector<double> h(x.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = x[i] * y[i];
  return h;
}

/// Adds the row mu(K cap L) >= mu(K) mu(L), with the linearized error of the difference.
/// Indicator column stored one bit per draw, with its weighted mean.
struct PackedIndicator {
  std::vector<std::uint64_t> bits;
  WeightedMean mean;

  static PackedIndicator of(const SymmetricConvexBody& k, const SampleMatrix& xs) {
    const auto h = indicators(k, xs);
    PackedIndicator p{std::vector<std::uint64_t>((h.size() + 63) / 64, 0), weighted_mean(h, xs.weights)};
    for (std::size_t i = 0; i < h.size(); ++i)
      if (h[i] != 0.0) p.bits[i / 64] |= std::uint64_t{1} << (i % 64);
    return p;
  }
};

/// linearized_std_error for three indicator columns. The influence of a draw depends
/// only on its 3-bit pattern, so the sum runs over the eight patterns.
inline double triple_std_error(const PackedIndicator& a, const PackedIndicator& b, const PackedIndicator& c,
                               std::span<const double> weights, std::array<double, 3> grad) {
  std::array<double, 8> w2{};
  double sw = 0.0;
  const std::size_t n = a.mean.n;
  if (weights.empty()) {
    std::array<std::uint64_t, 8> counts{};
    for (std::size_t j = 0; j < a.bits.size(); ++j) {
      const std::uint64_t x = a.bits[j], y = b.bits[j], z = c.bits[j];
      const std::size_t width = std::min<std::size_t>(64, n - 64 * j);
      const std::uint64_t all = width == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
      for (unsigned pat = 0; pat < 8; ++pat)
        counts[pat] += static_cast<std::uint64_t>(std::popcount(((pat & 1) ? x : ~x) & ((pat & 2) ? y : ~y) &
                                                                ((pat & 4) ? z : ~z) & all));
    }
    for (unsigned pat = 0; pat < 8; ++pat) w2[pat] = static_cast<double>(counts[pat]);
    sw = static_cast<double>(n);
  } else {
    CompensatedSum total;
    std::array<CompensatedSum, 8> acc;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = i / 64, bit = i % 64;
      const unsigned pat = static_cast<unsigned>(((a.bits[j] >> bit) & 1) | (((b.bits[j] >> bit) & 1) << 1) |
                                                 (((c.bits[j] >> bit) & 1) << 2));
      acc[pat].add(weights[i] * weights[i]);
      total.add(weights[i]);
    }
    for (unsigned pat = 0; pat < 8; ++pat) w2[pat] = acc[pat].value();
    sw = total.value();
  }
  double ss = 0.0;
  for (unsigned pat = 0; pat < 8; ++pat) {
    const double influence = grad[0] * ((pat & 1) - a.mean.mean) + grad[1] * (((pat >> 1) & 1) - b.mean.mean) +
                             grad[2] * (((pat >> 2) & 1) - c.mean.mean);
    ss += w2[pat] * influence * influence;
  }
  return std::sqrt(ss) / sw;
}

inline void add_correlation_row(VerificationReport& r, const SymmetricConvexBody& k, const SymmetricConvexBody& l,
                                const SampleMatrix& xs, const RandomStream& stream) {
  const auto hk = indicators(k, xs), hl = indicators(l, xs);
  const auto hkl = both(hk, hl);
  const auto mk = weighted_mean(hk, xs.weights), ml = weighted_mean(hl, xs.weights),
             mkl = weighted_mean(hkl, xs.weights);
  const std::vector<std::span<const double>> cols{hkl, hk, hl};
  const std::vector<double> means{mkl.mean, mk.mean, ml.mean};
  const std::vector<double> grad{1.0, -ml.mean, -mk.mean};
  const double se = linearized_std_error(xs.weights, cols, means, grad);
  r.add_estimate("mu(K)", to_estimate(mk, stream));
  r.add_estimate("mu(L)", to_estimate(ml, stream));
  r.add_estimate("mu(K cap L)", to_estimate(mkl, stream));
  r.require_at_least("mu(K cap L) >= mu(K) mu(L)", mkl.mean, mk.mean * ml.mean, se);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// B-inequality

enum class BInequalityStatus {
  proven,  // log Y is log-concave (or the factor is Gaussian)
  open,
};

/// Whether the B-inequality is established for a product of this family: Gaussian
/// factors, and mu_p with p in (0, 1] whose mixing factor has log-concave logarithm.
inline BInequalityStatus b_inequality_status(const MixtureFamily& f) {
  if (f.is<GaussianScale>()) return BInequalityStatus::proven;
  if (const auto* e = std::get_if<ExponentialPower>(&f.variant()))
    return (e->p <= 1.0 || e->p == 2.0) ? BInequalityStatus::proven : BInequalityStatus::open;
  return BInequalityStatus::open;
}

struct BInequalityOptions {
  std::vector<std::vector<double>> t_grid;  // exponent vectors t, body diag(e^t) K
  std::vector<double> dilations;           // optional grid for the 1/n-concavity of s -> mu(sK)
  std::size_t n_samples = 100000;
  MeasureMethod method = MeasureMethod::direct;
};

/// Midpoint log-concavity of t -> mu(diag(e^{t_1}, ..., e^{t_n}) K) over all pairs of
/// grid points, and optionally midpoint concavity of s -> mu(sK)^{1/n}.
inline VerificationReport b_inequality_report(const ProductMixtureMeasure& mu, const SymmetricConvexBody& k,
                                              const BInequalityOptions& opts, const RandomStream& stream) {
  if (mu.dim() != k.dim()) throw std::invalid_argument("b_inequality_report: dimension mismatch");
  if (opts.t_grid.size() < 2 && opts.dilations.size() < 2)
    throw std::invalid_argument("b_inequality_report: needs at least two grid points");
  VerificationReport r;
  r.claim = "b-inequality";
  r.seed = stream.seed();
  r.n_samples = opts.n_samples;
  const auto xs = product_samples(mu, opts.n_samples, stream, opts.method);
  const std::size_t n = k.dim();

  std::map<std::vector<double>, detail::PackedIndicator> cache;
  const auto measure_at = [&](std::span<const double> t) -> const detail::PackedIndicator& {
    std::vector<double> key(t.begin(), t.end());
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    std::vector<double> d(n);
    for (std::size_t j = 0; j < n; ++j) d[j] = std::exp(t[j]);
    auto h = detail::PackedIndicator::of(SymmetricConvexBody::diagonal_image(k, d), xs);
    if (!(h.mean.mean > 0.0))
      throw std::runtime_error("b_inequality_report: zero measure estimate at t = " + detail::format_vector(t));
    return cache.emplace(std::move(key), std::move(h)).first->second;
  };

  for (const auto& t : opts.t_grid) {
    if (t.size() != n) throw std::invalid_argument("b_inequality_report: grid point of wrong length");
    const auto& w = measure_at(t).mean;
    r.add_estimate("psi" + detail::format_vector(t),
                   Estimate{std::log(w.mean), w.std_error / w.mean, w.n, stream.seed(), stream.stream_id()});
  }
  for (std::size_t s = 0; s < opts.t_grid.size(); ++s) {
    for (std::size_t t = s + 1; t < opts.t_grid.size(); ++t) {
      std::vector<double> mid(n);
      for (std::size_t j = 0; j < n; ++j) mid[j] = 0.5 * (opts.t_grid[s][j] + opts.t_grid[t][j]);
      const auto& hs = measure_at(opts.t_grid[s]);
      const auto& ht = measure_at(opts.t_grid[t]);
      const auto& hm = measure_at(mid);
      const double ms = hs.mean.mean, mt = ht.mean.mean, mm = hm.mean.mean;
      const double se = detail::triple_std_error(hm, hs, ht, xs.weights, {1.0 / mm, -0.5 / ms, -0.5 / mt});
      r.require_at_least("log-concavity " + detail::format_vector(opts.t_grid[s]) + " / " +
                             detail::format_vector(opts.t_grid[t]),
                         std::log(mm), 0.5 * (std::log(ms) + std::log(mt)), se);
    }
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t s = 0; s < opts.dilations.size(); ++s)
    for (std::size_t t = s + 1; t < opts.dilations.size(); ++t) {
      const double a = opts.dilations[s], b = opts.dilations[t];
      if (!(a > 0.0 && b > 0.0)) throw DomainError("b_inequality_report: dilations must be positive");
      const auto at = [&](double c) { return std::vector<double>(n, std::log(c)); };
      const auto& ha = measure_at(at(a));
      const auto& hb = measure_at(at(b));
      const auto& hm = measure_at(at(0.5 * (a + b)));
      const double ma = ha.mean.mean, mb = hb.mean.mean, mm = hm.mean.mean;
      const auto g = [inv_n](double m) { return inv_n * std::pow(m, inv_n - 1.0); };
      const double se = detail::triple_std_error(hm, ha, hb, xs.weights, {g(mm), -0.5 * g(ma), -0.5 * g(mb)});
      r.require_at_least("1/n-concavity s=" + detail::format_number(a) + " / " + detail::format_number(b),
                         std::pow(mm, inv_n), 0.5 * (std::pow(ma, inv_n) + std::pow(mb, inv_n)), se);
    }

  const bool open = std::any_of(mu.factors.begin(), mu.factors.end(),
                                [](const auto& f) { return b_inequality_status(f) == BInequalityStatus::open; });
  if (open) {
    r.fail_asserted = false;
    r.notes.push_back("the B-inequality is not established for these factors; no failure is asserted");
  }
  r.finalize();
  return r;
}

// ---------------------------------------------------------------------------
// Correlation inequalities

using CorrelationLaw = std::variant<ProductMixtureMeasure, SpectralStableVector>;

inline VerificationReport correlation_report(const CorrelationLaw& law, const SymmetricConvexBody& k,
                                             const SymmetricConvexBody& l, std::size_t n_samples,
                                             const RandomStream& stream) {
  if (k.dim() != l.dim()) throw std::invalid_argument("correlation_report: dimension mismatch");
  VerificationReport r;
  r.claim = "correlation";
  r.seed = stream.seed();
  r.n_samples = n_samples;
  SampleMatrix xs;
  if (const auto* mu = std::get_if<ProductMixtureMeasure>(&law)) {
    if (mu->dim() != k.dim()) throw std::invalid_argument("correlation_report: dimension mismatch");
    r.add_param("law", "product of " + std::to_string(mu->dim()) + " mixtures");
    xs = product_samples(*mu, n_samples, stream);
  } else {
    const auto& x = std::get<SpectralStableVector>(law);
    if (x.dim() != k.dim()) throw std::invalid_argument("correlation_report: dimension mismatch");
    r.add_param("law", "spectral stable p=" + detail::format_number(x.p));
    xs = spectral_stable_sample(x, n_samples, stream);
  }
  detail::add_correlation_row(r, k, l, xs, stream);
  r.finalize();
  return r;
}

/// Points of the open upper hemisphere of S^{n-1}, uniform, mapped by the gnomonic
/// chart x -> (x_1, ..., x_{n-1}) / x_n. The image is the (n-1)-dimensional Cauchy law.
inline SampleMatrix gnomonic_samples(std::size_t n, std::size_t n_samples, const RandomStream& stream) {
  if (n < 2) throw DomainError("gnomonic_samples: sphere dimension must be at least 1");
  return generate_samples(
      n - 1, n_samples, stream,
      [](RandomStream& rs, std::span<double> row) {
        for (double& x : row) x = rs.normal();
        double last = 0.0;
        while (last == 0.0) last = std::abs(rs.normal());
        for (double& x : row) x /= last;
        return 1.0;
      },
      false);
}

/// Correlation on the upper hemisphere for the spherical sets whose gnomonic images are
/// the planar bodies K and L (in R^{n-1}).
inline VerificationReport spherical_correlation_report(const SymmetricConvexBody& k, const SymmetricConvexBody& l,
                                                       std::size_t n_samples, const RandomStream& stream) {
  if (k.dim() != l.dim()) throw std::invalid_argument("spherical_correlation_report: dimension mismatch");
  VerificationReport r;
  r.claim = "sphere-correlation";
  r.add_param("sphere", "S^" + std::to_string(k.dim()));
  r.seed = stream.seed();
  r.n_samples = n_samples;
  detail::add_correlation_row(r, k, l, gnomonic_samples(k.dim() + 1, n_samples, stream), stream);
  r.finalize();
  return r;
}

// ---------------------------------------------------------------------------
// Strips for mu_p, p > 2

namespace detail {

/// mu_p([lo, hi]) for the density c_p e^{-|t|^p}, without cancellation in the tails.
inline double exp_power_mass(double p, double lo, double hi) {
  const auto tail = [p](double x) { return 0.5 * regularized_gamma_upper(1.0 / p, std::pow(x, p)); };
  if (lo >= 0.0) return tail(lo) - tail(hi);
  if (hi <= 0.0) return tail(-hi) - tail(-lo);
  return 1.0 - tail(-lo) - tail(hi);
}

}  // namespace detail

struct StripMasses {
  double intersection = 0.0;  // mu_p^2(K cap L)
  double strip = 0.0;         // mu_p^2(K) = mu_p^2(L)
  double ratio() const { return intersection / (strip * strip); }
};

/// mu_p^2 of K = {|x - y| <= delta}, L = {|x + y| <= delta} and K cap L by quadrature.
inline StripMasses strip_masses(double p, double delta) {
  if (!(p > 0.0)) throw DomainError("strip_masses: p must be positive");
  if (!(delta > 0.0)) throw DomainError("strip_masses: delta must be positive");
  const double c = exp_power_constant(p);
  const auto f = [p, c](double x) { return c * std::exp(-std::pow(std::abs(x), p)); };
  QuadratureOptions opts;
  opts.rel_tol = 1e-13;
  opts.abs_tol = 1e-300;
  StripMasses m;
  // K: for each x, y in [x - delta, x + delta]
  const auto strip = [&](double x) { return f(x) * detail::exp_power_mass(p, x - delta, x + delta); };
  const std::vector<double> breaks{-kInf, -1.0, -delta, 0.0, delta, 1.0, kInf};
  m.strip = integrate_pieces(strip, breaks, opts);
  // K cap L: |x| <= delta, |y| <= delta - |x|
  const auto cross = [&](double x) {
    const double w = delta - std::abs(x);
    return w > 0.0 ? f(x) * detail::exp_power_mass(p, -w, w) : 0.0;
  };
  m.intersection = 2.0 * integrate(cross, 0.0, delta, opts);
  return m;
}

/// The correlation inequality mu_p^2(K cap L) >= mu_p^2(K) mu_p^2(L) for the two
/// diagonal strips, evaluated deterministically; it fails for p > 2 and small delta.
/// The ratio is also reported at delta/2 next to its limit 2^{2/p - 1}.
inline VerificationReport strip_expansion_report(double p, double delta) {
  if (!(p >= 2.0)) throw DomainError("strip_expansion_report: requires p >= 2");
  if (!(delta > 0.0 && delta <= 0.05)) throw DomainError("strip_expansion_report: delta must lie in (0, 0.05]");
  const auto m = strip_masses(p, delta);
  const auto h = strip_masses(p, 0.5 * delta);
  VerificationReport r;
  r.claim = "strip-counterexample";
  r.add_param("p", detail::format_number(p));
  r.add_param("delta", detail::format_number(delta));
  r.add_estimate("mu(K cap L)", Estimate::exact(m.intersection));
  r.add_estimate("mu(K) mu(L)", Estimate::exact(m.strip * m.strip));
  r.add_estimate("ratio(delta)", Estimate::exact(m.ratio()));
  r.add_estimate("ratio(delta/2)", Estimate::exact(h.ratio()));
  r.add_estimate("ratio limit 2^(2/p-1)", Estimate::exact(std::pow(2.0, 2.0 / p - 1.0)));
  r.require_at_least("mu(K cap L) >= mu(K) mu(L)", m.intersection, m.strip * m.strip, 0.0);
  r.finalize();
  return r;
}

// ---------------------------------------------------------------------------
// Small balls for mu_1^n

struct SmallBallOptions {
  std::vector<double> t_grid{0.2, 0.4, 0.6, 0.8, 1.0};
  std::size_t n_samples = 100000;
  std::optional<double> inradius;  // a lower bound for r(K); defaults to the certified inradius
};

/// mu_1^n(tK) <= t^{r / (2 sqrt 6)} mu_1^n(K) on the grid, for K with mu_1^n(K) <= 1/2.
inline VerificationReport small_ball_report(const SymmetricConvexBody& k, const SmallBallOptions& opts,
                                            const RandomStream& stream) {
  const double certified = k.inradius();
  const double r_used = opts.inradius.value_or(certified);
  if (!(r_used > 0.0) || r_used > certified * (1.0 + 1e-12))
    throw DomainError("small_ball_report: inradius must lie in (0, r(K)]");
  if (!std::isfinite(r_used)) throw DomainError("small_ball_report: body must be bounded in some direction");
  const auto mu = ProductMixtureMeasure::iid(MixtureFamily::exponential_power(1.0), k.dim());
  const auto xs = product_samples(mu, opts.n_samples, stream);
  const auto hk = detail::indicators(k, xs);
  const auto mk = weighted_mean(hk);
  if (mk.mean + kHoldSigma * mk.std_error > 0.5)
    throw DomainError("small_ball_report: requires mu_1^n(K) <= 1/2 (estimate " + detail::format_number(mk.mean) + ")");
  VerificationReport r;
  r.claim = "small-ball";
  r.add_param("inradius", detail::format_number(r_used));
  r.seed = stream.seed();
  r.n_samples = opts.n_samples;
  r.add_estimate("mu(K)", to_estimate(mk, stream));
  const double exponent = r_used / (2.0 * std::sqrt(6.0));
  for (double t : opts.t_grid) {
    if (!(t > 0.0 && t <= 1.0)) throw DomainError("small_ball_report: t must lie in (0, 1]");
    const auto ht = detail::indicators(SymmetricConvexBody::diagonal_image(k, std::vector<double>(k.dim(), t)), xs);
    const double bound = std::pow(t, exponent);
    const auto mt = weighted_mean(ht);
    r.add_estimate("mu(tK) t=" + detail::format_number(t), to_estimate(mt, stream));
    const std::vector<std::span<const double>> cols{hk, ht};
    const std::vector<double> means{mk.mean, mt.mean};
    const std::vector<double> grad{bound, -1.0};
    r.require_at_least("t=" + detail::format_number(t), bound * mk.mean, mt.mean,
                       linearized_std_error({}, cols, means, grad));
  }
  r.finalize();
  return r;
}

}  // namespace gmix

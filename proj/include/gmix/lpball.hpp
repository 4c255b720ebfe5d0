#pragma once
// Hyperplane sections and projections of the l_q unit ball B_q^n, the Laplace
// functional of the Gaussian vector on a hyperplane, and mean widths of projections.
//
// Sections for q in (0, 2) are proportional to E (sum a_j^2 Y_j^2)^{-1/2}, with Y the
// mixing factors of the density c_q e^{-|t|^q}. Projections for q in (2, inf) are
// proportional to E |sum a_j X_j| for X_j i.i.d. with density proportional to
// |t|^{(2-q)/(q-1)} e^{-|t|^{q/(q-1)}}. In both cases the constant is fixed by a = e_1,
// where section and projection are B_q^{n-1}.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "gmix/estimate.hpp"
#include "gmix/majorization.hpp"
#include "gmix/mixtures.hpp"
#include "gmix/numerics.hpp"
#include "gmix/random.hpp"
#include "gmix/weighted_sums.hpp"

namespace gmix {

/// The hyperplane a^perp for a unit normal a.
struct HyperplaneSpec {
  WeightVector normal;

  explicit HyperplaneSpec(WeightVector a) : normal(std::move(a)) {
    if (std::abs(normal.norm() - 1.0) > 1e-12) throw DomainError("HyperplaneSpec: normal must be a unit vector");
  }

  static HyperplaneSpec normalized(const WeightVector& v) { return HyperplaneSpec(v.normalized()); }

  static HyperplaneSpec coordinate(std::size_t n, std::size_t i = 0) {
    std::vector<double> e(n, 0.0);
    e.at(i) = 1.0;
    return HyperplaneSpec(WeightVector(std::move(e)));
  }

  static HyperplaneSpec diagonal(std::size_t n) {
    return HyperplaneSpec(WeightVector(std::vector<double>(n, 1.0 / std::sqrt(static_cast<double>(n)))));
  }

  std::size_t dim() const { return normal.size(); }
};

/// |B_q^n| = (2 Gamma(1 + 1/q))^n / Gamma(1 + n/q); q = inf gives 2^n.
inline double ball_volume(double q, std::size_t n) {
  if (n == 0) return 1.0;
  if (std::isinf(q) && q > 0.0) return std::pow(2.0, static_cast<double>(n));
  if (!(q > 0.0)) throw DomainError("ball_volume: q must be positive");
  const double dn = static_cast<double>(n);
  return std::exp(dn * (std::numbers::ln2 + log_gamma(1.0 + 1.0 / q)) - log_gamma(1.0 + dn / q));
}

namespace detail {

inline void check_section_q(double q) {
  if (!(q > 0.0 && q < 2.0)) throw DomainError("section: q must lie in (0, 2)");
}

inline void check_projection_q(double q) {
  if (!(q > 2.0) || std::isinf(q)) throw DomainError("projection: q must lie in (2, inf); use cube_projection_volume");
}

/// a = +-e_i, where both the section and the projection are B_q^{n-1}.
inline bool is_coordinate(const HyperplaneSpec& a) {
  return std::count(a.normal.coords().begin(), a.normal.coords().end(), 0.0) + 1 ==
         static_cast<std::ptrdiff_t>(a.dim());
}

inline void check_dims(const HyperplaneSpec& a) {
  if (a.dim() < 2) throw DomainError("hyperplane functionals need n >= 2");
}

/// Estimate of value(second) - value(first) from per-sample values on common draws.
inline PairedDifference paired_mean_difference(std::span<const double> first, std::span<const double> second,
                                               std::span<const double> weights, double scale) {
  std::vector<double> d(first.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = second[i] - first[i];
  const auto m = weighted_mean(d, weights);
  return {scale * m.mean, scale * m.std_error};
}

inline std::vector<double> inverse_radii(const MixingPool& pool, const WeightVector& a) {
  auto v = pool.radii_squared(a);
  for (double& x : v) x = 1.0 / std::sqrt(x);
  return v;
}

}  // namespace detail

/// C(q, n) with |B_q^n cap a^perp| = C E(sum a_j^2 Y_j^2)^{-1/2}. At a = e_1 the
/// expectation is E 1/Y = sqrt(2 pi) c_q (the density of Y Z at 0).
inline double section_constant(double q, std::size_t n) {
  detail::check_section_q(q);
  return ball_volume(q, n - 1) / (std::sqrt(2.0 * std::numbers::pi) * exp_power_constant(q));
}

inline MixingPool section_pool(double q, std::size_t n, std::size_t n_samples, const RandomStream& stream) {
  detail::check_section_q(q);
  return MixingPool::draw(MixtureFamily::exponential_power(q), n, n_samples, stream);
}

/// (n-1)-volume of B_q^n cap a^perp, q in (0, 2).
inline Estimate section_volume(double q, const HyperplaneSpec& a, std::size_t n_samples, const RandomStream& stream) {
  detail::check_dims(a);
  detail::check_section_q(q);
  if (detail::is_coordinate(a)) return Estimate::exact(ball_volume(q, a.dim() - 1));
  const auto pool = section_pool(q, a.dim(), n_samples, stream);
  auto m = weighted_mean(detail::inverse_radii(pool, a.normal), pool.weights());
  const double c = section_constant(q, a.dim());
  return Estimate{c * m.mean, c * m.std_error, m.n, stream.seed(), stream.stream_id()};
}

/// section(b) - section(a) on common mixing draws.
inline PairedDifference section_volume_difference(double q, const HyperplaneSpec& a, const HyperplaneSpec& b,
                                                  std::size_t n_samples, const RandomStream& stream) {
  if (a.dim() != b.dim()) throw std::invalid_argument("section_volume_difference: dimension mismatch");
  detail::check_dims(a);
  const auto pool = section_pool(q, a.dim(), n_samples, stream);
  return detail::paired_mean_difference(detail::inverse_radii(pool, a.normal), detail::inverse_radii(pool, b.normal),
                                        pool.weights(), section_constant(q, a.dim()));
}

/// One draw of the density proportional to |t|^{(2-q)/(q-1)} e^{-|t|^{q/(q-1)}}:
/// |X| = G^{(q-1)/q} with G ~ Gamma(1/q).
inline double projection_factor_draw(double q, RandomStream& rs) {
  return rs.sign() * std::pow(rs.gamma(1.0 / q), (q - 1.0) / q);
}

/// alpha_{q,n} with |Proj_{a^perp} B_q^n| = alpha E|sum a_j X_j|. At a = e_1,
/// E|X| = Gamma(1)/Gamma(1/q).
inline double projection_constant(double q, std::size_t n) {
  detail::check_projection_q(q);
  return ball_volume(q, n - 1) * std::exp(log_gamma(1.0 / q));
}

inline SampleMatrix projection_factors(double q, std::size_t n, std::size_t n_samples, const RandomStream& stream) {
  detail::check_projection_q(q);
  return generate_samples(
      n, n_samples, stream,
      [q](RandomStream& rs, std::span<double> row) {
        for (double& x : row) x = projection_factor_draw(q, rs);
        return 1.0;
      },
      false);
}

/// (n-1)-volume of the orthogonal projection of B_q^n onto a^perp, q in (2, inf).
inline Estimate projection_volume(double q, const HyperplaneSpec& a, std::size_t n_samples,
                                  const RandomStream& stream) {
  detail::check_dims(a);
  detail::check_projection_q(q);
  if (detail::is_coordinate(a)) return Estimate::exact(ball_volume(q, a.dim() - 1));
  const auto xs = projection_factors(q, a.dim(), n_samples, stream);
  const auto m = weighted_mean(projection_power_values(xs, a.normal, 1.0));
  const double c = projection_constant(q, a.dim());
  return Estimate{c * m.mean, c * m.std_error, m.n, stream.seed(), stream.stream_id()};
}

inline PairedDifference projection_volume_difference(double q, const HyperplaneSpec& a, const HyperplaneSpec& b,
                                                     std::size_t n_samples, const RandomStream& stream) {
  if (a.dim() != b.dim()) throw std::invalid_argument("projection_volume_difference: dimension mismatch");
  detail::check_dims(a);
  const auto xs = projection_factors(q, a.dim(), n_samples, stream);
  return detail::paired_mean_difference(projection_power_values(xs, a.normal, 1.0),
                                        projection_power_values(xs, b.normal, 1.0), {}, projection_constant(q, a.dim()));
}

/// |Proj_{a^perp} [-1, 1]^n| = 2^{n-1} sum |a_i|.
inline double cube_projection_volume(const HyperplaneSpec& a) {
  double s = 0.0;
  for (double x : a.normal.coords()) s += std::abs(x);
  return std::pow(2.0, static_cast<double>(a.dim()) - 1.0) * s;
}

/// Standard Gaussian vectors on a^perp, as Z - <Z, a> a for Z standard in R^n.
inline SampleMatrix hyperplane_gaussian(const HyperplaneSpec& a, std::size_t n_samples, const RandomStream& stream) {
  return generate_samples(
      a.dim(), n_samples, stream,
      [&a](RandomStream& rs, std::span<double> row) {
        double dot = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
          row[j] = rs.normal();
          dot += row[j] * a.normal[j];
        }
        for (std::size_t j = 0; j < row.size(); ++j) row[j] -= dot * a.normal[j];
        return 1.0;
      },
      false);
}

namespace detail {

/// ||x||_q^q for every row.
inline std::vector<double> q_power_norms(const SampleMatrix& xs, double q) {
  std::vector<double> v(xs.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double s = 0.0;
    for (double x : xs.row(i)) s += std::pow(std::abs(x), q);
    v[i] = s;
  }
  return v;
}

/// Common draws for a and b: the same Z projected onto both hyperplanes.
inline std::pair<SampleMatrix, SampleMatrix> paired_hyperplane_gaussians(const HyperplaneSpec& a,
                                                                         const HyperplaneSpec& b, std::size_t n,
                                                                         const RandomStream& stream) {
  if (a.dim() != b.dim()) throw std::invalid_argument("hyperplane comparison: dimension mismatch");
  return {hyperplane_gaussian(a, n, stream), hyperplane_gaussian(b, n, stream)};
}

inline void check_laplace(double q, double lambda) {
  if (!(q > 0.0 && q < 2.0)) throw DomainError("laplace_gaussian_functional: q must lie in (0, 2)");
  if (!(lambda > 0.0)) throw DomainError("laplace_gaussian_functional: lambda must be positive");
}

inline std::vector<double> laplace_values(const SampleMatrix& g, double q, double lambda) {
  auto v = q_power_norms(g, q);
  for (double& x : v) x = std::exp(-lambda * x);
  return v;
}

inline std::vector<double> negative_moment_values(const SampleMatrix& g, double q, double alpha) {
  auto v = q_power_norms(g, q);
  for (double& x : v) x = std::pow(x, -alpha / q);
  return v;
}

inline Estimate mean_estimate(std::span<const double> values, const RandomStream& stream) {
  return to_estimate(weighted_mean(values), stream);
}

}  // namespace detail

/// E exp(-lambda ||G_a||_q^q) for G_a standard Gaussian on a^perp, q in (0, 2).
inline Estimate laplace_gaussian_functional(double q, double lambda, const HyperplaneSpec& a, std::size_t n_samples,
                                            const RandomStream& stream) {
  detail::check_laplace(q, lambda);
  return detail::mean_estimate(detail::laplace_values(hyperplane_gaussian(a, n_samples, stream), q, lambda), stream);
}

inline PairedDifference laplace_gaussian_difference(double q, double lambda, const HyperplaneSpec& a,
                                                    const HyperplaneSpec& b, std::size_t n_samples,
                                                    const RandomStream& stream) {
  detail::check_laplace(q, lambda);
  const auto [ga, gb] = detail::paired_hyperplane_gaussians(a, b, n_samples, stream);
  return detail::paired_mean_difference(detail::laplace_values(ga, q, lambda), detail::laplace_values(gb, q, lambda),
                                        {}, 1.0);
}

/// E ||G_a||_q^{-alpha}; finite when alpha < n - 1.
inline Estimate negative_moment_functional(double q, double alpha, const HyperplaneSpec& a, std::size_t n_samples,
                                           const RandomStream& stream) {
  if (!(q > 0.0)) throw DomainError("negative_moment_functional: q must be positive");
  if (!(alpha > 0.0 && alpha < static_cast<double>(a.dim()) - 1.0))
    throw DomainError("negative_moment_functional: alpha must lie in (0, n - 1)");
  return detail::mean_estimate(detail::negative_moment_values(hyperplane_gaussian(a, n_samples, stream), q, alpha),
                               stream);
}

inline PairedDifference negative_moment_difference(double q, double alpha, const HyperplaneSpec& a,
                                                   const HyperplaneSpec& b, std::size_t n_samples,
                                                   const RandomStream& stream) {
  if (!(q > 0.0)) throw DomainError("negative_moment_difference: q must be positive");
  if (!(alpha > 0.0 && alpha < static_cast<double>(a.dim()) - 1.0))
    throw DomainError("negative_moment_difference: alpha must lie in (0, n - 1)");
  const auto [ga, gb] = detail::paired_hyperplane_gaussians(a, b, n_samples, stream);
  return detail::paired_mean_difference(detail::negative_moment_values(ga, q, alpha),
                                        detail::negative_moment_values(gb, q, alpha), {}, 1.0);
}

/// The exponent q conjugate to q_star: 1/q + 1/q_star = 1.
inline double conjugate_exponent(double q_star) {
  if (!(q_star > 1.0)) throw DomainError("conjugate_exponent: requires q_star > 1");
  if (std::isinf(q_star)) return 1.0;
  return q_star / (q_star - 1.0);
}

namespace detail {

inline std::vector<double> support_values(const SampleMatrix& g, double q) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double n2 = 0.0, nq = 0.0;
    for (double x : g.row(i)) {
      n2 += x * x;
      nq += std::pow(std::abs(x), q);
    }
    v[i] = std::pow(nq, 1.0 / q) / std::sqrt(n2);
  }
  return v;
}

inline void check_width(double q_star) {
  if (!(q_star >= 2.0)) throw DomainError("mean_width_projection: q_star must lie in [2, inf]");
}

}  // namespace detail

/// Mean width of Proj_{a^perp} B_{q*}^n: the average over unit theta in a^perp of the
/// support function ||theta||_q.
inline Estimate mean_width_projection(double q_star, const HyperplaneSpec& a, std::size_t n_samples,
                                      const RandomStream& stream) {
  detail::check_width(q_star);
  detail::check_dims(a);
  const double q = conjugate_exponent(q_star);
  return detail::mean_estimate(detail::support_values(hyperplane_gaussian(a, n_samples, stream), q), stream);
}

inline PairedDifference mean_width_difference(double q_star, const HyperplaneSpec& a, const HyperplaneSpec& b,
                                              std::size_t n_samples, const RandomStream& stream) {
  detail::check_width(q_star);
  detail::check_dims(a);
  const double q = conjugate_exponent(q_star);
  const auto [ga, gb] = detail::paired_hyperplane_gaussians(a, b, n_samples, stream);
  return detail::paired_mean_difference(detail::support_values(ga, q), detail::support_values(gb, q), {}, 1.0);
}

/// Mean width for n = 3 by quadrature over the unit circle of a^perp.
inline double mean_width_projection_circle(double q_star, const HyperplaneSpec& a) {
  detail::check_width(q_star);
  if (a.dim() != 3) throw DomainError("mean_width_projection_circle: requires n = 3");
  const double q = conjugate_exponent(q_star);
  // orthonormal frame (u, w) of a^perp
  std::size_t k = 0;
  for (std::size_t j = 1; j < 3; ++j)
    if (std::abs(a.normal[j]) < std::abs(a.normal[k])) k = j;
  double u[3] = {0, 0, 0};
  u[k] = 1.0;
  const double ua = a.normal[k];
  double nu = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    u[j] -= ua * a.normal[j];
    nu += u[j] * u[j];
  }
  for (double& x : u) x /= std::sqrt(nu);
  const double w[3] = {a.normal[1] * u[2] - a.normal[2] * u[1], a.normal[2] * u[0] - a.normal[0] * u[2],
                       a.normal[0] * u[1] - a.normal[1] * u[0]};
  // the support function has kinks where a coordinate of theta vanishes
  std::vector<double> breaks{0.0, 2.0 * std::numbers::pi};
  for (std::size_t j = 0; j < 3; ++j) {
    if (u[j] == 0.0 && w[j] == 0.0) continue;
    double phi = std::atan2(-u[j], w[j]);
    for (int rep = 0; rep < 3; ++rep, phi += std::numbers::pi)
      if (phi > 0.0 && phi < 2.0 * std::numbers::pi) breaks.push_back(phi);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  const auto h = [&](double phi) {
    const double c = std::cos(phi), s = std::sin(phi);
    double nq = 0.0;
    for (std::size_t j = 0; j < 3; ++j) nq += std::pow(std::abs(c * u[j] + s * w[j]), q);
    return std::pow(nq, 1.0 / q);
  };
  return integrate_pieces(h, breaks) / (2.0 * std::numbers::pi);
}

}  // namespace gmix

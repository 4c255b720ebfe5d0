#pragma once
// Origin-symmetric convex bodies (slab intersections, Euclidean balls and their
// diagonal images), their Gaussian and product-mixture measures, and stable random
// vectors with finitely supported spectral measure.

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "gmix/estimate.hpp"
#include "gmix/mixtures.hpp"
#include "gmix/numerics.hpp"
#include "gmix/random.hpp"

namespace gmix {

/// The symmetric slab |<x, v>| <= c.
struct Slab {
  std::vector<double> v;
  double c = 1.0;
};

class SymmetricConvexBody {
 public:
  struct SlabIntersection {
    std::vector<Slab> slabs;
  };
  struct Ball2 {
    double radius;
  };
  struct DiagonalImage {
    std::shared_ptr<const SymmetricConvexBody> base;
    std::vector<double> d;  // the body is diag(d) * base
  };
  using Variant = std::variant<SlabIntersection, Ball2, DiagonalImage>;

  /// Intersection of slabs in R^dim; no slabs means the whole space.
  static SymmetricConvexBody slabs(std::size_t dim, std::vector<Slab> slabs) {
    if (dim == 0) throw std::invalid_argument("SymmetricConvexBody: dimension must be positive");
    for (const auto& s : slabs) {
      if (s.v.size() != dim) throw std::invalid_argument("SymmetricConvexBody: slab normal has wrong dimension");
      if (!(s.c > 0.0)) throw DomainError("SymmetricConvexBody: slab half-width must be positive");
      double n2 = 0.0;
      for (double x : s.v) n2 += x * x;
      if (!(n2 > 0.0) || !std::isfinite(n2)) throw DomainError("SymmetricConvexBody: zero slab normal");
    }
    return SymmetricConvexBody(dim, SlabIntersection{std::move(slabs)});
  }

  static SymmetricConvexBody whole_space(std::size_t dim) { return slabs(dim, {}); }

  /// |<x, v>| <= c
  static SymmetricConvexBody slab(std::vector<double> v, double c) {
    const std::size_t dim = v.size();
    return slabs(dim, {Slab{std::move(v), c}});
  }

  /// The box prod [-c_i, c_i].
  static SymmetricConvexBody box(std::span<const double> half_widths) {
    std::vector<Slab> s;
    for (std::size_t i = 0; i < half_widths.size(); ++i) {
      std::vector<double> e(half_widths.size(), 0.0);
      e[i] = 1.0;
      s.push_back({std::move(e), half_widths[i]});
    }
    return slabs(half_widths.size(), std::move(s));
  }

  static SymmetricConvexBody cube(std::size_t dim, double c = 1.0) {
    const std::vector<double> w(dim, c);
    return box(w);
  }

  static SymmetricConvexBody ball(std::size_t dim, double radius = 1.0) {
    if (dim == 0) throw std::invalid_argument("SymmetricConvexBody: dimension must be positive");
    if (!(radius > 0.0)) throw DomainError("SymmetricConvexBody: radius must be positive");
    return SymmetricConvexBody(dim, Ball2{radius});
  }

  /// diag(d) K for a positive vector d.
  static SymmetricConvexBody diagonal_image(const SymmetricConvexBody& base, std::vector<double> d) {
    if (d.size() != base.dim()) throw std::invalid_argument("diagonal_image: length mismatch");
    for (double x : d)
      if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("diagonal_image: scales must be positive");
    return SymmetricConvexBody(base.dim(), DiagonalImage{std::make_shared<const SymmetricConvexBody>(base), std::move(d)});
  }

  std::size_t dim() const { return dim_; }
  const Variant& variant() const { return v_; }

  bool contains(std::span<const double> x) const {
    if (x.size() != dim_) throw std::invalid_argument("contains: dimension mismatch");
    if (const auto* s = std::get_if<SlabIntersection>(&v_)) {
      for (const auto& slab : s->slabs) {
        double dot = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) dot += slab.v[j] * x[j];
        if (std::abs(dot) > slab.c) return false;
      }
      return true;
    }
    if (const auto* b = std::get_if<Ball2>(&v_)) {
      double n2 = 0.0;
      for (double xj : x) n2 += xj * xj;
      return n2 <= b->radius * b->radius;
    }
    const auto& di = std::get<DiagonalImage>(v_);
    std::vector<double> y(dim_);
    for (std::size_t j = 0; j < dim_; ++j) y[j] = x[j] / di.d[j];
    return di.base->contains(y);
  }

  /// Equivalent body without DiagonalImage layers when the base is a slab
  /// intersection: diag(d){|<y, v>| <= c} = {|<x, v / d>| <= c}.
  std::optional<std::vector<Slab>> as_slabs() const {
    if (const auto* s = std::get_if<SlabIntersection>(&v_)) return s->slabs;
    if (std::holds_alternative<Ball2>(v_)) return std::nullopt;
    const auto& di = std::get<DiagonalImage>(v_);
    auto inner = di.base->as_slabs();
    if (!inner) return std::nullopt;
    for (auto& slab : *inner)
      for (std::size_t j = 0; j < dim_; ++j) slab.v[j] /= di.d[j];
    return inner;
  }

  /// Radius of the largest centered Euclidean ball inside the body: min c_i / |v_i|
  /// for slabs, r for a ball, r min d for an ellipsoid.
  double inradius() const {
    if (auto s = as_slabs()) {
      double r = kInf;
      for (const auto& slab : *s) {
        double n2 = 0.0;
        for (double x : slab.v) n2 += x * x;
        r = std::min(r, slab.c / std::sqrt(n2));
      }
      return r;
    }
    double scale = 1.0;
    std::vector<double> d(dim_, 1.0);
    const SymmetricConvexBody* body = this;
    while (const auto* di = std::get_if<DiagonalImage>(&body->v_)) {
      for (std::size_t j = 0; j < dim_; ++j) d[j] *= di->d[j];
      body = di->base.get();
    }
    scale = *std::min_element(d.begin(), d.end());
    return scale * std::get<Ball2>(body->v_).radius;
  }

 private:
  SymmetricConvexBody(std::size_t dim, Variant v) : dim_(dim), v_(std::move(v)) {}

  std::size_t dim_;
  Variant v_;
};

/// Certified inclusion K in L for slab bodies: every slab of L is implied by a parallel
/// slab of K. False means "not certified", not "not contained".
inline bool certified_subset(const SymmetricConvexBody& k, const SymmetricConvexBody& l) {
  if (k.dim() != l.dim()) throw std::invalid_argument("certified_subset: dimension mismatch");
  const auto ks = k.as_slabs(), ls = l.as_slabs();
  if (!ks || !ls) return false;
  for (const auto& outer : *ls) {
    bool implied = false;
    for (const auto& inner : *ks) {
      // inner.v = t * outer.v with t != 0 gives |<x, outer.v>| <= inner.c / |t|
      std::size_t pivot = 0;
      while (pivot < outer.v.size() && outer.v[pivot] == 0.0) ++pivot;
      const double t = inner.v[pivot] / outer.v[pivot];
      if (t == 0.0) continue;
      bool parallel = true;
      for (std::size_t j = 0; j < outer.v.size() && parallel; ++j)
        parallel = std::abs(inner.v[j] - t * outer.v[j]) <= 1e-14 * (std::abs(inner.v[j]) + 1e-300);
      if (parallel && inner.c / std::abs(t) <= outer.c) {
        implied = true;
        break;
      }
    }
    if (!implied) return false;
  }
  return true;
}

/// Standard Gaussian draws in R^dim.
inline SampleMatrix gaussian_samples(std::size_t dim, std::size_t n, const RandomStream& stream) {
  return generate_samples(
      dim, n, stream,
      [](RandomStream& rs, std::span<double> row) {
        for (double& x : row) x = rs.normal();
        return 1.0;
      },
      false);
}

/// Self-normalized weighted fraction of the samples lying in K.
inline Estimate fraction_inside(const SymmetricConvexBody& k, const SampleMatrix& xs, const RandomStream& stream) {
  if (xs.dim != k.dim()) throw std::invalid_argument("fraction_inside: dimension mismatch");
  std::vector<double> hits(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) hits[i] = k.contains(xs.row(i)) ? 1.0 : 0.0;
  return to_estimate(weighted_mean(hits, xs.weights), stream);
}

/// gamma_n(K) in closed form when available: the whole space, one slab
/// (erf(c / (|v| sqrt 2))) or a centered ball (regularized gamma P(n/2, r^2/2)).
inline std::optional<double> gaussian_measure_exact(const SymmetricConvexBody& k) {
  if (auto s = k.as_slabs()) {
    if (s->empty()) return 1.0;
    if (s->size() != 1) return std::nullopt;
    double n2 = 0.0;
    for (double x : s->front().v) n2 += x * x;
    return std::erf(s->front().c / std::sqrt(2.0 * n2));
  }
  if (const auto* b = std::get_if<SymmetricConvexBody::Ball2>(&k.variant()))
    return regularized_gamma_lower(0.5 * static_cast<double>(k.dim()), 0.5 * b->radius * b->radius);
  return std::nullopt;
}

/// Standard Gaussian measure of K; exact (zero standard error) when a closed form
/// applies, otherwise the fraction of n standard Gaussian draws inside K.
inline Estimate gaussian_measure(const SymmetricConvexBody& k, std::size_t n, const RandomStream& stream) {
  if (auto exact = gaussian_measure_exact(k)) return Estimate::exact(*exact);
  if (n == 0) throw std::invalid_argument("gaussian_measure: n must be positive");
  return fraction_inside(k, gaussian_samples(k.dim(), n, stream), stream);
}

/// Product of independent one-dimensional Gaussian mixtures.
struct ProductMixtureMeasure {
  std::vector<MixtureFamily> factors;

  static ProductMixtureMeasure iid(const MixtureFamily& f, std::size_t n) {
    return {std::vector<MixtureFamily>(n, f)};
  }
  std::size_t dim() const { return factors.size(); }
};

enum class MeasureMethod {
  direct,  // exact draws of each coordinate
  mixing,  // draws of diag(Y) Z with the mixing-factor weights
};

inline SampleMatrix product_samples(const ProductMixtureMeasure& mu, std::size_t n, const RandomStream& stream,
                                    MeasureMethod method = MeasureMethod::direct) {
  if (method == MeasureMethod::direct) {
    return generate_samples(
        mu.dim(), n, stream,
        [&mu](RandomStream& rs, std::span<double> row) {
          for (std::size_t j = 0; j < row.size(); ++j) row[j] = draw_direct(mu.factors[j], rs);
          return 1.0;
        },
        false);
  }
  const bool weighted =
      !std::all_of(mu.factors.begin(), mu.factors.end(), [](const auto& f) { return f.exact_mixing(); });
  return generate_samples(
      mu.dim(), n, stream,
      [&mu](RandomStream& rs, std::span<double> row) {
        double w = 1.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
          const auto y = draw_mixing(mu.factors[j], rs);
          row[j] = y.value * rs.normal();
          w *= y.weight;
        }
        return w;
      },
      weighted);
}

/// mu(K) by Monte Carlo.
inline Estimate mixture_measure(const ProductMixtureMeasure& mu, const SymmetricConvexBody& k, std::size_t n,
                                const RandomStream& stream, MeasureMethod method = MeasureMethod::direct) {
  if (mu.dim() != k.dim()) throw std::invalid_argument("mixture_measure: dimension mismatch");
  if (n == 0) throw std::invalid_argument("mixture_measure: n must be positive");
  return fraction_inside(k, product_samples(mu, n, stream, method), stream);
}

/// Symmetric p-stable vector with characteristic function
/// exp(-sum_k m_k |<t, u_k>|^p).
struct SpectralStableVector {
  struct Atom {
    std::vector<double> direction;
    double mass;
  };
  double p = 2.0;
  std::vector<Atom> atoms;

  void validate() const {
    if (!(p > 0.0 && p <= 2.0)) throw DomainError("SpectralStableVector: p must lie in (0, 2]");
    if (atoms.empty()) throw std::invalid_argument("SpectralStableVector: no atoms");
    const std::size_t n = atoms.front().direction.size();
    for (const auto& a : atoms) {
      if (a.direction.size() != n || n == 0) throw std::invalid_argument("SpectralStableVector: dimension mismatch");
      if (!(a.mass > 0.0)) throw DomainError("SpectralStableVector: masses must be positive");
      double n2 = 0.0;
      for (double x : a.direction) n2 += x * x;
      if (std::abs(n2 - 1.0) > 1e-9) throw DomainError("SpectralStableVector: directions must be unit vectors");
    }
  }

  std::size_t dim() const { return atoms.empty() ? 0 : atoms.front().direction.size(); }
};

/// Draws sum_k m_k^{1/p} u_k Y_k with Y_k i.i.d. standard symmetric p-stable.
inline SampleMatrix spectral_stable_sample(const SpectralStableVector& x, std::size_t n, const RandomStream& stream) {
  x.validate();
  std::vector<double> scale(x.atoms.size());
  for (std::size_t k = 0; k < scale.size(); ++k) scale[k] = std::pow(x.atoms[k].mass, 1.0 / x.p);
  return generate_samples(
      x.dim(), n, stream,
      [&](RandomStream& rs, std::span<double> row) {
        std::fill(row.begin(), row.end(), 0.0);
        for (std::size_t k = 0; k < scale.size(); ++k) {
          const double y = scale[k] * symmetric_stable_draw(x.p, rs);
          for (std::size_t j = 0; j < row.size(); ++j) row[j] += y * x.atoms[k].direction[j];
        }
        return 1.0;
      },
      false);
}

}  // namespace gmix

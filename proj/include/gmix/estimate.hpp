#pragma once
// Monte Carlo plumbing: the Estimate record, self-normalized weighted means, sample
// matrices and the deterministic chunked driver.
//
// Samples are generated in chunks of kChunkSize draws; chunk c always uses
// stream.child(c). Results therefore depend on (seed, stream_id, n) only, never on the
// number of worker threads.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmix/numerics.hpp"
#include "gmix/random.hpp"

namespace gmix {

inline constexpr std::size_t kChunkSize = std::size_t{1} << 16;

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 1;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  static Estimate exact(double v) { return Estimate{v, 0.0, 1, 0, 0}; }
};

template <class Fn>
void for_each_chunk(std::size_t n, Fn&& fn) {
  const auto chunks = static_cast<std::ptrdiff_t>((n + kChunkSize - 1) / kChunkSize);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    const auto begin = static_cast<std::size_t>(c) * kChunkSize;
    fn(static_cast<std::size_t>(c), begin, std::min(n, begin + kChunkSize));
  }
}

/// Row-major matrix of n samples of dimension dim, with optional importance weights
/// (an empty weight vector means every weight is one).
struct SampleMatrix {
  std::size_t dim = 0;
  std::vector<double> data;
  std::vector<double> weights;

  SampleMatrix() = default;
  SampleMatrix(std::size_t dim_, std::size_t n) : dim(dim_), data(dim_ * n) {}

  std::size_t size() const { return dim == 0 ? 0 : data.size() / dim; }
  bool weighted() const { return !weights.empty(); }
  double weight(std::size_t i) const { return weights.empty() ? 1.0 : weights[i]; }
  std::span<double> row(std::size_t i) { return {data.data() + i * dim, dim}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * dim, dim}; }
};

/// Fills a dim x n matrix; draw(stream, row) writes one sample and returns its weight.
template <class Draw>
SampleMatrix generate_samples(std::size_t dim, std::size_t n, const RandomStream& stream, Draw&& draw,
                              bool weighted) {
  SampleMatrix m(dim, n);
  if (weighted) m.weights.assign(n, 1.0);
  for_each_chunk(n, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    RandomStream rs = stream.child(chunk);
    for (std::size_t i = begin; i < end; ++i) {
      const double w = draw(rs, m.row(i));
      if (weighted) m.weights[i] = w;
    }
  });
  return m;
}

struct WeightedMean {
  double mean = 0.0;
  double std_error = 0.0;
  double effective_size = 0.0;
  std::size_t n = 0;
};

/// Self-normalized mean sum(w f) / sum(w) with the delta-method standard error
/// sqrt(sum w^2 (f - mean)^2) / sum(w). Empty weights mean unit weights.
inline WeightedMean weighted_mean(std::span<const double> values, std::span<const double> weights = {}) {
  const std::size_t n = values.size();
  if (n == 0) throw std::invalid_argument("weighted_mean: no samples");
  if (!weights.empty() && weights.size() != n) throw std::invalid_argument("weighted_mean: size mismatch");
  CompensatedSum sw, swf, sw2;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    sw.add(w);
    swf.add(w * values[i]);
    sw2.add(w * w);
  }
  const double total = sw.value();
  if (!(total > 0.0)) throw std::runtime_error("weighted_mean: weights sum to zero");
  const double mean = swf.value() / total;
  CompensatedSum ss;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    const double d = values[i] - mean;
    ss.add(w * w * d * d);
  }
  WeightedMean out;
  out.mean = mean;
  out.std_error = std::sqrt(ss.value()) / total;
  out.effective_size = total * total / sw2.value();
  out.n = n;
  return out;
}

/// Standard error of sum_m gradient[m] * mean_m, where mean_m is the self-normalized
/// weighted mean of column m and all columns share the weights.
inline double linearized_std_error(std::span<const double> weights,
                                   const std::vector<std::span<const double>>& columns,
                                   std::span<const double> means, std::span<const double> gradient) {
  if (columns.empty()) return 0.0;
  const std::size_t n = columns.front().size();
  CompensatedSum sw, ss;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    double influence = 0.0;
    for (std::size_t m = 0; m < columns.size(); ++m) influence += gradient[m] * (columns[m][i] - means[m]);
    sw.add(w);
    ss.add(w * w * influence * influence);
  }
  return std::sqrt(ss.value()) / sw.value();
}

/// value(second) - value(first) for two estimates computed on common random numbers.
struct PairedDifference {
  double difference = 0.0;
  double std_error = 0.0;
};

/// Turns per-sample values T_i into the norm estimate scale * (E T)^{1/p}, or
/// scale * exp(E T) at p = 0 (where T holds logarithms). Delta-method standard error.
inline WeightedMean norm_from_power_mean(std::span<const double> values, std::span<const double> weights, double p,
                                         double scale) {
  WeightedMean m = weighted_mean(values, weights);
  double norm = 0.0, slope = 0.0;
  if (p == 0.0) {
    norm = scale * std::exp(m.mean);
    slope = norm;
  } else {
    if (!(m.mean > 0.0)) throw std::runtime_error("norm_from_power_mean: nonpositive moment estimate");
    norm = scale * std::pow(m.mean, 1.0 / p);
    slope = norm / (p * m.mean);
  }
  m.std_error = std::abs(slope) * m.std_error;
  m.mean = norm;
  return m;
}

/// Paired comparison of two norms built from the same samples (common weights).
inline PairedDifference compare_power_means(std::span<const double> first, std::span<const double> second,
                                            std::span<const double> weights, double p, double scale) {
  const auto a = norm_from_power_mean(first, weights, p, scale);
  const auto b = norm_from_power_mean(second, weights, p, scale);
  const double ma = weighted_mean(first, weights).mean;
  const double mb = weighted_mean(second, weights).mean;
  const double ga = p == 0.0 ? a.mean : a.mean / (p * ma);
  const double gb = p == 0.0 ? b.mean : b.mean / (p * mb);
  const std::vector<std::span<const double>> cols{first, second};
  const std::vector<double> means{ma, mb};
  const std::vector<double> grad{-ga, gb};
  return {b.mean - a.mean, linearized_std_error(weights, cols, means, grad)};
}

inline Estimate to_estimate(const WeightedMean& m, const RandomStream& stream) {
  return Estimate{m.mean, m.std_error, m.n, stream.seed(), stream.stream_id()};
}

}  // namespace gmix

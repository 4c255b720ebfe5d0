#pragma once
// Verdicts for inequality checks. Every row records one asserted inequality
// lhs >= rhs as a margin (lhs - rhs) with its standard error; the report verdict is
// "holds" when every margin is at least -3 standard errors, "fails" when some margin
// is below -5 standard errors, and "inconclusive" otherwise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gmix/estimate.hpp"

namespace gmix {

enum class Verdict { holds, fails, inconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

inline constexpr double kHoldSigma = 3.0;
inline constexpr double kFailSigma = 5.0;

struct ReportRow {
  std::string label;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;     // lhs - rhs; positive when the inequality holds
  double std_error = 0.0;  // of the margin; 0 for deterministic rows

  /// Margin in standard-error units. Deterministic rows map to +-infinity, with a
  /// relative rounding allowance of 1e-12.
  double sigma_margin() const {
    if (std_error > 0.0) return margin / std_error;
    const double slack = 1e-12 * (std::abs(lhs) + std::abs(rhs) + 1e-300);
    if (margin >= -slack) return margin > slack ? std::numeric_limits<double>::infinity() : 0.0;
    return -std::numeric_limits<double>::infinity();
  }
};

struct VerificationReport {
  std::string claim;
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<ReportRow> rows;
  std::vector<std::pair<std::string, Estimate>> estimates;
  std::vector<std::string> notes;
  Verdict verdict = Verdict::holds;
  double margin = std::numeric_limits<double>::infinity();  // smallest sigma margin
  std::uint64_t seed = 0;
  std::size_t n_samples = 0;
  bool fail_asserted = true;  // false when the claim is open and violations are only inconclusive

  /// Adds the row asserting lhs >= rhs.
  void require_at_least(std::string label, double lhs, double rhs, double std_error) {
    rows.push_back({std::move(label), lhs, rhs, lhs - rhs, std_error});
  }

  /// Adds the row asserting that a paired difference is nonnegative.
  void require_nonnegative(std::string label, const PairedDifference& d) {
    rows.push_back({std::move(label), d.difference, 0.0, d.difference, d.std_error});
  }

  void add_param(std::string key, std::string value) { params.emplace_back(std::move(key), std::move(value)); }
  void add_estimate(std::string name, const Estimate& e) { estimates.emplace_back(std::move(name), e); }

  /// Recomputes verdict and margin from the rows.
  void finalize(double hold_sigma = kHoldSigma, double fail_sigma = kFailSigma) {
    margin = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) margin = std::min(margin, r.sigma_margin());
    if (margin >= -hold_sigma)
      verdict = Verdict::holds;
    else if (margin < -fail_sigma && fail_asserted)
      verdict = Verdict::fails;
    else
      verdict = Verdict::inconclusive;
  }

  /// Appends the rows of another report (same claim family) and refreshes the verdict.
  void merge(const VerificationReport& other) {
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
    estimates.insert(estimates.end(), other.estimates.begin(), other.estimates.end());
    notes.insert(notes.end(), other.notes.begin(), other.notes.end());
    finalize();
  }
};

}  // namespace gmix

#pragma once

#include <span>
#include <string>
#include <vector>

namespace pointing::analysis {

enum class TestMethod { wilcoxon, spearman };

std::string to_string(TestMethod method);

struct StatTestResult {
  double statistic = 0.0;  // Spearman r, or min(W+, W-) for Wilcoxon
  double p_value = 1.0;    // two-sided
  int n = 0;               // pairs used (non-zero differences for Wilcoxon)
  TestMethod method = TestMethod::spearman;
  std::string distribution;  // "exact" | "permutation" | "t" | "normal"
  // Filled in when the result is part of a corrected family.
  bool corrected = false;
  double alpha = 0.0;
  bool rejected = false;
};

/// 1-based ranks, ties receiving the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

/// Spearman rank correlation. p is exact over all permutations for n <= 9,
/// otherwise from the t approximation with n-2 degrees of freedom. Throws
/// Error(degenerate) for a constant input and Error(invalid_argument) for n < 3
/// or unequal lengths.
StatTestResult spearman(std::span<const double> x, std::span<const double> y);

/// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences
/// are dropped; ties share average ranks. Exact null distribution for
/// n <= 12, normal approximation with tie correction otherwise. Throws
/// Error(degenerate) when every difference is zero and Error(invalid_argument)
/// with fewer than 5 non-zero differences.
StatTestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

inline constexpr int kWilcoxonMinPairs = 5;
inline constexpr int kWilcoxonExactMax = 12;

/// Holm step-down: sort ascending, reject while p_(i) <= alpha / (m - i + 1).
/// Returns a flag per input, in input order.
std::vector<bool> holm_bonferroni(std::span<const double> p_values, double alpha = 0.01);
/// Single-step Bonferroni: reject p <= alpha / m.
std::vector<bool> bonferroni(std::span<const double> p_values, double alpha = 0.01);

}  // namespace pointing::analysis

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace elmdetect::stats {

// Per-fold scores of two variants; differences are enhanced - base.
struct PairedSample {
  std::vector<double> base;
  std::vector<double> enhanced;

  std::size_t k() const { return base.size(); }
  std::vector<double> differences() const;
};

struct WilcoxonResult {
  double w_plus = 0.0;
  double w_minus = 0.0;
  double w_statistic = 0.0;  // min(W+, W-)
  std::size_t n_effective = 0;
  double p_value = 1.0;      // two-sided
  double p_one_sided = 1.0;  // alternative: enhanced > base
  double alpha = 0.05;
  bool exact = true;
  bool reject() const { return p_value <= alpha; }
};

// Signed-rank test: zero differences dropped, tied |D| share average ranks.
// p is exact (full sign-assignment distribution) for n_eff <= 25 and a
// tie-corrected normal approximation with continuity correction above.
// Errors: kTooFewPairs, kLengthMismatch, kAllZeroDifferences.
WilcoxonResult wilcoxon_signed_rank(const PairedSample& sample, double alpha = 0.05);

// Null distribution of the positive rank sum: entry s counts the sign
// assignments whose doubled positive sum equals s. Ranks are passed doubled
// so tied half ranks stay integral.
std::vector<double> signed_rank_distribution(std::span<const unsigned> doubled_ranks);

enum class Direction { enhanced_greater, base_greater };

struct TTestResult {
  double t_statistic = 0.0;
  std::size_t degrees_of_freedom = 0;
  double p_one_sided = 1.0;
  Direction direction = Direction::enhanced_greater;
};

// Paired t-test on D = enhanced - base with a one-sided p in `direction`.
// Errors: kTooFewPairs, kLengthMismatch, kZeroVariance.
TTestResult paired_t_test(const PairedSample& sample, Direction direction);

// Student t cumulative distribution function.
double student_t_cdf(double t, double df);
// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);
double normal_cdf(double z);

}  // namespace elmdetect::stats

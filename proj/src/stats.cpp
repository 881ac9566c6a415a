#include "elmdetect/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "elmdetect/error.hpp"

namespace elmdetect::stats {
namespace {

constexpr std::size_t kExactLimit = 25;

void check_pairs(const PairedSample& s) {
  if (s.base.size() != s.enhanced.size()) {
    throw Error(ErrorCode::kLengthMismatch, "paired samples differ in length");
  }
  if (s.base.size() < 2) throw Error(ErrorCode::kTooFewPairs, "need at least two pairs");
}

// Two magnitudes are tied when they agree to ~1e-9 relative, which absorbs
// rounding in differences of fold accuracies.
bool tied(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({1e-300, std::abs(a), std::abs(b)}); }

// Lentz's continued fraction for the incomplete beta function.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

std::vector<double> PairedSample::differences() const {
  std::vector<double> d(base.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = enhanced[i] - base[i];
  return d;
}

std::vector<double> signed_rank_distribution(std::span<const unsigned> doubled_ranks) {
  const unsigned total = std::accumulate(doubled_ranks.begin(), doubled_ranks.end(), 0U);
  // counts[s] = number of subsets of ranks with doubled sum s. Counts stay
  // exact in a double up to 2^53, far above 2^25.
  std::vector<double> counts(total + 1, 0.0);
  counts[0] = 1.0;
  unsigned reach = 0;
  for (const unsigned r : doubled_ranks) {
    for (unsigned s = reach + 1; s-- > 0;) {
      if (counts[s] != 0.0) counts[s + r] += counts[s];
    }
    reach += r;
  }
  return counts;
}

WilcoxonResult wilcoxon_signed_rank(const PairedSample& sample, double alpha) {
  check_pairs(sample);
  std::vector<double> diffs;
  for (const double d : sample.differences()) {
    if (std::abs(d) > 1e-12) diffs.push_back(d);
  }
  if (diffs.empty()) throw Error(ErrorCode::kAllZeroDifferences, "every paired difference is zero");

  const std::size_t n = diffs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(diffs[a]) < std::abs(diffs[b]); });

  // Doubled average ranks keep ties integral.
  std::vector<unsigned> doubled(n);
  double tie_correction = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && tied(std::abs(diffs[order[i]]), std::abs(diffs[order[j]]))) ++j;
    const auto doubled_rank = static_cast<unsigned>(i + 1 + j);  // 2 * mean of ranks i+1..j
    for (std::size_t m = i; m < j; ++m) doubled[order[m]] = doubled_rank;
    const double t = static_cast<double>(j - i);
    tie_correction += t * t * t - t;
    i = j;
  }

  WilcoxonResult res;
  res.alpha = alpha;
  res.n_effective = n;
  unsigned doubled_plus = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (diffs[i] > 0) {
      res.w_plus += doubled[i] / 2.0;
      doubled_plus += doubled[i];
    } else {
      res.w_minus += doubled[i] / 2.0;
    }
  }
  res.w_statistic = std::min(res.w_plus, res.w_minus);
  const double nn = static_cast<double>(n);

  if (n <= kExactLimit) {
    res.exact = true;
    const auto counts = signed_rank_distribution(doubled);
    const double total = std::ldexp(1.0, static_cast<int>(n));
    const auto doubled_w = static_cast<unsigned>(std::llround(2.0 * res.w_statistic));
    double lower = 0.0;
    for (unsigned s = 0; s <= doubled_w && s < counts.size(); ++s) lower += counts[s];
    double upper = 0.0;
    for (unsigned s = doubled_plus; s < counts.size(); ++s) upper += counts[s];
    res.p_value = std::min(1.0, 2.0 * lower / total);
    res.p_one_sided = upper / total;
  } else {
    res.exact = false;
    const double mean = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_correction / 48.0;
    const double sd = std::sqrt(var);
    const double z_two = (res.w_statistic - mean + 0.5) / sd;
    res.p_value = std::min(1.0, 2.0 * normal_cdf(z_two));
    const double z_one = (res.w_plus - mean - 0.5) / sd;
    res.p_one_sided = 1.0 - normal_cdf(z_one);
  }
  return res;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double x = df / (df + t * t);
  const double tail = 0.5 * incomplete_beta(df / 2.0, 0.5, x);
  return t > 0 ? 1.0 - tail : tail;
}

TTestResult paired_t_test(const PairedSample& sample, Direction direction) {
  check_pairs(sample);
  const auto d = sample.differences();
  const double k = static_cast<double>(d.size());
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / k;
  double ss = 0.0;
  for (const double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (k - 1.0));
  if (!(sd > 1e-15 * std::max(1.0, std::abs(mean)))) {
    throw Error(ErrorCode::kZeroVariance, "paired differences have zero variance");
  }
  TTestResult r;
  r.direction = direction;
  r.degrees_of_freedom = d.size() - 1;
  r.t_statistic = mean / (sd / std::sqrt(k));
  const double cdf = student_t_cdf(r.t_statistic, static_cast<double>(r.degrees_of_freedom));
  r.p_one_sided = direction == Direction::enhanced_greater ? 1.0 - cdf : cdf;
  return r;
}

}  // namespace elmdetect::stats

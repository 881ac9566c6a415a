#include <cmath>
#include <vector>

#include "doctest.h"

#include "elmdetect/error.hpp"
#include "elmdetect/rng.hpp"
#include "elmdetect/stats.hpp"
#include "../support/oracles.hpp"

using namespace elmdetect;
using stats::PairedSample;

namespace {

PairedSample from_differences(const std::vector<double>& d) {
  PairedSample s;
  for (double x : d) {
    s.base.push_back(0.5);
    s.enhanced.push_back(0.5 + x);
  }
  return s;
}

PairedSample random_sample(Rng& rng, std::size_t n) {
  PairedSample s;
  for (std::size_t i = 0; i < n; ++i) {
    s.base.push_back(0.75 + static_cast<double>(rng.below(5)) / 64.0);
    s.enhanced.push_back(0.75 + static_cast<double>(rng.below(7)) / 64.0);
  }
  return s;
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("all ten differences positive") {
  const auto r = stats::wilcoxon_signed_rank(from_differences({.01, .02, .03, .04, .05, .06, .07, .08, .09, .10}));
  CHECK(r.w_minus == 0.0);
  CHECK(r.w_statistic == 0.0);
  CHECK(r.w_plus == 55.0);
  CHECK(r.n_effective == 10);
  CHECK(r.exact);
  CHECK(r.p_value == doctest::Approx(0.001953125).epsilon(1e-12));
  CHECK(r.p_one_sided == doctest::Approx(1.0 / 1024.0).epsilon(1e-12));
  CHECK(r.reject());
  CHECK(r.p_value <= 0.05);
  CHECK(r.p_value > 0.0001);
}

TEST_CASE("Wilcoxon errors") {
  CHECK_THROWS_AS(stats::wilcoxon_signed_rank(from_differences({0.0, 0.0, 0.0})), Error);
  CHECK_THROWS_AS(stats::wilcoxon_signed_rank(from_differences({0.1})), Error);
  PairedSample ragged{{0.1, 0.2}, {0.1}};
  CHECK_THROWS_AS(stats::wilcoxon_signed_rank(ragged), Error);
}

TEST_CASE("Wilcoxon agrees with full enumeration, rank-sum identity and symmetry") {
  Rng rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    const auto s = random_sample(rng, 2 + rng.below(13));
    const auto d = s.differences();
    const auto expected = oracle::signed_rank_enumeration(d);
    if (expected.n == 0) {
      CHECK_THROWS_AS(stats::wilcoxon_signed_rank(s), Error);
      continue;
    }
    const auto r = stats::wilcoxon_signed_rank(s);
    CHECK(r.n_effective == expected.n);
    CHECK(r.w_plus == doctest::Approx(expected.w_plus));
    CHECK(r.w_minus == doctest::Approx(expected.w_minus));
    CHECK(r.w_plus + r.w_minus == doctest::Approx(r.n_effective * (r.n_effective + 1) / 2.0));
    CHECK(r.w_statistic == std::min(r.w_plus, r.w_minus));
    CHECK(r.p_value == doctest::Approx(expected.p_two_sided).epsilon(1e-12));
    CHECK(r.p_one_sided == doctest::Approx(expected.p_one_sided).epsilon(1e-12));

    const PairedSample swapped{s.enhanced, s.base};
    const auto m = stats::wilcoxon_signed_rank(swapped);
    CHECK(m.w_plus == doctest::Approx(r.w_minus));
    CHECK(m.w_minus == doctest::Approx(r.w_plus));
    CHECK(m.p_value == doctest::Approx(r.p_value).epsilon(1e-12));

    std::vector<double> scaled;
    for (double x : d) scaled.push_back(x * 37.5);
    CHECK(stats::wilcoxon_signed_rank(from_differences(scaled)).p_value == doctest::Approx(r.p_value).epsilon(1e-12));
  }
}

TEST_CASE("rejections match the critical-value table for n <= 12") {
  for (std::size_t n = 6; n <= 12; ++n) {
    const double total = n * (n + 1) / 2.0;
    for (unsigned mask = 0; mask < (1u << n); mask += 7) {
      std::vector<double> d;
      for (std::size_t i = 0; i < n; ++i) d.push_back((mask >> i & 1 ? -1.0 : 1.0) * static_cast<double>(i + 1));
      const auto r = stats::wilcoxon_signed_rank(from_differences(d));
      CAPTURE(n);
      CAPTURE(mask);
      CHECK(r.w_plus + r.w_minus == total);
      CHECK(r.reject() == (r.w_statistic <= oracle::wilcoxon_critical_value(n)));
    }
  }
}

TEST_CASE("signed-rank distribution counts every assignment") {
  const std::vector<unsigned> doubled = {2, 4, 6};
  const auto dist = stats::signed_rank_distribution(doubled);
  double total = 0;
  for (double c : dist) total += c;
  CHECK(total == 8.0);
  CHECK(dist[0] == 1.0);
  CHECK(dist[12] == 1.0);
  CHECK(dist[6] == 2.0);
}

TEST_CASE("normal approximation above 25 effective pairs") {
  std::vector<double> d;
  for (int i = 1; i <= 30; ++i) d.push_back(i % 3 == 0 ? -i : i);
  const auto r = stats::wilcoxon_signed_rank(from_differences(d));
  CHECK_FALSE(r.exact);
  CHECK(r.p_value > 0.0);
  CHECK(r.p_value < 1.0);
}

TEST_CASE("paired t-test examples") {
  CHECK_THROWS_AS(stats::paired_t_test(from_differences({1, 1, 1, 1}), stats::Direction::enhanced_greater), Error);
  const auto zero = stats::paired_t_test(from_differences({1, -1, 1, -1}), stats::Direction::enhanced_greater);
  CHECK(zero.t_statistic == doctest::Approx(0.0));
  CHECK(zero.p_one_sided == doctest::Approx(0.5));
  CHECK(zero.degrees_of_freedom == 3);

  const auto r = stats::paired_t_test(from_differences({2, 1, 3, 2, 2}), stats::Direction::enhanced_greater);
  const double t = 2.0 / (std::sqrt(0.5) / std::sqrt(5.0));
  CHECK(r.t_statistic == doctest::Approx(t).epsilon(1e-9));
  CHECK(r.degrees_of_freedom == 4);
  CHECK(r.p_one_sided == doctest::Approx(1.0 - oracle::t_cdf_simpson(t, 4)).epsilon(1e-6));
  CHECK_THROWS_AS(stats::paired_t_test(from_differences({1}), stats::Direction::enhanced_greater), Error);
}

TEST_CASE("t-test directions are complementary") {
  Rng rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = random_sample(rng, 3 + rng.below(10));
    try {
      const auto up = stats::paired_t_test(s, stats::Direction::enhanced_greater);
      const auto down = stats::paired_t_test(s, stats::Direction::base_greater);
      if (up.t_statistic != 0.0) CHECK(up.p_one_sided + down.p_one_sided == doctest::Approx(1.0).epsilon(1e-12));
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kZeroVariance);
    }
  }
}

TEST_CASE("t CDF matches numerical integration") {
  for (double df : {1.0, 2.0, 4.0, 9.0, 30.0}) {
    for (double t : {-3.0, -1.0, -0.2, 0.0, 0.5, 1.5, 4.0}) {
      CAPTURE(df);
      CAPTURE(t);
      CHECK(stats::student_t_cdf(t, df) == doctest::Approx(oracle::t_cdf_simpson(t, df)).epsilon(1e-8));
    }
  }
  CHECK(stats::incomplete_beta(2, 3, 0.0) == 0.0);
  CHECK(stats::incomplete_beta(2, 3, 1.0) == 1.0);
  CHECK(stats::incomplete_beta(1, 1, 0.3) == doctest::Approx(0.3));
  CHECK(stats::normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(stats::normal_cdf(1.959963985) == doctest::Approx(0.975).epsilon(1e-8));
}

}  // TEST_SUITE

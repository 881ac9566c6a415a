#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "elmdetect/error.hpp"
#include "elmdetect/evaluator.hpp"
#include "elmdetect/rng.hpp"
#include "../support/oracles.hpp"
#include "../support/synthetic.hpp"

using namespace elmdetect;
using eval::ConfusionMatrix;

namespace {

struct Instance {
  std::vector<double> scores;
  std::vector<int> labels;
};

// Both classes present; scores drawn from a coarse grid so ties happen.
Instance random_instance(Rng& rng) {
  Instance x;
  const std::size_t n = 2 + rng.below(49);
  for (std::size_t i = 0; i < n; ++i) {
    x.scores.push_back(static_cast<double>(rng.below(12)) / 11.0);
    x.labels.push_back(static_cast<int>(rng.below(2)));
  }
  x.labels[0] = 0;
  x.labels[1] = 1;
  return x;
}

double auc_of(const std::vector<double>& s, const std::vector<int>& l) { return eval::auc(eval::roc_curve(s, l)); }

}  // namespace

TEST_SUITE("evaluator") {

TEST_CASE("confusion examples") {
  CHECK(eval::confusion(std::vector<double>{0.9, 0.1}, std::vector<int>{1, 0}) == ConfusionMatrix{1, 1, 0, 0});
  CHECK(eval::confusion(std::vector<double>{0.5}, std::vector<int>{0}).fp == 1);
  CHECK(eval::confusion(std::vector<double>{0, 0, 0}, std::vector<int>{1, 1, 1}).fn == 3);
  CHECK_THROWS_AS(eval::confusion(std::vector<double>{0.1}, std::vector<int>{1, 0}), Error);
  CHECK_THROWS_AS(eval::confusion(std::vector<double>{}, std::vector<int>{}), Error);
}

TEST_CASE("metrics examples and degenerate conventions") {
  const auto m = eval::metrics({50, 40, 10, 0}, 0.75);
  CHECK(m.accuracy == doctest::Approx(0.9));
  CHECK(m.precision == doctest::Approx(50.0 / 60.0));
  CHECK(m.recall == 1.0);
  CHECK(m.f1 == doctest::Approx(0.9090909090909));
  CHECK(m.roc_auc == 0.75);
  const auto none = eval::metrics({0, 5, 0, 5}, 0.5);
  CHECK(none.precision == 0.0);
  CHECK(none.recall == 0.0);
  CHECK(none.f1 == 0.0);
  CHECK_THROWS_AS(eval::metrics({}, 0.5), Error);
}

TEST_CASE("published enhanced F1 differs from the harmonic mean of its precision and recall") {
  const double p = 0.9688, r = 0.9850;
  const double f1 = 2 * p * r / (p + r);
  CHECK(f1 == doctest::Approx(0.9768).epsilon(1e-4));
  CHECK(std::abs(f1 - 0.9741) > 0.002);
}

TEST_CASE("roc_curve examples") {
  const auto perfect = eval::roc_curve(std::vector<double>{0.9, 0.8, 0.2, 0.1}, std::vector<int>{1, 1, 0, 0});
  CHECK(eval::auc(perfect) == 1.0);
  CHECK(std::any_of(perfect.points.begin(), perfect.points.end(),
                    [](const auto& pt) { return pt.fpr == 0.0 && pt.tpr == 1.0; }));
  const auto flat = eval::roc_curve(std::vector<double>{0.4, 0.4, 0.4, 0.4}, std::vector<int>{1, 0, 1, 0});
  REQUIRE(flat.points.size() == 2);
  CHECK(eval::auc(flat) == 0.5);
  CHECK(std::isinf(flat.thresholds.front()));
  CHECK(auc_of({0.8, 0.6, 0.4}, {1, 0, 1}) == 0.5);
  CHECK_THROWS_AS(eval::roc_curve(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), Error);

  eval::RocCurve diagonal;
  diagonal.points = {{0, 0}, {1, 1}};
  CHECK(eval::auc(diagonal) == 0.5);
  eval::RocCurve step;
  step.points = {{0, 0}, {0, 1}, {1, 1}};
  CHECK(eval::auc(step) == 1.0);
}

TEST_CASE("trapezoid AUC equals the Mann-Whitney oracle and the curve is monotone") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = random_instance(rng);
    const auto curve = eval::roc_curve(x.scores, x.labels);
    CHECK(std::abs(eval::auc(curve) - oracle::mann_whitney_auc(x.scores, x.labels)) <= 1e-9);
    CHECK(curve.points.front().fpr == 0.0);
    CHECK(curve.points.front().tpr == 0.0);
    CHECK(curve.points.back().fpr == 1.0);
    CHECK(curve.points.back().tpr == 1.0);
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
      CHECK(curve.points[i].fpr >= curve.points[i - 1].fpr);
      CHECK(curve.points[i].tpr >= curve.points[i - 1].tpr);
    }
  }
}

TEST_CASE("AUC is invariant to monotone transforms and metrics to permutation") {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    auto x = random_instance(rng);
    std::vector<double> squashed;
    for (double s : x.scores) squashed.push_back(1.0 / (1.0 + std::exp(-7.0 * s + 2.0)));
    CHECK(auc_of(x.scores, x.labels) == doctest::Approx(auc_of(squashed, x.labels)).epsilon(1e-12));

    const double auc = auc_of(x.scores, x.labels);
    const auto m = eval::metrics(eval::confusion(x.scores, x.labels), auc);
    std::vector<std::size_t> order(x.scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(std::span<std::size_t>(order));
    Instance y;
    for (auto i : order) {
      y.scores.push_back(x.scores[i]);
      y.labels.push_back(x.labels[i]);
    }
    const auto m2 = eval::metrics(eval::confusion(y.scores, y.labels), auc_of(y.scores, y.labels));
    CHECK(m2.accuracy == m.accuracy);
    CHECK(m2.precision == m.precision);
    CHECK(m2.recall == m.recall);
    CHECK(m2.f1 == m.f1);
    CHECK(m2.roc_auc == doctest::Approx(m.roc_auc).epsilon(1e-12));
  }
}

TEST_CASE("threshold extremes") {
  Rng rng(29);
  const auto x = random_instance(rng);
  CHECK(eval::metrics(eval::confusion(x.scores, x.labels, 0.0), 0.5).recall == 1.0);
  CHECK(eval::metrics(eval::confusion(x.scores, x.labels, 1.01), 0.5).recall == 0.0);
}

TEST_CASE("metric bounds and F1 identity") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = random_instance(rng);
    const auto cm = eval::confusion(x.scores, x.labels);
    CHECK(cm.total() == x.scores.size());
    const auto m = eval::metrics(cm, auc_of(x.scores, x.labels));
    for (std::size_t i = 0; i < eval::kMetricCount; ++i) {
      CHECK(eval::metric_value(m, i) >= 0.0);
      CHECK(eval::metric_value(m, i) <= 1.0);
    }
    if (m.precision + m.recall > 0) {
      CHECK(m.f1 == doctest::Approx(2 * m.precision * m.recall / (m.precision + m.recall)));
    }
  }
}

TEST_CASE("fold results are recomputable from their scores") {
  Rng rng(37);
  std::vector<eval::FoldResult> folds;
  for (std::size_t f = 0; f < 4; ++f) {
    for (auto v : {nn::Variant::base, nn::Variant::enhanced}) {
      const auto x = random_instance(rng);
      std::vector<eval::ScoredDoc> scored;
      for (std::size_t i = 0; i < x.scores.size(); ++i) scored.push_back({"d" + std::to_string(i), x.scores[i], x.labels[i]});
      const auto r = eval::make_fold_result(f, v, scored);
      CHECK(r.confusion == eval::confusion(x.scores, x.labels));
      CHECK(r.metrics == eval::metrics(r.confusion, auc_of(x.scores, x.labels)));
      folds.push_back(r);
    }
  }
  const std::vector<nn::Variant> variants = {nn::Variant::base, nn::Variant::enhanced};
  const auto report = eval::build_report(folds, variants);
  CHECK(report.folds == 4);
  REQUIRE(report.variants.size() == 2);
  const auto* base = report.find(nn::Variant::base);
  const auto* enh = report.find(nn::Variant::enhanced);
  REQUIRE(base);
  REQUIRE(enh);
  double mean = 0;
  for (const auto& m : base->per_fold) mean += m.accuracy;
  CHECK(base->mean.accuracy == doctest::Approx(mean / 4));
  REQUIRE(report.deltas.size() == 1);
  CHECK(report.deltas[0].delta.f1 == doctest::Approx(enh->mean.f1 - base->mean.f1));
  REQUIRE(report.significance.size() == 1);
  CHECK(report.significance[0].accuracies.k() == 4);

  std::vector<eval::FoldResult> rebuilt;
  for (const auto& f : folds) rebuilt.push_back(eval::make_fold_result(f.fold, f.variant, f.scores));
  const auto again = eval::build_report(rebuilt, variants);
  CHECK(again.variants[0].mean == report.variants[0].mean);
  CHECK(again.variants[1].pooled_confusion == report.variants[1].pooled_confusion);
}

TEST_CASE("cross_validate orders results and audits leakage") {
  const auto lex = features::LexiconSet::bundled();
  const auto set = synthetic::planted_token_corpus(40, 12);
  const auto samples = train::prepare_samples(set, lex);
  const auto plan = corpus::stratified_folds(set, 2, 3);
  std::vector<train::TrainConfig> configs(2);
  configs[0].variant = nn::Variant::base;
  configs[1].variant = nn::Variant::features_only;
  for (auto& c : configs) {
    c.epochs = 2;
    c.embed_dim = 6;
    c.filters = 4;
    c.hidden = 5;
  }
  eval::CrossValidationOptions serial, parallel;
  parallel.jobs = 2;
  const auto a = eval::cross_validate(samples, plan, configs, serial);
  const auto b = eval::cross_validate(samples, plan, configs, parallel);
  REQUIRE(a.folds.size() == 4);
  CHECK(a.folds[0].fold == 0);
  CHECK(a.folds[1].variant == nn::Variant::features_only);
  CHECK(a.folds[3].fold == 1);
  for (std::size_t i = 0; i < a.folds.size(); ++i) {
    CHECK(a.folds[i].metrics == b.folds[i].metrics);
    CHECK(a.folds[i].scores.size() == plan.test_indices(a.folds[i].fold).size());
  }
}

}  // TEST_SUITE

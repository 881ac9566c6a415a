#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "elmdetect/corpus.hpp"
#include "elmdetect/model.hpp"
#include "elmdetect/stats.hpp"
#include "elmdetect/trainer.hpp"

namespace elmdetect::eval {

using nn::Variant;

// Positive class is fake (label 1).
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + tn + fp + fn; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& o);
  bool operator==(const ConfusionMatrix&) const = default;
};

struct MetricSet {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double roc_auc = 0.0;

  bool operator==(const MetricSet&) const = default;
};

inline constexpr std::size_t kMetricCount = 5;
inline constexpr const char* kMetricNames[kMetricCount] = {"accuracy", "precision", "recall", "f1",
                                                           "roc_auc"};
double metric_value(const MetricSet& m, std::size_t index);

// Predicts fake iff score >= threshold. Errors: kLengthMismatch, kEmptyInput.
ConfusionMatrix confusion(std::span<const double> scores, std::span<const int> labels,
                          double threshold = 0.5);

// Undefined ratios (no predicted or no actual positives) are 0.
// Errors: kEmptyMatrix.
MetricSet metrics(const ConfusionMatrix& cm, double auc);

struct RocCurve {
  struct Point {
    double fpr = 0.0;
    double tpr = 0.0;
  };
  std::vector<Point> points;       // from (0,0) to (1,1), nondecreasing
  std::vector<double> thresholds;  // score cut per point; +inf for (0,0)
};

// One point per distinct score, highest first. Errors: kSingleClassLabels.
RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels);
// Trapezoidal area under the curve.
double auc(const RocCurve& curve);

struct ScoredDoc {
  std::string id;
  double score = 0.0;
  int label = 0;
};

struct FoldResult {
  std::size_t fold = 0;
  Variant variant = Variant::base;
  std::vector<ScoredDoc> scores;
  ConfusionMatrix confusion;
  MetricSet metrics;
  std::vector<train::EpochRecord> history;
};

// Builds the confusion matrix and metric set from per-document scores.
FoldResult make_fold_result(std::size_t fold, Variant variant, std::vector<ScoredDoc> scores);

struct VariantSummary {
  Variant variant = Variant::base;
  MetricSet mean;
  std::vector<MetricSet> per_fold;
  ConfusionMatrix pooled_confusion;
};

struct MetricDelta {
  Variant variant = Variant::base;
  Variant reference = Variant::base;
  MetricSet delta;  // variant - reference, per metric
};

struct Significance {
  Variant variant = Variant::enhanced;
  Variant reference = Variant::base;
  stats::PairedSample accuracies;  // base = reference, enhanced = variant
  std::optional<stats::WilcoxonResult> wilcoxon;
  std::string wilcoxon_error;
  std::optional<stats::TTestResult> t_greater;  // H1: variant > reference
  std::optional<stats::TTestResult> t_less;     // H1: reference > variant
  std::string t_error;
};

struct ComparisonReport {
  std::size_t folds = 0;
  std::vector<VariantSummary> variants;
  std::vector<MetricDelta> deltas;
  std::vector<Significance> significance;

  const VariantSummary* find(Variant v) const;
};

// Aggregates fold results: means per variant, deltas and paired tests of
// every variant against base (or the first variant when base is absent).
ComparisonReport build_report(std::span<const FoldResult> folds, std::span<const Variant> variants);

struct CrossValidationOptions {
  std::size_t jobs = 1;
  std::function<void(std::size_t fold, Variant variant, const train::EpochRecord&)> on_epoch;
};

struct CrossValidationResult {
  std::vector<FoldResult> folds;  // ordered by (fold, variant position)
  ComparisonReport report;
};

// Trains every config on each fold's training side and scores its test fold.
// The vocabulary / scaler / bigram fit set of every model is audited against
// the test fold (kLeakage). A failing fold aborts the run; the error names
// the fold.
CrossValidationResult cross_validate(std::span<const train::Sample> samples, const corpus::FoldPlan& plan,
                                     std::span<const train::TrainConfig> configs,
                                     const CrossValidationOptions& options = {});

}  // namespace elmdetect::eval

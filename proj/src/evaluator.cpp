#include "elmdetect/evaluator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>
#include <unordered_set>

#include "elmdetect/error.hpp"
#include "elmdetect/rng.hpp"

namespace elmdetect::eval {

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  tp += o.tp;
  tn += o.tn;
  fp += o.fp;
  fn += o.fn;
  return *this;
}

double metric_value(const MetricSet& m, std::size_t index) {
  switch (index) {
    case 0: return m.accuracy;
    case 1: return m.precision;
    case 2: return m.recall;
    case 3: return m.f1;
    default: return m.roc_auc;
  }
}

ConfusionMatrix confusion(std::span<const double> scores, std::span<const int> labels, double threshold) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(scores.size()) + " scores vs " +
                                                std::to_string(labels.size()) + " labels");
  }
  if (scores.empty()) throw Error(ErrorCode::kEmptyInput, "no scores to evaluate");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted_fake = scores[i] >= threshold;
    const bool fake = labels[i] == 1;
    if (predicted_fake && fake) {
      ++cm.tp;
    } else if (predicted_fake) {
      ++cm.fp;
    } else if (fake) {
      ++cm.fn;
    } else {
      ++cm.tn;
    }
  }
  return cm;
}

MetricSet metrics(const ConfusionMatrix& cm, double auc_value) {
  if (cm.total() == 0) throw Error(ErrorCode::kEmptyMatrix, "confusion matrix is empty");
  const auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  MetricSet m;
  m.accuracy = ratio(cm.tp + cm.tn, cm.total());
  m.precision = ratio(cm.tp, cm.tp + cm.fp);
  m.recall = ratio(cm.tp, cm.tp + cm.fn);
  m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  m.roc_auc = auc_value;
  return m;
}

RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw Error(ErrorCode::kLengthMismatch, "scores vs labels");
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw Error(ErrorCode::kSingleClassLabels, "ROC needs both classes");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  curve.thresholds.push_back(std::numeric_limits<double>::infinity());
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    // Tied scores move together.
    while (i < order.size() && scores[order[i]] == s) {
      if (labels[order[i]] == 1) {
        ++tp;
      } else {
        ++fp;
      }
      ++i;
    }
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                            static_cast<double>(tp) / static_cast<double>(positives)});
    curve.thresholds.push_back(s);
  }
  return curve;
}

double auc(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  return area;
}

FoldResult make_fold_result(std::size_t fold, Variant variant, std::vector<ScoredDoc> scores) {
  FoldResult r;
  r.fold = fold;
  r.variant = variant;
  std::vector<double> s;
  std::vector<int> l;
  for (const auto& d : scores) {
    s.push_back(d.score);
    l.push_back(d.label);
  }
  r.confusion = confusion(s, l, 0.5);
  r.metrics = metrics(r.confusion, auc(roc_curve(s, l)));
  r.scores = std::move(scores);
  return r;
}

const VariantSummary* ComparisonReport::find(Variant v) const {
  for (const auto& s : variants) {
    if (s.variant == v) return &s;
  }
  return nullptr;
}

ComparisonReport build_report(std::span<const FoldResult> folds, std::span<const Variant> variants) {
  ComparisonReport report;
  std::size_t max_fold = 0;
  for (const auto& f : folds) max_fold = std::max(max_fold, f.fold + 1);
  report.folds = max_fold;

  for (const auto v : variants) {
    VariantSummary summary;
    summary.variant = v;
    summary.per_fold.resize(max_fold);
    std::vector<char> seen(max_fold, 0);
    for (const auto& f : folds) {
      if (f.variant != v) continue;
      summary.per_fold[f.fold] = f.metrics;
      summary.pooled_confusion += f.confusion;
      seen[f.fold] = 1;
    }
    if (std::count(seen.begin(), seen.end(), 1) != static_cast<std::ptrdiff_t>(max_fold)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "variant " + std::string(nn::to_string(v)) + " is missing fold results");
    }
    double sums[kMetricCount] = {};
    for (const auto& m : summary.per_fold) {
      for (std::size_t i = 0; i < kMetricCount; ++i) sums[i] += metric_value(m, i);
    }
    const double k = static_cast<double>(max_fold);
    summary.mean = {sums[0] / k, sums[1] / k, sums[2] / k, sums[3] / k, sums[4] / k};
    report.variants.push_back(std::move(summary));
  }
  if (report.variants.empty()) return report;

  const VariantSummary* reference = report.find(Variant::base);
  if (!reference) reference = &report.variants.front();
  for (const auto& s : report.variants) {
    if (s.variant == reference->variant) continue;
    const auto& a = s.mean;
    const auto& b = reference->mean;
    report.deltas.push_back({s.variant, reference->variant,
                             {a.accuracy - b.accuracy, a.precision - b.precision, a.recall - b.recall,
                              a.f1 - b.f1, a.roc_auc - b.roc_auc}});

    Significance sig;
    sig.variant = s.variant;
    sig.reference = reference->variant;
    for (std::size_t f = 0; f < report.folds; ++f) {
      sig.accuracies.base.push_back(reference->per_fold[f].accuracy);
      sig.accuracies.enhanced.push_back(s.per_fold[f].accuracy);
    }
    try {
      sig.wilcoxon = stats::wilcoxon_signed_rank(sig.accuracies);
    } catch (const Error& e) {
      sig.wilcoxon_error = e.what();
    }
    try {
      sig.t_greater = stats::paired_t_test(sig.accuracies, stats::Direction::enhanced_greater);
      sig.t_less = stats::paired_t_test(sig.accuracies, stats::Direction::base_greater);
    } catch (const Error& e) {
      sig.t_error = e.what();
    }
    report.significance.push_back(std::move(sig));
  }
  return report;
}

CrossValidationResult cross_validate(std::span<const train::Sample> samples, const corpus::FoldPlan& plan,
                                     std::span<const train::TrainConfig> configs,
                                     const CrossValidationOptions& options) {
  if (plan.assignments.size() != samples.size()) {
    throw Error(ErrorCode::kInvalidArgument, "fold plan covers " + std::to_string(plan.assignments.size()) +
                                                 " documents, corpus has " + std::to_string(samples.size()));
  }
  if (configs.empty()) throw Error(ErrorCode::kInvalidArgument, "no variants requested");

  const std::size_t tasks = plan.k * configs.size();
  std::vector<FoldResult> results(tasks);
  std::vector<std::exception_ptr> failures(tasks);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex callback_mutex;

  auto run_task = [&](std::size_t task) {
    const std::size_t fold = task / configs.size();
    train::TrainConfig config = configs[task % configs.size()];
    config.seed = splitmix64(config.seed ^ splitmix64(fold + 1));

    std::vector<train::Sample> train_rows;
    std::vector<const train::Sample*> test_rows;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (plan.assignments[i] == fold) {
        test_rows.push_back(&samples[i]);
      } else {
        train_rows.push_back(samples[i]);
      }
    }
    train::EpochCallback cb;
    if (options.on_epoch) {
      cb = [&, fold, v = config.variant](const train::EpochRecord& r) {
        std::lock_guard lock(callback_mutex);
        options.on_epoch(fold, v, r);
      };
    }
    const auto model = train::train(train_rows, config, cb);

    std::unordered_set<std::string> test_ids;
    for (const auto* s : test_rows) test_ids.insert(s->id);
    for (const auto& id : model.fit_ids) {
      if (test_ids.contains(id)) {
        throw Error(ErrorCode::kLeakage, "document " + id + " of the test fold was used to fit the model");
      }
    }
    for (const auto& id : model.validation_ids) {
      if (test_ids.contains(id)) throw Error(ErrorCode::kLeakage, "test document " + id + " used for validation");
    }

    std::vector<ScoredDoc> scored;
    scored.reserve(test_rows.size());
    for (const auto* s : test_rows) scored.push_back({s->id, train::predict(model, *s), s->label});
    results[task] = make_fold_result(fold, config.variant, std::move(scored));
    results[task].history = model.history;
  };

  auto worker = [&] {
    for (std::size_t task = next++; task < tasks && !failed; task = next++) {
      try {
        run_task(task);
      } catch (...) {
        failures[task] = std::current_exception();
        failed = true;
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(options.jobs, 1, tasks);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  for (std::size_t task = 0; task < tasks; ++task) {
    if (!failures[task]) continue;
    const std::string where = "fold " + std::to_string(task / configs.size()) + " (" +
                              std::string(nn::to_string(configs[task % configs.size()].variant)) + ")";
    try {
      std::rethrow_exception(failures[task]);
    } catch (const Error& e) {
      throw Error(e.code(), where + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kInvalidArgument, where + ": " + e.what());
    }
  }

  std::vector<Variant> variants;
  for (const auto& c : configs) variants.push_back(c.variant);
  CrossValidationResult out;
  out.report = build_report(results, variants);
  out.folds = std::move(results);
  return out;
}

}  // namespace elmdetect::eval

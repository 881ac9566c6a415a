#include "elmdetect/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "elmdetect/csv.hpp"
#include "elmdetect/error.hpp"

namespace elmdetect::report {
namespace {

using nlohmann::json;

std::string strip_comments(std::string_view text) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = text.substr(pos, nl - pos);
    if (line.empty() || line.front() != '#') {
      out.append(line);
      out.push_back('\n');
    }
    pos = nl + 1;
  }
  return out;
}

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kFormat, "not a number: '" + s + "'");
  }
  return v;
}

std::size_t column(const csv::Table& t, std::string_view name) {
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (t.header[i] == name) return i;
  }
  throw Error(ErrorCode::kFormat, "missing column '" + std::string(name) + "'");
}

json confusion_json(const eval::ConfusionMatrix& cm) {
  return {{"tp", cm.tp}, {"tn", cm.tn}, {"fp", cm.fp}, {"fn", cm.fn}};
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
  return buf;
}

std::string signed_percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.2f%%", 100.0 * v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::string header_comment(const RunHeader& header) {
  return "# config_hash=" + header.config_hash + " seed=" + std::to_string(header.seed);
}

std::optional<RunHeader> parse_header_comment(std::string_view line) {
  constexpr std::string_view kHash = "# config_hash=";
  if (line.substr(0, kHash.size()) != kHash) return std::nullopt;
  line.remove_prefix(kHash.size());
  const auto space = line.find(" seed=");
  if (space == std::string_view::npos) return std::nullopt;
  RunHeader h;
  h.config_hash = std::string(line.substr(0, space));
  auto seed = line.substr(space + 6);
  while (!seed.empty() && (seed.back() == '\r' || seed.back() == '\n')) seed.remove_suffix(1);
  const auto [ptr, ec] = std::from_chars(seed.data(), seed.data() + seed.size(), h.seed);
  if (ec != std::errc{} || ptr != seed.data() + seed.size()) return std::nullopt;
  return h;
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

json metrics_json(const eval::MetricSet& m) {
  return {{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall},
          {"f1", m.f1},             {"roc_auc", m.roc_auc}};
}

json significance_json(const eval::Significance& s) {
  json j = {{"variant", nn::to_string(s.variant)},
            {"reference", nn::to_string(s.reference)},
            {"accuracies_reference", s.accuracies.base},
            {"accuracies_variant", s.accuracies.enhanced}};
  if (s.wilcoxon) {
    j["w_plus"] = s.wilcoxon->w_plus;
    j["w_minus"] = s.wilcoxon->w_minus;
    j["w"] = s.wilcoxon->w_statistic;
    j["n_eff"] = s.wilcoxon->n_effective;
    j["p_exact_two_sided"] = s.wilcoxon->p_value;
    j["p_one_sided"] = s.wilcoxon->p_one_sided;
    j["exact"] = s.wilcoxon->exact;
    j["alpha"] = s.wilcoxon->alpha;
    j["reject"] = s.wilcoxon->reject();
  } else {
    j["wilcoxon_error"] = s.wilcoxon_error;
  }
  if (s.t_greater && s.t_less) {
    j["t"] = s.t_greater->t_statistic;
    j["df"] = s.t_greater->degrees_of_freedom;
    j["p_t_one_sided"] = s.t_greater->p_one_sided;
    j["p_t_one_sided_reverse"] = s.t_less->p_one_sided;
  } else {
    j["t_error"] = s.t_error;
  }
  return j;
}

std::optional<eval::MetricSet> published_reference(nn::Variant v) {
  switch (v) {
    case nn::Variant::base: return eval::MetricSet{0.9490, 0.9367, 0.9633, 0.9497, 0.9843};
    case nn::Variant::features_only: return eval::MetricSet{0.9005, 0.9081, 0.8913, 0.8996, 0.9662};
    case nn::Variant::enhanced: return eval::MetricSet{0.9737, 0.9688, 0.9850, 0.9741, 0.9950};
    case nn::Variant::combined: return eval::MetricSet{0.9937, 0.9888, 0.9980, 0.9941, 0.9980};
  }
  return std::nullopt;
}

json report_to_json(const eval::ComparisonReport& report, const RunHeader& header, const json& config) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["generated_at"] = header.generated_at;
  j["config_hash"] = header.config_hash;
  j["seed"] = header.seed;
  j["folds"] = report.folds;
  j["config"] = config;

  json variants = json::array();
  for (const auto& v : report.variants) {
    json per_fold = json::array();
    json accuracies = json::array();
    for (const auto& m : v.per_fold) {
      per_fold.push_back(metrics_json(m));
      accuracies.push_back(m.accuracy);
    }
    json entry = {{"variant", nn::to_string(v.variant)},
                  {"mean", metrics_json(v.mean)},
                  {"per_fold", per_fold},
                  {"fold_accuracies", accuracies},
                  {"pooled_confusion", confusion_json(v.pooled_confusion)}};
    if (const auto ref = published_reference(v.variant)) entry["published_reference"] = metrics_json(*ref);
    variants.push_back(std::move(entry));
  }
  j["variants"] = std::move(variants);

  json deltas = json::array();
  for (const auto& d : report.deltas) {
    json entry = metrics_json(d.delta);
    entry["variant"] = nn::to_string(d.variant);
    entry["reference"] = nn::to_string(d.reference);
    deltas.push_back(std::move(entry));
  }
  j["deltas"] = std::move(deltas);

  json pairs = json::array();
  const eval::Significance* primary = nullptr;
  for (const auto& s : report.significance) {
    pairs.push_back(significance_json(s));
    if (s.variant == nn::Variant::enhanced) primary = &s;
  }
  if (!primary && !report.significance.empty()) primary = &report.significance.back();
  j["significance"] = primary ? significance_json(*primary) : json(nullptr);
  j["significance_pairs"] = std::move(pairs);
  return j;
}

std::string folds_csv(std::span<const eval::FoldResult> folds, const RunHeader& header) {
  std::string out = header_comment(header) + "\nfold,variant,acc,prec,rec,f1,auc\n";
  for (const auto& f : folds) {
    out += std::to_string(f.fold) + "," + std::string(nn::to_string(f.variant));
    for (std::size_t i = 0; i < eval::kMetricCount; ++i) out += "," + format_double(eval::metric_value(f.metrics, i));
    out += "\n";
  }
  return out;
}

std::string scores_csv(const eval::FoldResult& fold, const RunHeader& header) {
  std::string out = header_comment(header) + "\ndoc_id,score,label\n";
  for (const auto& d : fold.scores) {
    out += csv::escape_field(d.id) + "," + format_double(d.score) + "," + std::to_string(d.label) + "\n";
  }
  return out;
}

std::string confusion_csv(std::span<const eval::FoldResult> folds, nn::Variant variant, const RunHeader& header) {
  std::string out = header_comment(header) + "\nfold,tp,tn,fp,fn\n";
  eval::ConfusionMatrix total;
  for (const auto& f : folds) {
    if (f.variant != variant) continue;
    const auto& c = f.confusion;
    out += std::to_string(f.fold) + "," + std::to_string(c.tp) + "," + std::to_string(c.tn) + "," +
           std::to_string(c.fp) + "," + std::to_string(c.fn) + "\n";
    total += c;
  }
  out += "all," + std::to_string(total.tp) + "," + std::to_string(total.tn) + "," + std::to_string(total.fp) +
         "," + std::to_string(total.fn) + "\n";
  return out;
}

std::string roc_csv(const eval::RocCurve& curve, const RunHeader& header) {
  std::string out = header_comment(header) + "\nfpr,tpr,threshold\n";
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    out += format_double(curve.points[i].fpr) + "," + format_double(curve.points[i].tpr) + "," +
           format_double(curve.thresholds[i]) + "\n";
  }
  return out;
}

eval::RocCurve pooled_roc(std::span<const eval::FoldResult> folds, nn::Variant variant) {
  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& f : folds) {
    if (f.variant != variant) continue;
    for (const auto& d : f.scores) {
      scores.push_back(d.score);
      labels.push_back(d.label);
    }
  }
  return eval::roc_curve(scores, labels);
}

std::vector<FoldRow> parse_folds_csv(std::string_view text) {
  const auto table = csv::parse(strip_comments(text));
  const std::size_t c_fold = column(table, "fold");
  const std::size_t c_variant = column(table, "variant");
  const std::size_t cols[eval::kMetricCount] = {column(table, "acc"), column(table, "prec"), column(table, "rec"),
                                                column(table, "f1"), column(table, "auc")};
  std::vector<FoldRow> rows;
  for (const auto& r : table.rows) {
    FoldRow row;
    row.fold = static_cast<std::size_t>(parse_double(r[c_fold]));
    row.variant = nn::parse_variant(r[c_variant]);
    row.metrics = {parse_double(r[cols[0]]), parse_double(r[cols[1]]), parse_double(r[cols[2]]),
                   parse_double(r[cols[3]]), parse_double(r[cols[4]])};
    rows.push_back(row);
  }
  return rows;
}

std::vector<eval::ScoredDoc> parse_scores_csv(std::string_view text) {
  const auto table = csv::parse(strip_comments(text));
  const std::size_t c_id = column(table, "doc_id");
  const std::size_t c_score = column(table, "score");
  const std::size_t c_label = column(table, "label");
  std::vector<eval::ScoredDoc> out;
  for (const auto& r : table.rows) {
    out.push_back({r[c_id], parse_double(r[c_score]), static_cast<int>(parse_double(r[c_label]))});
  }
  return out;
}

eval::RocCurve parse_roc_csv(std::string_view text) {
  const auto table = csv::parse(strip_comments(text));
  const std::size_t c_fpr = column(table, "fpr");
  const std::size_t c_tpr = column(table, "tpr");
  const std::size_t c_thr = column(table, "threshold");
  eval::RocCurve curve;
  for (const auto& r : table.rows) {
    curve.points.push_back({parse_double(r[c_fpr]), parse_double(r[c_tpr])});
    curve.thresholds.push_back(parse_double(r[c_thr]));
  }
  return curve;
}

std::string format_comparison_table(const eval::ComparisonReport& report) {
  constexpr const char* kLabels[eval::kMetricCount] = {"Acc", "Prec", "Rec", "F1", "ROC"};
  const eval::MetricDelta* improvement = nullptr;
  for (const auto& d : report.deltas) {
    if (d.variant == nn::Variant::enhanced) improvement = &d;
  }
  if (!improvement && !report.deltas.empty()) improvement = &report.deltas.back();

  std::ostringstream out;
  constexpr std::size_t kWidth = 16;
  out << pad("Metric", 8);
  for (const auto& v : report.variants) out << pad(std::string(nn::to_string(v.variant)), kWidth);
  if (improvement) out << "Improvement (" << nn::to_string(improvement->variant) << " - "
                       << nn::to_string(improvement->reference) << ")";
  out << "\n";
  for (std::size_t i = 0; i < eval::kMetricCount; ++i) {
    out << pad(kLabels[i], 8);
    for (const auto& v : report.variants) out << pad(percent(eval::metric_value(v.mean, i)), kWidth);
    if (improvement) out << signed_percent(eval::metric_value(improvement->delta, i));
    out << "\n";
  }

  out << "\nRun vs published reference (run / published)\n" << pad("Metric", 8);
  for (const auto& v : report.variants) out << pad(std::string(nn::to_string(v.variant)), 20);
  out << "\n";
  for (std::size_t i = 0; i < eval::kMetricCount; ++i) {
    out << pad(kLabels[i], 8);
    for (const auto& v : report.variants) {
      const auto ref = published_reference(v.variant);
      const std::string cell = percent(eval::metric_value(v.mean, i)) + " / " +
                               (ref ? percent(eval::metric_value(*ref, i)) : std::string("-"));
      out << pad(cell, 20);
    }
    out << "\n";
  }

  for (const auto& s : report.significance) {
    out << "\n" << nn::to_string(s.variant) << " vs " << nn::to_string(s.reference) << ": ";
    if (s.wilcoxon) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "Wilcoxon W=%g (W+=%g, W-=%g, n=%zu) p=%.6g two-sided, %.6g one-sided",
                    s.wilcoxon->w_statistic, s.wilcoxon->w_plus, s.wilcoxon->w_minus, s.wilcoxon->n_effective,
                    s.wilcoxon->p_value, s.wilcoxon->p_one_sided);
      out << buf;
    } else {
      out << s.wilcoxon_error;
    }
    if (s.t_greater && s.t_less) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "; paired t=%.4f df=%zu p(%s>%s)=%.4f p(%s>%s)=%.4f", s.t_greater->t_statistic,
                    s.t_greater->degrees_of_freedom, std::string(nn::to_string(s.variant)).c_str(),
                    std::string(nn::to_string(s.reference)).c_str(), s.t_greater->p_one_sided,
                    std::string(nn::to_string(s.reference)).c_str(), std::string(nn::to_string(s.variant)).c_str(),
                    s.t_less->p_one_sided);
      out << buf;
    } else {
      out << "; " << s.t_error;
    }
    out << "\n";
  }

  std::string text;
  std::istringstream lines(out.str());
  for (std::string line; std::getline(lines, line);) {
    line.erase(line.find_last_not_of(' ') + 1);
    text += line + "\n";
  }
  return text;
}

}  // namespace elmdetect::report

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "elmdetect/evaluator.hpp"

namespace elmdetect::report {

inline constexpr int kSchemaVersion = 1;

// Identifies the run an output file belongs to.
struct RunHeader {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string generated_at;  // excluded from all hashed / compared content
};

// First line of every CSV we write: "# config_hash=<hex> seed=<n>".
std::string header_comment(const RunHeader& header);
// Parses header_comment output; nullopt when the line is not one.
std::optional<RunHeader> parse_header_comment(std::string_view line);

// Shortest representation that parses back to the same double.
std::string format_double(double v);

nlohmann::json metrics_json(const eval::MetricSet& m);
nlohmann::json significance_json(const eval::Significance& s);
nlohmann::json report_to_json(const eval::ComparisonReport& report, const RunHeader& header,
                              const nlohmann::json& config);

// Scores each variant published for its reference experiment, as fractions.
std::optional<eval::MetricSet> published_reference(nn::Variant v);

std::string folds_csv(std::span<const eval::FoldResult> folds, const RunHeader& header);
std::string scores_csv(const eval::FoldResult& fold, const RunHeader& header);
std::string confusion_csv(std::span<const eval::FoldResult> folds, nn::Variant variant,
                          const RunHeader& header);
std::string roc_csv(const eval::RocCurve& curve, const RunHeader& header);

// Pooled out-of-fold ROC for one variant.
eval::RocCurve pooled_roc(std::span<const eval::FoldResult> folds, nn::Variant variant);

struct FoldRow {
  std::size_t fold = 0;
  nn::Variant variant = nn::Variant::base;
  eval::MetricSet metrics;
};

// Readers for our own CSV outputs; "#" lines are skipped. Throw kFormat.
std::vector<FoldRow> parse_folds_csv(std::string_view text);
std::vector<eval::ScoredDoc> parse_scores_csv(std::string_view text);
eval::RocCurve parse_roc_csv(std::string_view text);

// Metric rows by variant columns with an Improvement column (enhanced - base,
// falling back to the last variant - base), followed by run vs published
// values for each variant.
std::string format_comparison_table(const eval::ComparisonReport& report);

}  // namespace elmdetect::report

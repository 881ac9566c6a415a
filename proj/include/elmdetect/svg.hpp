#pragma once

#include <span>
#include <string>
#include <vector>

#include "elmdetect/evaluator.hpp"
#include "elmdetect/report.hpp"

namespace elmdetect::svg {

struct RocSeries {
  std::string label;
  eval::RocCurve curve;
};

// One polyline per series with its AUC in the legend. Output bytes depend
// only on the inputs. Errors: kEmptyInput.
std::string roc_plot(std::span<const RocSeries> series, const report::RunHeader& header);

// Per-metric difference of every compared variant against its reference,
// in percentage points. Errors: kEmptyInput.
std::string improvement_plot(const eval::ComparisonReport& report, const report::RunHeader& header);

}  // namespace elmdetect::svg

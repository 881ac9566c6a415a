#include "elmdetect/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "elmdetect/error.hpp"

namespace elmdetect::svg {
namespace {

constexpr double kWidth = 480.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 160.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 50.0;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

class Canvas {
 public:
  Canvas(const report::RunHeader& header, std::string_view title) {
    body_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    body_ += "<!-- config_hash=" + header.config_hash + " seed=" + std::to_string(header.seed) + " -->\n";
    body_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth + kRight) + "\" height=\"" +
             num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    body_ += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    text(kLeft, kTop - 10, title, "start", 14);
  }

  void line(double x1, double y1, double x2, double y2, std::string_view stroke, std::string_view extra = "") {
    body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
             "\" stroke=\"" + std::string(stroke) + "\"" + std::string(extra) + "/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, std::string_view stroke) {
    body_ += "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"" + std::string(stroke) + "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) body_ += ' ';
      body_ += num(pts[i].first) + "," + num(pts[i].second);
    }
    body_ += "\"/>\n";
  }

  void text(double x, double y, std::string_view s, std::string_view anchor = "start", int size = 12) {
    body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + std::string(anchor) +
             "\" font-size=\"" + std::to_string(size) + "\">" + escape(s) + "</text>\n";
  }

  std::string finish() { return body_ + "</svg>\n"; }

 private:
  std::string body_;
};

double px(double x) { return kLeft + x * (kWidth - kLeft - 20.0); }
double py(double y, double lo, double hi) {
  return kHeight - kBottom - (y - lo) / (hi - lo) * (kHeight - kTop - kBottom);
}

void axes(Canvas& c, double lo, double hi, std::string_view y_label) {
  c.line(px(0), py(lo, lo, hi), px(1), py(lo, lo, hi), "black");
  c.line(px(0), py(lo, lo, hi), px(0), py(hi, lo, hi), "black");
  for (int i = 0; i <= 4; ++i) {
    const double v = lo + (hi - lo) * i / 4.0;
    c.text(px(0) - 6, py(v, lo, hi) + 4, num(v), "end", 10);
  }
  c.text(18, (kTop + kHeight - kBottom) / 2, y_label, "middle");
}

}  // namespace

std::string roc_plot(std::span<const RocSeries> series, const report::RunHeader& header) {
  if (series.empty()) throw Error(ErrorCode::kEmptyInput, "no ROC curves to plot");
  for (const auto& s : series) {
    if (s.curve.points.empty()) throw Error(ErrorCode::kEmptyInput, "empty ROC curve for " + s.label);
  }
  Canvas c(header, "ROC curves (pooled out-of-fold scores)");
  axes(c, 0.0, 1.0, "TPR");
  for (int i = 0; i <= 4; ++i) c.text(px(i / 4.0), kHeight - kBottom + 16, num(i / 4.0), "middle", 10);
  c.text(px(0.5), kHeight - 12, "FPR", "middle");
  c.line(px(0), py(0, 0, 1), px(1), py(1, 0, 1), "#999999", " stroke-dasharray=\"4 4\"");

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kColors[i % std::size(kColors)];
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : series[i].curve.points) pts.emplace_back(px(p.fpr), py(p.tpr, 0, 1));
    c.polyline(pts, color);
    const double ly = kTop + 20.0 * static_cast<double>(i + 1);
    c.line(kWidth + 5, ly - 4, kWidth + 25, ly - 4, color, " stroke-width=\"2\"");
    char label[128];
    std::snprintf(label, sizeof label, "%s (AUC %.4f)", series[i].label.c_str(), eval::auc(series[i].curve));
    c.text(kWidth + 30, ly, label);
  }
  return c.finish();
}

std::string improvement_plot(const eval::ComparisonReport& report, const report::RunHeader& header) {
  if (report.deltas.empty()) throw Error(ErrorCode::kEmptyInput, "no variant pairs to compare");
  double lo = 0.0;
  double hi = 0.0;
  for (const auto& d : report.deltas) {
    for (std::size_t m = 0; m < eval::kMetricCount; ++m) {
      const double v = 100.0 * eval::metric_value(d.delta, m);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  lo = std::floor(lo) - 1.0;
  hi = std::ceil(hi) + 1.0;

  Canvas c(header, "Improvement over reference variant (percentage points)");
  axes(c, lo, hi, "delta (pp)");
  c.line(px(0), py(0, lo, hi), px(1), py(0, lo, hi), "#999999", " stroke-dasharray=\"4 4\"");
  auto mx = [](std::size_t m) { return px(static_cast<double>(m) / static_cast<double>(eval::kMetricCount - 1)); };
  for (std::size_t m = 0; m < eval::kMetricCount; ++m) {
    c.text(mx(m), kHeight - kBottom + 16, eval::kMetricNames[m], "middle", 10);
  }
  for (std::size_t i = 0; i < report.deltas.size(); ++i) {
    const auto& d = report.deltas[i];
    const char* color = kColors[i % std::size(kColors)];
    std::vector<std::pair<double, double>> pts;
    for (std::size_t m = 0; m < eval::kMetricCount; ++m) {
      pts.emplace_back(mx(m), py(100.0 * eval::metric_value(d.delta, m), lo, hi));
    }
    c.polyline(pts, color);
    const double ly = kTop + 20.0 * static_cast<double>(i + 1);
    c.line(kWidth + 5, ly - 4, kWidth + 25, ly - 4, color, " stroke-width=\"2\"");
    c.text(kWidth + 30, ly, std::string(nn::to_string(d.variant)) + " - " + std::string(nn::to_string(d.reference)));
  }
  return c.finish();
}

}  // namespace elmdetect::svg

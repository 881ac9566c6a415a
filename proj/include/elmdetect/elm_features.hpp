#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "elmdetect/corpus.hpp"
#include "elmdetect/text_analysis.hpp"

namespace elmdetect::features {

inline constexpr std::size_t kCentralCount = 5;
inline constexpr std::size_t kPeripheralCount = 5;
inline constexpr std::size_t kElmCount = kCentralCount + kPeripheralCount;

inline constexpr std::array<std::string_view, kElmCount> kFeatureNames = {
    "flesch_kincaid_grade", "vocabulary_richness", "sentiment_polarity",
    "text_length",          "avg_words_per_sentence", "exclamation_ratio",
    "question_ratio",       "capitalization_ratio",   "all_caps_count",
    "urgency_frequency",
};

// Lexicons consulted by feature extraction.
struct LexiconSet {
  text::Lexicon sentiment;  // word polarity in [-1, 1], unknown words 0
  text::Lexicon urgency;    // membership only

  static LexiconSet bundled();
  static const std::array<std::string_view, 16>& default_urgency_terms();
};

struct CentralVector {
  double flesch_kincaid_grade = 0.0;
  double vocabulary_richness = 0.0;
  double sentiment_polarity = 0.0;
  double text_length = 0.0;
  double avg_words_per_sentence = 0.0;
};

struct PeripheralVector {
  double exclamation_ratio = 0.0;
  double question_ratio = 0.0;
  double capitalization_ratio = 0.0;
  double all_caps_count = 0.0;
  double urgency_frequency = 0.0;
};

struct ElmVector {
  std::array<double, kElmCount> values{};

  static constexpr const std::array<std::string_view, kElmCount>& feature_names() {
    return kFeatureNames;
  }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  bool operator==(const ElmVector&) const = default;
};

// Readability, diversity, polarity and length measures over clean_text.
CentralVector central_features(std::string_view clean_text, const text::Lexicon& sentiment);
CentralVector central_features(const corpus::Document& doc, const LexiconSet& lexicons);

// Punctuation, capitalization and urgency cues over raw_text. Cleaning
// removes exactly what these measure, so they never read clean_text.
PeripheralVector peripheral_features(std::string_view raw_text, const text::Lexicon& urgency);
PeripheralVector peripheral_features(const corpus::Document& doc, const LexiconSet& lexicons);

ElmVector elm_vector(const CentralVector& central, const PeripheralVector& peripheral);
ElmVector elm_vector(const corpus::Document& doc, const LexiconSet& lexicons);

// Per-column min-max scaling fitted on training rows. Works on any row width
// so the combined variant's extra columns share the same machinery.
class FeatureScaler {
 public:
  FeatureScaler() = default;
  FeatureScaler(std::vector<double> mins, std::vector<double> maxs);

  std::size_t width() const { return mins_.size(); }
  bool fitted() const { return !mins_.empty(); }
  const std::vector<double>& mins() const { return mins_; }
  const std::vector<double>& maxs() const { return maxs_; }

  // (x - min) / (max - min) clamped to [0, 1].
  std::vector<double> transform(std::span<const double> row) const;
  ElmVector transform(const ElmVector& v) const;

  bool operator==(const FeatureScaler&) const = default;

 private:
  std::vector<double> mins_;
  std::vector<double> maxs_;
};

// Constant columns get (min, min + 1). Throws kEmptyTrainingSet on no rows.
FeatureScaler fit_scaler(std::span<const std::vector<double>> rows);
FeatureScaler fit_scaler(std::span<const ElmVector> rows);

// Convenience free function mirroring FeatureScaler::transform.
ElmVector transform(const FeatureScaler& scaler, const ElmVector& v);

// Extended features for the combined variant: occurrence counts of the most
// common training bigrams followed by a subjectivity score.
using Bigram = std::pair<std::string, std::string>;

// Top `count` bigrams by document frequency (ties broken lexicographically).
std::vector<Bigram> select_top_bigrams(std::span<const std::vector<std::string>* const> token_rows,
                                       std::size_t count);

// Fraction of tokens present in the sentiment lexicon, whatever the sign.
double subjectivity(std::span<const std::string> tokens, const text::Lexicon& sentiment);

std::vector<double> extended_features(std::span<const std::string> tokens,
                                      std::span<const Bigram> bigrams, double subjectivity_score);

}  // namespace elmdetect::features

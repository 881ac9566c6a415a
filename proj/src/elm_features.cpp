#include "elmdetect/elm_features.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

#include "elmdetect/error.hpp"

namespace elmdetect::features {
namespace {

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_alpha(char c) { return is_upper(c) || (c >= 'a' && c <= 'z'); }

bool first_letter_upper(std::string_view token) {
  for (const char c : token) {
    if (is_alpha(c)) return is_upper(c);
  }
  return false;
}

bool all_caps_word(std::string_view token) {
  return token.size() >= 2 && std::all_of(token.begin(), token.end(), is_upper);
}

}  // namespace

const std::array<std::string_view, 16>& LexiconSet::default_urgency_terms() {
  static constexpr std::array<std::string_view, 16> kTerms = {
      "urgent", "urgently", "now",      "immediately", "breaking", "warning", "alert",    "hurry",
      "act",    "emergency", "deadline", "must",        "critical", "danger",  "quick", "instantly"};
  return kTerms;
}

LexiconSet LexiconSet::bundled() {
  return {text::load_lexicon(text::bundled_sentiment_lexicon_path(), 0.0),
          text::load_lexicon(text::bundled_urgency_lexicon_path(), 0.0)};
}

CentralVector central_features(std::string_view clean_text, const text::Lexicon& sentiment) {
  const auto tokens = text::tokenize(clean_text);
  if (tokens.empty()) return {};
  const auto words = static_cast<double>(tokens.size());
  const auto sentences = static_cast<double>(text::split_sentences(clean_text).size());

  std::size_t syllables = 0;
  double polarity = 0.0;
  std::unordered_set<std::string> unique;
  for (const auto& token : tokens.tokens) {
    syllables += text::count_syllables(token);
    polarity += sentiment.score(token);
    unique.insert(text::to_lower(token));
  }

  CentralVector c;
  c.avg_words_per_sentence = words / sentences;
  c.flesch_kincaid_grade =
      0.39 * c.avg_words_per_sentence + 11.8 * (static_cast<double>(syllables) / words) - 15.59;
  c.vocabulary_richness = static_cast<double>(unique.size()) / words;
  c.sentiment_polarity = polarity / words;
  c.text_length = words;
  return c;
}

CentralVector central_features(const corpus::Document& doc, const LexiconSet& lexicons) {
  return central_features(doc.clean_text, lexicons.sentiment);
}

PeripheralVector peripheral_features(std::string_view raw_text, const text::Lexicon& urgency) {
  const auto tokens = text::tokenize(raw_text);
  if (tokens.empty()) return {};
  const auto n = static_cast<double>(tokens.size());

  PeripheralVector p;
  p.exclamation_ratio = static_cast<double>(std::count(raw_text.begin(), raw_text.end(), '!')) / n;
  p.question_ratio = static_cast<double>(std::count(raw_text.begin(), raw_text.end(), '?')) / n;
  std::size_t capitalized = 0;
  std::size_t shouting = 0;
  std::size_t urgent = 0;
  for (const auto& token : tokens.tokens) {
    if (first_letter_upper(token)) ++capitalized;
    if (all_caps_word(token)) ++shouting;
    if (urgency.contains(token)) ++urgent;
  }
  p.capitalization_ratio = static_cast<double>(capitalized) / n;
  p.all_caps_count = static_cast<double>(shouting);
  p.urgency_frequency = static_cast<double>(urgent) / n;
  return p;
}

PeripheralVector peripheral_features(const corpus::Document& doc, const LexiconSet& lexicons) {
  return peripheral_features(doc.raw_text, lexicons.urgency);
}

ElmVector elm_vector(const CentralVector& c, const PeripheralVector& p) {
  return ElmVector{{c.flesch_kincaid_grade, c.vocabulary_richness, c.sentiment_polarity,
                    c.text_length, c.avg_words_per_sentence, p.exclamation_ratio,
                    p.question_ratio, p.capitalization_ratio, p.all_caps_count,
                    p.urgency_frequency}};
}

ElmVector elm_vector(const corpus::Document& doc, const LexiconSet& lexicons) {
  return elm_vector(central_features(doc, lexicons), peripheral_features(doc, lexicons));
}

FeatureScaler::FeatureScaler(std::vector<double> mins, std::vector<double> maxs)
    : mins_(std::move(mins)), maxs_(std::move(maxs)) {
  if (mins_.size() != maxs_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "scaler min/max widths differ");
  }
}

std::vector<double> FeatureScaler::transform(std::span<const double> row) const {
  if (row.size() != mins_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "row width " + std::to_string(row.size()) +
                                                   ", scaler width " + std::to_string(mins_.size()));
  }
  std::vector<double> out(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) {
    out[i] = std::clamp((row[i] - mins_[i]) / (maxs_[i] - mins_[i]), 0.0, 1.0);
  }
  return out;
}

ElmVector FeatureScaler::transform(const ElmVector& v) const {
  const auto scaled = transform(std::span<const double>(v.values));
  ElmVector out;
  std::copy(scaled.begin(), scaled.end(), out.values.begin());
  return out;
}

FeatureScaler fit_scaler(std::span<const std::vector<double>> rows) {
  if (rows.empty()) throw Error(ErrorCode::kEmptyTrainingSet, "cannot fit a scaler on zero rows");
  const std::size_t width = rows.front().size();
  std::vector<double> mins(rows.front());
  std::vector<double> maxs(rows.front());
  for (const auto& row : rows) {
    if (row.size() != width) throw Error(ErrorCode::kDimensionMismatch, "ragged feature rows");
    for (std::size_t i = 0; i < width; ++i) {
      mins[i] = std::min(mins[i], row[i]);
      maxs[i] = std::max(maxs[i], row[i]);
    }
  }
  for (std::size_t i = 0; i < width; ++i) {
    if (maxs[i] == mins[i]) maxs[i] = mins[i] + 1.0;
  }
  return FeatureScaler(std::move(mins), std::move(maxs));
}

FeatureScaler fit_scaler(std::span<const ElmVector> rows) {
  std::vector<std::vector<double>> plain;
  plain.reserve(rows.size());
  for (const auto& r : rows) plain.emplace_back(r.values.begin(), r.values.end());
  return fit_scaler(std::span<const std::vector<double>>(plain));
}

ElmVector transform(const FeatureScaler& scaler, const ElmVector& v) { return scaler.transform(v); }

std::vector<Bigram> select_top_bigrams(std::span<const std::vector<std::string>* const> token_rows,
                                       std::size_t count) {
  std::map<Bigram, std::size_t> document_frequency;
  for (const auto* tokens : token_rows) {
    std::set<Bigram> seen;
    for (std::size_t i = 0; i + 1 < tokens->size(); ++i) seen.emplace((*tokens)[i], (*tokens)[i + 1]);
    for (const auto& b : seen) ++document_frequency[b];
  }
  std::vector<std::pair<Bigram, std::size_t>> ranked(document_frequency.begin(),
                                                     document_frequency.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<Bigram> out;
  for (std::size_t i = 0; i < ranked.size() && i < count; ++i) out.push_back(ranked[i].first);
  return out;
}

double subjectivity(std::span<const std::string> tokens, const text::Lexicon& sentiment) {
  if (tokens.empty()) return 0.0;
  const auto hits = std::count_if(tokens.begin(), tokens.end(),
                                  [&](const std::string& t) { return sentiment.contains(t); });
  return static_cast<double>(hits) / static_cast<double>(tokens.size());
}

std::vector<double> extended_features(std::span<const std::string> tokens,
                                      std::span<const Bigram> bigrams, double subjectivity_score) {
  std::vector<double> out(bigrams.size() + 1, 0.0);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    for (std::size_t b = 0; b < bigrams.size(); ++b) {
      if (bigrams[b].first == tokens[i] && bigrams[b].second == tokens[i + 1]) out[b] += 1.0;
    }
  }
  out.back() = subjectivity_score;
  return out;
}

}  // namespace elmdetect::features

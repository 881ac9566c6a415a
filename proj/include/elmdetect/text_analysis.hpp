#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace elmdetect::text {

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;  // one past the last byte
};

struct TokenList {
  std::vector<std::string> tokens;
  std::vector<Span> spans;  // byte offsets into the tokenized input

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

// Maximal runs of ASCII letters, digits and apostrophes; casing preserved.
TokenList tokenize(std::string_view text);

// Segments closed by a run of . ! ?; a trailing unterminated segment counts
// when it holds a token. Segments without any token are dropped.
std::vector<std::string> split_sentences(std::string_view text);

// Vowel-group heuristic, never below 1.
std::size_t count_syllables(std::string_view word);

std::string to_lower(std::string_view s);

class Lexicon {
 public:
  Lexicon() = default;
  Lexicon(std::string name, std::unordered_map<std::string, double> entries, double default_score);

  const std::string& name() const { return name_; }
  std::size_t size() const { return entries_.size(); }
  double default_score() const { return default_score_; }

  // Case-insensitive.
  bool contains(std::string_view word) const;
  double score(std::string_view word) const;

  const std::unordered_map<std::string, double>& entries() const { return entries_; }

 private:
  std::string name_;
  std::unordered_map<std::string, double> entries_;
  double default_score_ = 0.0;
};

// `word<TAB>score` per line, score optional (1.0), `#` comments and blank
// lines ignored, later duplicates win. Errors: kFileNotFound, kMalformedLine.
Lexicon load_lexicon(const std::filesystem::path& path, double default_score);
Lexicon parse_lexicon(std::string_view contents, std::string name, double default_score);

std::filesystem::path bundled_data_dir();
std::filesystem::path bundled_sentiment_lexicon_path();
std::filesystem::path bundled_urgency_lexicon_path();

}  // namespace elmdetect::text

#include "elmdetect/text_analysis.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "elmdetect/error.hpp"

namespace elmdetect::text {
namespace {

bool is_token_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '\'';
}

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

bool has_token(std::string_view s) {
  for (const char c : s) {
    if (is_token_char(c)) return true;
  }
  return false;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\f\v");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

TokenList tokenize(std::string_view text) {
  TokenList out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_token_char(text[i])) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    while (i < text.size() && is_token_char(text[i])) ++i;
    out.tokens.emplace_back(text.substr(begin, i - begin));
    out.spans.push_back({begin, i});
  }
  return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_terminator(text[i])) {
      ++i;
      continue;
    }
    while (i < text.size() && is_terminator(text[i])) ++i;
    const auto segment = text.substr(start, i - start);
    if (has_token(segment)) out.emplace_back(trim(segment));
    start = i;
  }
  const auto tail = text.substr(start);
  if (has_token(tail)) out.emplace_back(trim(tail));
  return out;
}

std::size_t count_syllables(std::string_view word) {
  const std::string lower = to_lower(word);
  std::size_t groups = 0;
  bool in_group = false;
  char last_letter = 0;
  char before_last = 0;
  for (const char c : lower) {
    if (c < 'a' || c > 'z') continue;
    const bool vowel = is_vowel(c);
    if (vowel && !in_group) ++groups;
    in_group = vowel;
    before_last = last_letter;
    last_letter = c;
  }
  // Terminal silent "e": a lone final e after a consonant ("because").
  if (last_letter == 'e' && before_last != 0 && !is_vowel(before_last) && groups > 1) --groups;
  return groups == 0 ? 1 : groups;
}

Lexicon::Lexicon(std::string name, std::unordered_map<std::string, double> entries,
                 double default_score)
    : name_(std::move(name)), entries_(std::move(entries)), default_score_(default_score) {}

bool Lexicon::contains(std::string_view word) const { return entries_.contains(to_lower(word)); }

double Lexicon::score(std::string_view word) const {
  const auto it = entries_.find(to_lower(word));
  return it == entries_.end() ? default_score_ : it->second;
}

Lexicon parse_lexicon(std::string_view contents, std::string name, double default_score) {
  std::unordered_map<std::string, double> entries;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= contents.size()) {
    auto nl = contents.find('\n', pos);
    if (nl == std::string_view::npos) nl = contents.size();
    std::string_view line = contents.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;

    const auto tab = body.find('\t');
    const auto word = trim(body.substr(0, tab));
    double score = 1.0;
    auto fail = [&](const std::string& why) {
      return Error(ErrorCode::kMalformedLine, name + " line " + std::to_string(line_no) + ": " + why);
    };
    if (word.empty()) throw fail("empty word");
    if (word.find_first_of(" \t") != std::string_view::npos) throw fail("word contains whitespace");
    if (tab != std::string_view::npos) {
      const auto rest = trim(body.substr(tab + 1));
      if (rest.find('\t') != std::string_view::npos) throw fail("too many fields");
      if (!rest.empty()) {
        const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), score);
        if (ec != std::errc{} || ptr != rest.data() + rest.size() || !std::isfinite(score)) {
          throw fail("score is not a number: '" + std::string(rest) + "'");
        }
      }
    }
    entries[to_lower(word)] = score;
    if (nl == contents.size()) break;
  }
  return Lexicon(std::move(name), std::move(entries), default_score);
}

Lexicon load_lexicon(const std::filesystem::path& path, double default_score) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_lexicon(buffer.str(), path.filename().string(), default_score);
}

std::filesystem::path bundled_data_dir() {
  if (const char* env = std::getenv("ELMDETECT_DATA_DIR"); env && *env) return env;
  return ELMDETECT_DATA_DIR;
}

std::filesystem::path bundled_sentiment_lexicon_path() {
  return bundled_data_dir() / "sentiment_lexicon.tsv";
}

std::filesystem::path bundled_urgency_lexicon_path() {
  return bundled_data_dir() / "urgency_lexicon.tsv";
}

}  // namespace elmdetect::text

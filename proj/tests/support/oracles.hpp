#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

// Straightforward re-implementations used as test oracles. They share no
// code with the library and favour obviousness over speed.
namespace elmdetect::oracle {

inline bool letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
inline bool digit(char c) { return c >= '0' && c <= '9'; }
inline bool upper(char c) { return c >= 'A' && c <= 'Z'; }
inline bool word_char(char c) { return letter(c) || digit(c) || c == '\''; }
inline bool stop(char c) { return c == '.' || c == '!' || c == '?'; }
inline bool blank(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
inline char lower(char c) { return upper(c) ? static_cast<char>(c + 32) : c; }

inline std::string lowercase(const std::string& s) {
  std::string out;
  for (char c : s) out += lower(c);
  return out;
}

inline std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (word_char(c)) {
      cur += c;
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline std::string drop_links(const std::string& s) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    const std::string rest = lowercase(s.substr(i, 8));
    std::size_t skip = 0;
    if (rest.rfind("https://", 0) == 0) skip = 8;
    else if (rest.rfind("http://", 0) == 0) skip = 7;
    else if (rest.rfind("www.", 0) == 0) skip = 4;
    if (!skip) {
      out += s[i++];
      continue;
    }
    i += skip;
    while (i < s.size() && !blank(s[i])) ++i;
  }
  return out;
}

inline std::string clean(const std::string& raw) {
  std::string kept;
  for (char c : drop_links(raw)) {
    if (blank(c)) kept += ' ';
    else if (letter(c) || digit(c) || stop(c)) kept += lower(c);
  }
  kept = drop_links(kept);
  std::string out;
  for (char c : kept) {
    if (c == ' ' && (out.empty() || out.back() == ' ')) continue;
    out += c;
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

// A sentence ends at a run of terminators and must contain a word character;
// trailing text with a word character is one more sentence.
inline std::size_t sentence_count(const std::string& s) {
  std::size_t count = 0;
  bool has_word = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (word_char(s[i])) has_word = true;
    const bool run_ends = stop(s[i]) && (i + 1 == s.size() || !stop(s[i + 1]));
    if (run_ends) {
      if (has_word) ++count;
      has_word = false;
    }
  }
  return count + (has_word ? 1 : 0);
}

inline std::size_t syllables(const std::string& word) {
  std::string letters;
  for (char c : lowercase(word)) {
    if (letter(c)) letters += c;
  }
  auto vowel = [](char c) { return std::string("aeiouy").find(c) != std::string::npos; };
  std::size_t groups = 0;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    if (vowel(letters[i]) && (i == 0 || !vowel(letters[i - 1]))) ++groups;
  }
  const std::size_t n = letters.size();
  if (n >= 2 && letters[n - 1] == 'e' && !vowel(letters[n - 2]) && groups > 1) --groups;
  return std::max<std::size_t>(groups, 1);
}

// The ten ELM features of a raw document, in canonical order.
inline std::array<double, 10> features(const std::string& raw, const std::map<std::string, double>& polarity,
                                       const std::set<std::string>& urgency) {
  std::array<double, 10> f{};
  const std::string cleaned = clean(raw);
  const auto cw = words(cleaned);
  if (!cw.empty()) {
    const double n = static_cast<double>(cw.size());
    double syl = 0, pol = 0;
    std::set<std::string> distinct;
    for (const auto& w : cw) {
      syl += static_cast<double>(syllables(w));
      const auto it = polarity.find(lowercase(w));
      if (it != polarity.end()) pol += it->second;
      distinct.insert(lowercase(w));
    }
    const double per_sentence = n / static_cast<double>(sentence_count(cleaned));
    f[0] = 0.39 * per_sentence + 11.8 * (syl / n) - 15.59;
    f[1] = static_cast<double>(distinct.size()) / n;
    f[2] = pol / n;
    f[3] = n;
    f[4] = per_sentence;
  }
  const auto rw = words(raw);
  if (!rw.empty()) {
    const double n = static_cast<double>(rw.size());
    double bangs = 0, questions = 0, capital = 0, shout = 0, urgent = 0;
    for (char c : raw) {
      bangs += c == '!';
      questions += c == '?';
    }
    for (const auto& w : rw) {
      for (char c : w) {
        if (letter(c)) {
          capital += upper(c);
          break;
        }
      }
      bool all_upper = w.size() >= 2;
      for (char c : w) all_upper = all_upper && upper(c);
      shout += all_upper;
      urgent += urgency.count(lowercase(w)) ? 1 : 0;
    }
    f[5] = bangs / n;
    f[6] = questions / n;
    f[7] = capital / n;
    f[8] = shout;
    f[9] = urgent / n;
  }
  return f;
}

// Fraction of (positive, negative) pairs ranked correctly, ties counted 1/2.
inline double mann_whitney_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      pairs += 1;
      if (scores[i] > scores[j]) wins += 1;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

struct SignedRankOracle {
  double w_plus = 0;
  double w_minus = 0;
  std::size_t n = 0;
  double p_two_sided = 1;
  double p_one_sided = 1;  // P(W+ >= observed) under the null
};

// Average ranks of |d| (zeros dropped), then all 2^n sign assignments.
inline SignedRankOracle signed_rank_enumeration(const std::vector<double>& d) {
  std::vector<double> mags;
  std::vector<bool> positive;
  for (double v : d) {
    if (v == 0.0) continue;
    mags.push_back(std::abs(v));
    positive.push_back(v > 0);
  }
  SignedRankOracle r;
  r.n = mags.size();
  std::vector<double> rank(r.n);
  for (std::size_t i = 0; i < r.n; ++i) {
    double below = 0, equal = 0;
    for (std::size_t j = 0; j < r.n; ++j) {
      if (mags[j] < mags[i]) below += 1;
      else if (mags[j] == mags[i]) equal += 1;
    }
    rank[i] = below + (equal + 1) / 2;
  }
  for (std::size_t i = 0; i < r.n; ++i) (positive[i] ? r.w_plus : r.w_minus) += rank[i];
  const double w = std::min(r.w_plus, r.w_minus);
  const std::uint64_t total = 1ULL << r.n;
  std::uint64_t low = 0, high = 0;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    double t = 0;
    for (std::size_t i = 0; i < r.n; ++i) {
      if (mask >> i & 1) t += rank[i];
    }
    if (t <= w + 1e-9) ++low;
    if (t >= r.w_plus - 1e-9) ++high;
  }
  r.p_two_sided = std::min(1.0, 2.0 * static_cast<double>(low) / static_cast<double>(total));
  r.p_one_sided = static_cast<double>(high) / static_cast<double>(total);
  return r;
}

// Two-sided alpha = 0.05 critical values of the signed-rank statistic from
// standard tables; reject iff W <= value. No rejection is possible for n <= 5.
inline int wilcoxon_critical_value(std::size_t n) {
  static const std::map<std::size_t, int> kTable = {{6, 0}, {7, 2}, {8, 3}, {9, 5}, {10, 8}, {11, 10}, {12, 13}};
  const auto it = kTable.find(n);
  return it == kTable.end() ? -1 : it->second;
}

// Student t CDF by composite Simpson integration of the density from 0 to t.
inline double t_cdf_simpson(double t, double df) {
  const double pi = 3.14159265358979323846;
  const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * pi);
  auto density = [&](double x) { return c * std::pow(1 + x * x / df, -(df + 1) / 2); };
  const int steps = 200000;
  const double h = std::abs(t) / steps;
  double sum = density(0) + density(std::abs(t));
  for (int i = 1; i < steps; ++i) sum += density(i * h) * (i % 2 ? 4 : 2);
  const double area = sum * h / 3;
  return t >= 0 ? 0.5 + area : 0.5 - area;
}

}  // namespace elmdetect::oracle

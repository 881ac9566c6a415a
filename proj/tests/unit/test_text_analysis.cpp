#include <string>
#include <vector>

#include "doctest.h"

#include "elmdetect/corpus.hpp"
#include "elmdetect/error.hpp"
#include "elmdetect/rng.hpp"
#include "elmdetect/text_analysis.hpp"
#include "../support/oracles.hpp"
#include "../support/synthetic.hpp"

using namespace elmdetect;

TEST_SUITE("text_analysis") {

TEST_CASE("tokenize examples") {
  const auto t = text::tokenize("Vaccines don't work!!");
  CHECK(t.tokens == std::vector<std::string>{"Vaccines", "don't", "work"});
  REQUIRE(t.spans.size() == 3);
  CHECK(t.spans[1].begin == 9);
  CHECK(t.spans[1].end == 14);
  CHECK(text::tokenize("").empty());
  CHECK(text::tokenize("   ").empty());
}

TEST_CASE("split_sentences examples") {
  CHECK(text::split_sentences("Stay home. Stay safe!") == std::vector<std::string>{"Stay home.", "Stay safe!"});
  CHECK(text::split_sentences("no punctuation here") == std::vector<std::string>{"no punctuation here"});
  CHECK(text::split_sentences("Wait... what?!").size() == 2);
  CHECK(text::split_sentences("...!?").empty());
}

TEST_CASE("count_syllables examples and hand-counted words") {
  CHECK(text::count_syllables("cat") == 1);
  CHECK(text::count_syllables("because") == 2);
  CHECK(text::count_syllables("a") == 1);
  const std::vector<std::pair<std::string, std::size_t>> hand = {
      {"the", 1},      {"make", 1},   {"health", 1},  {"doctor", 2}, {"vaccine", 2},
      {"hospital", 3}, {"water", 2},  {"medicine", 3}, {"rhythm", 1}, {"queue", 1}};
  for (const auto& [word, n] : hand) {
    CAPTURE(word);
    CHECK(text::count_syllables(word) == n);
  }
}

TEST_CASE("tokens, sentences and syllables agree with the oracle") {
  Rng rng(21);
  auto texts = synthetic::edge_case_texts();
  for (int i = 0; i < 200; ++i) texts.push_back(synthetic::random_text(rng));
  for (const auto& s : texts) {
    CAPTURE(s);
    const auto tokens = text::tokenize(s);
    CHECK(tokens.tokens == oracle::words(s));
    CHECK(text::split_sentences(s).size() == oracle::sentence_count(s));
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      CHECK(text::count_syllables(tokens.tokens[i]) == oracle::syllables(tokens.tokens[i]));
      CHECK(text::count_syllables(tokens.tokens[i]) >= 1);
      CHECK(tokens.tokens[i].find_first_of(" \t\n") == std::string::npos);
      if (i > 0) CHECK(tokens.spans[i].begin > tokens.spans[i - 1].end);
    }
    if (!tokens.empty()) CHECK(!text::split_sentences(s).empty());
  }
}

TEST_CASE("token count is additive over a space join") {
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const auto a = synthetic::random_text(rng);
    const auto b = synthetic::random_text(rng);
    CAPTURE(a);
    CAPTURE(b);
    CHECK(text::tokenize(a + " " + b).size() == text::tokenize(a).size() + text::tokenize(b).size());
  }
}

TEST_CASE("tokens of cleaned text never hold sentence punctuation") {
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    for (const auto& tok : text::tokenize(corpus::clean_text(synthetic::random_text(rng))).tokens) {
      CHECK(tok.find_first_of(".!?") == std::string::npos);
    }
  }
}

TEST_CASE("parse_lexicon examples") {
  const auto sentiment = text::parse_lexicon("good\t0.7\nbad\t-0.7", "s", 0.0);
  CHECK(sentiment.size() == 2);
  CHECK(sentiment.score("GOOD") == doctest::Approx(0.7));
  CHECK(sentiment.score("unknown") == 0.0);
  const auto urgency = text::parse_lexicon("urgent\nnow", "u", 0.0);
  CHECK(urgency.size() == 2);
  CHECK(urgency.score("urgent") == 1.0);
  CHECK(urgency.contains("NOW"));
  const auto commented = text::parse_lexicon("# header\r\n\r\nx\t0.5\r\nx\t0.25\r\n", "c", -1.0);
  CHECK(commented.size() == 1);
  CHECK(commented.score("x") == 0.25);
  CHECK(commented.score("y") == -1.0);
}

TEST_CASE("parse_lexicon rejects malformed lines") {
  CHECK_THROWS_AS(text::parse_lexicon("good\tvery", "s", 0.0), Error);
  CHECK_THROWS_AS(text::parse_lexicon("good\t1\t2", "s", 0.0), Error);
  CHECK_THROWS_AS(text::parse_lexicon("two words\t1", "s", 0.0), Error);
  CHECK_THROWS_AS(text::load_lexicon("/nonexistent/lexicon.tsv", 0.0), Error);
}

TEST_CASE("bundled lexicons load and are bounded") {
  const auto sentiment = text::load_lexicon(text::bundled_sentiment_lexicon_path(), 0.0);
  const auto urgency = text::load_lexicon(text::bundled_urgency_lexicon_path(), 0.0);
  CHECK(sentiment.size() > 1000);
  CHECK(urgency.size() == 16);
  for (const auto& [word, score] : sentiment.entries()) {
    CHECK(score >= -1.0);
    CHECK(score <= 1.0);
  }
  for (const char* w : {"urgent", "urgently", "now", "immediately", "breaking", "warning", "alert", "hurry",
                        "act", "emergency", "deadline", "must", "critical", "danger", "quick", "instantly"}) {
    CHECK(urgency.contains(w));
  }
}

}  // TEST_SUITE

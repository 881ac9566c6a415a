#include "elmdetect/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "elmdetect/csv.hpp"
#include "elmdetect/error.hpp"
#include "elmdetect/rng.hpp"

namespace elmdetect::corpus {
namespace {

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool keep_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == ' ' || c == '.' || c == '!' ||
         c == '?';
}

bool starts_with_ci(std::string_view text, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > text.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (ascii_lower(text[pos + i]) != prefix[i]) return false;
  }
  return true;
}

// Removes every http://, https:// and www. link together with the non-space
// run that follows it. Repeats until no link prefix remains.
std::string strip_links(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t prefix = 0;
    if (starts_with_ci(text, i, "https://")) {
      prefix = 8;
    } else if (starts_with_ci(text, i, "http://")) {
      prefix = 7;
    } else if (starts_with_ci(text, i, "www.")) {
      prefix = 4;
    }
    if (prefix == 0) {
      out.push_back(text[i++]);
      continue;
    }
    i += prefix;
    while (i < text.size() && !is_space(text[i])) ++i;
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return is_space(c); });
}

void load_file(const std::filesystem::path& path, SourceFile source, std::vector<Document>& out,
               std::size_t& dropped) {
  csv::Table table;
  try {
    table = csv::parse(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kMalformedRow) {
      throw Error(ErrorCode::kMalformedRow, path.string() + ": " + e.what());
    }
    throw;
  }
  std::size_t text_col = table.header.size();
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    std::string name = table.header[c];
    std::transform(name.begin(), name.end(), name.begin(), ascii_lower);
    name.erase(0, name.find_first_not_of(" \t"));
    name.erase(name.find_last_not_of(" \t") + 1);
    if (name == "text") {
      text_col = c;
      break;
    }
  }
  if (text_col == table.header.size()) {
    throw Error(ErrorCode::kMissingTextColumn, path.string());
  }
  const std::string prefix = source == SourceFile::true_news ? "true-" : "fake-";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    auto& row = table.rows[r];
    if (blank(row[text_col])) {
      ++dropped;
      continue;
    }
    Document doc = make_document(prefix + std::to_string(r + 1), std::move(row[text_col]), source);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c != text_col) doc.metadata.emplace_back(table.header[c], std::move(row[c]));
    }
    out.push_back(std::move(doc));
  }
}

}  // namespace

std::string clean_text(std::string_view raw) {
  std::string text = strip_links(raw);
  std::string kept;
  kept.reserve(text.size());
  for (const char c : text) {
    if (is_space(c)) {
      kept.push_back(' ');
      continue;
    }
    const char lower = ascii_lower(c);
    if (keep_char(lower)) kept.push_back(lower);
  }
  // Dropping characters can splice a new "www." together.
  kept = strip_links(kept);

  std::string out;
  out.reserve(kept.size());
  for (const char c : kept) {
    if (c == ' ' && (out.empty() || out.back() == ' ')) continue;
    out.push_back(c);
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

Document make_document(std::string id, std::string raw_text, SourceFile source) {
  Document doc;
  doc.id = std::move(id);
  doc.clean_text = clean_text(raw_text);
  doc.raw_text = std::move(raw_text);
  doc.source = source;
  doc.label = source == SourceFile::fake_news ? kFake : kAuthentic;
  return doc;
}

DocumentSet::DocumentSet(std::vector<Document> documents, std::size_t dropped_rows)
    : documents_(std::move(documents)), dropped_rows_(dropped_rows) {
  for (const auto& doc : documents_) {
    if (doc.label == kFake) {
      ++n_fake_;
    } else {
      ++n_true_;
    }
  }
}

std::size_t DocumentSet::empty_after_cleaning() const {
  return static_cast<std::size_t>(std::count_if(documents_.begin(), documents_.end(),
                                                [](const Document& d) { return d.empty_after_cleaning(); }));
}

DocumentSet load_dataset(const std::filesystem::path& true_path,
                         const std::filesystem::path& fake_path) {
  for (const auto& p : {true_path, fake_path}) {
    if (!std::filesystem::is_regular_file(p)) throw Error(ErrorCode::kFileNotFound, p.string());
  }
  std::vector<Document> docs;
  std::size_t dropped = 0;
  load_file(true_path, SourceFile::true_news, docs, dropped);
  load_file(fake_path, SourceFile::fake_news, docs, dropped);
  return DocumentSet(std::move(docs), dropped);
}

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != fold) out.push_back(i);
  }
  return out;
}

FoldPlan stratified_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "fold count must be at least 2");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i] == kFake ? 1 : 0].push_back(i);
  for (const auto& members : by_class) {
    if (members.size() < k) {
      throw Error(ErrorCode::kTooFewDocuments, "a class has " + std::to_string(members.size()) +
                                                   " documents, fewer than k=" + std::to_string(k));
    }
  }
  FoldPlan plan{k, seed, std::vector<std::size_t>(labels.size(), 0)};
  Rng rng(seed);
  for (auto& members : by_class) {
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t pos = 0; pos < members.size(); ++pos) plan.assignments[members[pos]] = pos % k;
  }
  return plan;
}

FoldPlan stratified_folds(const DocumentSet& set, std::size_t k, std::uint64_t seed) {
  std::vector<int> labels;
  labels.reserve(set.size());
  for (const auto& doc : set.documents()) labels.push_back(doc.label);
  return stratified_folds(labels, k, seed);
}

}  // namespace elmdetect::corpus

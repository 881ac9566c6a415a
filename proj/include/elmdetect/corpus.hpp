#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace elmdetect::corpus {

enum class SourceFile { true_news, fake_news };

inline constexpr int kAuthentic = 0;
inline constexpr int kFake = 1;

struct Document {
  std::string id;
  std::string raw_text;    // as read from disk, never modified
  std::string clean_text;  // clean_text(raw_text)
  int label = kAuthentic;
  SourceFile source = SourceFile::true_news;
  // Non-text columns carried through untouched (header name, value).
  std::vector<std::pair<std::string, std::string>> metadata;

  // Retained in the set; the trainer feeds these an all-padding sequence.
  bool empty_after_cleaning() const { return clean_text.empty(); }
};

Document make_document(std::string id, std::string raw_text, SourceFile source);

class DocumentSet {
 public:
  DocumentSet() = default;
  explicit DocumentSet(std::vector<Document> documents, std::size_t dropped_rows = 0);

  std::span<const Document> documents() const { return documents_; }
  const Document& operator[](std::size_t i) const { return documents_[i]; }
  std::size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }

  std::size_t n_true() const { return n_true_; }
  std::size_t n_fake() const { return n_fake_; }
  std::size_t dropped_rows() const { return dropped_rows_; }
  std::size_t empty_after_cleaning() const;

 private:
  std::vector<Document> documents_;
  std::size_t n_true_ = 0;
  std::size_t n_fake_ = 0;
  std::size_t dropped_rows_ = 0;
};

// Reads the authentic and fake news files. The text column is located by a
// case-insensitive header match on "text"; rows with blank text are dropped
// and counted. Errors: kFileNotFound, kMalformedRow, kMissingTextColumn.
DocumentSet load_dataset(const std::filesystem::path& true_path,
                         const std::filesystem::path& fake_path);

// Lowercase; strip http(s):// and www. links; keep only letters, digits,
// spaces and . ! ?; collapse whitespace; trim.
std::string clean_text(std::string_view raw);

struct FoldPlan {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> assignments;  // fold index per document

  std::vector<std::size_t> test_indices(std::size_t fold) const;
  std::vector<std::size_t> train_indices(std::size_t fold) const;
};

// Shuffles each class with the seeded generator, then deals members
// round-robin into k folds. Throws kTooFewDocuments when a class has fewer
// than k members and kInvalidArgument when k < 2.
FoldPlan stratified_folds(const DocumentSet& set, std::size_t k, std::uint64_t seed);
FoldPlan stratified_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed);

}  // namespace elmdetect::corpus

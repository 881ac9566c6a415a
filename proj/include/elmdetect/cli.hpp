#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "elmdetect/trainer.hpp"

namespace elmdetect::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitTraining = 3;

struct RunConfig {
  std::filesystem::path true_csv;
  std::filesystem::path fake_csv;
  std::optional<std::filesystem::path> sentiment_lexicon;
  std::optional<std::filesystem::path> urgency_lexicon;
  std::size_t k = 10;
  std::uint64_t seed = 42;
  std::vector<nn::Variant> variants{nn::Variant::base, nn::Variant::enhanced};
  // Template for every variant; variant and seed are overwritten per run.
  train::TrainConfig train;
  std::filesystem::path out = "out";
  bool emit_plots = false;
  std::size_t jobs = 1;

  // Throws kInvalidArgument.
  void validate() const;
};

// Everything that determines results: inputs are recorded by content hash,
// so the output directory, paths and job count do not enter the hash.
nlohmann::json hashed_config(const RunConfig& config);
std::string run_config_hash(const RunConfig& config);

// Files staged in memory and committed together; nothing reaches the output
// directory unless every file was produced.
class OutputSet {
 public:
  void add(const std::string& name, std::string contents);
  const std::map<std::string, std::string>& files() const { return files_; }
  // Writes each file through a temporary name and renames it into place.
  void commit(const std::filesystem::path& dir) const;

 private:
  std::map<std::string, std::string> files_;
};

// Each command returns a process exit code and reports errors on `err`.
int cmd_ingest(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_features(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_plot(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err);
// Re-hashes the inputs and outputs listed in manifest.json.
int cmd_verify(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err);

}  // namespace elmdetect::cli

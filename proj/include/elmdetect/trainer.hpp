#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "elmdetect/corpus.hpp"
#include "elmdetect/elm_features.hpp"
#include "elmdetect/model.hpp"
#include "elmdetect/optimizer.hpp"

namespace elmdetect::train {

using nn::Variant;

// dynamic: sequences keep their own length (truncated to max_seq_len, padded
// up to the kernel size). fixed: every sequence padded at the end to
// max_seq_len.
enum class PadMode { dynamic, fixed };

struct TrainConfig {
  Variant variant = Variant::base;
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  double learning_rate = 0.001;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t early_stop_patience = 2;  // 0 disables early stopping
  double val_fraction = 0.1;
  std::uint64_t seed = 42;
  std::size_t max_seq_len = 100;
  double dropout_rate = 0.5;

  std::size_t embed_dim = 100;
  std::size_t filters = 64;
  std::size_t kernel = 3;
  std::size_t hidden = 100;
  std::size_t ff_hidden = 32;
  std::size_t min_token_freq = 2;
  nn::TextHead head = nn::TextHead::lstm;
  PadMode pad_mode = PadMode::dynamic;
  bool dropout_on_features = false;

  // Extra columns of the combined variant.
  std::size_t bigram_count = 50;
  bool use_subjectivity = true;

  // Throws kInvalidArgument.
  void validate() const;
  AdamHyper adam() const { return {learning_rate, adam_beta1, adam_beta2, adam_eps}; }
};

nlohmann::json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j);

// Everything the trainer needs from one document, computed once per corpus.
struct Sample {
  std::string id;
  int label = 0;
  std::vector<std::string> tokens;  // tokenize(clean_text)
  features::ElmVector elm;          // unscaled
  double subjectivity = 0.0;
};

Sample prepare_sample(const corpus::Document& doc, const features::LexiconSet& lexicons);
std::vector<Sample> prepare_samples(const corpus::DocumentSet& set, const features::LexiconSet& lexicons);

// Index 0 is padding, 1 is out-of-vocabulary; the rest are training tokens
// seen at least min_freq times, ordered by descending count then spelling.
class Vocabulary {
 public:
  Vocabulary();
  static Vocabulary build(std::span<const std::vector<std::string>* const> rows, std::size_t min_freq);
  static Vocabulary from_words(std::vector<std::string> words);

  std::size_t size() const { return words_.size(); }
  int id(const std::string& token) const;
  const std::vector<std::string>& words() const { return words_; }

  std::vector<int> encode(std::span<const std::string> tokens, std::size_t max_len,
                          std::size_t min_len, PadMode mode) const;

  bool operator==(const Vocabulary& other) const { return words_ == other.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
};

// Patience rule: stop once val loss has failed to improve on the best value
// for `patience` consecutive epochs. patience == 0 never stops.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

  // Feed one epoch's validation loss; returns true when training should stop.
  bool update(double val_loss);
  bool improved() const { return improved_; }
  std::size_t best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_loss_; }

 private:
  std::size_t patience_;
  std::size_t epoch_ = 0;
  std::size_t best_epoch_ = 0;
  std::size_t since_best_ = 0;
  double best_loss_ = std::numeric_limits<double>::infinity();
  bool improved_ = false;
};

struct TrainedModel {
  TrainConfig config;
  nn::Architecture arch;
  nn::ModelParams params;
  Vocabulary vocab;
  features::FeatureScaler scaler;
  std::vector<features::Bigram> bigrams;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  // Ids of the rows that fitted the vocabulary, scaler and bigram list.
  std::vector<std::string> fit_ids;
  std::vector<std::string> validation_ids;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Carves a stratified validation split, fits vocabulary / scaler / bigrams on
// the remainder, trains with mini-batch Adam on binary cross-entropy and
// restores the parameters of the best validation epoch. With patience 0 early
// stopping is off and the last epoch is kept.
// Errors: kEmptyTrainingSet, kSingleClassTrainingSet, kInvalidArgument.
TrainedModel train(std::span<const Sample> rows, const TrainConfig& config,
                   const EpochCallback& on_epoch = {});

// Scaled side-feature vector the model consumes for this sample.
std::vector<double> model_features(const TrainedModel& model, const Sample& sample);
std::vector<int> model_tokens(const TrainedModel& model, const Sample& sample);

// Eval-mode probability that the sample is fake.
double predict(const TrainedModel& model, const Sample& sample);
double predict(const TrainedModel& model, const corpus::Document& doc,
               const features::LexiconSet& lexicons);

// Mean eval-mode loss and accuracy (threshold 0.5) over rows.
struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
};
Evaluation evaluate(const TrainedModel& model, std::span<const Sample> rows);

}  // namespace elmdetect::train

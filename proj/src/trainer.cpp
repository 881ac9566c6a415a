#include "elmdetect/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "elmdetect/error.hpp"
#include "elmdetect/rng.hpp"
#include "elmdetect/text_analysis.hpp"

namespace elmdetect::train {
namespace {

enum Stream : std::uint64_t { kSplitStream = 1, kInitStream = 2, kShuffleStream = 3, kDropoutStream = 4 };

std::string_view to_string(PadMode m) { return m == PadMode::dynamic ? "dynamic" : "fixed"; }

PadMode parse_pad_mode(std::string_view s) {
  if (s == "dynamic") return PadMode::dynamic;
  if (s == "fixed") return PadMode::fixed;
  throw Error(ErrorCode::kInvalidArgument, "unknown pad mode '" + std::string(s) + "'");
}

std::vector<double> raw_feature_row(const TrainedModel& model, const Sample& sample) {
  std::vector<double> row(sample.elm.values.begin(), sample.elm.values.end());
  if (model.config.variant != Variant::combined) return row;
  auto extra = features::extended_features(sample.tokens, model.bigrams, sample.subjectivity);
  if (!model.config.use_subjectivity) extra.pop_back();
  row.insert(row.end(), extra.begin(), extra.end());
  return row;
}

struct PreparedRow {
  std::vector<int> ids;
  std::vector<double> features;
  int label = 0;
};

PreparedRow prepare_row(const TrainedModel& model, const Sample& sample) {
  PreparedRow row;
  row.label = sample.label;
  if (model.arch.uses_text()) row.ids = model_tokens(model, sample);
  if (model.arch.uses_features()) row.features = model_features(model, sample);
  return row;
}

double mean_loss(const TrainedModel& model, const std::vector<PreparedRow>& rows, Rng& rng) {
  if (rows.empty()) return 0.0;
  double total = 0.0;
  for (const auto& r : rows) {
    const auto pass = nn::forward(model.params, model.arch, {r.ids, r.features}, nn::Mode::eval, rng);
    total += bce_loss(pass.probability, r.label);
  }
  return total / static_cast<double>(rows.size());
}

}  // namespace

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { return Error(ErrorCode::kInvalidArgument, what); };
  if (epochs < 1) throw fail("epochs must be >= 1");
  if (batch_size < 1) throw fail("batch_size must be >= 1");
  if (!(val_fraction > 0.0 && val_fraction < 0.5)) throw fail("val_fraction must lie in (0, 0.5)");
  if (!(learning_rate > 0.0)) throw fail("learning_rate must be positive");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw fail("dropout_rate must lie in [0, 1)");
  if (kernel < 1 || filters < 1 || embed_dim < 1 || hidden < 1 || ff_hidden < 1) {
    throw fail("layer sizes must be >= 1");
  }
  if (max_seq_len < kernel) throw fail("max_seq_len must be at least the kernel size");
}

nlohmann::json to_json(const TrainConfig& c) {
  return {
      {"variant", nn::to_string(c.variant)},
      {"epochs", c.epochs},
      {"batch_size", c.batch_size},
      {"learning_rate", c.learning_rate},
      {"adam_beta1", c.adam_beta1},
      {"adam_beta2", c.adam_beta2},
      {"adam_eps", c.adam_eps},
      {"early_stop_patience", c.early_stop_patience},
      {"val_fraction", c.val_fraction},
      {"seed", c.seed},
      {"max_seq_len", c.max_seq_len},
      {"dropout_rate", c.dropout_rate},
      {"embed_dim", c.embed_dim},
      {"filters", c.filters},
      {"kernel", c.kernel},
      {"hidden", c.hidden},
      {"ff_hidden", c.ff_hidden},
      {"min_token_freq", c.min_token_freq},
      {"head", nn::to_string(c.head)},
      {"pad_mode", to_string(c.pad_mode)},
      {"dropout_on_features", c.dropout_on_features},
      {"bigram_count", c.bigram_count},
      {"use_subjectivity", c.use_subjectivity},
  };
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  try {
    c.variant = nn::parse_variant(j.at("variant").get<std::string>());
    c.epochs = j.at("epochs").get<std::size_t>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.adam_beta1 = j.at("adam_beta1").get<double>();
    c.adam_beta2 = j.at("adam_beta2").get<double>();
    c.adam_eps = j.at("adam_eps").get<double>();
    c.early_stop_patience = j.at("early_stop_patience").get<std::size_t>();
    c.val_fraction = j.at("val_fraction").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.max_seq_len = j.at("max_seq_len").get<std::size_t>();
    c.dropout_rate = j.at("dropout_rate").get<double>();
    c.embed_dim = j.at("embed_dim").get<std::size_t>();
    c.filters = j.at("filters").get<std::size_t>();
    c.kernel = j.at("kernel").get<std::size_t>();
    c.hidden = j.at("hidden").get<std::size_t>();
    c.ff_hidden = j.at("ff_hidden").get<std::size_t>();
    c.min_token_freq = j.at("min_token_freq").get<std::size_t>();
    c.head = nn::parse_text_head(j.at("head").get<std::string>());
    c.pad_mode = parse_pad_mode(j.at("pad_mode").get<std::string>());
    c.dropout_on_features = j.at("dropout_on_features").get<bool>();
    c.bigram_count = j.at("bigram_count").get<std::size_t>();
    c.use_subjectivity = j.at("use_subjectivity").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("train config: ") + e.what());
  }
  return c;
}

Sample prepare_sample(const corpus::Document& doc, const features::LexiconSet& lexicons) {
  Sample s;
  s.id = doc.id;
  s.label = doc.label;
  s.tokens = text::tokenize(doc.clean_text).tokens;
  s.elm = features::elm_vector(doc, lexicons);
  s.subjectivity = features::subjectivity(s.tokens, lexicons.sentiment);
  return s;
}

std::vector<Sample> prepare_samples(const corpus::DocumentSet& set, const features::LexiconSet& lexicons) {
  std::vector<Sample> out;
  out.reserve(set.size());
  for (const auto& doc : set.documents()) out.push_back(prepare_sample(doc, lexicons));
  return out;
}

// ---------------------------------------------------------------- vocabulary

Vocabulary::Vocabulary() : words_{"<pad>", "<oov>"} {}

Vocabulary Vocabulary::from_words(std::vector<std::string> words) {
  Vocabulary v;
  v.words_ = std::move(words);
  for (std::size_t i = 2; i < v.words_.size(); ++i) v.index_[v.words_[i]] = static_cast<int>(i);
  return v;
}

Vocabulary Vocabulary::build(std::span<const std::vector<std::string>* const> rows, std::size_t min_freq) {
  std::map<std::string, std::size_t> counts;
  for (const auto* tokens : rows) {
    for (const auto& t : *tokens) ++counts[t];
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [word, n] : counts) {
    if (n >= min_freq) kept.emplace_back(word, n);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> words{"<pad>", "<oov>"};
  for (auto& [word, n] : kept) words.push_back(word);
  return from_words(std::move(words));
}

int Vocabulary::id(const std::string& token) const {
  const auto it = index_.find(token);
  return it == index_.end() ? nn::kOovIndex : it->second;
}

std::vector<int> Vocabulary::encode(std::span<const std::string> tokens, std::size_t max_len,
                                    std::size_t min_len, PadMode mode) const {
  std::vector<int> ids;
  const std::size_t n = std::min(tokens.size(), max_len);
  ids.reserve(std::max(n, min_len));
  for (std::size_t i = 0; i < n; ++i) ids.push_back(id(tokens[i]));
  const std::size_t target = mode == PadMode::fixed ? max_len : std::max(n, min_len);
  ids.resize(std::max(target, min_len), nn::kPadIndex);
  return ids;
}

// ------------------------------------------------------------ early stopping

bool EarlyStopping::update(double val_loss) {
  ++epoch_;
  improved_ = val_loss < best_loss_;
  if (improved_) {
    best_loss_ = val_loss;
    best_epoch_ = epoch_;
    since_best_ = 0;
  } else {
    ++since_best_;
  }
  return patience_ > 0 && since_best_ >= patience_;
}

// ------------------------------------------------------------------ training

std::vector<int> model_tokens(const TrainedModel& model, const Sample& sample) {
  return model.vocab.encode(sample.tokens, model.config.max_seq_len, model.config.kernel,
                            model.config.pad_mode);
}

std::vector<double> model_features(const TrainedModel& model, const Sample& sample) {
  if (!model.arch.uses_features()) return {};
  return model.scaler.transform(raw_feature_row(model, sample));
}

TrainedModel train(std::span<const Sample> rows, const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (rows.empty()) throw Error(ErrorCode::kEmptyTrainingSet, "no training rows");

  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < rows.size(); ++i) by_class[rows[i].label == 1 ? 1 : 0].push_back(i);
  if (by_class[0].empty() || by_class[1].empty()) {
    throw Error(ErrorCode::kSingleClassTrainingSet, "training rows contain a single class");
  }

  // Stratified validation carve-out.
  Rng split_rng = Rng::stream(config.seed, kSplitStream);
  std::vector<char> is_val(rows.size(), 0);
  for (auto& members : by_class) {
    split_rng.shuffle(std::span<std::size_t>(members));
    std::size_t n_val = 0;
    if (members.size() >= 2) {
      n_val = static_cast<std::size_t>(std::llround(config.val_fraction * static_cast<double>(members.size())));
      n_val = std::clamp<std::size_t>(n_val, 1, members.size() - 1);
    }
    for (std::size_t i = 0; i < n_val; ++i) is_val[members[i]] = 1;
  }

  TrainedModel model;
  model.config = config;
  std::vector<const Sample*> fit;
  std::vector<const Sample*> val;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (is_val[i]) {
      val.push_back(&rows[i]);
      model.validation_ids.push_back(rows[i].id);
    } else {
      fit.push_back(&rows[i]);
      model.fit_ids.push_back(rows[i].id);
    }
  }

  nn::Architecture arch;
  arch.variant = config.variant;
  arch.head = config.head;
  arch.embed_dim = config.embed_dim;
  arch.filters = config.filters;
  arch.kernel = config.kernel;
  arch.hidden = config.hidden;
  arch.ff_hidden = config.ff_hidden;
  arch.dropout_rate = config.dropout_rate;
  arch.dropout_on_features = config.dropout_on_features;

  std::vector<const std::vector<std::string>*> fit_tokens;
  for (const auto* s : fit) fit_tokens.push_back(&s->tokens);
  if (arch.uses_text()) model.vocab = Vocabulary::build(fit_tokens, config.min_token_freq);
  arch.vocab_size = model.vocab.size();
  if (config.variant == Variant::combined) {
    model.bigrams = features::select_top_bigrams(fit_tokens, config.bigram_count);
  }
  model.arch = arch;
  if (arch.uses_features()) {
    std::vector<std::vector<double>> feature_rows;
    for (const auto* s : fit) feature_rows.push_back(raw_feature_row(model, *s));
    model.scaler = features::fit_scaler(feature_rows);
    model.arch.feature_dim = model.scaler.width();
  }

  Rng init_rng = Rng::stream(config.seed, kInitStream);
  model.params = nn::initialize(model.arch, init_rng);

  std::vector<PreparedRow> fit_rows;
  std::vector<PreparedRow> val_rows;
  for (const auto* s : fit) fit_rows.push_back(prepare_row(model, *s));
  for (const auto* s : val) val_rows.push_back(prepare_row(model, *s));

  Rng shuffle_rng = Rng::stream(config.seed, kShuffleStream);
  Rng dropout_rng = Rng::stream(config.seed, kDropoutStream);
  nn::ModelParams grads = nn::ModelParams::zeros(model.arch);
  AdamState adam;
  EarlyStopping stopper(config.early_stop_patience);
  nn::ModelParams best = model.params;

  std::vector<std::size_t> order(fit_rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const double scale = 1.0 / static_cast<double>(end - start);
      grads.fill(0.0);
      for (std::size_t b = start; b < end; ++b) {
        const auto& r = fit_rows[order[b]];
        const nn::ModelInput input{r.ids, r.features};
        const auto pass = nn::forward(model.params, model.arch, input, nn::Mode::train, dropout_rng);
        epoch_loss += bce_loss(pass.probability, r.label);
        // d(BCE)/d(logit) for a sigmoid output.
        nn::backward(model.params, model.arch, input, pass,
                     (pass.probability - static_cast<double>(r.label)) * scale, grads);
      }
      adam_step(model.params, grads, adam, config.adam());
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = epoch_loss / static_cast<double>(fit_rows.size());
    if (!std::isfinite(record.train_loss)) {
      throw Error(ErrorCode::kInvalidArgument, "training diverged (non-finite loss) at epoch " +
                                                   std::to_string(epoch));
    }
    record.val_loss = val_rows.empty() ? record.train_loss : mean_loss(model, val_rows, dropout_rng);
    model.history.push_back(record);
    if (on_epoch) on_epoch(record);

    const bool stop = stopper.update(record.val_loss);
    if (stopper.improved()) best = model.params;
    if (stop) break;
  }
  // With early stopping disabled the final epoch's parameters are kept.
  if (config.early_stop_patience > 0) {
    model.params = std::move(best);
    model.best_epoch = stopper.best_epoch();
  } else {
    model.best_epoch = model.history.size();
  }
  return model;
}

double predict(const TrainedModel& model, const Sample& sample) {
  const auto ids = model.arch.uses_text() ? model_tokens(model, sample) : std::vector<int>{};
  const auto feats = model_features(model, sample);
  Rng unused(0);
  return nn::forward(model.params, model.arch, {ids, feats}, nn::Mode::eval, unused).probability;
}

double predict(const TrainedModel& model, const corpus::Document& doc, const features::LexiconSet& lexicons) {
  return predict(model, prepare_sample(doc, lexicons));
}

Evaluation evaluate(const TrainedModel& model, std::span<const Sample> rows) {
  Evaluation e;
  if (rows.empty()) return e;
  std::size_t correct = 0;
  for (const auto& s : rows) {
    const double p = predict(model, s);
    e.loss += bce_loss(p, s.label);
    if ((p >= 0.5 ? 1 : 0) == s.label) ++correct;
  }
  e.loss /= static_cast<double>(rows.size());
  e.accuracy = static_cast<double>(correct) / static_cast<double>(rows.size());
  return e;
}

}  // namespace elmdetect::train

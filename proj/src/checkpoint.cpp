#include "elmdetect/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "elmdetect/error.hpp"
#include "elmdetect/hashing.hpp"

namespace elmdetect {
namespace {

using nlohmann::json;

json arch_to_json(const nn::Architecture& a) {
  return {{"variant", nn::to_string(a.variant)},
          {"head", nn::to_string(a.head)},
          {"vocab_size", a.vocab_size},
          {"embed_dim", a.embed_dim},
          {"filters", a.filters},
          {"kernel", a.kernel},
          {"hidden", a.hidden},
          {"feature_dim", a.feature_dim},
          {"ff_hidden", a.ff_hidden},
          {"dropout_rate", a.dropout_rate},
          {"dropout_on_features", a.dropout_on_features}};
}

nn::Architecture arch_from_json(const json& j) {
  nn::Architecture a;
  a.variant = nn::parse_variant(j.at("variant").get<std::string>());
  a.head = nn::parse_text_head(j.at("head").get<std::string>());
  a.vocab_size = j.at("vocab_size").get<std::size_t>();
  a.embed_dim = j.at("embed_dim").get<std::size_t>();
  a.filters = j.at("filters").get<std::size_t>();
  a.kernel = j.at("kernel").get<std::size_t>();
  a.hidden = j.at("hidden").get<std::size_t>();
  a.feature_dim = j.at("feature_dim").get<std::size_t>();
  a.ff_hidden = j.at("ff_hidden").get<std::size_t>();
  a.dropout_rate = j.at("dropout_rate").get<double>();
  a.dropout_on_features = j.at("dropout_on_features").get<bool>();
  return a;
}

}  // namespace

std::string config_hash(const train::TrainConfig& config) {
  return to_hex(fnv1a(train::to_json(config).dump()));
}

json checkpoint_to_json(const train::TrainedModel& model) {
  json params = json::array();
  model.params.for_each([&](std::string_view name, const nn::Tensor& t) {
    if (t.rank() == 0) return;
    params.push_back({{"name", name},
                      {"shape", t.shape()},
                      {"values", std::vector<double>(t.values().begin(), t.values().end())}});
  });
  json history = json::array();
  for (const auto& r : model.history) {
    history.push_back({{"epoch", r.epoch}, {"train_loss", r.train_loss}, {"val_loss", r.val_loss}});
  }
  json bigrams = json::array();
  for (const auto& [a, b] : model.bigrams) bigrams.push_back({a, b});

  return {{"format", kCheckpointFormat},
          {"version", kCheckpointVersion},
          {"config_hash", config_hash(model.config)},
          {"config", train::to_json(model.config)},
          {"architecture", arch_to_json(model.arch)},
          {"params", std::move(params)},
          {"vocabulary", model.vocab.words()},
          {"scaler", {{"mins", model.scaler.mins()}, {"maxs", model.scaler.maxs()}}},
          {"bigrams", std::move(bigrams)},
          {"history", std::move(history)},
          {"best_epoch", model.best_epoch},
          {"fit_ids", model.fit_ids},
          {"validation_ids", model.validation_ids}};
}

train::TrainedModel checkpoint_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != kCheckpointFormat) {
      throw Error(ErrorCode::kFormat, "not an elmdetect checkpoint");
    }
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw Error(ErrorCode::kFormat, "unsupported checkpoint version " + std::to_string(version));
    }
    train::TrainedModel m;
    m.config = train::train_config_from_json(j.at("config"));
    if (config_hash(m.config) != j.at("config_hash").get<std::string>()) {
      throw Error(ErrorCode::kFormat, "config hash does not match stored config");
    }
    m.arch = arch_from_json(j.at("architecture"));
    m.params = nn::ModelParams::zeros(m.arch);

    const auto& stored = j.at("params");
    std::size_t next = 0;
    m.params.for_each([&](std::string_view name, nn::Tensor& t) {
      if (t.rank() == 0) return;
      if (next >= stored.size()) throw Error(ErrorCode::kFormat, "missing parameter " + std::string(name));
      const auto& p = stored[next++];
      if (p.at("name").get<std::string>() != name) {
        throw Error(ErrorCode::kFormat, "expected parameter " + std::string(name));
      }
      auto shape = p.at("shape").get<std::vector<std::size_t>>();
      auto values = p.at("values").get<std::vector<double>>();
      if (shape != t.shape() || values.size() != t.size()) {
        throw Error(ErrorCode::kFormat, "shape mismatch for " + std::string(name));
      }
      t = nn::Tensor::from(std::move(shape), std::move(values));
    });
    if (next != stored.size()) throw Error(ErrorCode::kFormat, "unexpected extra parameters");

    m.vocab = train::Vocabulary::from_words(j.at("vocabulary").get<std::vector<std::string>>());
    const auto& scaler = j.at("scaler");
    if (!scaler.at("mins").empty()) {
      m.scaler = features::FeatureScaler(scaler.at("mins").get<std::vector<double>>(),
                                         scaler.at("maxs").get<std::vector<double>>());
    }
    for (const auto& b : j.at("bigrams")) m.bigrams.emplace_back(b.at(0).get<std::string>(), b.at(1).get<std::string>());
    for (const auto& r : j.at("history")) {
      m.history.push_back({r.at("epoch").get<std::size_t>(), r.at("train_loss").get<double>(),
                           r.at("val_loss").get<double>()});
    }
    m.best_epoch = j.at("best_epoch").get<std::size_t>();
    m.fit_ids = j.at("fit_ids").get<std::vector<std::string>>();
    m.validation_ids = j.at("validation_ids").get<std::vector<std::string>>();
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("bad checkpoint: ") + e.what());
  }
}

void save_checkpoint(const train::TrainedModel& model, const std::filesystem::path& path) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorCode::kFileNotFound, "cannot write " + tmp.string());
    out << checkpoint_to_json(model).dump() << '\n';
    if (!out) throw Error(ErrorCode::kFileNotFound, "write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

train::TrainedModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("bad checkpoint: ") + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace elmdetect

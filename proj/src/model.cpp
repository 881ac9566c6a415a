#include "elmdetect/model.hpp"

#include <cmath>

#include "elmdetect/error.hpp"

namespace elmdetect::nn {
namespace {

void uniform_fill(Tensor& t, double limit, Rng& rng) {
  for (auto& v : t.values()) v = rng.uniform(-limit, limit);
}

double glorot_limit(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::base: return "base";
    case Variant::features_only: return "features_only";
    case Variant::enhanced: return "enhanced";
    case Variant::combined: return "combined";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  for (const auto v : {Variant::base, Variant::features_only, Variant::enhanced, Variant::combined}) {
    if (to_string(v) == name) return v;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown variant '" + std::string(name) + "'");
}

std::string_view to_string(TextHead h) { return h == TextHead::lstm ? "lstm" : "pool"; }

TextHead parse_text_head(std::string_view name) {
  if (name == "lstm") return TextHead::lstm;
  if (name == "pool") return TextHead::pool;
  throw Error(ErrorCode::kInvalidArgument, "unknown text head '" + std::string(name) + "'");
}

std::size_t Architecture::text_dim() const {
  if (!uses_text()) return 0;
  return head == TextHead::lstm ? hidden : filters;
}

std::size_t Architecture::head_input_dim() const {
  if (variant == Variant::features_only) return ff_hidden;
  return text_dim() + (uses_features() ? feature_dim : 0);
}

ModelParams ModelParams::zeros(const Architecture& arch) {
  ModelParams p;
  if (arch.uses_text()) {
    p.embedding.weights = Tensor({arch.vocab_size, arch.embed_dim});
    p.conv.filters = Tensor({arch.filters, arch.kernel, arch.embed_dim});
    p.conv.bias = Tensor({arch.filters});
    if (arch.head == TextHead::lstm) p.lstm = make_lstm(arch.filters, arch.hidden);
  }
  if (arch.variant == Variant::features_only) p.feature_hidden = make_dense(arch.feature_dim, arch.ff_hidden);
  p.head = make_dense(arch.head_input_dim(), 1);
  return p;
}

bool ModelParams::operator==(const ModelParams& other) const {
  std::vector<const Tensor*> mine;
  std::vector<const Tensor*> theirs;
  for_each([&](std::string_view, const Tensor& t) { mine.push_back(&t); });
  other.for_each([&](std::string_view, const Tensor& t) { theirs.push_back(&t); });
  for (std::size_t i = 0; i < mine.size(); ++i) {
    if (!(*mine[i] == *theirs[i])) return false;
  }
  return true;
}

ModelParams initialize(const Architecture& arch, Rng& rng) {
  ModelParams p = ModelParams::zeros(arch);
  if (arch.uses_text()) {
    uniform_fill(p.embedding.weights, 0.05, rng);
    for (auto& v : p.embedding.weights.row(kPadIndex)) v = 0.0;
    uniform_fill(p.conv.filters,
                 glorot_limit(arch.kernel * arch.embed_dim, arch.kernel * arch.filters), rng);
    if (arch.head == TextHead::lstm) {
      for (std::size_t q = 0; q < 4; ++q) {
        uniform_fill(p.lstm.w_input[q], glorot_limit(arch.filters, arch.hidden), rng);
        uniform_fill(p.lstm.w_hidden[q], glorot_limit(arch.hidden, arch.hidden), rng);
      }
      p.lstm.bias[kForgetGate].fill(1.0);
    }
  }
  if (arch.variant == Variant::features_only) {
    uniform_fill(p.feature_hidden.weights, glorot_limit(arch.feature_dim, arch.ff_hidden), rng);
  }
  uniform_fill(p.head.weights, glorot_limit(arch.head_input_dim(), 1), rng);
  return p;
}

ForwardPass forward(const ModelParams& params, const Architecture& arch, const ModelInput& input,
                    Mode mode, Rng& rng) {
  ForwardPass pass;
  if (arch.uses_features() && input.features.size() != arch.feature_dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "feature vector has " + std::to_string(input.features.size()) + " values, model expects " +
                    std::to_string(arch.feature_dim));
  }

  if (arch.variant == Variant::features_only) {
    pass.ff_pre = dense_forward(params.feature_hidden, input.features);
    pass.z.resize(pass.ff_pre.size());
    for (std::size_t i = 0; i < pass.z.size(); ++i) pass.z[i] = std::max(0.0, pass.ff_pre[i]);
  } else {
    pass.embedded = embed(params.embedding, input.token_ids);
    pass.feature_map = conv1d_relu(params.conv, pass.embedded);
    Tensor text_repr;
    if (arch.head == TextHead::lstm) {
      pass.text_dropout = dropout(pass.feature_map, arch.dropout_rate, mode, rng);
      text_repr = lstm_forward(params.lstm, pass.text_dropout.output, &pass.trace).h;
    } else {
      pass.pooled = max_pool(pass.feature_map);
      pass.text_dropout = dropout(pass.pooled.values, arch.dropout_rate, mode, rng);
      text_repr = pass.text_dropout.output;
    }
    if (arch.uses_features()) {
      const Tensor side = Tensor::from({input.features.size()},
                                       std::vector<double>(input.features.begin(), input.features.end()));
      const double rate = arch.dropout_on_features ? arch.dropout_rate : 0.0;
      pass.feature_dropout = dropout(side, rate, mode, rng);
      const Tensor z = concat_features(text_repr, pass.feature_dropout.output.values());
      pass.z.assign(z.values().begin(), z.values().end());
    } else {
      pass.z.assign(text_repr.values().begin(), text_repr.values().end());
    }
  }
  pass.logit = dense_logit(params.head, pass.z);
  pass.probability = sigmoid(pass.logit);
  return pass;
}

void backward(const ModelParams& params, const Architecture& arch, const ModelInput& input,
              const ForwardPass& pass, double grad_logit, ModelParams& grads) {
  const auto grad_z = dense_backward(params.head, pass.z, std::span<const double>(&grad_logit, 1), grads.head);

  if (arch.variant == Variant::features_only) {
    std::vector<double> grad_pre(grad_z.size());
    for (std::size_t i = 0; i < grad_z.size(); ++i) grad_pre[i] = pass.ff_pre[i] > 0.0 ? grad_z[i] : 0.0;
    dense_backward(params.feature_hidden, input.features, grad_pre, grads.feature_hidden);
    return;
  }

  const std::size_t text_dim = arch.text_dim();
  const Tensor grad_text =
      Tensor::from({text_dim}, std::vector<double>(grad_z.begin(), grad_z.begin() + static_cast<std::ptrdiff_t>(text_dim)));

  Tensor grad_map;
  if (arch.head == TextHead::lstm) {
    const Tensor grad_dropped =
        lstm_backward(params.lstm, pass.text_dropout.output, pass.trace, grad_text, grads.lstm);
    grad_map = dropout_backward(pass.text_dropout, grad_dropped);
  } else {
    const Tensor grad_pooled = dropout_backward(pass.text_dropout, grad_text);
    grad_map = max_pool_backward(pass.pooled, pass.feature_map.dim(0), grad_pooled);
  }
  const Tensor grad_embedded =
      conv1d_relu_backward(params.conv, pass.embedded, pass.feature_map, grad_map, grads.conv);
  embed_backward(input.token_ids, grad_embedded, grads.embedding);
}

}  // namespace elmdetect::nn

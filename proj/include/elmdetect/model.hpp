#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "elmdetect/layers.hpp"

namespace elmdetect::nn {

enum class Variant { base, features_only, enhanced, combined };

std::string_view to_string(Variant v);
// Throws kInvalidArgument on an unknown name.
Variant parse_variant(std::string_view name);

// lstm: embed -> conv+ReLU -> dropout -> LSTM -> [h, features] -> dense.
// pool: embed -> conv+ReLU -> max-pool -> dropout -> [m, features] -> dense.
enum class TextHead { lstm, pool };

std::string_view to_string(TextHead h);
TextHead parse_text_head(std::string_view name);

struct Architecture {
  Variant variant = Variant::base;
  TextHead head = TextHead::lstm;
  std::size_t vocab_size = 2;
  std::size_t embed_dim = 100;
  std::size_t filters = 64;
  std::size_t kernel = 3;
  std::size_t hidden = 100;
  std::size_t feature_dim = 0;  // width of the scaled side-feature vector
  std::size_t ff_hidden = 32;   // features_only hidden layer
  double dropout_rate = 0.5;
  bool dropout_on_features = false;

  bool uses_text() const { return variant != Variant::features_only; }
  bool uses_features() const { return variant != Variant::base; }
  std::size_t text_dim() const;
  std::size_t head_input_dim() const;
};

// All learnable tensors. Layers a variant does not use stay empty.
struct ModelParams {
  EmbeddingTable embedding;
  ConvLayer conv;
  LstmLayer lstm;
  DenseLayer feature_hidden;
  DenseHead head;

  // Zero-filled tensors with the shapes `arch` needs (also used for grads).
  static ModelParams zeros(const Architecture& arch);

  // Visits (name, tensor) pairs in a fixed declaration order.
  template <typename F>
  void for_each(F&& f) {
    visit(*this, f);
  }
  template <typename F>
  void for_each(F&& f) const {
    visit(*this, f);
  }

  void fill(double v) {
    for_each([v](std::string_view, Tensor& t) { t.fill(v); });
  }
  bool operator==(const ModelParams& other) const;

 private:
  template <typename Self, typename F>
  static void visit(Self& self, F& f) {
    static const std::string kInput[4] = {"lstm.W_ii", "lstm.W_if", "lstm.W_ig", "lstm.W_io"};
    static const std::string kHidden[4] = {"lstm.W_hi", "lstm.W_hf", "lstm.W_hg", "lstm.W_ho"};
    static const std::string kBias[4] = {"lstm.b_i", "lstm.b_f", "lstm.b_g", "lstm.b_o"};
    f(std::string_view("embedding.W"), self.embedding.weights);
    f(std::string_view("conv.F"), self.conv.filters);
    f(std::string_view("conv.b"), self.conv.bias);
    for (std::size_t q = 0; q < 4; ++q) f(std::string_view(kInput[q]), self.lstm.w_input[q]);
    for (std::size_t q = 0; q < 4; ++q) f(std::string_view(kHidden[q]), self.lstm.w_hidden[q]);
    for (std::size_t q = 0; q < 4; ++q) f(std::string_view(kBias[q]), self.lstm.bias[q]);
    f(std::string_view("features.W"), self.feature_hidden.weights);
    f(std::string_view("features.b"), self.feature_hidden.bias);
    f(std::string_view("head.W_z"), self.head.weights);
    f(std::string_view("head.b_z"), self.head.bias);
  }
};

// Embeddings U(-0.05, 0.05) with a zero padding row; conv, LSTM and dense
// weights U(+-sqrt(6 / (fan_in + fan_out))); forget-gate bias 1, other
// biases 0.
ModelParams initialize(const Architecture& arch, Rng& rng);

struct ModelInput {
  std::span<const int> token_ids;
  std::span<const double> features;  // already scaled
};

// Intermediate values kept for the backward pass.
struct ForwardPass {
  double logit = 0.0;
  double probability = 0.5;

  Tensor embedded;
  Tensor feature_map;
  PoolResult pooled;
  DropoutResult text_dropout;
  LstmTrace trace;
  DropoutResult feature_dropout;
  std::vector<double> z;
  std::vector<double> ff_pre;
};

ForwardPass forward(const ModelParams& params, const Architecture& arch, const ModelInput& input,
                    Mode mode, Rng& rng);

// Accumulates dL/dparams into grads given dL/dlogit.
void backward(const ModelParams& params, const Architecture& arch, const ModelInput& input,
              const ForwardPass& pass, double grad_logit, ModelParams& grads);

}  // namespace elmdetect::nn

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "elmdetect/layers.hpp"
#include "elmdetect/model.hpp"
#include "elmdetect/optimizer.hpp"
#include "elmdetect/rng.hpp"

// Central finite-difference checks of every analytic backward pass.
namespace elmdetect::testing {

using nn::Tensor;

inline constexpr double kFiniteDifferenceStep = 1e-5;
inline constexpr double kGradientTolerance = 1e-4;

struct GradReport {
  std::size_t checked = 0;
  std::size_t skipped = 0;  // perturbation crossed a ReLU kink or changed an argmax
  double max_rel_error = 0.0;
  std::string worst;

  void merge(const GradReport& o) {
    checked += o.checked;
    skipped += o.skipped;
    if (o.max_rel_error > max_rel_error) {
      max_rel_error = o.max_rel_error;
      worst = o.worst;
    }
  }
  bool ok() const { return checked > 0 && max_rel_error < kGradientTolerance; }
};

inline double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-7});
}

using Signature = std::vector<std::int64_t>;
inline Signature no_signature() { return {}; }

// Perturbs each element of `param` by +-eps; elements whose perturbation
// changes the discrete signature are skipped as non-smooth.
inline GradReport check_tensor(const std::string& name, Tensor& param, const Tensor& analytic,
                               const std::function<double()>& loss,
                               const std::function<Signature()>& signature,
                               const std::function<bool(std::size_t)>& include = {}) {
  GradReport r;
  const double eps = kFiniteDifferenceStep;
  const Signature base = signature();
  for (std::size_t i = 0; i < param.size(); ++i) {
    if (include && !include(i)) continue;
    const double orig = param[i];
    param[i] = orig + eps;
    const double plus = loss();
    const Signature sig_plus = signature();
    param[i] = orig - eps;
    const double minus = loss();
    const Signature sig_minus = signature();
    param[i] = orig;
    if (sig_plus != base || sig_minus != base) {
      ++r.skipped;
      continue;
    }
    const double numeric = (plus - minus) / (2.0 * eps);
    const double err = relative_error(analytic[i], numeric);
    ++r.checked;
    if (err > r.max_rel_error) {
      r.max_rel_error = err;
      r.worst = name + "[" + std::to_string(i) + "]";
    }
  }
  return r;
}

inline Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng, double scale = 1.0) {
  Tensor t(std::move(shape));
  for (auto& v : t.values()) v = rng.uniform(-scale, scale);
  return t;
}

inline double weighted_sum(const Tensor& out, const Tensor& weights) {
  double s = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) s += out[i] * weights[i];
  return s;
}

inline Signature positive_mask(const Tensor& t) {
  Signature s;
  for (double v : t.values()) s.push_back(v > 0.0);
  return s;
}

inline GradReport check_embedding(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t vocab = 7, dim = 4;
  nn::EmbeddingTable table{random_tensor({vocab, dim}, rng)};
  for (auto& v : table.weights.row(nn::kPadIndex)) v = 0.0;
  std::vector<int> ids;
  for (int i = 0; i < 9; ++i) ids.push_back(static_cast<int>(rng.below(vocab)));
  ids.push_back(nn::kPadIndex);
  const Tensor w = random_tensor({ids.size(), dim}, rng);

  nn::EmbeddingTable grads{Tensor({vocab, dim})};
  nn::embed_backward(ids, w, grads);
  GradReport r;
  // The padding row is frozen: its analytic gradient must be exactly zero.
  for (double g : grads.weights.row(nn::kPadIndex)) {
    if (g != 0.0) r.merge({1, 0, 1.0, "embedding pad row"});
  }
  r.merge(check_tensor(
      "embedding.W", table.weights, grads.weights, [&] { return weighted_sum(nn::embed(table, ids), w); },
      no_signature, [&](std::size_t i) { return i / dim != static_cast<std::size_t>(nn::kPadIndex); }));
  return r;
}

inline GradReport check_conv(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t len = 7, dim = 4, filters = 5, kernel = 3;
  nn::ConvLayer layer{random_tensor({filters, kernel, dim}, rng), random_tensor({filters}, rng, 0.2)};
  Tensor input = random_tensor({len, dim}, rng);
  const Tensor w = random_tensor({len - kernel + 1, filters}, rng);

  const Tensor out = nn::conv1d_relu(layer, input);
  nn::ConvLayer grads{Tensor({filters, kernel, dim}), Tensor({filters})};
  const Tensor grad_input = nn::conv1d_relu_backward(layer, input, out, w, grads);
  auto loss = [&] { return weighted_sum(nn::conv1d_relu(layer, input), w); };
  auto sig = [&] { return positive_mask(nn::conv1d_relu(layer, input)); };
  GradReport r;
  r.merge(check_tensor("conv.F", layer.filters, grads.filters, loss, sig));
  r.merge(check_tensor("conv.b", layer.bias, grads.bias, loss, sig));
  r.merge(check_tensor("conv.input", input, grad_input, loss, sig));
  return r;
}

inline GradReport check_max_pool(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t len = 6, filters = 4;
  Tensor map = random_tensor({len, filters}, rng);
  const Tensor w = random_tensor({filters}, rng);
  const auto pooled = nn::max_pool(map);
  const Tensor grad = nn::max_pool_backward(pooled, len, w);
  auto loss = [&] { return weighted_sum(nn::max_pool(map).values, w); };
  auto sig = [&] {
    const auto p = nn::max_pool(map);
    return Signature(p.argmax.begin(), p.argmax.end());
  };
  return check_tensor("max_pool.input", map, grad, loss, sig);
}

// Eval mode is the identity; train mode is checked with its mask held fixed
// by replaying the same generator state.
inline GradReport check_dropout(std::uint64_t seed) {
  Rng rng(seed);
  Tensor x = random_tensor({5, 3}, rng);
  const Tensor w = random_tensor({5, 3}, rng);
  GradReport r;
  for (auto mode : {nn::Mode::eval, nn::Mode::train}) {
    Rng mask_rng(seed ^ 0x5eedULL);
    const auto result = nn::dropout(x, 0.5, mode, mask_rng);
    const Tensor grad = nn::dropout_backward(result, w);
    auto loss = [&] {
      Rng replay(seed ^ 0x5eedULL);
      return weighted_sum(nn::dropout(x, 0.5, mode, replay).output, w);
    };
    r.merge(check_tensor(mode == nn::Mode::eval ? "dropout_eval.input" : "dropout_train.input", x, grad, loss,
                         no_signature));
  }
  return r;
}

inline GradReport check_lstm(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t steps = 5, in = 3, hidden = 4;
  nn::LstmLayer layer = nn::make_lstm(in, hidden);
  for (std::size_t q = 0; q < 4; ++q) {
    layer.w_input[q] = random_tensor({hidden, in}, rng);
    layer.w_hidden[q] = random_tensor({hidden, hidden}, rng);
    layer.bias[q] = random_tensor({hidden}, rng, 0.5);
  }
  Tensor seq = random_tensor({steps, in}, rng);
  const Tensor wh = random_tensor({hidden}, rng);
  const Tensor wc = random_tensor({hidden}, rng);

  nn::LstmTrace trace;
  nn::lstm_forward(layer, seq, &trace);
  nn::LstmLayer grads = nn::make_lstm(in, hidden);
  const Tensor grad_seq = nn::lstm_backward(layer, seq, trace, wh, grads, &wc);
  auto loss = [&] {
    const auto s = nn::lstm_forward(layer, seq);
    return weighted_sum(s.h, wh) + weighted_sum(s.c, wc);
  };
  static const char* kGate[4] = {"i", "f", "g", "o"};
  GradReport r;
  for (std::size_t q = 0; q < 4; ++q) {
    r.merge(check_tensor(std::string("lstm.W_i") + kGate[q], layer.w_input[q], grads.w_input[q], loss, no_signature));
    r.merge(check_tensor(std::string("lstm.W_h") + kGate[q], layer.w_hidden[q], grads.w_hidden[q], loss, no_signature));
    r.merge(check_tensor(std::string("lstm.b_") + kGate[q], layer.bias[q], grads.bias[q], loss, no_signature));
  }
  r.merge(check_tensor("lstm.input", seq, grad_seq, loss, no_signature));
  return r;
}

inline GradReport check_dense_sigmoid(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t in = 6;
  nn::DenseHead head{random_tensor({1, in}, rng), random_tensor({1}, rng, 0.3)};
  Tensor z = random_tensor({in}, rng);
  const int label = static_cast<int>(rng.below(2));
  auto loss = [&] { return train::bce_loss(nn::dense_sigmoid(head, z.values()), label); };
  const double p = nn::dense_sigmoid(head, z.values());
  const double grad_prob = label == 1 ? -1.0 / p : 1.0 / (1.0 - p);
  nn::DenseHead grads = nn::make_dense(in, 1);
  const auto grad_z = nn::dense_sigmoid_backward(head, z.values(), grad_prob, grads);
  GradReport r;
  r.merge(check_tensor("head.W_z", head.weights, grads.weights, loss, no_signature));
  r.merge(check_tensor("head.b_z", head.bias, grads.bias, loss, no_signature));
  r.merge(check_tensor("head.z", z, Tensor::from({in}, grad_z), loss, no_signature));
  return r;
}

inline GradReport check_concat(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t hidden = 4, extra = 10;
  Tensor h = random_tensor({hidden}, rng);
  Tensor e = random_tensor({extra}, rng);
  const Tensor w = random_tensor({hidden + extra}, rng);
  auto loss = [&] { return weighted_sum(nn::concat_features(h, e.values()), w); };
  const auto [grad_h, grad_e] = nn::concat_backward(w, hidden);
  GradReport r;
  r.merge(check_tensor("concat.h", h, grad_h, loss, no_signature));
  r.merge(check_tensor("concat.e", e, Tensor::from({extra}, grad_e), loss, no_signature));
  return r;
}

// Whole-model check through forward/backward for one variant and head, with
// dropout active and its masks replayed from a fixed generator state.
inline GradReport check_model(std::uint64_t seed, nn::Variant variant, nn::TextHead head) {
  Rng rng(seed);
  nn::Architecture arch;
  arch.variant = variant;
  arch.head = head;
  arch.vocab_size = 8;
  arch.embed_dim = 4;
  arch.filters = 3;
  arch.kernel = 3;
  arch.hidden = 3;
  arch.ff_hidden = 4;
  arch.dropout_rate = 0.5;
  arch.dropout_on_features = true;
  arch.feature_dim = !arch.uses_features() ? 0 : variant == nn::Variant::combined ? 13 : 10;

  Rng init(seed + 1);
  nn::ModelParams params = nn::initialize(arch, init);
  // Larger weights than the initializer so gradients are not vanishingly small.
  params.for_each([&](std::string_view name, Tensor& t) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (name == "embedding.W" && i < arch.embed_dim) continue;
      t[i] = rng.uniform(-0.8, 0.8);
    }
  });
  std::vector<int> ids;
  for (int i = 0; i < 6; ++i) ids.push_back(static_cast<int>(rng.below(arch.vocab_size)));
  std::vector<double> features(arch.feature_dim);
  for (auto& f : features) f = rng.uniform();
  const int label = static_cast<int>(rng.below(2));
  const nn::ModelInput input{ids, features};
  const std::uint64_t dropout_seed = seed ^ 0xd0d0ULL;

  auto run = [&] {
    Rng drop(dropout_seed);
    return nn::forward(params, arch, input, nn::Mode::train, drop);
  };
  auto loss = [&] { return train::bce_loss(run().probability, label); };
  auto sig = [&] {
    const auto pass = run();
    Signature s = positive_mask(pass.feature_map);
    for (auto a : pass.pooled.argmax) s.push_back(static_cast<std::int64_t>(a));
    for (double v : pass.ff_pre) s.push_back(v > 0.0);
    return s;
  };

  const auto pass = run();
  nn::ModelParams grads = nn::ModelParams::zeros(arch);
  nn::backward(params, arch, input, pass, pass.probability - label, grads);

  std::vector<Tensor*> analytic;
  grads.for_each([&](std::string_view, Tensor& t) { analytic.push_back(&t); });
  GradReport r;
  std::size_t index = 0;
  params.for_each([&](std::string_view name, Tensor& t) {
    const Tensor& g = *analytic[index++];
    if (t.empty()) return;
    const bool is_embedding = name == "embedding.W";
    r.merge(check_tensor(std::string(nn::to_string(variant)) + "/" + std::string(name), t, g, loss, sig,
                         [&](std::size_t i) { return !is_embedding || i >= arch.embed_dim; }));
  });
  return r;
}

}  // namespace elmdetect::testing

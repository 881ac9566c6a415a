#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "elmdetect/model.hpp"
#include "elmdetect/tensor.hpp"

namespace elmdetect::train {

struct AdamHyper {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<nn::Tensor> m;
  std::vector<nn::Tensor> v;
  std::int64_t t = 0;
};

// One bias-corrected Adam update over a list of parameter tensors. The
// state is lazily shaped on the first call. Throws kShapeMismatch.
void adam_step(std::span<nn::Tensor* const> params, std::span<const nn::Tensor* const> grads,
               AdamState& state, const AdamHyper& hyper);

void adam_step(nn::ModelParams& params, const nn::ModelParams& grads, AdamState& state,
               const AdamHyper& hyper);

// -[y ln p + (1 - y) ln(1 - p)] with p clamped to [1e-7, 1 - 1e-7].
double bce_loss(double probability, int label);

}  // namespace elmdetect::train

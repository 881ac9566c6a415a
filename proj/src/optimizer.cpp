#include "elmdetect/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "elmdetect/error.hpp"

namespace elmdetect::train {

void adam_step(std::span<nn::Tensor* const> params, std::span<const nn::Tensor* const> grads,
               AdamState& state, const AdamHyper& hyper) {
  if (params.size() != grads.size()) {
    throw Error(ErrorCode::kShapeMismatch, "parameter and gradient lists differ in length");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->same_shape(*grads[i])) {
      throw Error(ErrorCode::kShapeMismatch, "parameter " + params[i]->shape_string() +
                                                 " vs gradient " + grads[i]->shape_string());
    }
  }
  if (state.m.empty()) {
    for (const auto* p : params) {
      state.m.emplace_back(p->shape());
      state.v.emplace_back(p->shape());
    }
  } else if (state.m.size() != params.size()) {
    throw Error(ErrorCode::kShapeMismatch, "optimizer state does not match parameter list");
  }

  ++state.t;
  const double t = static_cast<double>(state.t);
  const double correction1 = 1.0 - std::pow(hyper.beta1, t);
  const double correction2 = 1.0 - std::pow(hyper.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    double* theta = params[i]->data();
    const double* g = grads[i]->data();
    double* m = state.m[i].data();
    double* v = state.v[i].data();
    for (std::size_t j = 0; j < params[i]->size(); ++j) {
      m[j] = hyper.beta1 * m[j] + (1.0 - hyper.beta1) * g[j];
      v[j] = hyper.beta2 * v[j] + (1.0 - hyper.beta2) * g[j] * g[j];
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      theta[j] -= hyper.learning_rate * m_hat / (std::sqrt(v_hat) + hyper.epsilon);
    }
  }
}

void adam_step(nn::ModelParams& params, const nn::ModelParams& grads, AdamState& state,
               const AdamHyper& hyper) {
  std::vector<nn::Tensor*> p;
  std::vector<const nn::Tensor*> g;
  params.for_each([&](std::string_view, nn::Tensor& t) { p.push_back(&t); });
  grads.for_each([&](std::string_view, const nn::Tensor& t) { g.push_back(&t); });
  adam_step(p, g, state, hyper);
}

double bce_loss(double probability, int label) {
  const double p = std::clamp(probability, 1e-7, 1.0 - 1e-7);
  return label == 1 ? -std::log(p) : -std::log(1.0 - p);
}

}  // namespace elmdetect::train

#include "elmdetect/layers.hpp"

#include <cmath>

#include "elmdetect/error.hpp"

namespace elmdetect::nn {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// ---------------------------------------------------------------- embedding

Tensor embed(const EmbeddingTable& table, std::span<const int> ids) {
  const std::size_t d = table.dim();
  Tensor out({ids.size(), d});
  for (std::size_t j = 0; j < ids.size(); ++j) {
    if (ids[j] < 0 || static_cast<std::size_t>(ids[j]) >= table.vocab_size()) {
      throw Error(ErrorCode::kIndexOutOfVocab, "token id " + std::to_string(ids[j]) +
                                                   " outside vocabulary of " +
                                                   std::to_string(table.vocab_size()));
    }
    const auto src = table.weights.row(static_cast<std::size_t>(ids[j]));
    std::copy(src.begin(), src.end(), out.row(j).begin());
  }
  return out;
}

void embed_backward(std::span<const int> ids, const Tensor& grad_output, EmbeddingTable& grads) {
  const std::size_t d = grads.dim();
  for (std::size_t j = 0; j < ids.size(); ++j) {
    if (ids[j] == kPadIndex) continue;
    axpy(1.0, grad_output.row(j).data(), grads.weights.row(static_cast<std::size_t>(ids[j])).data(), d);
  }
}

// ------------------------------------------------------------- convolution

Tensor conv1d_relu(const ConvLayer& layer, const Tensor& input) {
  const std::size_t h = layer.kernel();
  const std::size_t d = layer.in_dim();
  const std::size_t nf = layer.filter_count();
  if (input.rank() != 2 || input.dim(1) != d) {
    throw Error(ErrorCode::kDimensionMismatch, "conv input " + input.shape_string() +
                                                   ", expected width " + std::to_string(d));
  }
  const std::size_t len = input.dim(0);
  if (len < h) {
    throw Error(ErrorCode::kSequenceTooShort,
                "sequence length " + std::to_string(len) + " < kernel " + std::to_string(h));
  }
  const std::size_t windows = len - h + 1;
  const std::size_t span = h * d;
  Tensor out({windows, nf});
  for (std::size_t j = 0; j < windows; ++j) {
    // Rows j..j+h-1 of a row-major matrix are one contiguous window.
    const double* window = input.data() + j * d;
    for (std::size_t f = 0; f < nf; ++f) {
      const double pre = dot(layer.filters.data() + f * span, window, span) + layer.bias[f];
      out.at(j, f) = pre > 0.0 ? pre : 0.0;
    }
  }
  return out;
}

Tensor conv1d_relu_backward(const ConvLayer& layer, const Tensor& input, const Tensor& output,
                            const Tensor& grad_output, ConvLayer& grads) {
  const std::size_t h = layer.kernel();
  const std::size_t d = layer.in_dim();
  const std::size_t nf = layer.filter_count();
  const std::size_t windows = output.dim(0);
  const std::size_t span = h * d;
  Tensor grad_input(input.shape());
  for (std::size_t j = 0; j < windows; ++j) {
    const double* window = input.data() + j * d;
    double* grad_window = grad_input.data() + j * d;
    for (std::size_t f = 0; f < nf; ++f) {
      if (output.at(j, f) <= 0.0) continue;
      const double g = grad_output.at(j, f);
      if (g == 0.0) continue;
      axpy(g, window, grads.filters.data() + f * span, span);
      axpy(g, layer.filters.data() + f * span, grad_window, span);
      grads.bias[f] += g;
    }
  }
  return grad_input;
}

// ----------------------------------------------------------------- pooling

PoolResult max_pool(const Tensor& feature_map) {
  if (feature_map.rank() != 2 || feature_map.dim(0) == 0) {
    throw Error(ErrorCode::kEmptySequence, "max_pool needs at least one position");
  }
  const std::size_t len = feature_map.dim(0);
  const std::size_t nf = feature_map.dim(1);
  PoolResult out{Tensor({nf}), std::vector<std::size_t>(nf, 0)};
  for (std::size_t f = 0; f < nf; ++f) {
    double best = feature_map.at(0, f);
    std::size_t where = 0;
    for (std::size_t j = 1; j < len; ++j) {
      if (feature_map.at(j, f) > best) {
        best = feature_map.at(j, f);
        where = j;
      }
    }
    out.values[f] = best;
    out.argmax[f] = where;
  }
  return out;
}

Tensor max_pool_backward(const PoolResult& pooled, std::size_t length, const Tensor& grad_output) {
  const std::size_t nf = pooled.argmax.size();
  Tensor grad({length, nf});
  for (std::size_t f = 0; f < nf; ++f) grad.at(pooled.argmax[f], f) = grad_output[f];
  return grad;
}

// ----------------------------------------------------------------- dropout

DropoutResult dropout(const Tensor& x, double rate, Mode mode, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "dropout rate must lie in [0, 1)");
  }
  if (mode == Mode::eval || rate == 0.0) return {x, {}};
  DropoutResult out{x, std::vector<double>(x.size())};
  const double keep_scale = 1.0 / (1.0 - rate);
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.scale[i] = rng.uniform() < rate ? 0.0 : keep_scale;
    out.output[i] *= out.scale[i];
  }
  return out;
}

Tensor dropout_backward(const DropoutResult& result, const Tensor& grad_output) {
  if (result.scale.empty()) return grad_output;
  Tensor grad = grad_output;
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] *= result.scale[i];
  return grad;
}

// -------------------------------------------------------------------- LSTM

LstmLayer make_lstm(std::size_t input_dim, std::size_t hidden) {
  LstmLayer layer;
  for (std::size_t q = 0; q < 4; ++q) {
    layer.w_input[q] = Tensor({hidden, input_dim});
    layer.w_hidden[q] = Tensor({hidden, hidden});
    layer.bias[q] = Tensor({hidden});
  }
  return layer;
}

LstmState lstm_forward(const LstmLayer& layer, const Tensor& seq, LstmTrace* trace) {
  const std::size_t hidden = layer.hidden();
  const std::size_t in = layer.input_dim();
  if (seq.rank() != 2 || seq.dim(1) != in) {
    throw Error(ErrorCode::kDimensionMismatch,
                "lstm input " + seq.shape_string() + ", expected width " + std::to_string(in));
  }
  const std::size_t steps = seq.dim(0);
  if (trace) {
    for (auto& g : trace->gates) g = Tensor({steps, hidden});
    trace->cells = Tensor({steps + 1, hidden});
    trace->hiddens = Tensor({steps + 1, hidden});
  }
  std::vector<double> c(hidden, 0.0);
  std::vector<double> h(hidden, 0.0);
  std::array<std::vector<double>, 4> act;
  for (auto& a : act) a.resize(hidden);

  for (std::size_t t = 0; t < steps; ++t) {
    const double* x = seq.data() + t * in;
    for (std::size_t q = 0; q < 4; ++q) {
      const Tensor& wi = layer.w_input[q];
      const Tensor& wh = layer.w_hidden[q];
      for (std::size_t r = 0; r < hidden; ++r) {
        const double pre = dot(wi.data() + r * in, x, in) + dot(wh.data() + r * hidden, h.data(), hidden) +
                           layer.bias[q][r];
        act[q][r] = q == kCellGate ? std::tanh(pre) : sigmoid(pre);
      }
    }
    for (std::size_t r = 0; r < hidden; ++r) {
      c[r] = act[kForgetGate][r] * c[r] + act[kInputGate][r] * act[kCellGate][r];
      h[r] = act[kOutputGate][r] * std::tanh(c[r]);
    }
    if (trace) {
      for (std::size_t q = 0; q < 4; ++q) std::copy(act[q].begin(), act[q].end(), trace->gates[q].row(t).begin());
      std::copy(c.begin(), c.end(), trace->cells.row(t + 1).begin());
      std::copy(h.begin(), h.end(), trace->hiddens.row(t + 1).begin());
    }
  }
  return {Tensor::from({hidden}, std::move(c)), Tensor::from({hidden}, std::move(h))};
}

Tensor lstm_backward(const LstmLayer& layer, const Tensor& seq, const LstmTrace& trace,
                     const Tensor& grad_h, LstmLayer& grads, const Tensor* grad_c) {
  const std::size_t hidden = layer.hidden();
  const std::size_t in = layer.input_dim();
  const std::size_t steps = seq.dim(0);
  Tensor grad_seq(seq.shape());

  std::vector<double> dh(grad_h.values().begin(), grad_h.values().end());
  std::vector<double> dc(hidden, 0.0);
  if (grad_c) std::copy(grad_c->values().begin(), grad_c->values().end(), dc.begin());
  std::array<std::vector<double>, 4> dpre;
  for (auto& d : dpre) d.resize(hidden);
  std::vector<double> dh_prev(hidden);

  for (std::size_t t = steps; t-- > 0;) {
    const auto i_g = trace.gates[kInputGate].row(t);
    const auto f_g = trace.gates[kForgetGate].row(t);
    const auto g_g = trace.gates[kCellGate].row(t);
    const auto o_g = trace.gates[kOutputGate].row(t);
    const auto c_t = trace.cells.row(t + 1);
    const auto c_prev = trace.cells.row(t);
    const double* h_prev = trace.hiddens.row(t).data();
    const double* x = seq.data() + t * in;

    for (std::size_t r = 0; r < hidden; ++r) {
      const double tc = std::tanh(c_t[r]);
      const double d_o = dh[r] * tc;
      const double dct = dc[r] + dh[r] * o_g[r] * (1.0 - tc * tc);
      const double d_i = dct * g_g[r];
      const double d_g = dct * i_g[r];
      const double d_f = dct * c_prev[r];
      dc[r] = dct * f_g[r];
      dpre[kInputGate][r] = d_i * i_g[r] * (1.0 - i_g[r]);
      dpre[kForgetGate][r] = d_f * f_g[r] * (1.0 - f_g[r]);
      dpre[kCellGate][r] = d_g * (1.0 - g_g[r] * g_g[r]);
      dpre[kOutputGate][r] = d_o * o_g[r] * (1.0 - o_g[r]);
    }

    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
    double* dx = grad_seq.data() + t * in;
    for (std::size_t q = 0; q < 4; ++q) {
      for (std::size_t r = 0; r < hidden; ++r) {
        const double g = dpre[q][r];
        if (g == 0.0) continue;
        grads.bias[q][r] += g;
        axpy(g, x, grads.w_input[q].data() + r * in, in);
        axpy(g, h_prev, grads.w_hidden[q].data() + r * hidden, hidden);
        axpy(g, layer.w_input[q].data() + r * in, dx, in);
        axpy(g, layer.w_hidden[q].data() + r * hidden, dh_prev.data(), hidden);
      }
    }
    dh.swap(dh_prev);
  }
  return grad_seq;
}

// ------------------------------------------------------------------- dense

DenseLayer make_dense(std::size_t in, std::size_t out) {
  return {Tensor({out, in}), Tensor({out})};
}

std::vector<double> dense_forward(const DenseLayer& layer, std::span<const double> x) {
  const std::size_t in = layer.in_dim();
  if (x.size() != in) {
    throw Error(ErrorCode::kDimensionMismatch, "dense input width " + std::to_string(x.size()) +
                                                   ", expected " + std::to_string(in));
  }
  std::vector<double> out(layer.out_dim());
  for (std::size_t r = 0; r < out.size(); ++r) {
    out[r] = dot(layer.weights.data() + r * in, x.data(), in) + layer.bias[r];
  }
  return out;
}

std::vector<double> dense_backward(const DenseLayer& layer, std::span<const double> x,
                                   std::span<const double> grad_pre, DenseLayer& grads) {
  const std::size_t in = layer.in_dim();
  std::vector<double> grad_x(in, 0.0);
  for (std::size_t r = 0; r < grad_pre.size(); ++r) {
    const double g = grad_pre[r];
    grads.bias[r] += g;
    axpy(g, x.data(), grads.weights.data() + r * in, in);
    axpy(g, layer.weights.data() + r * in, grad_x.data(), in);
  }
  return grad_x;
}

double dense_logit(const DenseHead& head, std::span<const double> z) {
  if (head.out_dim() != 1) throw Error(ErrorCode::kDimensionMismatch, "dense head must have one output");
  return dense_forward(head, z)[0];
}

double dense_sigmoid(const DenseHead& head, std::span<const double> z) {
  return sigmoid(dense_logit(head, z));
}

double dense_sigmoid(const DenseHead& head, const Tensor& z) { return dense_sigmoid(head, z.values()); }

std::vector<double> dense_sigmoid_backward(const DenseHead& head, std::span<const double> z,
                                           double grad_prob, DenseHead& grads) {
  const double p = dense_sigmoid(head, z);
  const double grad_logit = grad_prob * p * (1.0 - p);
  return dense_backward(head, z, std::span<const double>(&grad_logit, 1), grads);
}

Tensor concat_features(const Tensor& h, std::span<const double> e) {
  Tensor out({h.size() + e.size()});
  std::copy(h.values().begin(), h.values().end(), out.values().begin());
  std::copy(e.begin(), e.end(), out.values().begin() + static_cast<std::ptrdiff_t>(h.size()));
  return out;
}

std::pair<Tensor, std::vector<double>> concat_backward(const Tensor& grad_output,
                                                       std::size_t hidden_size) {
  const auto g = grad_output.values();
  Tensor grad_h = Tensor::from({hidden_size}, std::vector<double>(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(hidden_size)));
  return {std::move(grad_h), std::vector<double>(g.begin() + static_cast<std::ptrdiff_t>(hidden_size), g.end())};
}

}  // namespace elmdetect::nn

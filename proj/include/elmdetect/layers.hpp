#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "elmdetect/rng.hpp"
#include "elmdetect/tensor.hpp"

// Forward passes and their exact backward passes. Every backward function
// *accumulates* parameter gradients into a structure of the same type as the
// layer and returns the gradient with respect to the layer input.
namespace elmdetect::nn {

inline constexpr int kPadIndex = 0;
inline constexpr int kOovIndex = 1;

enum class Mode { train, eval };

double sigmoid(double x);

// ---------------------------------------------------------------- embedding

struct EmbeddingTable {
  Tensor weights;  // vocab_size x dim; row kPadIndex stays zero

  std::size_t vocab_size() const { return weights.empty() ? 0 : weights.dim(0); }
  std::size_t dim() const { return weights.empty() ? 0 : weights.dim(1); }
};

// Row j of the result is the table row ids[j]. Throws kIndexOutOfVocab.
Tensor embed(const EmbeddingTable& table, std::span<const int> ids);
// The padding row never receives gradient.
void embed_backward(std::span<const int> ids, const Tensor& grad_output, EmbeddingTable& grads);

// ------------------------------------------------------------- convolution

struct ConvLayer {
  Tensor filters;  // filters x kernel x in_dim
  Tensor bias;     // filters

  std::size_t filter_count() const { return filters.empty() ? 0 : filters.dim(0); }
  std::size_t kernel() const { return filters.empty() ? 0 : filters.dim(1); }
  std::size_t in_dim() const { return filters.empty() ? 0 : filters.dim(2); }
};

// Valid 1-D convolution over the sequence axis followed by ReLU:
// out(j, f) = max(0, <filters[f], input[j .. j+kernel)> + bias[f]).
// Output is (len - kernel + 1) x filters. Throws kSequenceTooShort.
Tensor conv1d_relu(const ConvLayer& layer, const Tensor& input);
Tensor conv1d_relu_backward(const ConvLayer& layer, const Tensor& input, const Tensor& output,
                            const Tensor& grad_output, ConvLayer& grads);

// ----------------------------------------------------------------- pooling

struct PoolResult {
  Tensor values;                    // filters
  std::vector<std::size_t> argmax;  // first maximal position per filter
};

// Per-column maximum of a len x filters map. Throws kEmptySequence.
PoolResult max_pool(const Tensor& feature_map);
Tensor max_pool_backward(const PoolResult& pooled, std::size_t length, const Tensor& grad_output);

// ----------------------------------------------------------------- dropout

struct DropoutResult {
  Tensor output;
  std::vector<double> scale;  // 0 or 1/(1-rate) per element; empty when identity
};

// Inverted dropout in train mode, identity in eval mode or at rate 0.
DropoutResult dropout(const Tensor& x, double rate, Mode mode, Rng& rng);
Tensor dropout_backward(const DropoutResult& result, const Tensor& grad_output);

// -------------------------------------------------------------------- LSTM

enum Gate : std::size_t { kInputGate = 0, kForgetGate = 1, kCellGate = 2, kOutputGate = 3 };

struct LstmLayer {
  std::array<Tensor, 4> w_input;   // hidden x input_dim, indexed by Gate
  std::array<Tensor, 4> w_hidden;  // hidden x hidden
  std::array<Tensor, 4> bias;      // hidden

  std::size_t hidden() const { return bias[0].size(); }
  std::size_t input_dim() const { return w_input[0].empty() ? 0 : w_input[0].dim(1); }
};

LstmLayer make_lstm(std::size_t input_dim, std::size_t hidden);

struct LstmState {
  Tensor c;
  Tensor h;
};

// Activations recorded by the forward pass for backpropagation through time.
struct LstmTrace {
  std::array<Tensor, 4> gates;  // steps x hidden, post-activation
  Tensor cells;                 // (steps + 1) x hidden, row 0 = initial state
  Tensor hiddens;               // (steps + 1) x hidden
};

// Runs the gate recurrences from a zero state over seq (steps x input_dim)
// and returns the final state.
LstmState lstm_forward(const LstmLayer& layer, const Tensor& seq, LstmTrace* trace = nullptr);
// grad_h (and optionally grad_c) are gradients w.r.t. the final state.
Tensor lstm_backward(const LstmLayer& layer, const Tensor& seq, const LstmTrace& trace,
                     const Tensor& grad_h, LstmLayer& grads, const Tensor* grad_c = nullptr);

// ------------------------------------------------------------------- dense

struct DenseLayer {
  Tensor weights;  // out x in
  Tensor bias;     // out

  std::size_t out_dim() const { return bias.size(); }
  std::size_t in_dim() const { return weights.empty() ? 0 : weights.dim(1); }
};

DenseLayer make_dense(std::size_t in, std::size_t out);

// Affine map, no activation. Throws kDimensionMismatch.
std::vector<double> dense_forward(const DenseLayer& layer, std::span<const double> x);
// Returns the gradient w.r.t. x.
std::vector<double> dense_backward(const DenseLayer& layer, std::span<const double> x,
                                   std::span<const double> grad_pre, DenseLayer& grads);

// A single-output dense layer followed by a sigmoid.
using DenseHead = DenseLayer;

double dense_logit(const DenseHead& head, std::span<const double> z);
double dense_sigmoid(const DenseHead& head, std::span<const double> z);
double dense_sigmoid(const DenseHead& head, const Tensor& z);
// grad_prob is dL/d(probability); returns dL/dz.
std::vector<double> dense_sigmoid_backward(const DenseHead& head, std::span<const double> z,
                                           double grad_prob, DenseHead& grads);

// [h, e] with h first.
Tensor concat_features(const Tensor& h, std::span<const double> e);
// Splits a gradient of the concatenation back into its two parts.
std::pair<Tensor, std::vector<double>> concat_backward(const Tensor& grad_output,
                                                       std::size_t hidden_size);

}  // namespace elmdetect::nn

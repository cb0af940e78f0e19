#pragma once

#include <string>
#include <vector>

#include "storycut/lstm_cell.hpp"
#include "storycut/param_store.hpp"
#include "storycut/rng.hpp"
#include "storycut/tensor.hpp"

namespace storycut {

// A stack of peephole LSTM layers over a frame sequence. Two wirings:
//  - stacked: layer k>0 consumes h of layer k-1,
//  - fast_forward: layer k>0 consumes [h ; f] of layer k-1, where f is the
//    4H-wide hidden block (gate pre-activations before recurrence/bias).
struct StackConfig {
  index_t input_dim = 0;
  std::vector<index_t> hidden;  // one width per layer
  bool fast_forward = false;

  index_t layers() const { return static_cast<index_t>(hidden.size()); }
  index_t top_hidden() const { return hidden.back(); }
  index_t layer_input_dim(index_t k) const {
    if (k == 0) return input_dim;
    const index_t hp = hidden[static_cast<std::size_t>(k - 1)];
    return fast_forward ? hp + 4 * hp : hp;
  }
  void validate() const;
};

struct StackCache {
  index_t T = 0;
  // inputs[k] holds T rows of width layer_input_dim(k), row-major.
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<CellStepCache>> steps;  // [layer][t]
};

// Creates the layer parameters under `prefix` ("l0.W_f", "l0.W_h", "l0.b",
// "l0.w_g", "l0.w_o", "l1...."), in that order, and initialises them:
// uniform [-s, s] with s = 1/sqrt(fan_in), except biases start at zero with
// the forget-gate quarter set to 1.
void stack_create_params(const StackConfig& cfg, ParamStore& store, const std::string& prefix);
void stack_init_params(const StackConfig& cfg, ParamStore& store, const std::string& prefix,
                       Rng& rng);

// Runs the stack over features (T x input_dim) from a zero initial state.
// top_h receives T x H_top. If top_f is non-null it receives the top layer's
// hidden blocks (T x 4*H_top). cache (if non-null) records everything the
// backward pass needs.
void stack_forward(const StackConfig& cfg, const ParamStore& store, const std::string& prefix,
                   const Tensor2& features, Tensor2& top_h, Tensor2* top_f = nullptr,
                   StackCache* cache = nullptr);

// Backpropagates d_top_h (T x H_top) through the cached run, accumulating
// parameter grads; optionally also writes d_features (T x input_dim).
void stack_backward(const StackConfig& cfg, ParamStore& store, const std::string& prefix,
                    const StackCache& cache, const Tensor2& d_top_h,
                    Tensor2* d_features = nullptr);

}  // namespace storycut

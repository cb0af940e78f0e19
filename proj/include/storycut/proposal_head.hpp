#pragma once

#include <vector>

#include "storycut/param_store.hpp"
#include "storycut/recurrent_stack.hpp"
#include "storycut/rng.hpp"
#include "storycut/supervision.hpp"
#include "storycut/tensor.hpp"

namespace storycut {

// Proposal scorer/refiner: a deep recurrent stack (fast-forward wiring by
// default) runs over a proposal's frame features; the step outputs are
// max-pooled over time and two small linear heads produce a story-vs-not
// logit and a pair of boundary offsets (fractions of the proposal length).
struct HeadConfig {
  index_t feature_dim = 0;
  index_t hidden = 32;
  index_t num_layers = 5;
  bool fast_forward = true;

  void validate() const;
  StackConfig stack() const;
};

struct HeadOutput {
  double story_logit = 0.0;
  double p_story = 0.0;
  BoundaryOffsets offsets;
};

struct HeadCache {
  StackCache stack;
  std::vector<double> pooled;     // max over time per hidden dim
  std::vector<index_t> argmax_t;  // earliest step attaining the max
};

class HeadModel {
 public:
  explicit HeadModel(HeadConfig cfg);

  const HeadConfig& config() const { return cfg_; }
  ParamStore& params() { return store_; }
  const ParamStore& params() const { return store_; }

  void init_params(Rng& rng);

  // features: L x feature_dim with L >= 1.
  HeadOutput forward(const Tensor2& features, HeadCache* cache = nullptr) const;

  // dlogit is the gradient on the raw classification logit; doffsets on the
  // two regression outputs.
  void backward(const HeadCache& cache, double dlogit, const BoundaryOffsets& doffsets);

 private:
  HeadConfig cfg_;
  ParamStore store_;
};

}  // namespace storycut

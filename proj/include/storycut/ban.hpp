#pragma once

#include <array>
#include <vector>

#include "storycut/lstm_cell.hpp"
#include "storycut/param_store.hpp"
#include "storycut/rng.hpp"
#include "storycut/supervision.hpp"
#include "storycut/tensor.hpp"

namespace storycut {

// Frame scorer: a 7-frame window around each frame runs through a single
// peephole LSTM; the step outputs are average-pooled and a linear layer
// produces 4 category logits (within / background / begin / end).
inline constexpr index_t kBanWindow = 7;

struct BanConfig {
  index_t feature_dim = 0;
  index_t hidden = 64;

  void validate() const;
};

struct BanCache {
  std::vector<CellStepCache> steps;        // one per window position
  std::vector<double> inputs;              // kBanWindow x feature_dim, row-major
  std::vector<double> hbar;                // pooled hidden state
  std::array<double, kNumFrameCategories> logits{};
};

class BanModel {
 public:
  explicit BanModel(BanConfig cfg);

  const BanConfig& config() const { return cfg_; }
  ParamStore& params() { return store_; }
  const ParamStore& params() const { return store_; }

  void init_params(Rng& rng);

  // window must be kBanWindow x feature_dim.
  std::array<double, kNumFrameCategories> window_logits(const Tensor2& window,
                                                        BanCache* cache = nullptr) const;
  std::array<double, kNumFrameCategories> window_probs(const Tensor2& window) const;

  void window_backward(const BanCache& cache,
                       const std::array<double, kNumFrameCategories>& dlogits);

 private:
  BanConfig cfg_;
  ParamStore store_;
};

std::array<double, kNumFrameCategories> softmax4(
    const std::array<double, kNumFrameCategories>& logits);

// The 7-frame window centered on `center`, replicate-padded at the edges.
Tensor2 ban_window(const Tensor2& features, index_t center);

}  // namespace storycut

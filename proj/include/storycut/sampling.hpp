#pragma once

#include <array>
#include <span>
#include <vector>

#include "storycut/rng.hpp"
#include "storycut/supervision.hpp"
#include "storycut/tensor.hpp"

namespace storycut {

struct SamplingPlan {
  // Within : Background : Begin : End draw ratio for frame batches.
  std::array<index_t, kNumFrameCategories> ban_ratio{6, 6, 1, 1};
  // Positive : Negative draw ratio for proposal batches.
  std::array<index_t, 2> head_pos_neg{1, 3};

  void validate() const;  // every entry >= 1
};

// Splits `total` into per-class counts proportional to `ratio`, rounding by
// largest remainder (ties to the lower index) so the counts sum to total.
std::vector<index_t> largest_remainder_counts(std::span<const index_t> ratio, index_t total);

struct FrameRef {
  index_t video = 0;
  index_t frame = 0;
};

// Draws batch_size frames with replacement, per-category counts from the
// 6:6:1:1 plan. Every category must be populated somewhere in the dataset.
std::vector<FrameRef> sample_ban_minibatch(const std::vector<std::vector<FrameLabel>>& targets,
                                           const SamplingPlan& plan, index_t batch_size, Rng& rng);

struct ProposalRef {
  index_t video = 0;
  index_t proposal = 0;
};

// Draws batch_size proposals with replacement at the 1:3 positive:negative
// ratio; Ignore-labeled proposals are never drawn.
std::vector<ProposalRef> sample_head_minibatch(
    const std::vector<std::vector<LabeledProposal>>& labeled, const SamplingPlan& plan,
    index_t batch_size, Rng& rng);

}  // namespace storycut

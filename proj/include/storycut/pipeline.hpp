#pragma once

#include <vector>

#include "storycut/ban.hpp"
#include "storycut/interval.hpp"
#include "storycut/proposal_head.hpp"
#include "storycut/tensor.hpp"

namespace storycut {

// Thresholds for the whole-video inference chain.
struct PipelineConfig {
  index_t merge_max_gap = 5;
  double proposal_nms_iou = 0.8;
  double detection_nms_iou = 0.5;
  double augment_rho = 0.25;
  // When on, a gap between two WithinStory runs is merged only if no frame
  // inside it has Begin or End as its argmax label.
  bool boundary_gating = true;
  std::vector<index_t> sw_scales{30, 60, 120, 240};
  double sw_stride_fraction = 0.5;

  void validate() const;
};

// Per-frame category probabilities, T x 4, rows sum to 1.
struct FrameScores {
  Tensor2 probs;

  index_t num_frames() const { return probs.rows; }
};

using Detection = ScoredInterval;

// Evaluates the window scorer on every frame (7-frame replicate-padded
// windows).
FrameScores score_frames(const BanModel& ban, const Tensor2& features);

// argmax labels -> WithinStory runs -> gap merge (gated by default) ->
// mean-Within score -> NMS.
std::vector<ScoredInterval> generate_proposals(const FrameScores& scores,
                                               const PipelineConfig& cfg);

// Pads each proposal by ceil(rho * length) on both sides, clipped to the
// video; scores and order preserved.
std::vector<ScoredInterval> augment_proposals(const std::vector<ScoredInterval>& proposals,
                                              double rho, index_t num_frames);

// Fixed-scale sliding windows (fully inside the video; a scale longer than
// the video contributes one clipped window), all scored 1.0.
std::vector<ScoredInterval> sliding_window_proposals(index_t num_frames,
                                                     const std::vector<index_t>& scales,
                                                     double stride_fraction);

// Shifts each boundary by offset * length (rounded), clips, and falls back
// to the unrefined proposal when the result would be empty.
Interval apply_refinement(const Interval& proposal, double delta_start, double delta_end,
                          index_t num_frames);

// Full chain: score -> proposals -> augment -> head rescoring/refinement ->
// detection NMS -> sort by descending score.
std::vector<Detection> truncate_video(const BanModel& ban, const HeadModel& head,
                                      const Tensor2& features, const PipelineConfig& cfg);

}  // namespace storycut

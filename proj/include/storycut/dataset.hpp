#pragma once

#include <string>
#include <vector>

#include "storycut/interval.hpp"
#include "storycut/tensor.hpp"

namespace storycut {

// Per-frame features for one video (one frame per second), T x D.
struct FrameFeatureSequence {
  std::string video_id;
  Tensor2 values;

  index_t num_frames() const { return values.rows; }
  index_t dim() const { return values.cols; }
};

// Ground-truth story intervals for one video.
struct VideoAnnotation {
  std::string video_id;
  index_t num_frames = 0;
  std::vector<Interval> stories;

  // stories must be valid, sorted, pairwise disjoint, inside [0, num_frames).
  void validate() const;
};

// Proposals or detections for one video, annotation-shaped plus scores.
struct ScoredVideoProposals {
  std::string video_id;
  index_t num_frames = 0;
  std::vector<ScoredInterval> items;
};

}  // namespace storycut

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "storycut/dataset.hpp"

namespace storycut {

// Seeded generator for synthetic long videos: background noise frames with
// per-story feature signatures, plus sharper transitions on a leading block
// of "audio" channels at story boundaries.
struct SynthConfig {
  index_t num_videos = 0;
  index_t frames_mean = 600;
  double stories_per_video_mean = 5.0;
  index_t story_len_mean = 60;
  index_t feature_dim = 32;
  double signal_strength = 3.0;   // easy >= 2.0, hard <= 0.5
  double boundary_spike = 4.0;
  index_t audio_channels = 8;
  std::uint64_t seed = 0;

  void validate() const;  // rejects geometry that cannot fit the stories
};

std::vector<std::pair<FrameFeatureSequence, VideoAnnotation>> synth_generate(
    const SynthConfig& cfg);

}  // namespace storycut

#include "storycut/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "storycut/errors.hpp"
#include "storycut/rng.hpp"

namespace storycut {

namespace {

constexpr index_t kMinGap = 6;       // background frames between stories
constexpr index_t kEdgeMargin = 3;   // background frames at each video end
constexpr index_t kMinStoryLen = 8;

std::string video_name(index_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "video_%04lld", static_cast<long long>(v));
  return buf;
}

}  // namespace

void SynthConfig::validate() const {
  if (num_videos < 0) throw config_error("synth: num_videos must be nonnegative");
  if (frames_mean < 1) throw config_error("synth: frames_mean must be positive");
  if (!(stories_per_video_mean > 0.0))
    throw config_error("synth: stories_per_video_mean must be positive");
  if (story_len_mean < kMinStoryLen)
    throw config_error("synth: story_len_mean must be at least " + std::to_string(kMinStoryLen));
  if (feature_dim < 1) throw config_error("synth: feature_dim must be positive");
  if (!(signal_strength >= 0.0)) throw config_error("synth: signal_strength must be nonnegative");
  if (!(boundary_spike >= 0.0)) throw config_error("synth: boundary_spike must be nonnegative");
  if (audio_channels < 0 || audio_channels > feature_dim)
    throw config_error("synth: audio_channels must be in [0, feature_dim]");
  // Require ~30% headroom over the expected footprint so sampled videos can
  // almost always fit their sampled stories without degenerate squeezing.
  const double footprint = 2.0 * double(kEdgeMargin) +
                           stories_per_video_mean * double(story_len_mean + kMinGap) * 1.3;
  if (double(frames_mean) < footprint)
    throw config_error("synth: frames_mean " + std::to_string(frames_mean) +
                       " cannot fit ~" + std::to_string(stories_per_video_mean) +
                       " stories of mean length " + std::to_string(story_len_mean) +
                       " (need at least " + std::to_string(index_t(std::ceil(footprint))) + ")");
}

std::vector<std::pair<FrameFeatureSequence, VideoAnnotation>> synth_generate(
    const SynthConfig& cfg) {
  cfg.validate();
  const index_t D = cfg.feature_dim;

  // Global +-1 channel pattern shared by all stories; per-story signatures
  // are random perturbations around it so that one linear direction
  // separates story frames from background.
  Rng pattern_rng(mix_seed(cfg.seed, 0));
  std::vector<double> global_pattern(static_cast<std::size_t>(D));
  for (double& g : global_pattern) g = pattern_rng.uniform() < 0.5 ? -1.0 : 1.0;

  std::vector<std::pair<FrameFeatureSequence, VideoAnnotation>> out;
  out.reserve(static_cast<std::size_t>(cfg.num_videos));

  for (index_t v = 0; v < cfg.num_videos; ++v) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(v) + 1));

    const index_t min_frames = 2 * kEdgeMargin + kMinStoryLen;
    const index_t T = std::max<index_t>(
        min_frames,
        static_cast<index_t>(std::llround(rng.normal(double(cfg.frames_mean),
                                                     double(cfg.frames_mean) / 8.0))));

    auto n_stories = static_cast<index_t>(
        std::max<std::uint64_t>(1, rng.poisson(cfg.stories_per_video_mean)));

    std::vector<index_t> lengths;
    for (index_t s = 0; s < n_stories; ++s)
      lengths.push_back(std::max<index_t>(
          kMinStoryLen,
          static_cast<index_t>(std::llround(rng.log_normal(double(cfg.story_len_mean), 0.25)))));

    // Shrink to fit: drop the longest story while the footprint exceeds T;
    // a single remaining story is truncated instead.
    auto footprint = [&]() {
      index_t total = 2 * kEdgeMargin + kMinGap * (index_t(lengths.size()) - 1);
      for (index_t l : lengths) total += l;
      return total;
    };
    while (footprint() > T && lengths.size() > 1)
      lengths.erase(std::max_element(lengths.begin(), lengths.end()));
    if (footprint() > T) lengths[0] = T - 2 * kEdgeMargin;
    n_stories = static_cast<index_t>(lengths.size());

    // Spread the slack uniformly over the n+1 gaps (before, between, after).
    std::vector<index_t> extra(static_cast<std::size_t>(n_stories) + 1, 0);
    for (index_t left = T - footprint(); left > 0; --left)
      ++extra[static_cast<std::size_t>(rng.uniform_index(extra.size()))];

    VideoAnnotation ann;
    ann.video_id = video_name(v);
    ann.num_frames = T;
    index_t cursor = kEdgeMargin + extra[0];
    for (index_t s = 0; s < n_stories; ++s) {
      const index_t start = cursor;
      const index_t end = start + lengths[static_cast<std::size_t>(s)];
      ann.stories.push_back(Interval{start, end});
      cursor = end + kMinGap + extra[static_cast<std::size_t>(s) + 1];
    }
    ann.validate();

    std::vector<std::vector<double>> signatures(static_cast<std::size_t>(n_stories));
    for (auto& sig : signatures) {
      sig.resize(static_cast<std::size_t>(D));
      for (double& x : sig) x = rng.normal();
    }

    FrameFeatureSequence seq;
    seq.video_id = ann.video_id;
    seq.values = Tensor2(T, D);
    for (double& x : seq.values.data) x = rng.normal();

    for (index_t s = 0; s < n_stories; ++s) {
      const Interval story = ann.stories[static_cast<std::size_t>(s)];
      const auto& sig = signatures[static_cast<std::size_t>(s)];
      for (index_t t = story.start; t < story.end; ++t) {
        double* row = seq.values.row(t);
        for (index_t d = 0; d < D; ++d)
          row[d] += cfg.signal_strength *
                    (0.7 * global_pattern[static_cast<std::size_t>(d)] +
                     0.7 * sig[static_cast<std::size_t>(d)]);
      }
      // Sharp "audio" transitions one frame around each endpoint.
      for (index_t t = story.start - 1; t <= story.start + 1; ++t) {
        if (t < 0 || t >= T) continue;
        double* row = seq.values.row(t);
        for (index_t d = 0; d < cfg.audio_channels; ++d) row[d] += cfg.boundary_spike;
      }
      for (index_t t = story.end - 2; t <= story.end; ++t) {
        if (t < 0 || t >= T) continue;
        double* row = seq.values.row(t);
        for (index_t d = 0; d < cfg.audio_channels; ++d) row[d] -= cfg.boundary_spike;
      }
    }

    out.emplace_back(std::move(seq), std::move(ann));
  }
  return out;
}

}  // namespace storycut

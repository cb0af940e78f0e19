#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "storycut/interval.hpp"

namespace storycut {

// Per-frame training category. Enum order matches the score-row layout and
// is the tie-break priority (lower index wins).
enum class FrameLabel : int {
  WithinStory = 0,
  Background = 1,
  BeginBoundary = 2,
  EndBoundary = 3,
};
inline constexpr int kNumFrameCategories = 4;

enum class ProposalLabel : int { Positive, Negative, Ignore };

struct BoundaryOffsets {
  double start = 0.0;
  double end = 0.0;
  bool operator==(const BoundaryOffsets&) const = default;
};

struct LabeledProposal {
  Interval proposal;
  ProposalLabel label = ProposalLabel::Negative;
  std::optional<Interval> matched_gt;       // present iff Positive
  std::optional<BoundaryOffsets> targets;   // present iff Positive
};

// Labels every frame of a video: frames within +-halfwidth of a story start
// become BeginBoundary (clipped to the video), analogously end-1 becomes
// EndBoundary, remaining story frames WithinStory, everything else
// Background. When the begin and end windows of a very short story collide,
// frames closer to the start take Begin (ties included), the rest End.
std::vector<FrameLabel> frame_targets(std::int64_t num_frames, const std::vector<Interval>& stories,
                                      std::int64_t boundary_halfwidth = 1);

// IoU-based assignment: max IoU > hi -> Positive (argmax gt attached, ties by
// earliest gt start), < lo -> Negative, otherwise Ignore. Positive proposals
// carry normalized regression targets against the matched gt.
std::vector<LabeledProposal> assign_proposal_labels(const std::vector<Interval>& proposals,
                                                    const std::vector<Interval>& gt,
                                                    double hi = 0.7, double lo = 0.3);

// t_s = (gt.start - proposal.start) / L, t_e = (gt.end - proposal.end) / L.
BoundaryOffsets regression_targets(const Interval& proposal, const Interval& matched_gt);

}  // namespace storycut

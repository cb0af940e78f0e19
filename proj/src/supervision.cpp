#include "storycut/supervision.hpp"

#include <algorithm>
#include <stdexcept>

namespace storycut {

std::vector<FrameLabel> frame_targets(std::int64_t num_frames, const std::vector<Interval>& stories,
                                      std::int64_t boundary_halfwidth) {
  if (num_frames < 0) throw std::invalid_argument("frame_targets: negative num_frames");
  std::vector<Interval> sorted = stories;
  std::sort(sorted.begin(), sorted.end(),
            [](const Interval& a, const Interval& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const Interval& s = sorted[i];
    if (!s.valid() || s.end > num_frames)
      throw std::invalid_argument("frame_targets: story out of bounds");
    if (i > 0 && sorted[i].start < sorted[i - 1].end)
      throw std::invalid_argument("frame_targets: overlapping stories");
  }

  std::vector<FrameLabel> labels(static_cast<std::size_t>(num_frames), FrameLabel::Background);
  for (const Interval& s : sorted)
    for (std::int64_t f = s.start; f < s.end; ++f)
      labels[static_cast<std::size_t>(f)] = FrameLabel::WithinStory;

  const std::int64_t hw = boundary_halfwidth;
  for (const Interval& s : sorted) {
    const std::int64_t last = s.end - 1;
    const std::int64_t b_lo = std::max<std::int64_t>(0, s.start - hw);
    const std::int64_t b_hi = std::min(num_frames - 1, s.start + hw);
    const std::int64_t e_lo = std::max<std::int64_t>(0, last - hw);
    const std::int64_t e_hi = std::min(num_frames - 1, last + hw);
    if (b_hi >= e_lo) {
      // windows collide: split by distance, begin keeps the tie
      for (std::int64_t f = b_lo; f <= e_hi; ++f)
        labels[static_cast<std::size_t>(f)] =
            (f - s.start <= last - f) ? FrameLabel::BeginBoundary : FrameLabel::EndBoundary;
    } else {
      for (std::int64_t f = b_lo; f <= b_hi; ++f)
        labels[static_cast<std::size_t>(f)] = FrameLabel::BeginBoundary;
      for (std::int64_t f = e_lo; f <= e_hi; ++f)
        labels[static_cast<std::size_t>(f)] = FrameLabel::EndBoundary;
    }
  }
  return labels;
}

std::vector<LabeledProposal> assign_proposal_labels(const std::vector<Interval>& proposals,
                                                    const std::vector<Interval>& gt,
                                                    double hi, double lo) {
  if (!(hi > lo)) throw std::invalid_argument("assign_proposal_labels: hi must exceed lo");
  std::vector<LabeledProposal> out;
  out.reserve(proposals.size());
  for (const Interval& p : proposals) {
    LabeledProposal lp;
    lp.proposal = p;
    double best = -1.0;
    const Interval* best_gt = nullptr;
    for (const Interval& g : gt) {
      const double v = iou(p, g);
      if (v > best || (v == best && best_gt && g.start < best_gt->start)) {
        best = v;
        best_gt = &g;
      }
    }
    if (best_gt && best > hi) {
      lp.label = ProposalLabel::Positive;
      lp.matched_gt = *best_gt;
      lp.targets = regression_targets(p, *best_gt);
    } else if (!best_gt || best < lo) {
      lp.label = ProposalLabel::Negative;
    } else {
      lp.label = ProposalLabel::Ignore;
    }
    out.push_back(std::move(lp));
  }
  return out;
}

BoundaryOffsets regression_targets(const Interval& proposal, const Interval& matched_gt) {
  const double len = static_cast<double>(proposal.length());
  return BoundaryOffsets{static_cast<double>(matched_gt.start - proposal.start) / len,
                         static_cast<double>(matched_gt.end - proposal.end) / len};
}

}  // namespace storycut

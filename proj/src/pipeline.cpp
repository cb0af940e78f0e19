#include "storycut/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "storycut/errors.hpp"

namespace storycut {

void PipelineConfig::validate() const {
  if (merge_max_gap < 0) throw config_error("pipeline: merge_max_gap must be nonnegative");
  if (!(proposal_nms_iou > 0.0 && proposal_nms_iou <= 1.0))
    throw config_error("pipeline: proposal_nms_iou must be in (0,1]");
  if (!(detection_nms_iou > 0.0 && detection_nms_iou <= 1.0))
    throw config_error("pipeline: detection_nms_iou must be in (0,1]");
  if (!(augment_rho >= 0.0)) throw config_error("pipeline: augment_rho must be nonnegative");
  if (sw_scales.empty()) throw config_error("pipeline: sw_scales must be nonempty");
  for (index_t s : sw_scales)
    if (s < 1) throw config_error("pipeline: sw_scales entries must be >= 1");
  if (!(sw_stride_fraction > 0.0 && sw_stride_fraction <= 1.0))
    throw config_error("pipeline: sw_stride_fraction must be in (0,1]");
}

FrameScores score_frames(const BanModel& ban, const Tensor2& features) {
  if (features.rows < 1) throw std::invalid_argument("score_frames: empty sequence");
  FrameScores out;
  out.probs = Tensor2(features.rows, kNumFrameCategories);
  for (index_t t = 0; t < features.rows; ++t) {
    const auto probs = ban.window_probs(ban_window(features, t));
    std::copy(probs.begin(), probs.end(), out.probs.row(t));
  }
  return out;
}

namespace {

index_t argmax_label(const double* row) {
  index_t best = 0;
  for (index_t c = 1; c < kNumFrameCategories; ++c)
    if (row[c] > row[best]) best = c;  // strict: ties keep the lower index
  return best;
}

}  // namespace

std::vector<ScoredInterval> generate_proposals(const FrameScores& scores,
                                               const PipelineConfig& cfg) {
  cfg.validate();
  const index_t T = scores.num_frames();
  if (scores.probs.cols != kNumFrameCategories)
    throw std::invalid_argument("generate_proposals: scores must have 4 columns");

  std::vector<index_t> labels(static_cast<std::size_t>(T));
  for (index_t t = 0; t < T; ++t) labels[static_cast<std::size_t>(t)] = argmax_label(scores.probs.row(t));

  const auto within = static_cast<index_t>(FrameLabel::WithinStory);
  const auto begin_b = static_cast<index_t>(FrameLabel::BeginBoundary);
  const auto end_b = static_cast<index_t>(FrameLabel::EndBoundary);

  // Maximal WithinStory runs, merged on the fly: a gap of at most
  // merge_max_gap frames is bridged unless gating is on and some frame in it
  // is argmax-labeled Begin or End.
  std::vector<Interval> merged;
  index_t t = 0;
  while (t < T) {
    if (labels[static_cast<std::size_t>(t)] != within) {
      ++t;
      continue;
    }
    index_t run_end = t + 1;
    while (run_end < T && labels[static_cast<std::size_t>(run_end)] == within) ++run_end;

    bool fused = false;
    if (!merged.empty()) {
      const index_t gap_lo = merged.back().end;
      if (t - gap_lo <= cfg.merge_max_gap) {
        bool blocked = false;
        if (cfg.boundary_gating) {
          for (index_t g = gap_lo; g < t && !blocked; ++g) {
            const index_t lab = labels[static_cast<std::size_t>(g)];
            blocked = lab == begin_b || lab == end_b;
          }
        }
        if (!blocked) {
          merged.back().end = run_end;
          fused = true;
        }
      }
    }
    if (!fused) merged.push_back(Interval{t, run_end});
    t = run_end;
  }

  std::vector<ScoredInterval> scored;
  scored.reserve(merged.size());
  for (const Interval& m : merged) {
    double sum = 0.0;
    for (index_t f = m.start; f < m.end; ++f)
      sum += scores.probs.at(f, within);
    scored.push_back(ScoredInterval{m, sum / double(m.length())});
  }
  return nms(std::move(scored), cfg.proposal_nms_iou);
}

std::vector<ScoredInterval> augment_proposals(const std::vector<ScoredInterval>& proposals,
                                              double rho, index_t num_frames) {
  if (!(rho >= 0.0)) throw std::invalid_argument("augment_proposals: rho must be nonnegative");
  std::vector<ScoredInterval> out;
  out.reserve(proposals.size());
  for (const ScoredInterval& p : proposals) {
    if (!p.interval.valid() || p.interval.end > num_frames)
      throw std::invalid_argument("augment_proposals: proposal out of bounds");
    const auto pad = static_cast<index_t>(std::ceil(rho * double(p.interval.length())));
    out.push_back(ScoredInterval{Interval{std::max<index_t>(0, p.interval.start - pad),
                                          std::min<index_t>(num_frames, p.interval.end + pad)},
                                 p.score});
  }
  return out;
}

std::vector<ScoredInterval> sliding_window_proposals(index_t num_frames,
                                                     const std::vector<index_t>& scales,
                                                     double stride_fraction) {
  if (scales.empty()) throw std::invalid_argument("sliding_window_proposals: no scales");
  if (num_frames < 1) throw std::invalid_argument("sliding_window_proposals: empty video");
  if (!(stride_fraction > 0.0 && stride_fraction <= 1.0))
    throw std::invalid_argument("sliding_window_proposals: stride_fraction must be in (0,1]");

  std::vector<ScoredInterval> out;
  for (index_t L : scales) {
    if (L < 1) throw std::invalid_argument("sliding_window_proposals: scale must be >= 1");
    if (L > num_frames) {
      out.push_back(ScoredInterval{Interval{0, num_frames}, 1.0});
      continue;
    }
    const auto stride =
        std::max<index_t>(1, static_cast<index_t>(std::ceil(stride_fraction * double(L))));
    for (index_t s = 0; s + L <= num_frames; s += stride)
      out.push_back(ScoredInterval{Interval{s, s + L}, 1.0});
  }
  return out;
}

Interval apply_refinement(const Interval& proposal, double delta_start, double delta_end,
                          index_t num_frames) {
  if (!proposal.valid() || proposal.end > num_frames)
    throw std::invalid_argument("apply_refinement: invalid proposal");
  const double L = double(proposal.length());
  auto s = static_cast<index_t>(std::llround(double(proposal.start) + delta_start * L));
  auto e = static_cast<index_t>(std::llround(double(proposal.end) + delta_end * L));
  s = std::clamp<index_t>(s, 0, num_frames);
  e = std::clamp<index_t>(e, 0, num_frames);
  if (s >= e) return proposal;  // degenerate refinement: keep the input
  return Interval{s, e};
}

std::vector<Detection> truncate_video(const BanModel& ban, const HeadModel& head,
                                      const Tensor2& features, const PipelineConfig& cfg) {
  cfg.validate();
  const index_t T = features.rows;
  const FrameScores scores = score_frames(ban, features);
  const auto proposals = generate_proposals(scores, cfg);
  const auto padded = augment_proposals(proposals, cfg.augment_rho, T);

  std::vector<Detection> detections;
  detections.reserve(padded.size());
  for (const ScoredInterval& p : padded) {
    const Tensor2 segment = features.slice_rows(p.interval.start, p.interval.end);
    const HeadOutput out = head.forward(segment);
    const Interval refined =
        apply_refinement(p.interval, out.offsets.start, out.offsets.end, T);
    detections.push_back(Detection{refined, out.p_story});
  }
  return nms(std::move(detections), cfg.detection_nms_iou);
}

}  // namespace storycut

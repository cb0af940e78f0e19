#include "storycut/interval.hpp"

#include <algorithm>
#include <stdexcept>

namespace storycut {

double iou(const Interval& a, const Interval& b) {
  if (!a.valid() || !b.valid()) throw std::invalid_argument("iou: invalid interval");
  const std::int64_t inter =
      std::max<std::int64_t>(0, std::min(a.end, b.end) - std::max(a.start, b.start));
  if (inter == 0) return 0.0;
  const std::int64_t uni = a.length() + b.length() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<Interval> dilated_merge(const std::vector<Interval>& runs, std::int64_t max_gap) {
  std::vector<Interval> out;
  for (const Interval& r : runs) {
    if (!r.valid()) throw std::invalid_argument("dilated_merge: invalid run");
    if (!out.empty() && r.start < out.back().end)
      throw std::invalid_argument("dilated_merge: runs must be sorted and non-overlapping");
    if (!out.empty() && r.start - out.back().end <= max_gap) {
      out.back().end = r.end;
    } else {
      out.push_back(r);
    }
  }
  return out;
}

namespace {

bool nms_order(const ScoredInterval& a, const ScoredInterval& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.interval.start != b.interval.start) return a.interval.start < b.interval.start;
  return a.interval.length() < b.interval.length();
}

}  // namespace

std::vector<ScoredInterval> nms(std::vector<ScoredInterval> candidates, double iou_thresh) {
  if (!(iou_thresh > 0.0 && iou_thresh <= 1.0))
    throw std::invalid_argument("nms: iou_thresh must be in (0,1]");
  std::sort(candidates.begin(), candidates.end(), nms_order);
  std::vector<ScoredInterval> kept;
  std::vector<bool> suppressed(candidates.size(), false);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (suppressed[i]) continue;
    kept.push_back(candidates[i]);
    for (std::size_t j = i + 1; j < candidates.size(); ++j) {
      if (!suppressed[j] && iou(candidates[i].interval, candidates[j].interval) > iou_thresh)
        suppressed[j] = true;
    }
  }
  return kept;
}

}  // namespace storycut

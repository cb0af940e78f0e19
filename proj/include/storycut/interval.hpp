#pragma once

#include <cstdint>
#include <vector>

namespace storycut {

// Half-open frame span [start, end) at 1 fps.
struct Interval {
  std::int64_t start = 0;
  std::int64_t end = 0;

  std::int64_t length() const { return end - start; }
  bool valid() const { return start >= 0 && start < end; }
  bool operator==(const Interval&) const = default;
};

struct ScoredInterval {
  Interval interval;
  double score = 0.0;
  bool operator==(const ScoredInterval&) const = default;
};

// Intersection-over-union on integer frame counts; 0 when disjoint.
double iou(const Interval& a, const Interval& b);

// Fuses consecutive runs whose gap (next.start - prev.end) is <= max_gap.
// Runs must be sorted by start and pairwise non-overlapping.
std::vector<Interval> dilated_merge(const std::vector<Interval>& runs, std::int64_t max_gap = 5);

// Greedy NMS: keep the highest-score remaining candidate, discard remaining
// candidates with IoU > iou_thresh against it. Equal scores break ties by
// earlier start, then shorter length. Output is sorted by descending score.
std::vector<ScoredInterval> nms(std::vector<ScoredInterval> candidates, double iou_thresh);

}  // namespace storycut

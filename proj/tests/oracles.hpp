#pragma once

// Brute-force reference implementations, deliberately literal and slow.
// Tests cross-check the production code against these on random instances.

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "storycut/dataset.hpp"
#include "storycut/interval.hpp"
#include "storycut/rng.hpp"

namespace storycut::testing {

// IoU by counting frames one at a time.
inline double oracle_iou(const Interval& a, const Interval& b) {
  const std::int64_t lo = std::min(a.start, b.start);
  const std::int64_t hi = std::max(a.end, b.end);
  std::int64_t inter = 0, uni = 0;
  for (std::int64_t f = lo; f < hi; ++f) {
    const bool in_a = f >= a.start && f < a.end;
    const bool in_b = f >= b.start && f < b.end;
    if (in_a && in_b) ++inter;
    if (in_a || in_b) ++uni;
  }
  return uni == 0 ? 0.0 : double(inter) / double(uni);
}

// Greedy NMS by full rescan per round: best remaining by (score desc, start
// asc, length asc), discard survivors with IoU strictly above the threshold.
inline std::vector<ScoredInterval> oracle_nms(const std::vector<ScoredInterval>& cands,
                                              double thresh) {
  std::vector<ScoredInterval> kept;
  std::vector<bool> alive(cands.size(), true);
  for (;;) {
    int best = -1;
    for (int i = 0; i < int(cands.size()); ++i) {
      if (!alive[i]) continue;
      if (best < 0) {
        best = i;
        continue;
      }
      const auto& a = cands[std::size_t(i)];
      const auto& b = cands[std::size_t(best)];
      const bool wins =
          a.score > b.score ||
          (a.score == b.score &&
           (a.interval.start < b.interval.start ||
            (a.interval.start == b.interval.start && a.interval.length() < b.interval.length())));
      if (wins) best = i;
    }
    if (best < 0) break;
    kept.push_back(cands[std::size_t(best)]);
    alive[std::size_t(best)] = false;
    for (int i = 0; i < int(cands.size()); ++i)
      if (alive[i] && oracle_iou(cands[std::size_t(i)].interval,
                                 cands[std::size_t(best)].interval) > thresh)
        alive[i] = false;
  }
  return kept;
}

// Single pooled-rank AP: detections sorted by (score desc, video id asc,
// start asc, length asc); each matches the max-IoU unmatched gt of its video
// at IoU >= alpha (ties to the earliest gt start); AP = sum of precisions at
// true-positive ranks over the gt count.
inline double oracle_ap(const std::vector<ScoredVideoProposals>& dets,
                        const std::vector<VideoAnnotation>& gt, double alpha) {
  struct Flat {
    std::string video;
    ScoredInterval det;
  };
  std::vector<Flat> flat;
  for (const auto& v : dets)
    for (const auto& d : v.items) flat.push_back({v.video_id, d});
  std::stable_sort(flat.begin(), flat.end(), [](const Flat& a, const Flat& b) {
    if (a.det.score != b.det.score) return a.det.score > b.det.score;
    if (a.video != b.video) return a.video < b.video;
    if (a.det.interval.start != b.det.interval.start)
      return a.det.interval.start < b.det.interval.start;
    return a.det.interval.length() < b.det.interval.length();
  });

  std::map<std::string, std::vector<Interval>> stories;
  std::map<std::string, std::vector<bool>> used;
  std::int64_t total_gt = 0;
  for (const auto& v : gt) {
    stories[v.video_id] = v.stories;
    used[v.video_id] = std::vector<bool>(v.stories.size(), false);
    total_gt += std::int64_t(v.stories.size());
  }
  if (total_gt == 0) return 0.0;

  double ap = 0.0;
  std::int64_t tp = 0, seen = 0;
  for (const auto& fd : flat) {
    ++seen;
    auto& g = stories[fd.video];
    auto& u = used[fd.video];
    int best = -1;
    double best_iou = 0.0;
    for (int i = 0; i < int(g.size()); ++i) {
      if (u[std::size_t(i)]) continue;
      const double v = oracle_iou(fd.det.interval, g[std::size_t(i)]);
      if (v >= alpha && v > best_iou) {
        best_iou = v;
        best = i;
      }
    }
    if (best >= 0) {
      u[std::size_t(best)] = true;
      ++tp;
      ap += double(tp) / double(seen);
    }
  }
  return ap / double(total_gt);
}

// Pooled recall for one (AN, alpha) pair: per video keep the top-AN
// proposals by score (stable: ties keep the given order), match greedily.
inline double oracle_recall(const std::vector<ScoredVideoProposals>& props,
                            const std::vector<VideoAnnotation>& gt, double alpha,
                            std::int64_t an) {
  std::map<std::string, std::vector<Interval>> stories;
  std::int64_t total_gt = 0;
  for (const auto& v : gt) {
    stories[v.video_id] = v.stories;
    total_gt += std::int64_t(v.stories.size());
  }
  if (total_gt == 0) return 0.0;

  std::int64_t matched = 0;
  for (const auto& v : props) {
    std::vector<ScoredInterval> ranked = v.items;
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const ScoredInterval& a, const ScoredInterval& b) {
                       return a.score > b.score;
                     });
    if (std::int64_t(ranked.size()) > an) ranked.resize(std::size_t(an));
    auto& g = stories[v.video_id];
    std::vector<bool> used(g.size(), false);
    for (const auto& p : ranked) {
      int best = -1;
      double best_iou = 0.0;
      for (int i = 0; i < int(g.size()); ++i) {
        if (used[std::size_t(i)]) continue;
        const double x = oracle_iou(p.interval, g[std::size_t(i)]);
        if (x >= alpha && x > best_iou) {
          best_iou = x;
          best = i;
        }
      }
      if (best >= 0) {
        used[std::size_t(best)] = true;
        ++matched;
      }
    }
  }
  return double(matched) / double(total_gt);
}

// AR at one AN: mean of oracle_recall over a threshold grid.
inline double oracle_ar(const std::vector<ScoredVideoProposals>& props,
                        const std::vector<VideoAnnotation>& gt,
                        const std::vector<double>& grid, std::int64_t an) {
  double sum = 0.0;
  for (double alpha : grid) sum += oracle_recall(props, gt, alpha, an);
  return sum / double(grid.size());
}

// Random non-overlapping sorted story set for metric fuzzing.
inline std::vector<Interval> random_stories(Rng& rng, std::int64_t num_frames,
                                            std::int64_t max_count) {
  std::vector<Interval> out;
  std::int64_t cursor = 0;
  const std::int64_t n = std::int64_t(rng.uniform_index(std::uint64_t(max_count + 1)));
  for (std::int64_t i = 0; i < n && cursor + 2 <= num_frames; ++i) {
    const std::int64_t start =
        cursor + std::int64_t(rng.uniform_index(std::uint64_t(num_frames - cursor - 1)));
    if (start + 1 >= num_frames) break;
    const std::int64_t max_len = num_frames - start;
    const std::int64_t len = 1 + std::int64_t(rng.uniform_index(std::uint64_t(max_len)));
    out.push_back(Interval{start, start + len});
    cursor = start + len + 1;
  }
  return out;
}

// Random scored intervals inside a video, overlaps allowed.
inline std::vector<ScoredInterval> random_scored(Rng& rng, std::int64_t num_frames,
                                                 std::int64_t count) {
  std::vector<ScoredInterval> out;
  for (std::int64_t i = 0; i < count; ++i) {
    const std::int64_t start = std::int64_t(rng.uniform_index(std::uint64_t(num_frames - 1)));
    const std::int64_t len =
        1 + std::int64_t(rng.uniform_index(std::uint64_t(num_frames - start)));
    // quantized scores make score ties common, exercising tie-break rules
    const double score = double(rng.uniform_index(8)) / 8.0 + 0.0625;
    out.push_back(ScoredInterval{Interval{start, start + len}, score});
  }
  return out;
}

}  // namespace storycut::testing

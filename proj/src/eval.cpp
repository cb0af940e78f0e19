#include "storycut/eval.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "storycut/errors.hpp"
#include "storycut/serialization.hpp"

namespace storycut {

EvalConfig::EvalConfig() {
  for (int i = 0; i <= 9; ++i) avg_map_grid.push_back(double(50 + 5 * i) / 100.0);
}

namespace {

void check_grid(const std::vector<double>& grid, const char* what) {
  if (grid.empty()) throw config_error(std::string("eval: ") + what + " must be nonempty");
  double prev = 0.0;
  for (double v : grid) {
    if (!(v > 0.0 && v <= 1.0))
      throw config_error(std::string("eval: ") + what + " entries must be in (0,1]");
    if (!(v > prev))
      throw config_error(std::string("eval: ") + what + " must be strictly increasing");
    prev = v;
  }
}

// gt indexed by video id; flat detection list for pooled sorting.
struct GtIndex {
  std::map<std::string, std::size_t> by_id;
  index_t total_gt = 0;
};

GtIndex index_gt(const std::vector<VideoAnnotation>& gt) {
  GtIndex idx;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!idx.by_id.emplace(gt[i].video_id, i).second)
      throw config_error("eval: duplicate gt video id " + gt[i].video_id);
    idx.total_gt += static_cast<index_t>(gt[i].stories.size());
  }
  return idx;
}

void check_known_videos(const std::vector<ScoredVideoProposals>& detections, const GtIndex& idx) {
  std::string missing;
  for (const auto& d : detections)
    if (!idx.by_id.count(d.video_id)) missing += (missing.empty() ? "" : ", ") + d.video_id;
  if (!missing.empty()) throw config_error("eval: video ids missing from gt: " + missing);
}

struct PooledDetection {
  std::size_t gt_index;
  const std::string* video_id;
  Interval interval;
  double score;
};

bool pooled_before(const PooledDetection& a, const PooledDetection& b) {
  if (a.score != b.score) return a.score > b.score;
  if (*a.video_id != *b.video_id) return *a.video_id < *b.video_id;
  if (a.interval.start != b.interval.start) return a.interval.start < b.interval.start;
  return a.interval.length() < b.interval.length();
}

// Best unmatched gt story for this interval: IoU >= alpha, maximum IoU,
// ties to the earliest gt start (gt stories are sorted by start).
int best_gt_match(const Interval& det, const std::vector<Interval>& stories,
                  const std::vector<char>& taken, double alpha) {
  int best = -1;
  double best_iou = 0.0;
  for (std::size_t g = 0; g < stories.size(); ++g) {
    if (taken[g]) continue;
    const double v = iou(det, stories[g]);
    if (v >= alpha && v > best_iou) {
      best = static_cast<int>(g);
      best_iou = v;
    }
  }
  return best;
}

}  // namespace

void EvalConfig::validate() const {
  check_grid(map_thresholds, "map_thresholds");
  check_grid(avg_map_grid, "avg_map_grid");
  if (an_grid.empty()) throw config_error("eval: an_grid must be nonempty");
  index_t prev = 0;
  for (index_t an : an_grid) {
    if (an <= prev) throw config_error("eval: an_grid must be positive and strictly increasing");
    prev = an;
  }
}

double average_precision(const std::vector<ScoredVideoProposals>& detections,
                         const std::vector<VideoAnnotation>& gt, double alpha,
                         bool* zero_gt_warning) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw config_error("eval: alpha must be in (0,1]");
  const GtIndex idx = index_gt(gt);
  check_known_videos(detections, idx);
  if (zero_gt_warning) *zero_gt_warning = idx.total_gt == 0;
  if (idx.total_gt == 0) return 0.0;

  std::vector<PooledDetection> pooled;
  for (const auto& d : detections) {
    const std::size_t g = idx.by_id.at(d.video_id);
    for (const ScoredInterval& si : d.items)
      pooled.push_back(PooledDetection{g, &gt[g].video_id, si.interval, si.score});
  }
  std::sort(pooled.begin(), pooled.end(), pooled_before);

  std::vector<std::vector<char>> taken(gt.size());
  for (std::size_t g = 0; g < gt.size(); ++g) taken[g].assign(gt[g].stories.size(), 0);

  double sum_precision = 0.0;
  index_t tp = 0;
  for (std::size_t rank = 0; rank < pooled.size(); ++rank) {
    const PooledDetection& d = pooled[rank];
    const int m = best_gt_match(d.interval, gt[d.gt_index].stories, taken[d.gt_index], alpha);
    if (m >= 0) {
      taken[d.gt_index][static_cast<std::size_t>(m)] = 1;
      ++tp;
      sum_precision += double(tp) / double(rank + 1);
    }
  }
  return sum_precision / double(idx.total_gt);
}

EvalReport mean_ap_report(const std::vector<ScoredVideoProposals>& detections,
                          const std::vector<VideoAnnotation>& gt, const EvalConfig& cfg) {
  cfg.validate();
  EvalReport report;
  for (double th : cfg.map_thresholds) {
    bool warn = false;
    report.ap_at.emplace_back(th, average_precision(detections, gt, th, &warn));
    report.zero_gt_warning = report.zero_gt_warning || warn;
  }
  double sum = 0.0;
  for (double th : cfg.avg_map_grid) sum += average_precision(detections, gt, th);
  report.average_map = sum / double(cfg.avg_map_grid.size());
  return report;
}

std::vector<std::pair<index_t, double>> ar_an_curve(
    const std::vector<ScoredVideoProposals>& proposals, const std::vector<VideoAnnotation>& gt,
    const EvalConfig& cfg) {
  cfg.validate();
  const GtIndex idx = index_gt(gt);
  check_known_videos(proposals, idx);

  // Rank proposals per video once; ties keep the given order.
  std::vector<std::vector<ScoredInterval>> ranked(proposals.size());
  for (std::size_t v = 0; v < proposals.size(); ++v) {
    ranked[v] = proposals[v].items;
    std::stable_sort(ranked[v].begin(), ranked[v].end(),
                     [](const ScoredInterval& a, const ScoredInterval& b) {
                       return a.score > b.score;
                     });
  }

  std::vector<std::pair<index_t, double>> curve;
  for (index_t an : cfg.an_grid) {
    double recall_sum = 0.0;
    for (double alpha : cfg.avg_map_grid) {
      index_t matched = 0;
      for (std::size_t v = 0; v < proposals.size(); ++v) {
        const auto& stories = gt[idx.by_id.at(proposals[v].video_id)].stories;
        std::vector<char> taken(stories.size(), 0);
        const auto limit = std::min<std::size_t>(ranked[v].size(), static_cast<std::size_t>(an));
        for (std::size_t p = 0; p < limit; ++p) {
          const int m = best_gt_match(ranked[v][p].interval, stories, taken, alpha);
          if (m >= 0) {
            taken[static_cast<std::size_t>(m)] = 1;
            ++matched;
          }
        }
      }
      recall_sum += idx.total_gt == 0 ? 0.0 : double(matched) / double(idx.total_gt);
    }
    curve.emplace_back(an, recall_sum / double(cfg.avg_map_grid.size()));
  }
  return curve;
}

EvalReport full_report(const std::vector<ScoredVideoProposals>& detections,
                       const std::vector<VideoAnnotation>& gt, const EvalConfig& cfg) {
  EvalReport report = mean_ap_report(detections, gt, cfg);
  report.ar_an = ar_an_curve(detections, gt, cfg);
  return report;
}

std::string report_csv_string(const EvalReport& report) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(6);
  os << "metric,threshold,value\n";
  for (const auto& [th, ap] : report.ap_at) os << "ap," << th << ',' << ap << '\n';
  os << "average_map,," << report.average_map << '\n';
  os << "an,average_recall\n";
  for (const auto& [an, ar] : report.ar_an) os << an << ',' << ar << '\n';
  return os.str();
}

void report_csv(const EvalReport& report, const std::string& path) {
  write_file_atomic(path, report_csv_string(report));
}

}  // namespace storycut

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "storycut/dataset.hpp"
#include "storycut/interval.hpp"

namespace storycut {

struct EvalConfig {
  std::vector<double> map_thresholds{0.5, 0.7, 0.9};
  std::vector<double> avg_map_grid;        // defaults to 0.50, 0.55, ..., 0.95
  std::vector<index_t> an_grid{1, 5, 10, 20, 50, 100};

  EvalConfig();
  void validate() const;
};

struct EvalReport {
  std::vector<std::pair<double, double>> ap_at;   // (threshold, AP)
  double average_map = 0.0;
  std::vector<std::pair<index_t, double>> ar_an;  // (AN, average recall)
  bool zero_gt_warning = false;
};

// Pooled, score-sorted greedy matching (one detection per gt, IoU >= alpha,
// within the same video); AP is the non-interpolated sum of precisions at
// true-positive ranks over the gt count. Zero gt -> 0 with the warning flag.
double average_precision(const std::vector<ScoredVideoProposals>& detections,
                         const std::vector<VideoAnnotation>& gt, double alpha,
                         bool* zero_gt_warning = nullptr);

// AP at each configured threshold plus the mean over the 10-point grid.
EvalReport mean_ap_report(const std::vector<ScoredVideoProposals>& detections,
                          const std::vector<VideoAnnotation>& gt, const EvalConfig& cfg);

// For each AN, keep the top-AN proposals per video (stable by descending
// score) and average the pooled recall over the IoU grid.
std::vector<std::pair<index_t, double>> ar_an_curve(
    const std::vector<ScoredVideoProposals>& proposals, const std::vector<VideoAnnotation>& gt,
    const EvalConfig& cfg);

// Both metric families in one report.
EvalReport full_report(const std::vector<ScoredVideoProposals>& detections,
                       const std::vector<VideoAnnotation>& gt, const EvalConfig& cfg);

// Two CSV sections: "metric,threshold,value" rows (average_map with an empty
// threshold), then "an,average_recall" rows. Fixed 6-decimal values.
std::string report_csv_string(const EvalReport& report);
void report_csv(const EvalReport& report, const std::string& path);

}  // namespace storycut

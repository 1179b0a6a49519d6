#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fusetrack/core_types.hpp"

namespace fusetrack {

struct EvalConfig {
  double dist_threshold_m = 2.0;
  int recall_steps = 40;
  double min_recall = 0.05;

  void validate() const;
};

struct FrameMatch {
  std::vector<std::pair<int, int>> tp_pairs;  // (gt_idx, pred_idx), in selection order
  int fp = 0;
  int fn = 0;
};

// Greedy by ascending planar center distance, same-class pairs only; pairs
// farther than gate_m never match. Distance ties go to the lower gt index,
// then the lower prediction index.
FrameMatch match_frame(const FrameBoxes& gt, const FrameBoxes& pred, double gate_m);

// CLEAR-MOT counts over a whole log, keeping predictions with score >= score_threshold.
struct ClearCounts {
  std::int64_t gt = 0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t ids = 0;
  double distance_sum = 0.0;
  double velocity_error_sum = 0.0;  // planar |v_pred - v_gt| over TPs
};

ClearCounts accumulate_clear(const TrackLog& gt, const TrackLog& pred, double gate_m,
                             double score_threshold);

// max(0, 1 - (ids + fp + fn - (1 - r) P) / (r P)), capped at 1.
double motar_from_counts(const ClearCounts& counts, double recall);

struct RecallRow {
  double recall = 0.0;           // target recall
  bool reachable = false;
  double score_threshold = 0.0;  // confidence threshold used
  double achieved_recall = 0.0;
  double motar = 0.0;
  double motp = 0.0;             // mean TP distance; gate_m when unreachable
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t ids = 0;
};

// MOTAR at one recall target. The confidence threshold is the highest one
// that still keeps ceil(r * P) true positives of the unthresholded
// evaluation. An unreachable recall scores 0.
RecallRow motar_at_recall(const TrackLog& gt, const TrackLog& pred, double recall,
                          const EvalConfig& cfg);

struct EvalResult {
  double amota = 0.0;
  double amotp = 0.0;
  std::int64_t ids_total = 0;
  double mave = 0.0;  // NaN when there are no true positives
  std::int64_t gt_count = 0;
  std::vector<RecallRow> per_recall;
};

std::vector<double> recall_targets(const EvalConfig& cfg);

// Throws std::invalid_argument for an empty ground truth or a prediction log
// with more scenes or frames than the ground truth.
EvalResult evaluate(const TrackLog& gt, const TrackLog& pred, const EvalConfig& cfg);

}  // namespace fusetrack

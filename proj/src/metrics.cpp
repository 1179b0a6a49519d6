#include "fusetrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

namespace fusetrack {
namespace {

// Returns the TP scores of the unthresholded evaluation, highest first.
std::vector<double> true_positive_scores(const TrackLog& gt, const TrackLog& pred,
                                         double gate_m) {
  std::vector<double> scores;
  for (std::size_t s = 0; s < pred.size() && s < gt.size(); ++s) {
    for (std::size_t f = 0; f < pred[s].size() && f < gt[s].size(); ++f) {
      const FrameMatch m = match_frame(gt[s][f], pred[s][f], gate_m);
      for (const auto& [gi, pi] : m.tp_pairs) scores.push_back(pred[s][f][pi].score);
    }
  }
  std::sort(scores.begin(), scores.end(), std::greater<>());
  return scores;
}

RecallRow recall_row(const TrackLog& gt, const TrackLog& pred, double recall,
                     const std::vector<double>& tp_scores, std::int64_t positives,
                     const EvalConfig& cfg) {
  RecallRow row;
  row.recall = recall;
  row.motp = cfg.dist_threshold_m;
  const auto needed =
      static_cast<std::int64_t>(std::ceil(recall * static_cast<double>(positives) - 1e-9));
  if (needed < 1 || needed > static_cast<std::int64_t>(tp_scores.size())) return row;

  row.score_threshold = tp_scores[static_cast<std::size_t>(needed - 1)];
  const ClearCounts c = accumulate_clear(gt, pred, cfg.dist_threshold_m, row.score_threshold);
  row.reachable = true;
  row.achieved_recall = static_cast<double>(c.tp) / static_cast<double>(positives);
  row.motar = motar_from_counts(c, recall);
  row.motp = c.tp > 0 ? c.distance_sum / static_cast<double>(c.tp) : cfg.dist_threshold_m;
  row.tp = c.tp;
  row.fp = c.fp;
  row.fn = c.fn;
  row.ids = c.ids;
  return row;
}

std::int64_t count_gt(const TrackLog& gt) {
  std::int64_t n = 0;
  for (const auto& scene : gt) {
    for (const auto& frame : scene) n += static_cast<std::int64_t>(frame.size());
  }
  return n;
}

void check_shapes(const TrackLog& gt, const TrackLog& pred) {
  if (pred.size() > gt.size()) {
    throw std::invalid_argument("evaluate: prediction log has more scenes than ground truth");
  }
  for (std::size_t s = 0; s < pred.size(); ++s) {
    if (pred[s].size() > gt[s].size()) {
      throw std::invalid_argument("evaluate: prediction scene has more frames than ground truth");
    }
  }
}

}  // namespace

void EvalConfig::validate() const {
  if (!(dist_threshold_m > 0.0)) throw std::invalid_argument("eval: dist_threshold_m must be > 0");
  if (recall_steps < 2) throw std::invalid_argument("eval: recall_steps must be >= 2");
  if (!(min_recall > 0.0 && min_recall <= 1.0)) {
    throw std::invalid_argument("eval: min_recall must lie in (0,1]");
  }
}

FrameMatch match_frame(const FrameBoxes& gt, const FrameBoxes& pred, double gate_m) {
  struct Candidate {
    double dist;
    int gi;
    int pi;
  };
  std::vector<Candidate> candidates;
  for (int gi = 0; gi < static_cast<int>(gt.size()); ++gi) {
    for (int pi = 0; pi < static_cast<int>(pred.size()); ++pi) {
      if (gt[gi].class_id != pred[pi].class_id) continue;
      const double d = (gt[gi].center.head<2>() - pred[pi].center.head<2>()).norm();
      if (d <= gate_m) candidates.push_back({d, gi, pi});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.dist, a.gi, a.pi) < std::tie(b.dist, b.gi, b.pi);
  });

  std::vector<char> gt_used(gt.size(), 0);
  std::vector<char> pred_used(pred.size(), 0);
  FrameMatch m;
  for (const Candidate& c : candidates) {
    if (gt_used[c.gi] || pred_used[c.pi]) continue;
    gt_used[c.gi] = 1;
    pred_used[c.pi] = 1;
    m.tp_pairs.emplace_back(c.gi, c.pi);
  }
  m.fn = static_cast<int>(gt.size() - m.tp_pairs.size());
  m.fp = static_cast<int>(pred.size() - m.tp_pairs.size());
  return m;
}

ClearCounts accumulate_clear(const TrackLog& gt, const TrackLog& pred, double gate_m,
                             double score_threshold) {
  ClearCounts c;
  const FrameBoxes empty;
  for (std::size_t s = 0; s < gt.size(); ++s) {
    std::map<std::int64_t, std::int64_t> last_pred_for_gt;
    for (std::size_t f = 0; f < gt[s].size(); ++f) {
      const FrameBoxes& gt_frame = gt[s][f];
      const FrameBoxes& all_pred =
          (s < pred.size() && f < pred[s].size()) ? pred[s][f] : empty;
      FrameBoxes kept;
      kept.reserve(all_pred.size());
      for (const TrackedBox& b : all_pred) {
        if (b.score >= score_threshold) kept.push_back(b);
      }
      const FrameMatch m = match_frame(gt_frame, kept, gate_m);
      c.gt += static_cast<std::int64_t>(gt_frame.size());
      c.tp += static_cast<std::int64_t>(m.tp_pairs.size());
      c.fp += m.fp;
      c.fn += m.fn;
      for (const auto& [gi, pi] : m.tp_pairs) {
        const TrackedBox& g = gt_frame[gi];
        const TrackedBox& p = kept[pi];
        c.distance_sum += (g.center.head<2>() - p.center.head<2>()).norm();
        c.velocity_error_sum += (g.velocity.head<2>() - p.velocity.head<2>()).norm();
        auto it = last_pred_for_gt.find(g.track_id);
        if (it != last_pred_for_gt.end() && it->second != p.track_id) ++c.ids;
        last_pred_for_gt[g.track_id] = p.track_id;
      }
    }
  }
  return c;
}

double motar_from_counts(const ClearCounts& c, double recall) {
  const double p = static_cast<double>(c.gt);
  if (!(p > 0.0) || !(recall > 0.0)) return 0.0;
  const double errors = static_cast<double>(c.ids + c.fp + c.fn) - (1.0 - recall) * p;
  return std::clamp(1.0 - errors / (recall * p), 0.0, 1.0);
}

RecallRow motar_at_recall(const TrackLog& gt, const TrackLog& pred, double recall,
                          const EvalConfig& cfg) {
  cfg.validate();
  check_shapes(gt, pred);
  const std::int64_t positives = count_gt(gt);
  if (positives == 0) throw std::invalid_argument("motar_at_recall: empty ground truth");
  return recall_row(gt, pred, recall, true_positive_scores(gt, pred, cfg.dist_threshold_m),
                    positives, cfg);
}

std::vector<double> recall_targets(const EvalConfig& cfg) {
  std::vector<double> out(static_cast<std::size_t>(cfg.recall_steps));
  const double span = 1.0 - cfg.min_recall;
  for (int k = 0; k < cfg.recall_steps; ++k) {
    out[k] = cfg.min_recall + span * k / static_cast<double>(cfg.recall_steps - 1);
  }
  out.back() = 1.0;
  return out;
}

EvalResult evaluate(const TrackLog& gt, const TrackLog& pred, const EvalConfig& cfg) {
  cfg.validate();
  check_shapes(gt, pred);
  EvalResult result;
  result.gt_count = count_gt(gt);
  if (result.gt_count == 0) throw std::invalid_argument("evaluate: empty ground truth");

  const std::vector<double> tp_scores = true_positive_scores(gt, pred, cfg.dist_threshold_m);
  double motar_sum = 0.0;
  double motp_sum = 0.0;
  const RecallRow* best = nullptr;
  result.per_recall.reserve(static_cast<std::size_t>(cfg.recall_steps));
  for (double r : recall_targets(cfg)) {
    result.per_recall.push_back(recall_row(gt, pred, r, tp_scores, result.gt_count, cfg));
  }
  for (const RecallRow& row : result.per_recall) {
    motar_sum += row.motar;
    motp_sum += row.motp;
    if (row.reachable && (best == nullptr || row.motar > best->motar)) best = &row;
  }
  const auto steps = static_cast<double>(result.per_recall.size());
  result.amota = motar_sum / steps;
  result.amotp = motp_sum / steps;

  const ClearCounts all = accumulate_clear(gt, pred, cfg.dist_threshold_m,
                                           -std::numeric_limits<double>::infinity());
  result.ids_total = best != nullptr ? best->ids : all.ids;
  result.mave = all.tp > 0 ? all.velocity_error_sum / static_cast<double>(all.tp)
                           : std::numeric_limits<double>::quiet_NaN();
  return result;
}

}  // namespace fusetrack

#include "fusetrack/tracker.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace fusetrack {
namespace {

TrackedBox to_box(const Track& t) {
  TrackedBox b;
  b.track_id = t.id;
  b.center = t.kf.position();
  b.dims = t.kf.dims();
  b.yaw = t.kf.yaw();
  b.velocity = t.kf.velocity();
  b.score = t.last_score;
  b.class_id = t.class_id;
  return b;
}

Eigen::VectorXd blend_embedding(const Eigen::VectorXd& current, const Eigen::VectorXd& observed,
                                double momentum) {
  const Eigen::VectorXd mixed = momentum * current + (1.0 - momentum) * observed;
  const double n = mixed.norm();
  // Exactly opposing embeddings cancel; fall back to the observation.
  if (!(n > 1e-12)) return observed;
  return mixed / n;
}

}  // namespace

void TrackerConfig::validate() const {
  association.validate();
  kf_noise.validate();
  if (max_age < 1) throw std::invalid_argument("tracker: max_age must be >= 1");
  if (min_hits < 1) throw std::invalid_argument("tracker: min_hits must be >= 1");
  if (!(det_score_floor >= 0.0 && det_score_floor <= 1.0)) {
    throw std::invalid_argument("tracker: det_score_floor must lie in [0,1]");
  }
  if (!(embed_momentum >= 0.0 && embed_momentum <= 1.0)) {
    throw std::invalid_argument("tracker: embed_momentum must lie in [0,1]");
  }
}

std::pair<TrackerState, FrameBoxes> step(const TrackerState& state, const DetectionFrame& frame,
                                         const TrackerConfig& cfg) {
  if (!(frame.dt > 0.0) || !std::isfinite(frame.dt)) {
    throw std::invalid_argument("tracker step: dt must be positive");
  }
  for (const Detection& d : frame.detections) validate_detection(d);

  TrackerState next = state;
  const auto& dets = frame.detections;

  std::vector<AssociationTrack> assoc;
  assoc.reserve(next.tracks.size());
  for (Track& t : next.tracks) {
    const Eigen::Vector3d previous = t.kf.position();
    t.kf = kf_predict(t.kf, frame.dt, cfg.kf_noise);
    assoc.push_back(AssociationTrack::from_state(t.kf, previous, t.embedding));
  }

  Eigen::MatrixXd scores = affinity(assoc, dets, cfg.association);
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    for (Eigen::Index j = 0; j < scores.cols(); ++j) {
      if (next.tracks[i].class_id != dets[j].class_id) scores(i, j) = 0.0;
    }
  }
  const MatchResult match = greedy_match(scores, cfg.association.match_threshold);

  for (const auto& [ti, di] : match.matches) {
    Track& t = next.tracks[ti];
    const Detection& d = dets[di];
    t.kf = kf_update(t.kf, d, cfg.kf_noise);
    t.embedding = blend_embedding(t.embedding, d.embedding, cfg.embed_momentum);
    ++t.hits;
    t.misses = 0;
    t.last_score = d.score;
    if (t.status == TrackStatus::kTentative && t.hits >= cfg.min_hits) {
      t.status = TrackStatus::kConfirmed;
    }
  }
  for (int ti : match.unmatched_tracks) {
    Track& t = next.tracks[ti];
    t.hits = 0;
    ++t.misses;
    if (t.status == TrackStatus::kTentative || t.misses > cfg.max_age) {
      t.status = TrackStatus::kDead;
    }
  }
  for (Track& t : next.tracks) ++t.age;

  std::erase_if(next.tracks, [](const Track& t) { return t.status == TrackStatus::kDead; });

  for (int di : match.unmatched_dets) {
    const Detection& d = dets[di];
    if (d.score < cfg.det_score_floor) continue;
    Track t;
    t.id = next.next_id++;
    t.kf = kf_init(d, cfg.kf_noise);
    t.embedding = d.embedding;
    t.class_id = d.class_id;
    t.hits = 1;
    t.last_score = d.score;
    t.status = t.hits >= cfg.min_hits ? TrackStatus::kConfirmed : TrackStatus::kTentative;
    next.tracks.push_back(std::move(t));
  }

  FrameBoxes out;
  for (const Track& t : next.tracks) {
    if (t.status == TrackStatus::kConfirmed) out.push_back(to_box(t));
  }
  return {std::move(next), std::move(out)};
}

TrackOutput run_sequence(const DetectionScene& frames, const TrackerConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  TrackOutput out;
  out.frames.reserve(frames.size());
  TrackerState state;
  for (const DetectionFrame& frame : frames) {
    auto [next, boxes] = step(state, frame, cfg);
    state = std::move(next);
    out.frames.push_back(std::move(boxes));
  }
  out.elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace fusetrack

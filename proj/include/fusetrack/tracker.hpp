#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fusetrack/association.hpp"
#include "fusetrack/core_types.hpp"
#include "fusetrack/kalman.hpp"

namespace fusetrack {

enum class TrackStatus { kTentative, kConfirmed, kDead };

struct Track {
  std::int64_t id = 0;
  KfState kf;
  Eigen::VectorXd embedding;
  int class_id = 0;
  int hits = 0;    // consecutive matched frames, birth included
  int misses = 0;  // consecutive unmatched frames
  int age = 0;     // frames since birth
  TrackStatus status = TrackStatus::kTentative;
  double last_score = 0.0;
};

struct TrackerConfig {
  AssociationConfig association;
  KfNoiseConfig kf_noise;
  int max_age = 10;
  int min_hits = 2;
  double det_score_floor = 0.3;
  double embed_momentum = 0.9;

  void validate() const;
};

struct TrackerState {
  std::vector<Track> tracks;  // live tracks, ordered by id
  std::int64_t next_id = 0;
};

struct DetectionFrame {
  std::int64_t frame_idx = 0;
  double dt = 0.5;
  std::vector<Detection> detections;
};

using DetectionScene = std::vector<DetectionFrame>;

// One tracking step: predict, class-gated greedy association, update,
// lifecycle bookkeeping, births. Returns the confirmed tracks as boxes.
// Throws std::invalid_argument for dt <= 0 or invalid detections; the input
// state is left untouched in that case.
std::pair<TrackerState, FrameBoxes> step(const TrackerState& state, const DetectionFrame& frame,
                                         const TrackerConfig& cfg);

struct TrackOutput {
  SceneLog frames;
  double elapsed_s = 0.0;  // wall clock, informational only
  std::size_t frame_count() const { return frames.size(); }
};

TrackOutput run_sequence(const DetectionScene& frames, const TrackerConfig& cfg);

}  // namespace fusetrack

#pragma once

#include <cstdint>
#include <vector>

#include "fusetrack/core_types.hpp"
#include "fusetrack/pillarizer.hpp"
#include "fusetrack/tracker.hpp"

namespace fusetrack {

enum class MotionModel { kConstantVelocity, kTurning, kCrossing };

struct ScenarioConfig {
  int n_objects = 10;
  int n_frames = 40;
  double dt = 0.5;
  MotionModel motion = MotionModel::kConstantVelocity;
  double sigma_pos = 0.0;
  double sigma_vel = 0.0;
  double sigma_embed = 0.0;
  double sigma_score = 0.0;  // true-detection confidence = 1 - |N(0, sigma_score^2)|
  double p_miss = 0.0;
  double clutter_rate = 0.0;
  int radar_points_per_object = 8;
  int n_classes = 3;
  int embedding_dim = kDefaultEmbeddingDim;
  double world_range_m = 51.2;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ScenarioBundle {
  TrackLog gt_log;               // a single scene; track_id = object index
  DetectionScene detections;     // one frame per gt frame
  // Per frame and detection: the gt object index, or -1 for clutter.
  std::vector<std::vector<int>> detection_sources;
  std::vector<RadarSweep> radar_sweeps;  // one sweep per frame, reference-frame aligned
};

// Deterministic for a given config: every random draw is addressed by
// (seed, frame, object, purpose), never by generation order.
ScenarioBundle generate(const ScenarioConfig& cfg);

// Replaces the velocity of every object-derived detection with
// v_gt + N(0, sigma^2) per axis. Clutter and all other fields are untouched.
ScenarioBundle degrade_velocity(const ScenarioBundle& bundle, double sigma_vel, std::uint64_t seed);

// Nominal box dimensions (l, w, h) per class.
Eigen::Vector3d class_dims(int class_id);

}  // namespace fusetrack

#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fusetrack/core_types.hpp"
#include "fusetrack/kalman.hpp"

namespace fusetrack {

// How the motion term blends the centroid and state-difference scores.
//   kVelocitySimilarity: blend weight exp(-|v_track - v_det| / r_vel).
//   kCosineSimilarity:   blend weight from the xy-direction agreement between
//                        the track velocity and the pseudo-velocity implied by
//                        the detection's displacement from the track.
enum class TradeOffTerm { kVelocitySimilarity, kCosineSimilarity };

struct AssociationConfig {
  double w_deep = 0.25;
  double r_vel = 1.0;
  double match_threshold = 0.30;
  double loc_scale = 10.0;
  double centroid_scale = 10.0;
  TradeOffTerm trade_off_term = TradeOffTerm::kVelocitySimilarity;

  double w_motion() const { return 1.0 - w_deep; }
  void validate() const;
};

// Scale of the L1 box-state difference in the state-difference score.
inline constexpr double kPseudoStateScale = 10.0;

// What the association step needs to know about a live track.
struct AssociationTrack {
  KfVector predicted;             // KF mean after predict for the current frame
  Eigen::Vector3d previous_center;  // posterior center before this frame's predict
  Eigen::VectorXd embedding;

  static AssociationTrack from_state(const KfState& predicted, const Eigen::Vector3d& previous,
                                     const Eigen::VectorXd& embedding);
  Eigen::Vector3d center() const { return predicted.segment<3>(kf_index::kX); }
  Eigen::Vector3d velocity() const { return predicted.segment<3>(kf_index::kVx); }
};

struct MotionTerms {
  double centroid = 0.0;
  double pseudo = 0.0;
  double blend = 0.0;  // a_vel, or the cosine weight
  double motion = 0.0;
};

Eigen::MatrixXd embedding_affinity(const std::vector<Eigen::VectorXd>& track_embeds,
                                   const std::vector<Eigen::VectorXd>& det_embeds);

double velocity_weight(const Eigen::Vector3d& v_track, const Eigen::Vector3d& v_det, double r_vel);

double centroid_affinity(const Eigen::Vector3d& track_center, const Eigen::Vector3d& det_center,
                         double centroid_scale);

// exp(-|box_track - box_det|_1 / kPseudoStateScale) over [x,y,z,yaw,l,w,h],
// yaw difference wrapped.
double state_difference_affinity(const KfVector& track_state, const Detection& det);

// (1 + cos(angle(track velocity xy, pseudo-velocity xy))) / 2. Either vector
// shorter than 1e-9 yields the neutral weight 0.5.
double direction_weight(const AssociationTrack& track, const Detection& det);

MotionTerms motion_terms(const AssociationTrack& track, const Detection& det,
                         const AssociationConfig& cfg);

inline double motion_affinity(const AssociationTrack& track, const Detection& det,
                              const AssociationConfig& cfg) {
  return motion_terms(track, det, cfg).motion;
}

double location_affinity(const AssociationTrack& track, const Detection& det,
                         const AssociationConfig& cfg);

// A = w_deep * A_deep + w_motion * (A_motion .* A_loc); rows are tracks.
Eigen::MatrixXd affinity(const std::vector<AssociationTrack>& tracks,
                         const std::vector<Detection>& dets, const AssociationConfig& cfg);

struct MatchResult {
  std::vector<std::pair<int, int>> matches;  // (track_idx, det_idx) in selection order
  std::vector<int> unmatched_tracks;
  std::vector<int> unmatched_dets;
};

// Repeatedly takes the largest remaining entry >= threshold; ties go to the
// lower track index, then the lower detection index.
MatchResult greedy_match(const Eigen::MatrixXd& affinity, double threshold);

}  // namespace fusetrack

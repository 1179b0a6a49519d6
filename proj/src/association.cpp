#include "fusetrack/association.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fusetrack {

void AssociationConfig::validate() const {
  if (!(w_deep >= 0.0 && w_deep <= 1.0)) {
    throw std::invalid_argument("association: w_deep must lie in [0,1]");
  }
  if (!(r_vel > 0.0) || !std::isfinite(r_vel)) {
    throw std::invalid_argument("association: r_vel must be positive");
  }
  if (!(match_threshold > 0.0 && match_threshold < 1.0)) {
    throw std::invalid_argument("association: match_threshold must lie in (0,1)");
  }
  if (!(loc_scale > 0.0) || !(centroid_scale > 0.0)) {
    throw std::invalid_argument("association: loc_scale and centroid_scale must be positive");
  }
}

AssociationTrack AssociationTrack::from_state(const KfState& predicted,
                                              const Eigen::Vector3d& previous,
                                              const Eigen::VectorXd& embedding) {
  return AssociationTrack{predicted.mean, previous, embedding};
}

Eigen::MatrixXd embedding_affinity(const std::vector<Eigen::VectorXd>& track_embeds,
                                   const std::vector<Eigen::VectorXd>& det_embeds) {
  const auto rows = static_cast<Eigen::Index>(track_embeds.size());
  const auto cols = static_cast<Eigen::Index>(det_embeds.size());
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Eigen::VectorXd& a = track_embeds[i];
    for (Eigen::Index j = 0; j < cols; ++j) {
      const Eigen::VectorXd& b = det_embeds[j];
      if (a.size() != b.size()) {
        throw std::invalid_argument("embedding_affinity: embedding dimension mismatch");
      }
      const double denom = a.norm() * b.norm();
      const double cosine = denom > 0.0 ? a.dot(b) / denom : 0.0;
      out(i, j) = std::clamp(0.5 * (1.0 + cosine), 0.0, 1.0);
    }
  }
  return out;
}

double velocity_weight(const Eigen::Vector3d& v_track, const Eigen::Vector3d& v_det,
                       double r_vel) {
  return std::exp(-(v_track - v_det).norm() / r_vel);
}

double centroid_affinity(const Eigen::Vector3d& track_center, const Eigen::Vector3d& det_center,
                         double centroid_scale) {
  return std::exp(-(track_center - det_center).norm() / centroid_scale);
}

double state_difference_affinity(const KfVector& track_state, const Detection& det) {
  double l1 = 0.0;
  for (int i = 0; i < 3; ++i) l1 += std::abs(track_state(kf_index::kX + i) - det.center(i));
  l1 += std::abs(wrap_angle(track_state(kf_index::kYaw) - det.yaw));
  for (int i = 0; i < 3; ++i) l1 += std::abs(track_state(kf_index::kLength + i) - det.dims(i));
  return std::exp(-l1 / kPseudoStateScale);
}

double direction_weight(const AssociationTrack& track, const Detection& det) {
  const Eigen::Vector2d heading = track.velocity().head<2>();
  const Eigen::Vector2d pseudo = (det.center - track.previous_center).head<2>();
  const double hn = heading.norm();
  const double pn = pseudo.norm();
  if (hn < 1e-9 || pn < 1e-9) return 0.5;
  const double cosine = std::clamp(heading.dot(pseudo) / (hn * pn), -1.0, 1.0);
  return 0.5 * (1.0 + cosine);
}

MotionTerms motion_terms(const AssociationTrack& track, const Detection& det,
                         const AssociationConfig& cfg) {
  MotionTerms t;
  t.centroid = centroid_affinity(track.center(), det.center, cfg.centroid_scale);
  t.pseudo = state_difference_affinity(track.predicted, det);
  t.blend = cfg.trade_off_term == TradeOffTerm::kVelocitySimilarity
                ? velocity_weight(track.velocity(), det.velocity, cfg.r_vel)
                : direction_weight(track, det);
  t.motion = t.blend * t.centroid + (1.0 - t.blend) * t.pseudo;
  return t;
}

double location_affinity(const AssociationTrack& track, const Detection& det,
                         const AssociationConfig& cfg) {
  return std::exp(-(track.center() - det.center).norm() / cfg.loc_scale);
}

Eigen::MatrixXd affinity(const std::vector<AssociationTrack>& tracks,
                         const std::vector<Detection>& dets, const AssociationConfig& cfg) {
  const auto rows = static_cast<Eigen::Index>(tracks.size());
  const auto cols = static_cast<Eigen::Index>(dets.size());
  Eigen::MatrixXd out(rows, cols);
  if (rows == 0 || cols == 0) return out;

  std::vector<Eigen::VectorXd> track_embeds;
  std::vector<Eigen::VectorXd> det_embeds;
  track_embeds.reserve(tracks.size());
  det_embeds.reserve(dets.size());
  for (const auto& t : tracks) track_embeds.push_back(t.embedding);
  for (const auto& d : dets) det_embeds.push_back(d.embedding);
  const Eigen::MatrixXd deep = embedding_affinity(track_embeds, det_embeds);

  const double w_deep = cfg.w_deep;
  const double w_motion = cfg.w_motion();
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double motion = motion_affinity(tracks[i], dets[j], cfg);
      const double loc = location_affinity(tracks[i], dets[j], cfg);
      out(i, j) = std::clamp(w_deep * deep(i, j) + w_motion * motion * loc, 0.0, 1.0);
    }
  }
  return out;
}

MatchResult greedy_match(const Eigen::MatrixXd& a, double threshold) {
  const auto rows = a.rows();
  const auto cols = a.cols();
  std::vector<char> row_used(static_cast<std::size_t>(rows), 0);
  std::vector<char> col_used(static_cast<std::size_t>(cols), 0);

  MatchResult result;
  while (true) {
    Eigen::Index best_r = -1;
    Eigen::Index best_c = -1;
    double best = -1.0;
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (row_used[r]) continue;
      for (Eigen::Index c = 0; c < cols; ++c) {
        if (col_used[c]) continue;
        // Strict comparison keeps the first (lowest row, then column) maximum.
        if (a(r, c) >= threshold && a(r, c) > best) {
          best = a(r, c);
          best_r = r;
          best_c = c;
        }
      }
    }
    if (best_r < 0) break;
    row_used[best_r] = 1;
    col_used[best_c] = 1;
    result.matches.emplace_back(static_cast<int>(best_r), static_cast<int>(best_c));
  }
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!row_used[r]) result.unmatched_tracks.push_back(static_cast<int>(r));
  }
  for (Eigen::Index c = 0; c < cols; ++c) {
    if (!col_used[c]) result.unmatched_dets.push_back(static_cast<int>(c));
  }
  return result;
}

}  // namespace fusetrack

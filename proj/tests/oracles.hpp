#pragma once

// Reference implementations used by the unit tests and the acceptance binary.
// Written from the definitions, without calling the library code they check.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fusetrack/core_types.hpp"
#include "fusetrack/kalman.hpp"
#include "fusetrack/pillarizer.hpp"

namespace fusetrack::oracle {

// Per-cell mean with std::map bins; double sums in input order, one cast.
inline std::vector<float> pillarize(const std::vector<RadarPoint>& points, double range,
                                    double res, int n) {
  std::map<std::pair<int, int>, std::pair<std::array<double, kRadarChannels>, int>> cells;
  for (const RadarPoint& p : points) {
    const double x = p.feature(radar_channel::kX);
    const double y = p.feature(radar_channel::kY);
    if (!(x >= -range && x < range && y >= -range && y < range)) continue;
    const int col = static_cast<int>(std::floor((x + range) / res));
    const int row = static_cast<int>(std::floor((y + range) / res));
    if (col < 0 || col >= n || row < 0 || row >= n) continue;
    auto& [sum, count] = cells[{row, col}];
    for (int c = 0; c < kRadarChannels; ++c) sum[c] += p.feature(c);
    ++count;
  }
  std::vector<float> out(static_cast<std::size_t>(kRadarChannels) * n * n, 0.0f);
  for (const auto& [rc, acc] : cells) {
    for (int c = 0; c < kRadarChannels; ++c) {
      out[(static_cast<std::size_t>(c) * n + rc.first) * n + rc.second] =
          static_cast<float>(acc.first[c] / acc.second);
    }
  }
  return out;
}

inline std::vector<RadarPoint> random_points(std::mt19937_64& rng, int count, double span) {
  std::uniform_real_distribution<double> pos(-span, span);
  std::uniform_real_distribution<double> feat(-10.0, 10.0);
  std::vector<RadarPoint> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) {
    RadarFeatures f;
    for (double& v : f) v = feat(rng);
    f[radar_channel::kX] = pos(rng);
    f[radar_channel::kY] = pos(rng);
    pts.emplace_back(f);
  }
  return pts;
}

// Sort-and-scan: order candidates by (value desc, row asc, col asc), accept
// each whose row and column are still free.
inline std::vector<std::pair<int, int>> greedy_match(const Eigen::MatrixXd& a, double threshold) {
  std::vector<std::tuple<double, int, int>> entries;
  for (int r = 0; r < a.rows(); ++r) {
    for (int c = 0; c < a.cols(); ++c) {
      if (a(r, c) >= threshold) entries.emplace_back(a(r, c), r, c);
    }
  }
  std::sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) {
    if (std::get<0>(x) != std::get<0>(y)) return std::get<0>(x) > std::get<0>(y);
    if (std::get<1>(x) != std::get<1>(y)) return std::get<1>(x) < std::get<1>(y);
    return std::get<2>(x) < std::get<2>(y);
  });
  std::vector<char> row_used(a.rows(), 0);
  std::vector<char> col_used(a.cols(), 0);
  std::vector<std::pair<int, int>> out;
  for (const auto& [v, r, c] : entries) {
    if (row_used[r] || col_used[c]) continue;
    row_used[r] = col_used[c] = 1;
    out.emplace_back(r, c);
  }
  return out;
}

// Random affinity matrix; with `quantized`, values snap to tenths so ties are
// common and the tie-break rule gets exercised.
inline Eigen::MatrixXd random_affinity(std::mt19937_64& rng, bool quantized) {
  std::uniform_int_distribution<int> dim(0, 20);
  const int rows = dim(rng);
  const int cols = dim(rng);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double v = u(rng);
      m(r, c) = quantized ? std::round(v * 10.0) / 10.0 : v;
    }
  }
  return m;
}

inline KfMatrix random_spd(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  KfMatrix a;
  for (int i = 0; i < kKfDim; ++i) {
    for (int j = 0; j < kKfDim; ++j) a(i, j) = n(rng);
  }
  KfMatrix p = a * a.transpose() / kKfDim + 0.05 * KfMatrix::Identity();
  return 0.5 * (p + p.transpose());
}

// Hand-evaluated affinity case. Inputs:
//   track  mean [1, 2, 0, 0.1, 4, 2, 1.5, 2, 0, 0], previous center (0, 2, 0),
//          embedding (1, 0)
//   det    center (1.5, 2.5, 0.1), yaw 0.2, dims (4.2, 1.9, 1.6),
//          velocity (2.5, 0.5, 0), embedding (0.6, 0.8)
//   cfg    w_deep 0.25, r_vel 1, loc_scale 10, centroid_scale 10
// Sub-terms, evaluated by hand:
//   a_deep     = (1 + 0.6) / 2                              = 0.8
//   |dv|       = sqrt(0.5^2 + 0.5^2)                        = 0.7071067811865476
//   a_vel      = exp(-0.7071067811865476)                   = 0.4930686913952398
//   |dc|       = sqrt(0.25 + 0.25 + 0.01)                   = 0.7141428428542850
//   a_centroid = exp(-0.0714142842854285)                   = 0.9310760820262574
//   L1         = 0.5 + 0.5 + 0.1 + 0.1 + 0.2 + 0.1 + 0.1    = 1.6
//   a_pseudo   = exp(-0.16)                                 = 0.8521437889662113
//   a_motion   = a_vel * a_centroid + (1 - a_vel) * a_pseudo
//   a_loc      = a_centroid (same distance and scale)
//   A          = 0.25 * 0.8 + 0.75 * a_motion * a_loc
inline constexpr double kHandAffinityVelocity = 0.8222354674342354;
// Cosine trade-off variant: heading (2, 0), pseudo-velocity (1.5, 0.5),
//   cos = 3 / (2 * sqrt(2.5)) = 0.9486832980505138, weight = 0.9743416490252569.
inline constexpr double kHandAffinityCosine = 0.8487627408177334;

inline TrackedBox box(std::int64_t id, double x, double y, double score = 1.0, int cls = 0) {
  TrackedBox b;
  b.track_id = id;
  b.center = {x, y, 0.0};
  b.score = score;
  b.class_id = cls;
  return b;
}

// Two scenes, six gt boxes. Per score threshold the kept predictions give
// (TP, FP, IDS, distance sum):
//   0.9 -> (1, 1, 0, 0.5)   0.8 -> (2, 1, 0, 0.8)   0.7 -> (3, 1, 1, 0.8)
//   0.6 -> (4, 1, 1, 1.0)   0.4 -> (5, 1, 1, 1.0)   recall 1 unreachable
// MOTAR(r) = (TP - FP - IDS) / (r P) after simplifying the definition.
inline std::pair<TrackLog, TrackLog> metric_hand_case() {
  TrackLog gt(2), pred(2);
  gt[0] = {{box(1, 0, 0), box(2, 10, 0)}, {box(1, 0, 0), box(2, 10, 0)}};
  gt[1] = {{box(1, -5, -5)}, {box(1, -5, -5)}};

  TrackedBox a0 = box(100, 0.5, 0, 0.9);
  a0.velocity = {1.0, 0.0, 0.0};
  pred[0] = {{a0, box(200, 10, 0.3, 0.8)},
             {box(101, 0, 0, 0.7), box(300, 30, 30, 0.95)}};  // id switch + one FP; B missed
  pred[1] = {{box(7, -5, -5.2, 0.6)}, {box(7, -5, -5, 0.4)}};
  return {gt, pred};
}

// Frozen from the closed form above over the 40 default recall targets.
inline constexpr double kHandAmota = 0.41180614374112146;
inline constexpr double kHandAmotp = 0.6079166666666665;

}  // namespace fusetrack::oracle

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "fusetrack/core_types.hpp"

namespace fusetrack {

inline constexpr int kRadarChannels = 18;
inline constexpr int kImageBevChannels = 64;
inline constexpr int kEncodedBevChannels = 256;

// Channel layout of a radar point. Positions come first so that the per-pillar
// mean carries the point centroid. Only the channels named here have meaning
// inside this library; the rest are passed through.
namespace radar_channel {
inline constexpr int kX = 0;
inline constexpr int kY = 1;
inline constexpr int kZ = 2;
inline constexpr int kRcs = 5;
inline constexpr int kVxComp = 8;
inline constexpr int kVyComp = 9;
inline constexpr int kTimeOffset = 17;
}  // namespace radar_channel

using RadarFeatures = std::array<double, kRadarChannels>;

class RadarPoint {
 public:
  RadarPoint() = default;
  explicit RadarPoint(const RadarFeatures& features);  // throws on non-finite

  static RadarPoint at(const Eigen::Vector3d& position);

  Eigen::Vector3d position() const {
    return {features_[radar_channel::kX], features_[radar_channel::kY],
            features_[radar_channel::kZ]};
  }
  void set_position(const Eigen::Vector3d& p);

  const RadarFeatures& features() const { return features_; }
  double feature(int channel) const { return features_[channel]; }
  void set_feature(int channel, double value);

 private:
  RadarFeatures features_{};
};

// Planar rigid transform of a sweep frame into the reference frame.
struct Pose2 {
  double theta = 0.0;
  double tx = 0.0;
  double ty = 0.0;

  Eigen::Vector2d apply(const Eigen::Vector2d& p) const;
};

struct RadarSweep {
  std::vector<RadarPoint> points;
  double timestamp = 0.0;
  Pose2 ego_pose;
};

inline constexpr int kDefaultMaxSweeps = 5;

// Merges the newest `max_sweeps` sweeps into the frame of the last one.
// Sweeps must be ordered oldest to newest by timestamp.
std::vector<RadarPoint> accumulate_sweeps(const std::vector<RadarSweep>& sweeps,
                                          double reference_time,
                                          int max_sweeps = kDefaultMaxSweeps);

// Per-cell mean of the 18 radar channels. Empty cells stay zero and points
// outside the grid are dropped. Sums run in input order, so the result does
// not depend on how callers parallelize across frames.
FeatureMap pillarize(std::span<const RadarPoint> points, const BevGrid& grid);

// Channel concatenation, `first` channels leading. Throws std::invalid_argument
// when the spatial shapes differ.
FeatureMap concat_channels(const FeatureMap& first, const FeatureMap& second);

FeatureMap fuse_concat(const FeatureMap& image_bev, const FeatureMap& radar_bev);
FeatureMap residual_concat(const FeatureMap& encoded_bev, const FeatureMap& radar_bev);

class FeatureEncoder {
 public:
  virtual ~FeatureEncoder() = default;
  virtual int in_channels() const = 0;
  virtual int out_channels() const = 0;
  virtual FeatureMap encode(const FeatureMap& input) const = 0;
};

// Stand-in for a learned BEV encoder: a fixed per-cell linear channel
// projection with seed-derived weights. No spatial mixing.
class LinearStubEncoder final : public FeatureEncoder {
 public:
  LinearStubEncoder(int in_channels, int out_channels = kEncodedBevChannels,
                    std::uint64_t seed = 0);

  int in_channels() const override { return in_channels_; }
  int out_channels() const override { return out_channels_; }
  FeatureMap encode(const FeatureMap& input) const override;

  float weight(int out_c, int in_c) const {
    return weights_[static_cast<std::size_t>(out_c) * in_channels_ + in_c];
  }

 private:
  int in_channels_;
  int out_channels_;
  std::vector<float> weights_;  // out x in, row-major
};

FeatureMap encode_bev(const FeatureMap& fused, const FeatureEncoder& encoder);

enum class FusionVariant { kPillar, kVoxelCompressor };

struct FusionConfig {
  FusionVariant variant = FusionVariant::kPillar;
  bool residual = true;
};

// Image BEV (64ch) + radar pillars (18ch) -> encoder -> optional residual
// radar concat. Returns the detection-head input: 274 channels with the
// residual connection, 256 without.
FeatureMap bev_fusion_forward(const FeatureMap& image_bev, const FeatureMap& radar_bev,
                              const FeatureEncoder& encoder, const FusionConfig& cfg);

}  // namespace fusetrack

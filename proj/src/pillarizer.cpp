#include "fusetrack/pillarizer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fusetrack/random.hpp"

namespace fusetrack {

RadarPoint::RadarPoint(const RadarFeatures& features) : features_(features) {
  for (double v : features_) {
    if (!std::isfinite(v)) throw std::invalid_argument("RadarPoint: non-finite feature");
  }
}

RadarPoint RadarPoint::at(const Eigen::Vector3d& position) {
  RadarPoint p;
  p.set_position(position);
  return p;
}

void RadarPoint::set_position(const Eigen::Vector3d& p) {
  if (!p.allFinite()) throw std::invalid_argument("RadarPoint: non-finite position");
  features_[radar_channel::kX] = p.x();
  features_[radar_channel::kY] = p.y();
  features_[radar_channel::kZ] = p.z();
}

void RadarPoint::set_feature(int channel, double value) {
  if (channel < 0 || channel >= kRadarChannels) {
    throw std::out_of_range("RadarPoint: channel index");
  }
  if (!std::isfinite(value)) throw std::invalid_argument("RadarPoint: non-finite feature");
  features_[channel] = value;
}

Eigen::Vector2d Pose2::apply(const Eigen::Vector2d& p) const {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c * p.x() - s * p.y() + tx, s * p.x() + c * p.y() + ty};
}

std::vector<RadarPoint> accumulate_sweeps(const std::vector<RadarSweep>& sweeps,
                                          double reference_time, int max_sweeps) {
  if (max_sweeps < 1) throw std::invalid_argument("accumulate_sweeps: max_sweeps < 1");
  for (std::size_t i = 1; i < sweeps.size(); ++i) {
    if (sweeps[i].timestamp < sweeps[i - 1].timestamp) {
      throw std::invalid_argument("accumulate_sweeps: sweeps not ordered by timestamp");
    }
  }
  const std::size_t keep = std::min(sweeps.size(), static_cast<std::size_t>(max_sweeps));
  const std::size_t first = sweeps.size() - keep;

  std::size_t total = 0;
  for (std::size_t i = first; i < sweeps.size(); ++i) total += sweeps[i].points.size();

  std::vector<RadarPoint> out;
  out.reserve(total);
  for (std::size_t i = first; i < sweeps.size(); ++i) {
    const RadarSweep& sweep = sweeps[i];
    const double offset = reference_time - sweep.timestamp;
    for (const RadarPoint& src : sweep.points) {
      RadarPoint p = src;
      const Eigen::Vector3d pos = src.position();
      const Eigen::Vector2d xy = sweep.ego_pose.apply(pos.head<2>());
      p.set_position({xy.x(), xy.y(), pos.z()});
      p.set_feature(radar_channel::kTimeOffset, offset);
      out.push_back(p);
    }
  }
  return out;
}

FeatureMap pillarize(std::span<const RadarPoint> points, const BevGrid& grid) {
  const int n = grid.cells_per_side();
  const std::size_t plane = static_cast<std::size_t>(n) * n;
  std::vector<double> sums(plane * kRadarChannels, 0.0);
  std::vector<std::uint32_t> counts(plane, 0);

  for (const RadarPoint& p : points) {
    const auto cell = grid.world_to_cell(p.position().head<2>());
    if (!cell) continue;
    const std::size_t idx = static_cast<std::size_t>(cell->row) * n + cell->col;
    ++counts[idx];
    double* acc = sums.data() + idx * kRadarChannels;
    for (int c = 0; c < kRadarChannels; ++c) acc[c] += p.feature(c);
  }

  FeatureMap out(kRadarChannels, n, n);
  for (std::size_t idx = 0; idx < plane; ++idx) {
    if (counts[idx] == 0) continue;
    const int row = static_cast<int>(idx / n);
    const int col = static_cast<int>(idx % n);
    const double* acc = sums.data() + idx * kRadarChannels;
    for (int c = 0; c < kRadarChannels; ++c) {
      out.at(c, row, col) = static_cast<float>(acc[c] / counts[idx]);
    }
  }
  return out;
}

FeatureMap concat_channels(const FeatureMap& first, const FeatureMap& second) {
  if (!first.same_spatial_shape(second)) {
    throw std::invalid_argument(
        "concat_channels: incompatible grids (" + std::to_string(first.height()) + "x" +
        std::to_string(first.width()) + " vs " + std::to_string(second.height()) + "x" +
        std::to_string(second.width()) + ")");
  }
  std::vector<float> data;
  data.reserve(first.data().size() + second.data().size());
  data.insert(data.end(), first.data().begin(), first.data().end());
  data.insert(data.end(), second.data().begin(), second.data().end());
  return FeatureMap(first.channels() + second.channels(), first.height(), first.width(),
                    std::move(data));
}

namespace {

void require_channels(const FeatureMap& m, int expected, const char* what) {
  if (m.channels() != expected) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(expected) +
                                " channels, got " + std::to_string(m.channels()));
  }
}

}  // namespace

FeatureMap fuse_concat(const FeatureMap& image_bev, const FeatureMap& radar_bev) {
  require_channels(image_bev, kImageBevChannels, "fuse_concat image input");
  require_channels(radar_bev, kRadarChannels, "fuse_concat radar input");
  return concat_channels(image_bev, radar_bev);
}

FeatureMap residual_concat(const FeatureMap& encoded_bev, const FeatureMap& radar_bev) {
  require_channels(encoded_bev, kEncodedBevChannels, "residual_concat encoded input");
  require_channels(radar_bev, kRadarChannels, "residual_concat radar input");
  return concat_channels(encoded_bev, radar_bev);
}

LinearStubEncoder::LinearStubEncoder(int in_channels, int out_channels, std::uint64_t seed)
    : in_channels_(in_channels), out_channels_(out_channels) {
  if (in_channels < 1 || out_channels < 1) {
    throw std::invalid_argument("LinearStubEncoder: channel counts must be positive");
  }
  weights_.resize(static_cast<std::size_t>(in_channels) * out_channels);
  RandomStream rng(seed, 0x454E43u, static_cast<std::uint32_t>(in_channels),
                   static_cast<std::uint32_t>(out_channels));
  const double scale = 1.0 / std::sqrt(static_cast<double>(in_channels));
  for (float& w : weights_) w = static_cast<float>(rng.uniform(-scale, scale));
}

FeatureMap LinearStubEncoder::encode(const FeatureMap& input) const {
  require_channels(input, in_channels_, "LinearStubEncoder");
  const std::size_t plane = input.plane_size();
  std::vector<float> out(static_cast<std::size_t>(out_channels_) * plane, 0.0f);
  std::vector<double> acc(plane);
  for (int o = 0; o < out_channels_; ++o) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int i = 0; i < in_channels_; ++i) {
      const double w = weight(o, i);
      const auto src = input.channel(i);
      for (std::size_t k = 0; k < plane; ++k) acc[k] += w * src[k];
    }
    float* dst = out.data() + static_cast<std::size_t>(o) * plane;
    for (std::size_t k = 0; k < plane; ++k) dst[k] = static_cast<float>(acc[k]);
  }
  return FeatureMap(out_channels_, input.height(), input.width(), std::move(out));
}

FeatureMap encode_bev(const FeatureMap& fused, const FeatureEncoder& encoder) {
  if (fused.channels() != encoder.in_channels()) {
    throw std::invalid_argument("encode_bev: encoder expects " +
                                std::to_string(encoder.in_channels()) + " channels, got " +
                                std::to_string(fused.channels()));
  }
  return encoder.encode(fused);
}

FeatureMap bev_fusion_forward(const FeatureMap& image_bev, const FeatureMap& radar_bev,
                              const FeatureEncoder& encoder, const FusionConfig& cfg) {
  if (cfg.variant == FusionVariant::kVoxelCompressor) {
    throw std::invalid_argument(
        "fusion variant 'voxel' is not implemented: the z-binned voxel grid with a 3D "
        "convolutional compressor underperforms the pillar variant");
  }
  FeatureMap encoded = encode_bev(fuse_concat(image_bev, radar_bev), encoder);
  if (encoded.channels() != kEncodedBevChannels) {
    throw std::invalid_argument("bev_fusion_forward: encoder must emit 256 channels");
  }
  if (!cfg.residual) return encoded;
  return residual_concat(encoded, radar_bev);
}

}  // namespace fusetrack

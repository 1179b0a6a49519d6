#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace fusetrack {

inline constexpr int kDefaultEmbeddingDim = 256;

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double angle) {
  double r = std::remainder(angle, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
  return r;
}

struct CellIndex {
  int row = 0;
  int col = 0;
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

// Ego-centered square BEV grid. x points right, y forward; rows run along y.
// Cells are half-open, so a coordinate equal to +range_m is outside.
class BevGrid {
 public:
  BevGrid() : BevGrid(51.2, 0.8) {}
  BevGrid(double range_m, double resolution_m);

  double range_m() const { return range_m_; }
  double resolution_m() const { return resolution_m_; }
  int cells_per_side() const { return cells_per_side_; }

  std::optional<CellIndex> world_to_cell(const Eigen::Vector2d& p) const;
  Eigen::Vector2d cell_center(CellIndex cell) const;

 private:
  double range_m_;
  double resolution_m_;
  int cells_per_side_;
};

inline std::optional<CellIndex> world_to_cell(const Eigen::Vector2d& p,
                                              const BevGrid& grid) {
  return grid.world_to_cell(p);
}

// Dense channel-major tensor (C x H x W).
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(int channels, int height, int width);  // zero-filled
  FeatureMap(int channels, int height, int width, std::vector<float> data);

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t plane_size() const {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }

  float at(int c, int row, int col) const { return data_[index(c, row, col)]; }
  float& at(int c, int row, int col) { return data_[index(c, row, col)]; }

  std::span<const float> channel(int c) const {
    return {data_.data() + static_cast<std::size_t>(c) * plane_size(), plane_size()};
  }
  std::span<float> channel(int c) {
    return {data_.data() + static_cast<std::size_t>(c) * plane_size(), plane_size()};
  }

  const std::vector<float>& data() const { return data_; }

  bool same_spatial_shape(const FeatureMap& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

 private:
  std::size_t index(int c, int row, int col) const {
    return (static_cast<std::size_t>(c) * height_ + row) * width_ + col;
  }

  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<float> data_;
};

struct Detection {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d dims = Eigen::Vector3d::Ones();  // l, w, h
  double yaw = 0.0;
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  double score = 1.0;
  int class_id = 0;
  Eigen::VectorXd embedding;
};

// Throws std::invalid_argument when a detection violates its invariants
// (positive dims, score in [0,1], finite values, unit-norm embedding).
void validate_detection(const Detection& d);

Eigen::VectorXd normalized(const Eigen::VectorXd& v);

struct TrackedBox {
  std::int64_t track_id = 0;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d dims = Eigen::Vector3d::Ones();
  double yaw = 0.0;
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  double score = 1.0;
  int class_id = 0;
};

// One scene: frames of boxes, in frame order.
using FrameBoxes = std::vector<TrackedBox>;
using SceneLog = std::vector<FrameBoxes>;
using TrackLog = std::vector<SceneLog>;

}  // namespace fusetrack

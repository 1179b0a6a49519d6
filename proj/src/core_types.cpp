#include "fusetrack/core_types.hpp"

#include <algorithm>
#include <string>

namespace fusetrack {

BevGrid::BevGrid(double range_m, double resolution_m)
    : range_m_(range_m), resolution_m_(resolution_m), cells_per_side_(0) {
  if (!(range_m > 0.0) || !(resolution_m > 0.0) || !std::isfinite(range_m) ||
      !std::isfinite(resolution_m)) {
    throw std::invalid_argument("BevGrid: range and resolution must be positive");
  }
  const double cells = std::round(2.0 * range_m / resolution_m);
  if (cells < 1.0 || cells > 1.0e5) {
    throw std::invalid_argument("BevGrid: unsupported cell count");
  }
  cells_per_side_ = static_cast<int>(cells);
}

std::optional<CellIndex> BevGrid::world_to_cell(const Eigen::Vector2d& p) const {
  if (!p.allFinite()) return std::nullopt;
  const double row = std::floor((p.y() + range_m_) / resolution_m_);
  const double col = std::floor((p.x() + range_m_) / resolution_m_);
  if (row < 0.0 || col < 0.0 || row >= cells_per_side_ || col >= cells_per_side_) {
    return std::nullopt;
  }
  return CellIndex{static_cast<int>(row), static_cast<int>(col)};
}

Eigen::Vector2d BevGrid::cell_center(CellIndex cell) const {
  return {(cell.col + 0.5) * resolution_m_ - range_m_,
          (cell.row + 0.5) * resolution_m_ - range_m_};
}

FeatureMap::FeatureMap(int channels, int height, int width)
    : FeatureMap(channels, height, width,
                 std::vector<float>(static_cast<std::size_t>(std::max(channels, 0)) *
                                        std::max(height, 0) * std::max(width, 0),
                                    0.0f)) {}

FeatureMap::FeatureMap(int channels, int height, int width, std::vector<float> data)
    : channels_(channels), height_(height), width_(width), data_(std::move(data)) {
  if (channels < 0 || height < 0 || width < 0) {
    throw std::invalid_argument("FeatureMap: negative dimension");
  }
  const std::size_t expected = static_cast<std::size_t>(channels) * height * width;
  if (data_.size() != expected) {
    throw std::invalid_argument("FeatureMap: data length " + std::to_string(data_.size()) +
                                " does not match " + std::to_string(expected));
  }
  for (float v : data_) {
    if (!std::isfinite(v)) throw std::invalid_argument("FeatureMap: non-finite value");
  }
}

Eigen::VectorXd normalized(const Eigen::VectorXd& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("cannot normalize a zero or non-finite vector");
  }
  return v / n;
}

void validate_detection(const Detection& d) {
  if (!d.center.allFinite() || !d.dims.allFinite() || !std::isfinite(d.yaw) ||
      !d.velocity.allFinite() || !std::isfinite(d.score) || !d.embedding.allFinite()) {
    throw std::invalid_argument("detection has non-finite fields");
  }
  if ((d.dims.array() <= 0.0).any()) {
    throw std::invalid_argument("detection dims must be positive");
  }
  if (d.score < 0.0 || d.score > 1.0) {
    throw std::invalid_argument("detection score outside [0,1]");
  }
  if (d.embedding.size() == 0 || std::abs(d.embedding.norm() - 1.0) > 1e-6) {
    throw std::invalid_argument("detection embedding must be unit norm");
  }
}

}  // namespace fusetrack

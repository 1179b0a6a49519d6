#pragma once

#include <array>

#include <Eigen/Dense>

#include "fusetrack/core_types.hpp"

namespace fusetrack {

inline constexpr int kKfDim = 10;

using KfVector = Eigen::Matrix<double, kKfDim, 1>;
using KfMatrix = Eigen::Matrix<double, kKfDim, kKfDim>;

// State layout: [x, y, z, yaw, l, w, h, vx, vy, vz].
namespace kf_index {
inline constexpr int kX = 0;
inline constexpr int kYaw = 3;
inline constexpr int kLength = 4;
inline constexpr int kVx = 7;
}  // namespace kf_index

struct KfState {
  KfVector mean = KfVector::Zero();
  KfMatrix covariance = KfMatrix::Identity();

  Eigen::Vector3d position() const { return mean.segment<3>(kf_index::kX); }
  Eigen::Vector3d velocity() const { return mean.segment<3>(kf_index::kVx); }
  Eigen::Vector3d dims() const { return mean.segment<3>(kf_index::kLength); }
  double yaw() const { return mean(kf_index::kYaw); }
};

// Noise parameters are per state dimension, in state-layout order.
// process_noise holds variance rates: the added covariance is diag(q) * dt.
struct KfNoiseConfig {
  std::array<double, kKfDim> process_noise{0.1, 0.1, 0.1, 0.01, 0.01, 0.01, 0.01, 0.1, 0.1, 0.1};
  std::array<double, kKfDim> measurement_noise{0.25, 0.25, 0.25, 0.05, 0.05,
                                                0.05, 0.05, 0.25, 0.25, 0.25};
  std::array<double, kKfDim> initial_covariance{1.0, 1.0, 1.0, 0.1, 0.1, 0.1, 0.1, 4.0, 4.0, 4.0};

  void validate() const;
};

KfVector measurement_from(const Detection& d);

KfState kf_init(const Detection& d, const KfNoiseConfig& cfg);
KfState kf_predict(const KfState& s, double dt, const KfNoiseConfig& cfg);
KfState kf_update(const KfState& s, const Detection& d, const KfNoiseConfig& cfg);
KfState kf_update(const KfState& s, const KfVector& measurement, const KfNoiseConfig& cfg);

// Innovation measurement - prediction, with the yaw component wrapped.
KfVector kf_innovation(const KfVector& measurement, const KfVector& predicted);

bool is_spd(const KfMatrix& m, double symmetry_tol = 1e-9);

}  // namespace fusetrack

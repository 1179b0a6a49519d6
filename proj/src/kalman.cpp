#include "fusetrack/kalman.hpp"

#include <cmath>
#include <stdexcept>

namespace fusetrack {
namespace {

KfMatrix diag(const std::array<double, kKfDim>& v) {
  KfMatrix m = KfMatrix::Zero();
  for (int i = 0; i < kKfDim; ++i) m(i, i) = v[i];
  return m;
}

void symmetrize(KfMatrix& m) { m = 0.5 * (m + m.transpose()).eval(); }

}  // namespace

void KfNoiseConfig::validate() const {
  for (int i = 0; i < kKfDim; ++i) {
    if (!(process_noise[i] > 0.0) || !(measurement_noise[i] > 0.0) ||
        !(initial_covariance[i] > 0.0) || !std::isfinite(process_noise[i]) ||
        !std::isfinite(measurement_noise[i]) || !std::isfinite(initial_covariance[i])) {
      throw std::invalid_argument("KfNoiseConfig: all noise terms must be finite and positive");
    }
  }
}

KfVector measurement_from(const Detection& d) {
  KfVector z;
  z << d.center, wrap_angle(d.yaw), d.dims, d.velocity;
  return z;
}

KfState kf_init(const Detection& d, const KfNoiseConfig& cfg) {
  KfState s;
  s.mean = measurement_from(d);
  s.covariance = diag(cfg.initial_covariance);
  return s;
}

KfState kf_predict(const KfState& s, double dt, const KfNoiseConfig& cfg) {
  if (!(dt >= 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("kf_predict: dt must be finite and non-negative");
  }
  KfMatrix f = KfMatrix::Identity();
  for (int i = 0; i < 3; ++i) f(kf_index::kX + i, kf_index::kVx + i) = dt;

  KfState out;
  out.mean = f * s.mean;
  out.mean(kf_index::kYaw) = wrap_angle(out.mean(kf_index::kYaw));
  out.covariance = f * s.covariance * f.transpose() + diag(cfg.process_noise) * dt;
  symmetrize(out.covariance);
  return out;
}

KfVector kf_innovation(const KfVector& measurement, const KfVector& predicted) {
  KfVector y = measurement - predicted;
  y(kf_index::kYaw) = wrap_angle(y(kf_index::kYaw));
  return y;
}

KfState kf_update(const KfState& s, const KfVector& z, const KfNoiseConfig& cfg) {
  if (!z.allFinite()) throw std::invalid_argument("kf_update: non-finite measurement");

  // Full-state observation, H = I.
  const KfMatrix r = diag(cfg.measurement_noise);
  const KfMatrix innovation_cov = s.covariance + r;
  const Eigen::LDLT<KfMatrix> ldlt(innovation_cov);
  if (ldlt.info() != Eigen::Success) {
    throw std::runtime_error("kf_update: singular innovation covariance");
  }
  // K = P S^-1  <=>  S K^T = P^T
  const KfMatrix gain = ldlt.solve(s.covariance.transpose()).transpose();

  KfState out;
  out.mean = s.mean + gain * kf_innovation(z, s.mean);
  out.mean(kf_index::kYaw) = wrap_angle(out.mean(kf_index::kYaw));

  const KfMatrix i_minus_k = KfMatrix::Identity() - gain;
  out.covariance = i_minus_k * s.covariance * i_minus_k.transpose() + gain * r * gain.transpose();
  symmetrize(out.covariance);
  return out;
}

KfState kf_update(const KfState& s, const Detection& d, const KfNoiseConfig& cfg) {
  return kf_update(s, measurement_from(d), cfg);
}

bool is_spd(const KfMatrix& m, double symmetry_tol) {
  if (!m.allFinite()) return false;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > symmetry_tol) return false;
  return Eigen::LLT<KfMatrix>(m).info() == Eigen::Success;
}

}  // namespace fusetrack

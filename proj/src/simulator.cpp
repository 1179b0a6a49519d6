#include "fusetrack/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fusetrack/random.hpp"

namespace fusetrack {
namespace {

// Stream purposes; the first counter word of every draw.
enum Purpose : std::uint32_t {
  kSpawn = 1,
  kLatent = 2,
  kDetect = 3,
  kVelocityNoise = 4,
  kClutter = 5,
  kRadar = 6,
  kDegrade = 7,
};

constexpr double kSpawnSeparation = 4.0;
constexpr int kMaxSpawnAttempts = 1000;
constexpr double kMaxSpeed = 12.0;
constexpr double kFootprintInflation = 1.2;

struct Trajectory {
  int class_id = 0;
  Eigen::Vector2d anchor = Eigen::Vector2d::Zero();  // position at anchor_time
  double anchor_time = 0.0;
  double speed = 0.0;
  double heading = 0.0;   // at anchor_time
  double turn_rate = 0.0;  // rad/s

  Eigen::Vector2d position(double t) const {
    const double tau = t - anchor_time;
    if (std::abs(turn_rate) < 1e-9) {
      return anchor + speed * tau * Eigen::Vector2d(std::cos(heading), std::sin(heading));
    }
    const double h = heading + turn_rate * tau;
    const double k = speed / turn_rate;
    return anchor + k * Eigen::Vector2d(std::sin(h) - std::sin(heading),
                                        std::cos(heading) - std::cos(h));
  }
  double heading_at(double t) const { return heading + turn_rate * (t - anchor_time); }
  Eigen::Vector2d velocity(double t) const {
    const double h = heading_at(t);
    return speed * Eigen::Vector2d(std::cos(h), std::sin(h));
  }
};

Eigen::VectorXd random_unit(RandomStream& rng, int dim) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = rng.normal();
  return normalized(v);
}

bool far_from(const std::vector<Trajectory>& existing, const Eigen::Vector2d& p, double sep) {
  return std::all_of(existing.begin(), existing.end(), [&](const Trajectory& t) {
    return (t.anchor - p).norm() >= sep;
  });
}

std::vector<Trajectory> free_trajectories(const ScenarioConfig& cfg) {
  const double range = cfg.world_range_m;
  const double duration = (cfg.n_frames - 1) * cfg.dt;
  const double mid_time = 0.5 * duration;
  const double vmax = duration > 0.0 ? std::min(kMaxSpeed, 2.0 * range / duration) : kMaxSpeed;
  const double vmin = std::min(1.0, vmax);

  std::vector<Trajectory> out;
  out.reserve(static_cast<std::size_t>(cfg.n_objects));
  for (int o = 0; o < cfg.n_objects; ++o) {
    RandomStream rng(cfg.seed, kSpawn, static_cast<std::uint32_t>(o));
    Trajectory t;
    t.class_id = o % cfg.n_classes;
    t.anchor_time = mid_time;
    bool placed = false;
    for (int attempt = 0; attempt < kMaxSpawnAttempts && !placed; ++attempt) {
      const Eigen::Vector2d p(rng.uniform(-0.5 * range, 0.5 * range),
                              rng.uniform(-0.5 * range, 0.5 * range));
      if (far_from(out, p, kSpawnSeparation)) {
        t.anchor = p;
        placed = true;
      }
    }
    if (!placed) throw std::invalid_argument("simulator: objects cannot fit in the world range");
    t.speed = rng.uniform(vmin, vmax);
    t.heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
    if (cfg.motion == MotionModel::kTurning) t.turn_rate = rng.uniform(-0.15, 0.15);
    out.push_back(t);
  }
  return out;
}

// Pairs of objects that pass (almost) through the same point at frame
// n_frames / 2 with velocities at least 4 m/s apart. An odd object out moves
// with constant velocity.
std::vector<Trajectory> crossing_trajectories(const ScenarioConfig& cfg) {
  const double range = cfg.world_range_m;
  const double duration = (cfg.n_frames - 1) * cfg.dt;
  const double cross_time = (cfg.n_frames / 2) * cfg.dt;
  const double reach = std::max(cross_time, duration - cross_time);
  const double vmax = reach > 0.0 ? std::min(kMaxSpeed, range / reach) : kMaxSpeed;
  constexpr double kMinSpeedGap = 4.0;
  constexpr double kPassOffset = 0.4;

  std::vector<Trajectory> out;
  std::vector<Trajectory> crossings;  // anchors of already placed pairs
  const int pairs = cfg.n_objects / 2;
  for (int p = 0; p < pairs; ++p) {
    RandomStream rng(cfg.seed, kSpawn, static_cast<std::uint32_t>(2 * p));
    bool placed = false;
    Trajectory a;
    Trajectory b;
    for (int attempt = 0; attempt < kMaxSpawnAttempts && !placed; ++attempt) {
      const Eigen::Vector2d c(rng.uniform(-0.4 * range, 0.4 * range),
                              rng.uniform(-0.4 * range, 0.4 * range));
      const double s1 = rng.uniform(0.6 * vmax, vmax);
      const double s2 = rng.uniform(0.6 * vmax, vmax);
      const double h1 = rng.uniform(-std::numbers::pi, std::numbers::pi);
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      const double h2 = h1 + sign * rng.uniform(std::numbers::pi / 3.0, 5.0 * std::numbers::pi / 6.0);
      const Eigen::Vector2d v1 = s1 * Eigen::Vector2d(std::cos(h1), std::sin(h1));
      const Eigen::Vector2d v2 = s2 * Eigen::Vector2d(std::cos(h2), std::sin(h2));
      if ((v1 - v2).norm() < kMinSpeedGap || !far_from(crossings, c, 2.0 * kSpawnSeparation)) {
        continue;
      }
      a = Trajectory{0, c, cross_time, s1, h1, 0.0};
      const Eigen::Vector2d normal(-std::sin(h2), std::cos(h2));
      b = Trajectory{0, c + kPassOffset * normal, cross_time, s2, h2, 0.0};
      placed = true;
    }
    if (!placed) {
      throw std::invalid_argument("simulator: cannot construct crossing pair within the world range");
    }
    crossings.push_back(a);
    out.push_back(a);
    out.push_back(b);
  }
  if (cfg.n_objects % 2 == 1) {
    ScenarioConfig single = cfg;
    single.n_objects = cfg.n_objects;
    auto free = free_trajectories(single);
    out.push_back(free.back());
  }
  return out;
}

std::vector<Trajectory> make_trajectories(const ScenarioConfig& cfg) {
  switch (cfg.motion) {
    case MotionModel::kCrossing:
      return crossing_trajectories(cfg);
    case MotionModel::kConstantVelocity:
    case MotionModel::kTurning:
      break;
  }
  return free_trajectories(cfg);
}

TrackedBox gt_box(const Trajectory& traj, int object, double t) {
  TrackedBox b;
  b.track_id = object;
  const Eigen::Vector2d p = traj.position(t);
  const Eigen::Vector2d v = traj.velocity(t);
  b.center = {p.x(), p.y(), 0.0};
  b.velocity = {v.x(), v.y(), 0.0};
  b.dims = class_dims(traj.class_id);
  b.yaw = wrap_angle(traj.heading_at(t));
  b.score = 1.0;
  b.class_id = traj.class_id;
  return b;
}

Eigen::Vector3d noisy(const Eigen::Vector3d& v, double sigma, RandomStream& rng) {
  if (sigma == 0.0) return v;
  Eigen::Vector3d out = v;
  for (int i = 0; i < 3; ++i) out(i) += sigma * rng.normal();
  return out;
}

}  // namespace

Eigen::Vector3d class_dims(int class_id) {
  switch (class_id % 3) {
    case 0:
      return {4.5, 1.9, 1.6};  // car
    case 1:
      return {0.8, 0.7, 1.8};  // pedestrian
    default:
      return {1.8, 0.6, 1.5};  // cyclist
  }
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("scenario: " + msg); };
  if (n_objects < 0) fail("n_objects must be >= 0");
  if (n_frames < 1) fail("n_frames must be >= 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt must be positive");
  for (double s : {sigma_pos, sigma_vel, sigma_embed, sigma_score}) {
    if (!(s >= 0.0) || !std::isfinite(s)) fail("noise sigmas must be finite and >= 0");
  }
  if (!(p_miss >= 0.0 && p_miss <= 1.0)) fail("p_miss must lie in [0,1]");
  if (!(clutter_rate >= 0.0 && clutter_rate <= 500.0)) fail("clutter_rate must lie in [0,500]");
  if (radar_points_per_object < 0) fail("radar_points_per_object must be >= 0");
  if (n_classes < 1) fail("n_classes must be >= 1");
  if (embedding_dim < 1) fail("embedding_dim must be >= 1");
  if (!(world_range_m > 0.0)) fail("world_range_m must be positive");
  const double capacity =
      world_range_m * world_range_m / (4.0 * kSpawnSeparation * kSpawnSeparation);
  if (n_objects > capacity) fail("objects cannot fit in the world range");
}

ScenarioBundle generate(const ScenarioConfig& cfg) {
  cfg.validate();
  const std::vector<Trajectory> trajectories = make_trajectories(cfg);
  const int dim = cfg.embedding_dim;
  const double range = cfg.world_range_m;

  std::vector<Eigen::VectorXd> latents;
  latents.reserve(trajectories.size());
  for (std::size_t o = 0; o < trajectories.size(); ++o) {
    RandomStream rng(cfg.seed, kLatent, static_cast<std::uint32_t>(o));
    latents.push_back(random_unit(rng, dim));
  }

  ScenarioBundle bundle;
  SceneLog gt_scene;
  gt_scene.reserve(static_cast<std::size_t>(cfg.n_frames));
  for (int f = 0; f < cfg.n_frames; ++f) {
    const double t = f * cfg.dt;
    const auto frame_key = static_cast<std::uint32_t>(f);

    FrameBoxes gt_frame;
    DetectionFrame det_frame;
    det_frame.frame_idx = f;
    det_frame.dt = cfg.dt;
    std::vector<int> sources;
    RadarSweep sweep;
    sweep.timestamp = t;

    for (std::size_t o = 0; o < trajectories.size(); ++o) {
      const auto object_key = static_cast<std::uint32_t>(o);
      const TrackedBox box = gt_box(trajectories[o], static_cast<int>(o), t);
      if (std::abs(box.center.x()) > 1.5 * range || std::abs(box.center.y()) > 1.5 * range) {
        throw std::logic_error("simulator: trajectory left the bounded world");
      }
      gt_frame.push_back(box);

      RandomStream det_rng(cfg.seed, kDetect, frame_key, object_key);
      RandomStream vel_rng(cfg.seed, kVelocityNoise, frame_key, object_key);
      const bool missed = det_rng.uniform() < cfg.p_miss;
      if (!missed) {
        Detection d;
        d.center = noisy(box.center, cfg.sigma_pos, det_rng);
        d.dims = box.dims;
        d.yaw = box.yaw;
        d.velocity = noisy(box.velocity, cfg.sigma_vel, vel_rng);
        d.score = cfg.sigma_score == 0.0
                      ? 1.0
                      : std::clamp(1.0 - std::abs(cfg.sigma_score * det_rng.normal()), 0.01, 1.0);
        d.class_id = box.class_id;
        if (cfg.sigma_embed == 0.0) {
          d.embedding = latents[o];
        } else {
          Eigen::VectorXd e = latents[o];
          for (int i = 0; i < dim; ++i) e(i) += cfg.sigma_embed * det_rng.normal();
          d.embedding = normalized(e);
        }
        det_frame.detections.push_back(std::move(d));
        sources.push_back(static_cast<int>(o));
      }

      RandomStream radar_rng(cfg.seed, kRadar, frame_key, object_key);
      const double c = std::cos(box.yaw);
      const double s = std::sin(box.yaw);
      for (int k = 0; k < cfg.radar_points_per_object; ++k) {
        const double half_l = 0.5 * kFootprintInflation * box.dims.x();
        const double half_w = 0.5 * kFootprintInflation * box.dims.y();
        const double u = radar_rng.uniform(-half_l, half_l);
        const double v = radar_rng.uniform(-half_w, half_w);
        RadarFeatures features{};
        features[radar_channel::kX] = box.center.x() + c * u - s * v;
        features[radar_channel::kY] = box.center.y() + s * u + c * v;
        features[radar_channel::kZ] = radar_rng.uniform(0.0, box.dims.z());
        features[radar_channel::kRcs] = radar_rng.uniform(0.0, 20.0);
        features[radar_channel::kVxComp] = box.velocity.x();
        features[radar_channel::kVyComp] = box.velocity.y();
        sweep.points.emplace_back(features);
      }
    }

    RandomStream clutter_rng(cfg.seed, kClutter, frame_key);
    const int n_clutter = clutter_rng.poisson(cfg.clutter_rate);
    for (int k = 0; k < n_clutter; ++k) {
      Detection d;
      d.center = {clutter_rng.uniform(-range, range), clutter_rng.uniform(-range, range), 0.0};
      d.class_id = static_cast<int>(clutter_rng.uniform() * cfg.n_classes) % cfg.n_classes;
      d.dims = class_dims(d.class_id);
      d.yaw = wrap_angle(clutter_rng.uniform(-std::numbers::pi, std::numbers::pi));
      d.velocity = {clutter_rng.uniform(-5.0, 5.0), clutter_rng.uniform(-5.0, 5.0), 0.0};
      d.score = clutter_rng.uniform(0.05, 0.6);
      d.embedding = random_unit(clutter_rng, dim);
      det_frame.detections.push_back(std::move(d));
      sources.push_back(-1);
    }

    gt_scene.push_back(std::move(gt_frame));
    bundle.detections.push_back(std::move(det_frame));
    bundle.detection_sources.push_back(std::move(sources));
    bundle.radar_sweeps.push_back(std::move(sweep));
  }
  bundle.gt_log.push_back(std::move(gt_scene));
  return bundle;
}

ScenarioBundle degrade_velocity(const ScenarioBundle& bundle, double sigma_vel, std::uint64_t seed) {
  if (!(sigma_vel >= 0.0) || !std::isfinite(sigma_vel)) {
    throw std::invalid_argument("degrade_velocity: sigma must be finite and >= 0");
  }
  if (bundle.gt_log.size() != 1) {
    throw std::invalid_argument("degrade_velocity: bundle must hold exactly one scene");
  }
  ScenarioBundle out = bundle;
  const SceneLog& gt = bundle.gt_log.front();
  for (std::size_t f = 0; f < out.detections.size(); ++f) {
    auto& dets = out.detections[f].detections;
    const auto& sources = out.detection_sources.at(f);
    for (std::size_t k = 0; k < dets.size(); ++k) {
      const int object = sources.at(k);
      if (object < 0) continue;
      RandomStream rng(seed, kDegrade, static_cast<std::uint32_t>(f),
                       static_cast<std::uint32_t>(object));
      dets[k].velocity = noisy(gt.at(f).at(static_cast<std::size_t>(object)).velocity, sigma_vel, rng);
    }
  }
  return out;
}

}  // namespace fusetrack

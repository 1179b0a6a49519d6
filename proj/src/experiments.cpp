#include "fusetrack/experiments.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "fusetrack/random.hpp"

namespace fusetrack {

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

std::uint64_t scene_seed(std::uint64_t base_seed, int scene) {
  return mix_seed(base_seed, static_cast<std::uint64_t>(scene));
}

std::vector<ScenarioBundle> simulate_scenes(const ScenarioConfig& base, int n_scenes, int jobs) {
  std::vector<ScenarioBundle> out(static_cast<std::size_t>(n_scenes));
  parallel_for(out.size(), jobs, [&](std::size_t s) {
    ScenarioConfig cfg = base;
    cfg.seed = scene_seed(base.seed, static_cast<int>(s));
    out[s] = generate(cfg);
  });
  return out;
}

TrackLog gt_of(const std::vector<ScenarioBundle>& bundles) {
  TrackLog log;
  log.reserve(bundles.size());
  for (const auto& b : bundles) log.push_back(b.gt_log.front());
  return log;
}

std::vector<DetectionScene> detections_of(const std::vector<ScenarioBundle>& bundles) {
  std::vector<DetectionScene> out;
  out.reserve(bundles.size());
  for (const auto& b : bundles) out.push_back(b.detections);
  return out;
}

SequenceStats track_scenes(const std::vector<DetectionScene>& scenes, const TrackerConfig& cfg,
                           int jobs) {
  cfg.validate();
  std::vector<TrackOutput> outputs(scenes.size());
  parallel_for(scenes.size(), jobs,
               [&](std::size_t s) { outputs[s] = run_sequence(scenes[s], cfg); });
  SequenceStats stats;
  stats.log.reserve(outputs.size());
  for (auto& o : outputs) {
    stats.frames += o.frame_count();
    stats.elapsed_s += o.elapsed_s;
    stats.log.push_back(std::move(o.frames));
  }
  return stats;
}

ScenarioConfig perfect_world_scenario() {
  ScenarioConfig cfg;
  cfg.n_objects = 10;
  cfg.n_frames = 40;
  cfg.dt = 0.5;
  cfg.motion = MotionModel::kConstantVelocity;
  return cfg;
}

ScenarioConfig standard_noisy_scenario() {
  ScenarioConfig cfg;
  cfg.n_objects = 10;
  cfg.n_frames = 40;
  cfg.dt = 0.5;
  cfg.motion = MotionModel::kConstantVelocity;
  cfg.sigma_pos = 0.3;
  cfg.sigma_vel = 0.2;
  cfg.sigma_embed = 0.1;
  cfg.sigma_score = 0.2;
  cfg.p_miss = 0.1;
  cfg.clutter_rate = 2.0;
  return cfg;
}

ScenarioConfig crossing_scenario() {
  ScenarioConfig cfg;
  cfg.n_objects = 6;
  cfg.n_frames = 40;
  cfg.dt = 0.5;
  cfg.motion = MotionModel::kCrossing;
  cfg.sigma_pos = 0.2;
  cfg.sigma_vel = 0.2;
  cfg.sigma_embed = 0.3;  // weak appearance, so motion decides at crossings
  cfg.sigma_score = 0.2;
  cfg.p_miss = 0.05;
  cfg.clutter_rate = 1.0;
  return cfg;
}

namespace {

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sample standard deviation; 0 for fewer than two values.
double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

template <typename Fn>
std::vector<double> collect(const std::vector<EvalResult>& results, Fn&& fn) {
  std::vector<double> out;
  out.reserve(results.size());
  for (const auto& r : results) out.push_back(fn(r));
  return out;
}

struct Variant {
  std::string label;
  TrackerConfig tracker;
  std::optional<double> velocity_sigma;
};

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::vector<Variant> variants_for(const RunConfig& cfg) {
  std::vector<Variant> out;
  switch (cfg.experiment) {
    case Experiment::kSingle:
      out.push_back({"configured", cfg.tracker, std::nullopt});
      break;
    case Experiment::kAblateThreshold:
      for (double t : {0.50, 0.30, 0.18}) {
        TrackerConfig tc = cfg.tracker;
        tc.association.match_threshold = t;
        out.push_back({"threshold=" + fixed(t, 2), tc, std::nullopt});
      }
      break;
    case Experiment::kAblateWeights:
      for (double w_deep : {0.5, 0.75, 0.25}) {
        TrackerConfig tc = cfg.tracker;
        tc.association.w_deep = w_deep;
        out.push_back({"w_deep=" + fixed(w_deep, 2) + ";w_motion=" + fixed(1.0 - w_deep, 2), tc,
                       std::nullopt});
      }
      break;
    case Experiment::kAblateTradeoff:
      for (TradeOffTerm t : {TradeOffTerm::kCosineSimilarity, TradeOffTerm::kVelocitySimilarity}) {
        TrackerConfig tc = cfg.tracker;
        tc.association.trade_off_term = t;
        out.push_back({"trade_off=" + to_string(t), tc, std::nullopt});
      }
      break;
    case Experiment::kAblateVelnoise:
      for (double sigma : {0.2, 1.0}) {
        out.push_back({"sigma_vel=" + fixed(sigma, 2), cfg.tracker, sigma});
      }
      break;
  }
  return out;
}

}  // namespace

double AblationCell::mean_amota() const {
  return mean_of(collect(per_seed, [](const EvalResult& r) { return r.amota; }));
}
double AblationCell::std_amota() const {
  return std_of(collect(per_seed, [](const EvalResult& r) { return r.amota; }));
}
double AblationCell::mean_amotp() const {
  return mean_of(collect(per_seed, [](const EvalResult& r) { return r.amotp; }));
}
double AblationCell::std_amotp() const {
  return std_of(collect(per_seed, [](const EvalResult& r) { return r.amotp; }));
}
double AblationCell::mean_ids() const {
  return mean_of(collect(per_seed, [](const EvalResult& r) { return double(r.ids_total); }));
}
double AblationCell::std_ids() const {
  return std_of(collect(per_seed, [](const EvalResult& r) { return double(r.ids_total); }));
}

std::vector<AblationCell> run_ablation(const RunConfig& cfg, std::uint64_t base_seed, int jobs) {
  cfg.validate();
  const std::vector<Variant> variants = variants_for(cfg);
  const auto n_seeds = static_cast<std::size_t>(cfg.n_seeds);

  std::vector<std::vector<ScenarioBundle>> bundles(n_seeds);
  parallel_for(n_seeds, jobs, [&](std::size_t k) {
    ScenarioConfig sc = cfg.scenario;
    sc.seed = scene_seed(base_seed, static_cast<int>(k));
    bundles[k] = simulate_scenes(sc, cfg.n_scenes, 1);
  });

  std::vector<AblationCell> cells(variants.size());
  for (std::size_t v = 0; v < variants.size(); ++v) {
    cells[v].label = variants[v].label;
    cells[v].per_seed.resize(n_seeds);
  }
  parallel_for(variants.size() * n_seeds, jobs, [&](std::size_t task) {
    const std::size_t v = task / n_seeds;
    const std::size_t k = task % n_seeds;
    const Variant& variant = variants[v];
    std::vector<ScenarioBundle> scenes = bundles[k];
    if (variant.velocity_sigma) {
      for (std::size_t s = 0; s < scenes.size(); ++s) {
        const std::uint64_t noise_seed = mix_seed(scene_seed(base_seed, static_cast<int>(k)), 0xDE6 + s);
        scenes[s] = degrade_velocity(scenes[s], *variant.velocity_sigma, noise_seed);
      }
    }
    const SequenceStats tracked = track_scenes(detections_of(scenes), variant.tracker, 1);
    cells[v].per_seed[k] = evaluate(gt_of(scenes), tracked.log, cfg.eval);
  });
  return cells;
}

std::string ablation_csv(Experiment experiment, const std::vector<AblationCell>& cells) {
  std::ostringstream out;
  out << "experiment,cell,n_seeds,amota_mean,amota_std,amotp_mean,amotp_std,ids_mean,ids_std\n";
  out << std::setprecision(10);
  for (const AblationCell& c : cells) {
    out << to_string(experiment) << ',' << c.label << ',' << c.per_seed.size() << ','
        << c.mean_amota() << ',' << c.std_amota() << ',' << c.mean_amotp() << ','
        << c.std_amotp() << ',' << c.mean_ids() << ',' << c.std_ids() << '\n';
  }
  return out.str();
}

}  // namespace fusetrack

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fusetrack/config.hpp"
#include "fusetrack/metrics.hpp"
#include "fusetrack/simulator.hpp"
#include "fusetrack/tracker.hpp"

namespace fusetrack {

// Runs fn(0..count-1) on up to `jobs` threads. Each index runs exactly once;
// the first exception is rethrown after all workers stop.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

// Scenario seed of scene `scene` under a base seed.
std::uint64_t scene_seed(std::uint64_t base_seed, int scene);

std::vector<ScenarioBundle> simulate_scenes(const ScenarioConfig& base, int n_scenes, int jobs);

TrackLog gt_of(const std::vector<ScenarioBundle>& bundles);
std::vector<DetectionScene> detections_of(const std::vector<ScenarioBundle>& bundles);

struct SequenceStats {
  TrackLog log;
  std::size_t frames = 0;
  double elapsed_s = 0.0;
};

SequenceStats track_scenes(const std::vector<DetectionScene>& scenes, const TrackerConfig& cfg,
                           int jobs);

// Reference scenario set-ups used by the acceptance suite and the example configs.
ScenarioConfig perfect_world_scenario();   // noiseless constant velocity
ScenarioConfig standard_noisy_scenario();  // sigma_pos 0.3, p_miss 0.1, clutter 2/frame
ScenarioConfig crossing_scenario();        // pairs crossing at mid-sequence

struct AblationCell {
  std::string label;
  std::vector<EvalResult> per_seed;

  double mean_amota() const;
  double std_amota() const;
  double mean_amotp() const;
  double std_amotp() const;
  double mean_ids() const;
  double std_ids() const;
};

// Runs the sweep selected by cfg.experiment over cfg.n_seeds seeds of
// cfg.n_scenes scenes each. Seed k uses scenario seed scene_seed(base, k).
//   ablate_threshold: match threshold 0.50, 0.30, 0.18
//   ablate_weights:   (w_deep, w_motion) = (0.5,0.5), (0.75,0.25), (0.25,0.75)
//   ablate_tradeoff:  cosine, velocity
//   ablate_velnoise:  detection velocity noise 0.2, 1.0 m/s
//   single:           the configured tracker as is
std::vector<AblationCell> run_ablation(const RunConfig& cfg, std::uint64_t base_seed, int jobs);

std::string ablation_csv(Experiment experiment, const std::vector<AblationCell>& cells);

}  // namespace fusetrack

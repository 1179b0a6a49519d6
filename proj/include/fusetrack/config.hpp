#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "fusetrack/core_types.hpp"
#include "fusetrack/metrics.hpp"
#include "fusetrack/pillarizer.hpp"
#include "fusetrack/simulator.hpp"
#include "fusetrack/tracker.hpp"

namespace fusetrack {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment {
  kSingle,
  kAblateThreshold,
  kAblateWeights,
  kAblateTradeoff,
  kAblateVelnoise,
};

struct RunConfig {
  ScenarioConfig scenario;
  TrackerConfig tracker;
  EvalConfig eval;
  BevGrid grid;
  FusionConfig fusion;
  std::string output_dir = "out";
  Experiment experiment = Experiment::kSingle;
  int n_scenes = 1;  // scenes per simulated run
  int n_seeds = 5;   // seeds per ablation cell

  void validate() const;  // throws ConfigError
};

// Every key is optional; absent keys keep their defaults. Unknown keys and
// wrongly typed values raise ConfigError.
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);

RunConfig parse_run_config(const std::string& text);  // throws ConfigError

nlohmann::json to_json(const AssociationConfig& cfg);
nlohmann::json to_json(const KfNoiseConfig& cfg);
nlohmann::json to_json(const TrackerConfig& cfg);
nlohmann::json to_json(const ScenarioConfig& cfg);
nlohmann::json to_json(const EvalConfig& cfg);

std::string to_string(TradeOffTerm t);
std::string to_string(MotionModel m);
std::string to_string(Experiment e);
std::string to_string(FusionVariant v);

// SHA-256 of the canonical (sorted-key, compact) JSON dump, lowercase hex.
std::string config_hash(const RunConfig& cfg);

}  // namespace fusetrack

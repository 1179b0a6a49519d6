#include "fusetrack/config.hpp"

#include <array>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <openssl/evp.h>

namespace fusetrack {
namespace {

using nlohmann::json;

template <typename E>
E enum_from(const std::string& value, const std::map<std::string, E>& names,
            const std::string& where) {
  auto it = names.find(value);
  if (it == names.end()) {
    std::string allowed;
    for (const auto& [k, v] : names) allowed += (allowed.empty() ? "" : ", ") + k;
    throw ConfigError(where + ": unknown value '" + value + "' (expected one of " + allowed + ")");
  }
  return it->second;
}

const std::map<std::string, TradeOffTerm> kTradeOffNames{
    {"velocity", TradeOffTerm::kVelocitySimilarity}, {"cosine", TradeOffTerm::kCosineSimilarity}};
const std::map<std::string, MotionModel> kMotionNames{
    {"constant_velocity", MotionModel::kConstantVelocity},
    {"turning", MotionModel::kTurning},
    {"crossing", MotionModel::kCrossing}};
const std::map<std::string, Experiment> kExperimentNames{
    {"single", Experiment::kSingle},
    {"ablate_threshold", Experiment::kAblateThreshold},
    {"ablate_weights", Experiment::kAblateWeights},
    {"ablate_tradeoff", Experiment::kAblateTradeoff},
    {"ablate_velnoise", Experiment::kAblateVelnoise}};
const std::map<std::string, FusionVariant> kFusionNames{{"pillar", FusionVariant::kPillar},
                                                        {"voxel", FusionVariant::kVoxelCompressor}};

template <typename E>
std::string name_of(E value, const std::map<std::string, E>& names) {
  for (const auto& [k, v] : names) {
    if (v == value) return k;
  }
  return "?";
}

// Reads optional keys from one JSON object and rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected a JSON object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(path_ + "." + key + ": unexpected type " + it->type_name());
    }
  }

  template <typename E>
  void read_enum(const char* key, E& out, const std::map<std::string, E>& names) {
    std::string value;
    read(key, value);
    if (!value.empty()) out = enum_from(value, names, path_ + "." + key);
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string path(const char* key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(path_ + ": unknown key '" + item.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_association(const json& j, const std::string& path, AssociationConfig& cfg) {
  ObjectReader r(j, path);
  r.read("w_deep", cfg.w_deep);
  if (const json* wm = r.child("w_motion")) {
    double w_motion = 0.0;
    try {
      w_motion = wm->get<double>();
    } catch (const json::exception&) {
      throw ConfigError(r.path("w_motion") + ": expected a number");
    }
    if (std::abs(cfg.w_deep + w_motion - 1.0) > 1e-9) {
      throw ConfigError(path + ": w_deep + w_motion must equal 1");
    }
  }
  r.read("r_vel", cfg.r_vel);
  r.read("match_threshold", cfg.match_threshold);
  r.read("loc_scale", cfg.loc_scale);
  r.read("centroid_scale", cfg.centroid_scale);
  r.read_enum("trade_off_term", cfg.trade_off_term, kTradeOffNames);
  r.finish();
}

void read_kf(const json& j, const std::string& path, KfNoiseConfig& cfg) {
  ObjectReader r(j, path);
  r.read("process_noise", cfg.process_noise);
  r.read("measurement_noise", cfg.measurement_noise);
  r.read("initial_covariance", cfg.initial_covariance);
  r.finish();
}

void read_tracker(const json& j, const std::string& path, TrackerConfig& cfg) {
  ObjectReader r(j, path);
  if (const json* a = r.child("association")) read_association(*a, r.path("association"), cfg.association);
  if (const json* k = r.child("kf_noise")) read_kf(*k, r.path("kf_noise"), cfg.kf_noise);
  r.read("max_age", cfg.max_age);
  r.read("min_hits", cfg.min_hits);
  r.read("det_score_floor", cfg.det_score_floor);
  r.read("embed_momentum", cfg.embed_momentum);
  r.finish();
}

void read_scenario(const json& j, const std::string& path, ScenarioConfig& cfg) {
  ObjectReader r(j, path);
  r.read("n_objects", cfg.n_objects);
  r.read("n_frames", cfg.n_frames);
  r.read("dt", cfg.dt);
  r.read_enum("motion", cfg.motion, kMotionNames);
  r.read("sigma_pos", cfg.sigma_pos);
  r.read("sigma_vel", cfg.sigma_vel);
  r.read("sigma_embed", cfg.sigma_embed);
  r.read("sigma_score", cfg.sigma_score);
  r.read("p_miss", cfg.p_miss);
  r.read("clutter_rate", cfg.clutter_rate);
  r.read("radar_points_per_object", cfg.radar_points_per_object);
  r.read("n_classes", cfg.n_classes);
  r.read("embedding_dim", cfg.embedding_dim);
  r.read("world_range_m", cfg.world_range_m);
  r.read("seed", cfg.seed);
  r.finish();
}

void read_eval(const json& j, const std::string& path, EvalConfig& cfg) {
  ObjectReader r(j, path);
  r.read("dist_threshold_m", cfg.dist_threshold_m);
  r.read("recall_steps", cfg.recall_steps);
  r.read("min_recall", cfg.min_recall);
  r.finish();
}

}  // namespace

std::string to_string(TradeOffTerm t) { return name_of(t, kTradeOffNames); }
std::string to_string(MotionModel m) { return name_of(m, kMotionNames); }
std::string to_string(Experiment e) { return name_of(e, kExperimentNames); }
std::string to_string(FusionVariant v) { return name_of(v, kFusionNames); }

void RunConfig::validate() const {
  try {
    scenario.validate();
    tracker.validate();
    eval.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (n_scenes < 1) throw ConfigError("n_scenes must be >= 1");
  if (n_seeds < 1) throw ConfigError("n_seeds must be >= 1");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  if (scenario.embedding_dim < 1) throw ConfigError("scenario.embedding_dim must be >= 1");
}

RunConfig run_config_from_json(const json& j) {
  RunConfig cfg;
  ObjectReader r(j, "config");
  if (const json* s = r.child("scenario")) read_scenario(*s, "config.scenario", cfg.scenario);
  if (const json* t = r.child("tracker")) read_tracker(*t, "config.tracker", cfg.tracker);
  if (const json* e = r.child("eval")) read_eval(*e, "config.eval", cfg.eval);
  if (const json* g = r.child("grid")) {
    ObjectReader gr(*g, "config.grid");
    double range = cfg.grid.range_m();
    double resolution = cfg.grid.resolution_m();
    gr.read("range_m", range);
    gr.read("resolution_m", resolution);
    gr.finish();
    try {
      cfg.grid = BevGrid(range, resolution);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config.grid: ") + e.what());
    }
  }
  if (const json* f = r.child("fusion")) {
    ObjectReader fr(*f, "config.fusion");
    fr.read_enum("variant", cfg.fusion.variant, kFusionNames);
    fr.read("residual", cfg.fusion.residual);
    fr.finish();
  }
  r.read("output_dir", cfg.output_dir);
  r.read_enum("experiment", cfg.experiment, kExperimentNames);
  r.read("n_scenes", cfg.n_scenes);
  r.read("n_seeds", cfg.n_seeds);
  r.finish();
  cfg.validate();
  return cfg;
}

RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON config: ") + e.what());
  }
  return run_config_from_json(j);
}

json to_json(const AssociationConfig& cfg) {
  return {{"w_deep", cfg.w_deep},
          {"w_motion", cfg.w_motion()},
          {"r_vel", cfg.r_vel},
          {"match_threshold", cfg.match_threshold},
          {"loc_scale", cfg.loc_scale},
          {"centroid_scale", cfg.centroid_scale},
          {"trade_off_term", to_string(cfg.trade_off_term)}};
}

json to_json(const KfNoiseConfig& cfg) {
  return {{"process_noise", cfg.process_noise},
          {"measurement_noise", cfg.measurement_noise},
          {"initial_covariance", cfg.initial_covariance}};
}

json to_json(const TrackerConfig& cfg) {
  return {{"association", to_json(cfg.association)},
          {"kf_noise", to_json(cfg.kf_noise)},
          {"max_age", cfg.max_age},
          {"min_hits", cfg.min_hits},
          {"det_score_floor", cfg.det_score_floor},
          {"embed_momentum", cfg.embed_momentum}};
}

json to_json(const ScenarioConfig& cfg) {
  return {{"n_objects", cfg.n_objects},
          {"n_frames", cfg.n_frames},
          {"dt", cfg.dt},
          {"motion", to_string(cfg.motion)},
          {"sigma_pos", cfg.sigma_pos},
          {"sigma_vel", cfg.sigma_vel},
          {"sigma_embed", cfg.sigma_embed},
          {"sigma_score", cfg.sigma_score},
          {"p_miss", cfg.p_miss},
          {"clutter_rate", cfg.clutter_rate},
          {"radar_points_per_object", cfg.radar_points_per_object},
          {"n_classes", cfg.n_classes},
          {"embedding_dim", cfg.embedding_dim},
          {"world_range_m", cfg.world_range_m},
          {"seed", cfg.seed}};
}

json to_json(const EvalConfig& cfg) {
  return {{"dist_threshold_m", cfg.dist_threshold_m},
          {"recall_steps", cfg.recall_steps},
          {"min_recall", cfg.min_recall}};
}

json to_json(const RunConfig& cfg) {
  return {{"scenario", to_json(cfg.scenario)},
          {"tracker", to_json(cfg.tracker)},
          {"eval", to_json(cfg.eval)},
          {"grid", {{"range_m", cfg.grid.range_m()}, {"resolution_m", cfg.grid.resolution_m()}}},
          {"fusion", {{"variant", to_string(cfg.fusion.variant)}, {"residual", cfg.fusion.residual}}},
          {"output_dir", cfg.output_dir},
          {"experiment", to_string(cfg.experiment)},
          {"n_scenes", cfg.n_scenes},
          {"n_seeds", cfg.n_seeds}};
}

std::string config_hash(const RunConfig& cfg) {
  json canonical = to_json(cfg);
  // The output location does not change results.
  canonical.erase("output_dir");
  const std::string text = canonical.dump();

  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("config_hash: SHA-256 failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

}  // namespace fusetrack

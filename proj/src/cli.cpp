#include "fusetrack/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "fusetrack/config.hpp"
#include "fusetrack/experiments.hpp"
#include "fusetrack/io.hpp"

namespace fusetrack::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Missing or unreadable input paths.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::shared_ptr<spdlog::logger> logger() {
  auto log = spdlog::get("fusetrack");
  if (!log) {
    log = spdlog::stderr_color_mt("fusetrack");
  }
  const char* env = std::getenv("FUSETRACK_LOG");
  log->set_level(env != nullptr ? spdlog::level::from_str(env) : spdlog::level::warn);
  return log;
}

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string out_dir;
};

std::string read_input(const std::string& path) {
  if (!fs::is_regular_file(path)) throw InputError("input file not found: " + path);
  return read_text_file(path);
}

RunConfig load_config(const CommonOptions& opts) {
  RunConfig cfg;
  if (!opts.config_path.empty()) cfg = parse_run_config(read_input(opts.config_path));
  if (opts.seed) cfg.scenario.seed = *opts.seed;
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  cfg.validate();
  return cfg;
}

fs::path prepare_output(const RunConfig& cfg) {
  fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  return dir;
}

template <typename Writer>
std::string render(Writer&& writer) {
  std::ostringstream s;
  writer(s);
  return s.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<ScenarioBundle> simulate_into(const RunConfig& cfg, const CommonOptions& opts,
                                          const fs::path& dir) {
  auto log = logger();
  const auto bundles = simulate_scenes(cfg.scenario, cfg.n_scenes, opts.jobs);
  std::vector<RadarScene> radar;
  radar.reserve(bundles.size());
  for (const auto& b : bundles) radar.push_back(b.radar_sweeps);

  write_file_atomic(dir / "gt.jsonl", render([&](std::ostream& o) {
                      write_track_log_jsonl(o, gt_of(bundles));
                    }));
  write_file_atomic(dir / "detections.jsonl", render([&](std::ostream& o) {
                      write_detections_jsonl(o, detections_of(bundles));
                    }));
  write_file_atomic(dir / "radar.jsonl",
                    render([&](std::ostream& o) { write_radar_jsonl(o, radar); }));
  json embedded = to_json(cfg);
  embedded.erase("output_dir");
  const json manifest = {{"config_hash", config_hash(cfg)},
                         {"seed", cfg.scenario.seed},
                         {"n_scenes", cfg.n_scenes},
                         {"files", {{"gt", "gt.jsonl"},
                                    {"detections", "detections.jsonl"},
                                    {"radar", "radar.jsonl"}}},
                         {"config", embedded}};
  write_file_atomic(dir / "manifest.json", dump(manifest));
  log->info("simulated {} scene(s) into {}", cfg.n_scenes, dir.string());
  return bundles;
}

TrackLog track_into(const RunConfig& cfg, const std::vector<DetectionScene>& scenes,
                    const CommonOptions& opts, const fs::path& dir) {
  auto log = logger();
  SequenceStats stats = track_scenes(scenes, cfg.tracker, opts.jobs);
  write_file_atomic(dir / "tracks.jsonl",
                    render([&](std::ostream& o) { write_track_log_jsonl(o, stats.log); }));
  const double fps = stats.elapsed_s > 0.0 ? static_cast<double>(stats.frames) / stats.elapsed_s : 0.0;
  // Wall-clock figures; the only output that differs between reruns.
  write_file_atomic(dir / "timing.json", dump({{"frames", stats.frames},
                                               {"tracking_seconds", stats.elapsed_s},
                                               {"frames_per_second", fps}}));
  log->info("tracked {} frame(s), {:.1f} frames/s", stats.frames, fps);
  return std::move(stats.log);
}

EvalResult eval_into(const RunConfig& cfg, const TrackLog& gt, const TrackLog& pred,
                     const fs::path& dir) {
  const EvalResult result = evaluate(gt, pred, cfg.eval);
  write_file_atomic(dir / "metrics.json", dump(to_json(result)));
  write_file_atomic(dir / "per_recall.csv",
                    render([&](std::ostream& o) { write_per_recall_csv(o, result); }));
  write_file_atomic(dir / "motar_curve.csv",
                    render([&](std::ostream& o) { write_motar_curve_csv(o, result); }));
  return result;
}

void add_common(CLI::App* cmd, CommonOptions& opts, bool config_required) {
  auto* c = cmd->add_option("--config", opts.config_path, "Run configuration (JSON)");
  if (config_required) c->required();
  cmd->add_option("--seed", opts.seed, "Override scenario.seed");
  cmd->add_option("--jobs", opts.jobs, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", opts.out_dir, "Output directory (overrides output_dir)");
}

void print_summary(std::ostream& out, const EvalResult& r) {
  out << "AMOTA " << r.amota << "  AMOTP " << r.amotp << "  IDS " << r.ids_total << "  mAVE "
      << r.mave << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Camera-radar BEV fusion and multi-object tracking toolkit", "fusetrack"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string detections_path;
  std::string gt_path;
  std::string pred_path;
  std::string radar_path;
  int max_sweeps = kDefaultMaxSweeps;

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic scenario bundle");
  add_common(simulate, opts, true);

  auto* track = app.add_subcommand("track", "Track a detections JSONL file");
  add_common(track, opts, false);
  track->add_option("--detections", detections_path, "Detections JSONL")->required();

  auto* eval = app.add_subcommand("eval", "Evaluate a track log against ground truth");
  add_common(eval, opts, false);
  eval->add_option("--gt", gt_path, "Ground-truth track log JSONL")->required();
  eval->add_option("--pred", pred_path, "Predicted track log JSONL")->required();

  auto* ablate = app.add_subcommand("ablate", "Run the configured tracker ablation sweep");
  add_common(ablate, opts, true);

  auto* pipeline = app.add_subcommand("run", "simulate -> track -> eval in one go");
  add_common(pipeline, opts, true);

  auto* pillar = app.add_subcommand("pillarize", "Accumulate radar sweeps and pillarize them");
  add_common(pillar, opts, false);
  pillar->add_option("--radar", radar_path, "Radar sweeps JSONL")->required();
  pillar->add_option("--max-sweeps", max_sweeps, "Sweeps to accumulate")->check(CLI::PositiveNumber);

  std::vector<char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  RunConfig cfg;
  fs::path dir;
  try {
    cfg = load_config(opts);
    if (pillar->parsed() && cfg.fusion.variant == FusionVariant::kVoxelCompressor) {
      throw ConfigError(
          "fusion.variant 'voxel' is not implemented; only the pillar variant is supported");
    }
    if (track->parsed()) read_input(detections_path);
    if (eval->parsed()) {
      read_input(gt_path);
      read_input(pred_path);
    }
    if (pillar->parsed()) read_input(radar_path);
    dir = prepare_output(cfg);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) {
      simulate_into(cfg, opts, dir);
      out << "wrote bundle to " << dir.string() << " (config " << config_hash(cfg) << ")\n";
    } else if (track->parsed()) {
      std::istringstream in(read_input(detections_path));
      track_into(cfg, read_detections_jsonl(in), opts, dir);
      out << "wrote " << (dir / "tracks.jsonl").string() << '\n';
    } else if (eval->parsed()) {
      std::istringstream gt_in(read_input(gt_path));
      std::istringstream pred_in(read_input(pred_path));
      const EvalResult r =
          eval_into(cfg, read_track_log_jsonl(gt_in), read_track_log_jsonl(pred_in), dir);
      print_summary(out, r);
    } else if (ablate->parsed()) {
      const auto cells = run_ablation(cfg, cfg.scenario.seed, opts.jobs);
      const std::string csv = ablation_csv(cfg.experiment, cells);
      write_file_atomic(dir / "ablation.csv", csv);
      out << csv;
    } else if (pipeline->parsed()) {
      const auto bundles = simulate_into(cfg, opts, dir);
      const TrackLog tracks = track_into(cfg, detections_of(bundles), opts, dir);
      print_summary(out, eval_into(cfg, gt_of(bundles), tracks, dir));
    } else if (pillar->parsed()) {
      std::istringstream in(read_input(radar_path));
      const auto scenes = read_radar_jsonl(in);
      const int head_channels = kEncodedBevChannels + (cfg.fusion.residual ? kRadarChannels : 0);
      std::ostringstream lines;
      for (std::size_t s = 0; s < scenes.size(); ++s) {
        for (std::size_t f = 0; f < scenes[s].size(); ++f) {
          // Sweeps up to and including frame f; the newest is the reference.
          const std::vector<RadarSweep> history(scenes[s].begin(),
                                                scenes[s].begin() + static_cast<long>(f) + 1);
          const auto points = accumulate_sweeps(history, scenes[s][f].timestamp, max_sweeps);
          json j = pillars_to_json(pillarize(points, cfg.grid));
          j["scene"] = s;
          j["frame_idx"] = f;
          j["points"] = points.size();
          j["head_input_channels"] = head_channels;
          lines << j.dump() << '\n';
        }
      }
      write_file_atomic(dir / "pillars.jsonl", lines.str());
      out << "wrote " << (dir / "pillars.jsonl").string() << '\n';
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace fusetrack::cli

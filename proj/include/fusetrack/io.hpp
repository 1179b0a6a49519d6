#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "fusetrack/core_types.hpp"
#include "fusetrack/metrics.hpp"
#include "fusetrack/pillarizer.hpp"
#include "fusetrack/tracker.hpp"

namespace fusetrack {

// Malformed data files (as opposed to malformed configs).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const Detection& d);
Detection detection_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TrackedBox& b);
TrackedBox box_from_json(const nlohmann::json& j);

// Detection frames, one JSON object per line:
//   {"scene": s, "frame_idx": k, "dt": dt, "detections": [...]}
// "scene" defaults to 0 when absent. Scenes are returned in ascending scene
// index, frames in file order.
void write_detections_jsonl(std::ostream& out, const std::vector<DetectionScene>& scenes);
std::vector<DetectionScene> read_detections_jsonl(std::istream& in);

// Track logs (tracker output and ground truth share the schema):
//   {"scene": s, "frame_idx": k, "boxes": [{"track_id", "center", ...}]}
void write_track_log_jsonl(std::ostream& out, const TrackLog& log);
TrackLog read_track_log_jsonl(std::istream& in);

// Radar sweeps: {"scene", "frame_idx", "timestamp", "ego_pose": {"theta","tx","ty"},
// "points": [[18 floats], ...]}
using RadarScene = std::vector<RadarSweep>;
void write_radar_jsonl(std::ostream& out, const std::vector<RadarScene>& scenes);
std::vector<RadarScene> read_radar_jsonl(std::istream& in);

// Sparse pillar output: only non-empty cells are listed.
nlohmann::json pillars_to_json(const FeatureMap& pillars);

nlohmann::json to_json(const EvalResult& r);
void write_per_recall_csv(std::ostream& out, const EvalResult& r);
void write_motar_curve_csv(std::ostream& out, const EvalResult& r);

std::string read_text_file(const std::filesystem::path& path);

// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace fusetrack

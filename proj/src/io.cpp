#include "fusetrack/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <system_error>

namespace fusetrack {
namespace {

using nlohmann::json;

json vec3(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

Eigen::Vector3d vec3_from(const json& j, const char* key) {
  const json& a = j.at(key);
  if (!a.is_array() || a.size() != 3) {
    throw DataError(std::string("field '") + key + "' must be a 3-element array");
  }
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::int64_t scene_of(const json& j) { return j.value("scene", std::int64_t{0}); }

template <typename T>
std::vector<T> flatten_scenes(std::map<std::int64_t, T>& by_scene) {
  std::vector<T> out;
  out.reserve(by_scene.size());
  for (auto& [scene, value] : by_scene) out.push_back(std::move(value));
  return out;
}

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

}  // namespace

json to_json(const Detection& d) {
  json j;
  j["center"] = vec3(d.center);
  j["dims"] = vec3(d.dims);
  j["yaw"] = d.yaw;
  j["velocity"] = vec3(d.velocity);
  j["score"] = d.score;
  j["class_id"] = d.class_id;
  j["embedding"] = std::vector<double>(d.embedding.data(), d.embedding.data() + d.embedding.size());
  return j;
}

Detection detection_from_json(const json& j) {
  Detection d;
  d.center = vec3_from(j, "center");
  d.dims = vec3_from(j, "dims");
  d.yaw = j.at("yaw").get<double>();
  d.velocity = vec3_from(j, "velocity");
  d.score = j.at("score").get<double>();
  d.class_id = j.at("class_id").get<int>();
  const auto e = j.at("embedding").get<std::vector<double>>();
  d.embedding = Eigen::Map<const Eigen::VectorXd>(e.data(), static_cast<Eigen::Index>(e.size()));
  validate_detection(d);
  return d;
}

json to_json(const TrackedBox& b) {
  json j;
  j["track_id"] = b.track_id;
  j["center"] = vec3(b.center);
  j["dims"] = vec3(b.dims);
  j["yaw"] = b.yaw;
  j["velocity"] = vec3(b.velocity);
  j["score"] = b.score;
  j["class_id"] = b.class_id;
  return j;
}

TrackedBox box_from_json(const json& j) {
  TrackedBox b;
  b.track_id = j.at("track_id").get<std::int64_t>();
  b.center = vec3_from(j, "center");
  b.dims = vec3_from(j, "dims");
  b.yaw = j.at("yaw").get<double>();
  b.velocity = vec3_from(j, "velocity");
  b.score = j.value("score", 1.0);
  b.class_id = j.at("class_id").get<int>();
  if (!b.center.allFinite() || !b.velocity.allFinite() || !std::isfinite(b.score)) {
    throw DataError("box has non-finite fields");
  }
  return b;
}

void write_detections_jsonl(std::ostream& out, const std::vector<DetectionScene>& scenes) {
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    for (const DetectionFrame& frame : scenes[s]) {
      json j;
      j["scene"] = s;
      j["frame_idx"] = frame.frame_idx;
      j["dt"] = frame.dt;
      json dets = json::array();
      for (const Detection& d : frame.detections) dets.push_back(to_json(d));
      j["detections"] = std::move(dets);
      out << j.dump() << '\n';
    }
  }
}

std::vector<DetectionScene> read_detections_jsonl(std::istream& in) {
  std::map<std::int64_t, DetectionScene> by_scene;
  for_each_line(in, [&](const json& j) {
    DetectionFrame frame;
    frame.frame_idx = j.at("frame_idx").get<std::int64_t>();
    frame.dt = j.at("dt").get<double>();
    for (const json& d : j.at("detections")) frame.detections.push_back(detection_from_json(d));
    by_scene[scene_of(j)].push_back(std::move(frame));
  });
  return flatten_scenes(by_scene);
}

void write_track_log_jsonl(std::ostream& out, const TrackLog& log) {
  for (std::size_t s = 0; s < log.size(); ++s) {
    for (std::size_t f = 0; f < log[s].size(); ++f) {
      json j;
      j["scene"] = s;
      j["frame_idx"] = f;
      json boxes = json::array();
      for (const TrackedBox& b : log[s][f]) boxes.push_back(to_json(b));
      j["boxes"] = std::move(boxes);
      out << j.dump() << '\n';
    }
  }
}

TrackLog read_track_log_jsonl(std::istream& in) {
  std::map<std::int64_t, SceneLog> by_scene;
  for_each_line(in, [&](const json& j) {
    const auto frame_idx = j.at("frame_idx").get<std::int64_t>();
    SceneLog& scene = by_scene[scene_of(j)];
    if (frame_idx < 0 || frame_idx > 10'000'000) throw DataError("frame_idx out of range");
    if (static_cast<std::size_t>(frame_idx) >= scene.size()) {
      scene.resize(static_cast<std::size_t>(frame_idx) + 1);
    }
    FrameBoxes& frame = scene[static_cast<std::size_t>(frame_idx)];
    for (const json& b : j.at("boxes")) frame.push_back(box_from_json(b));
  });
  return flatten_scenes(by_scene);
}

void write_radar_jsonl(std::ostream& out, const std::vector<RadarScene>& scenes) {
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    for (std::size_t f = 0; f < scenes[s].size(); ++f) {
      const RadarSweep& sweep = scenes[s][f];
      json j;
      j["scene"] = s;
      j["frame_idx"] = f;
      j["timestamp"] = sweep.timestamp;
      j["ego_pose"] = {{"theta", sweep.ego_pose.theta},
                       {"tx", sweep.ego_pose.tx},
                       {"ty", sweep.ego_pose.ty}};
      json points = json::array();
      for (const RadarPoint& p : sweep.points) points.push_back(p.features());
      j["points"] = std::move(points);
      out << j.dump() << '\n';
    }
  }
}

std::vector<RadarScene> read_radar_jsonl(std::istream& in) {
  std::map<std::int64_t, RadarScene> by_scene;
  for_each_line(in, [&](const json& j) {
    RadarSweep sweep;
    sweep.timestamp = j.at("timestamp").get<double>();
    const json& pose = j.at("ego_pose");
    sweep.ego_pose = {pose.at("theta").get<double>(), pose.at("tx").get<double>(),
                      pose.at("ty").get<double>()};
    for (const json& p : j.at("points")) {
      if (!p.is_array() || p.size() != kRadarChannels) {
        throw DataError("radar point must have 18 channels");
      }
      sweep.points.emplace_back(p.get<RadarFeatures>());
    }
    by_scene[scene_of(j)].push_back(std::move(sweep));
  });
  return flatten_scenes(by_scene);
}

json pillars_to_json(const FeatureMap& pillars) {
  json cells = json::array();
  for (int row = 0; row < pillars.height(); ++row) {
    for (int col = 0; col < pillars.width(); ++col) {
      bool any = false;
      std::vector<float> f(static_cast<std::size_t>(pillars.channels()));
      for (int c = 0; c < pillars.channels(); ++c) {
        f[c] = pillars.at(c, row, col);
        any = any || f[c] != 0.0f;
      }
      if (any) cells.push_back({{"row", row}, {"col", col}, {"features", f}});
    }
  }
  return {{"shape", {pillars.channels(), pillars.height(), pillars.width()}},
          {"cells", std::move(cells)}};
}

json to_json(const EvalResult& r) {
  json j;
  j["amota"] = r.amota;
  j["amotp"] = r.amotp;
  j["ids"] = r.ids_total;
  j["mave"] = std::isnan(r.mave) ? json(nullptr) : json(r.mave);
  j["gt_count"] = r.gt_count;
  json rows = json::array();
  for (const RecallRow& row : r.per_recall) {
    rows.push_back({{"recall", row.recall},
                    {"reachable", row.reachable},
                    {"score_threshold", row.score_threshold},
                    {"achieved_recall", row.achieved_recall},
                    {"motar", row.motar},
                    {"motp", row.motp},
                    {"tp", row.tp},
                    {"fp", row.fp},
                    {"fn", row.fn},
                    {"ids", row.ids}});
  }
  j["per_recall"] = std::move(rows);
  return j;
}

void write_per_recall_csv(std::ostream& out, const EvalResult& r) {
  out << "recall,reachable,score_threshold,achieved_recall,motar,motp,tp,fp,fn,ids\n";
  for (const RecallRow& row : r.per_recall) {
    out << fmt_double(row.recall) << ',' << (row.reachable ? 1 : 0) << ','
        << fmt_double(row.score_threshold) << ',' << fmt_double(row.achieved_recall) << ','
        << fmt_double(row.motar) << ',' << fmt_double(row.motp) << ',' << row.tp << ','
        << row.fp << ',' << row.fn << ',' << row.ids << '\n';
  }
}

void write_motar_curve_csv(std::ostream& out, const EvalResult& r) {
  out << "recall,motar\n";
  for (const RecallRow& row : r.per_recall) {
    out << fmt_double(row.recall) << ',' << fmt_double(row.motar) << '\n';
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::system_error(errno, std::generic_category(), "cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace fusetrack

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fusetrack/association.hpp"
#include "fusetrack/core_types.hpp"
#include "fusetrack/experiments.hpp"
#include "fusetrack/kalman.hpp"
#include "fusetrack/metrics.hpp"
#include "fusetrack/pillarizer.hpp"
#include "fusetrack/simulator.hpp"
#include "fusetrack/tracker.hpp"

namespace py = pybind11;
using namespace fusetrack;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

FeatureMap map_from_array(const FloatArray& a) {
  if (a.ndim() != 3) throw std::invalid_argument("expected a (C, H, W) array");
  const auto* p = a.data();
  std::vector<float> data(p, p + a.size());
  return FeatureMap(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)),
                    static_cast<int>(a.shape(2)), std::move(data));
}

FloatArray array_from_map(const FeatureMap& m) {
  FloatArray out({m.channels(), m.height(), m.width()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

std::vector<RadarPoint> points_from_array(const DoubleArray& a) {
  if (a.ndim() != 2 || a.shape(1) != kRadarChannels) {
    throw std::invalid_argument("expected an (N, 18) array of radar points");
  }
  std::vector<RadarPoint> out;
  out.reserve(static_cast<std::size_t>(a.shape(0)));
  auto r = a.unchecked<2>();
  for (py::ssize_t i = 0; i < a.shape(0); ++i) {
    RadarFeatures f{};
    for (int c = 0; c < kRadarChannels; ++c) f[c] = r(i, c);
    out.emplace_back(f);
  }
  return out;
}

DoubleArray array_from_points(const std::vector<RadarPoint>& points) {
  DoubleArray out({static_cast<py::ssize_t>(points.size()), static_cast<py::ssize_t>(kRadarChannels)});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (int c = 0; c < kRadarChannels; ++c) w(i, c) = points[i].feature(c);
  }
  return out;
}

std::vector<Eigen::VectorXd> rows_of(const Eigen::MatrixXd& m) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.emplace_back(m.row(i).transpose());
  return out;
}

}  // namespace

PYBIND11_MODULE(_fusetrack, m) {
  m.doc() = "Camera-radar BEV fusion data path and multi-object tracking";

  py::class_<BevGrid>(m, "BevGrid")
      .def(py::init<>())
      .def(py::init<double, double>(), py::arg("range_m"), py::arg("resolution_m"))
      .def_property_readonly("range_m", &BevGrid::range_m)
      .def_property_readonly("resolution_m", &BevGrid::resolution_m)
      .def_property_readonly("cells_per_side", &BevGrid::cells_per_side)
      .def("world_to_cell",
           [](const BevGrid& g, double x, double y) -> std::optional<std::pair<int, int>> {
             const auto c = g.world_to_cell({x, y});
             if (!c) return std::nullopt;
             return std::make_pair(c->row, c->col);
           });

  m.def("pillarize",
        [](const DoubleArray& points, const BevGrid& grid) {
          const auto pts = points_from_array(points);
          return array_from_map(pillarize(pts, grid));
        },
        py::arg("points"), py::arg("grid") = BevGrid());

  m.def("accumulate_sweeps",
        [](const std::vector<std::tuple<DoubleArray, double, std::tuple<double, double, double>>>& sweeps,
           double reference_time, int max_sweeps) {
          std::vector<RadarSweep> in;
          for (const auto& [pts, ts, pose] : sweeps) {
            RadarSweep s;
            s.points = points_from_array(pts);
            s.timestamp = ts;
            s.ego_pose = {std::get<0>(pose), std::get<1>(pose), std::get<2>(pose)};
            in.push_back(std::move(s));
          }
          return array_from_points(accumulate_sweeps(in, reference_time, max_sweeps));
        },
        py::arg("sweeps"), py::arg("reference_time"), py::arg("max_sweeps") = kDefaultMaxSweeps);

  m.def("fuse_concat", [](const FloatArray& image, const FloatArray& radar) {
    return array_from_map(fuse_concat(map_from_array(image), map_from_array(radar)));
  });
  m.def("residual_concat", [](const FloatArray& encoded, const FloatArray& radar) {
    return array_from_map(residual_concat(map_from_array(encoded), map_from_array(radar)));
  });

  m.def("velocity_weight", &velocity_weight, py::arg("v_track"), py::arg("v_det"), py::arg("r_vel"));
  m.def("embedding_affinity", [](const Eigen::MatrixXd& tracks, const Eigen::MatrixXd& dets) {
    return embedding_affinity(rows_of(tracks), rows_of(dets));
  });
  m.def("greedy_match",
        [](const Eigen::MatrixXd& a, double threshold) {
          const MatchResult r = greedy_match(a, threshold);
          return py::make_tuple(r.matches, r.unmatched_tracks, r.unmatched_dets);
        },
        py::arg("affinity"), py::arg("threshold"));

  py::class_<Detection>(m, "Detection")
      .def(py::init<>())
      .def_readwrite("center", &Detection::center)
      .def_readwrite("dims", &Detection::dims)
      .def_readwrite("yaw", &Detection::yaw)
      .def_readwrite("velocity", &Detection::velocity)
      .def_readwrite("score", &Detection::score)
      .def_readwrite("class_id", &Detection::class_id)
      .def_readwrite("embedding", &Detection::embedding);

  py::class_<TrackedBox>(m, "TrackedBox")
      .def(py::init<>())
      .def_readwrite("track_id", &TrackedBox::track_id)
      .def_readwrite("center", &TrackedBox::center)
      .def_readwrite("dims", &TrackedBox::dims)
      .def_readwrite("yaw", &TrackedBox::yaw)
      .def_readwrite("velocity", &TrackedBox::velocity)
      .def_readwrite("score", &TrackedBox::score)
      .def_readwrite("class_id", &TrackedBox::class_id);

  py::class_<KfNoiseConfig>(m, "KfNoiseConfig")
      .def(py::init<>())
      .def_readwrite("process_noise", &KfNoiseConfig::process_noise)
      .def_readwrite("measurement_noise", &KfNoiseConfig::measurement_noise)
      .def_readwrite("initial_covariance", &KfNoiseConfig::initial_covariance);

  py::class_<KfState>(m, "KfState")
      .def(py::init<>())
      .def_readwrite("mean", &KfState::mean)
      .def_readwrite("covariance", &KfState::covariance);

  m.def("kf_init", &kf_init, py::arg("detection"), py::arg("cfg") = KfNoiseConfig());
  m.def("kf_predict", &kf_predict, py::arg("state"), py::arg("dt"), py::arg("cfg") = KfNoiseConfig());
  m.def("kf_update",
        py::overload_cast<const KfState&, const Detection&, const KfNoiseConfig&>(&kf_update),
        py::arg("state"), py::arg("detection"), py::arg("cfg") = KfNoiseConfig());

  py::enum_<TradeOffTerm>(m, "TradeOffTerm")
      .value("velocity", TradeOffTerm::kVelocitySimilarity)
      .value("cosine", TradeOffTerm::kCosineSimilarity);

  py::class_<AssociationConfig>(m, "AssociationConfig")
      .def(py::init<>())
      .def_readwrite("w_deep", &AssociationConfig::w_deep)
      .def_property_readonly("w_motion", &AssociationConfig::w_motion)
      .def_readwrite("r_vel", &AssociationConfig::r_vel)
      .def_readwrite("match_threshold", &AssociationConfig::match_threshold)
      .def_readwrite("loc_scale", &AssociationConfig::loc_scale)
      .def_readwrite("centroid_scale", &AssociationConfig::centroid_scale)
      .def_readwrite("trade_off_term", &AssociationConfig::trade_off_term);

  py::class_<TrackerConfig>(m, "TrackerConfig")
      .def(py::init<>())
      .def_readwrite("association", &TrackerConfig::association)
      .def_readwrite("kf_noise", &TrackerConfig::kf_noise)
      .def_readwrite("max_age", &TrackerConfig::max_age)
      .def_readwrite("min_hits", &TrackerConfig::min_hits)
      .def_readwrite("det_score_floor", &TrackerConfig::det_score_floor)
      .def_readwrite("embed_momentum", &TrackerConfig::embed_momentum);

  py::enum_<MotionModel>(m, "MotionModel")
      .value("constant_velocity", MotionModel::kConstantVelocity)
      .value("turning", MotionModel::kTurning)
      .value("crossing", MotionModel::kCrossing);

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readwrite("n_objects", &ScenarioConfig::n_objects)
      .def_readwrite("n_frames", &ScenarioConfig::n_frames)
      .def_readwrite("dt", &ScenarioConfig::dt)
      .def_readwrite("motion", &ScenarioConfig::motion)
      .def_readwrite("sigma_pos", &ScenarioConfig::sigma_pos)
      .def_readwrite("sigma_vel", &ScenarioConfig::sigma_vel)
      .def_readwrite("sigma_embed", &ScenarioConfig::sigma_embed)
      .def_readwrite("sigma_score", &ScenarioConfig::sigma_score)
      .def_readwrite("p_miss", &ScenarioConfig::p_miss)
      .def_readwrite("clutter_rate", &ScenarioConfig::clutter_rate)
      .def_readwrite("radar_points_per_object", &ScenarioConfig::radar_points_per_object)
      .def_readwrite("n_classes", &ScenarioConfig::n_classes)
      .def_readwrite("embedding_dim", &ScenarioConfig::embedding_dim)
      .def_readwrite("seed", &ScenarioConfig::seed);

  py::class_<DetectionFrame>(m, "DetectionFrame")
      .def(py::init<>())
      .def_readwrite("frame_idx", &DetectionFrame::frame_idx)
      .def_readwrite("dt", &DetectionFrame::dt)
      .def_readwrite("detections", &DetectionFrame::detections);

  py::class_<ScenarioBundle>(m, "ScenarioBundle")
      .def_readonly("gt_log", &ScenarioBundle::gt_log)
      .def_readonly("detections", &ScenarioBundle::detections)
      .def_readonly("detection_sources", &ScenarioBundle::detection_sources)
      .def("radar_points", [](const ScenarioBundle& b, std::size_t frame) {
        return array_from_points(b.radar_sweeps.at(frame).points);
      });

  m.def("generate", &generate, py::arg("cfg"));
  m.def("degrade_velocity", &degrade_velocity, py::arg("bundle"), py::arg("sigma_vel"), py::arg("seed"));

  m.def("run_sequence",
        [](const DetectionScene& frames, const TrackerConfig& cfg) {
          return run_sequence(frames, cfg).frames;
        },
        py::arg("frames"), py::arg("cfg") = TrackerConfig());

  py::class_<EvalConfig>(m, "EvalConfig")
      .def(py::init<>())
      .def_readwrite("dist_threshold_m", &EvalConfig::dist_threshold_m)
      .def_readwrite("recall_steps", &EvalConfig::recall_steps)
      .def_readwrite("min_recall", &EvalConfig::min_recall);

  py::class_<RecallRow>(m, "RecallRow")
      .def_readonly("recall", &RecallRow::recall)
      .def_readonly("reachable", &RecallRow::reachable)
      .def_readonly("motar", &RecallRow::motar)
      .def_readonly("motp", &RecallRow::motp)
      .def_readonly("tp", &RecallRow::tp)
      .def_readonly("fp", &RecallRow::fp)
      .def_readonly("fn", &RecallRow::fn)
      .def_readonly("ids", &RecallRow::ids);

  py::class_<EvalResult>(m, "EvalResult")
      .def_readonly("amota", &EvalResult::amota)
      .def_readonly("amotp", &EvalResult::amotp)
      .def_readonly("ids", &EvalResult::ids_total)
      .def_readonly("mave", &EvalResult::mave)
      .def_readonly("gt_count", &EvalResult::gt_count)
      .def_readonly("per_recall", &EvalResult::per_recall);

  m.def("evaluate", &evaluate, py::arg("gt_log"), py::arg("pred_log"), py::arg("cfg") = EvalConfig());

  m.attr("RADAR_CHANNELS") = kRadarChannels;
#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "dev";
#endif
}

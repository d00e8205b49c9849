#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "asyncmot/assignment.hpp"
#include "asyncmot/errors.hpp"
#include "asyncmot/estimation.hpp"
#include "asyncmot/geometry.hpp"
#include "asyncmot/io.hpp"
#include "asyncmot/metrics.hpp"
#include "asyncmot/sim.hpp"
#include "asyncmot/tracker.hpp"

PYBIND11_MAKE_OPAQUE(std::vector<asyncmot::TrackSnapshot>)

namespace py = pybind11;
using namespace asyncmot;

namespace {

using Snapshots = std::vector<TrackSnapshot>;

TrackerConfig config_from(const std::optional<std::string>& text) {
  return text ? parse_config(*text, "<config>") : TrackerConfig{};
}

py::dict track_dict(const TrackState& t) {
  py::dict d;
  d["id"] = t.id;
  d["label"] = t.label;
  d["box"] = t.box;
  d["velocity"] = py::make_tuple(t.velocity.x(), t.velocity.y());
  d["score"] = t.score;
  d["status"] = to_string(t.status);
  return d;
}

py::dict snapshot_dict(const TrackSnapshot& s) {
  py::dict d;
  d["t"] = s.timestamp;
  d["kind"] = s.kind == FrameKind::sync ? "sync" : "async";
  py::list tracks;
  for (const auto& t : s.tracks) tracks.append(track_dict(t));
  d["tracks"] = tracks;
  return d;
}

}  // namespace

PYBIND11_MODULE(_asyncmot, m) {
  m.doc() = "Asynchronous LiDAR-camera 3D multi-object tracker";

  static py::exception<ValidationError> validation_error(m, "ValidationError", PyExc_ValueError);
  static py::exception<OrderingError> ordering_error(m, "OrderingError", validation_error.ptr());
  static py::exception<NumericalError> numerical_error(m, "NumericalError", PyExc_ArithmeticError);
  // Most derived first so an ordering error is not reported as its base.
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const OrderingError& e) {
      py::set_error(ordering_error, e.what());
    } catch (const ValidationError& e) {
      py::set_error(validation_error, e.what());
    } catch (const NumericalError& e) {
      py::set_error(numerical_error, e.what());
    }
  });

  py::class_<Box3D>(m, "Box3D")
      .def(py::init([](double x, double y, double z, double w, double l, double h, double yaw) {
             return Box3D{x, y, z, w, l, h, yaw};
           }),
           py::arg("x"), py::arg("y"), py::arg("z"), py::arg("w"), py::arg("l"), py::arg("h"),
           py::arg("yaw") = 0.0)
      .def_readwrite("x", &Box3D::x)
      .def_readwrite("y", &Box3D::y)
      .def_readwrite("z", &Box3D::z)
      .def_readwrite("w", &Box3D::w)
      .def_readwrite("l", &Box3D::l)
      .def_readwrite("h", &Box3D::h)
      .def_readwrite("yaw", &Box3D::yaw)
      .def(py::self == py::self)
      .def("__repr__", [](const Box3D& b) {
        std::ostringstream os;
        os << "Box3D(x=" << b.x << ", y=" << b.y << ", z=" << b.z << ", w=" << b.w << ", l=" << b.l
           << ", h=" << b.h << ", yaw=" << b.yaw << ")";
        return os.str();
      });

  py::class_<Box2D>(m, "Box2D")
      .def(py::init([](double x1, double y1, double x2, double y2) { return Box2D{x1, y1, x2, y2}; }),
           py::arg("x1"), py::arg("y1"), py::arg("x2"), py::arg("y2"))
      .def_readwrite("x1", &Box2D::x1)
      .def_readwrite("y1", &Box2D::y1)
      .def_readwrite("x2", &Box2D::x2)
      .def_readwrite("y2", &Box2D::y2)
      .def(py::self == py::self)
      .def("__repr__", [](const Box2D& b) {
        std::ostringstream os;
        os << "Box2D(" << b.x1 << ", " << b.y1 << ", " << b.x2 << ", " << b.y2 << ")";
        return os.str();
      });

  m.def("bev_iou", &bev_iou, py::arg("a"), py::arg("b"));
  m.def("iou_2d", &iou_2d, py::arg("a"), py::arg("b"));

  m.def(
      "solve_assignment",
      [](const std::vector<std::vector<double>>& costs, std::optional<double> gate) {
        const std::size_t rows = costs.size();
        const std::size_t cols = rows ? costs.front().size() : 0;
        CostMatrix matrix(rows, cols);
        for (std::size_t r = 0; r < rows; ++r) {
          if (costs[r].size() != cols) throw ValidationError("cost rows must have equal length");
          for (std::size_t c = 0; c < cols; ++c) {
            if (std::isfinite(costs[r][c])) {
              matrix.set(r, c, costs[r][c]);
            } else {
              matrix.invalidate(r, c);
            }
          }
        }
        double bound = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < cols; ++c) {
            if (matrix.valid(r, c)) bound = std::max(bound, matrix.cost(r, c));
          }
        }
        return solve_assignment(matrix, gate.value_or(bound)).pairs;
      },
      py::arg("costs"), py::arg("gate") = py::none(),
      "Minimum-cost pairs (row, col). Non-finite entries are never assigned; pairs above "
      "`gate` are dropped.");

  m.def("fuse_scores", &fuse_scores, py::arg("s3d"), py::arg("s2d"), py::arg("alpha"));
  m.def("update_score_sync", &update_score_sync, py::arg("prior"), py::arg("fused"));
  m.def("update_score_async", &update_score_async, py::arg("prior"), py::arg("single"),
        py::arg("beta"));

  m.def("default_config", [] { return config_to_string(TrackerConfig{}); },
        "Default tracker config as JSON text.");
  m.def("check_config", [](const std::string& text) { return config_to_string(parse_config(text)); },
        py::arg("text"), "Validates a config and returns it normalized.");

  py::class_<Scene>(m, "Scene")
      .def_static(
          "from_jsonl",
          [](const std::string& text) {
            std::istringstream in(text);
            return read_scene(in, "<scene>");
          },
          py::arg("text"))
      .def_static("load", &load_scene, py::arg("path"))
      .def("to_jsonl",
           [](const Scene& s) {
             std::ostringstream out;
             write_scene(s, out);
             return out.str();
           })
      .def("save", [](const Scene& s, const std::string& path) { save_scene(s, path); }, py::arg("path"))
      .def("sync_only", &Scene::sync_only)
      .def_readonly("id", &Scene::id)
      .def_property_readonly("has_ground_truth", [](const Scene& s) { return s.gt.has_value(); })
      .def("__len__", [](const Scene& s) { return s.frames.size(); });

  m.def(
      "simulate",
      [](std::uint64_t seed, double extrinsic_sigma, const std::optional<std::string>& scenario) {
        ScenarioConfig cfg = designed_scenario(seed, extrinsic_sigma);
        if (scenario) {
          cfg = parse_scenario(*scenario, "<scenario>");
          cfg.seed = seed;
          cfg.extrinsic_sigma = extrinsic_sigma;
        }
        return generate(cfg);
      },
      py::arg("seed") = 0, py::arg("extrinsic_sigma") = 0.0, py::arg("scenario") = py::none(),
      "Synthetic scene with ground truth; the designed suite unless a scenario JSON is given.");

  py::class_<Snapshots>(m, "Tracks")
      .def("__len__", [](const Snapshots& s) { return s.size(); })
      .def("__getitem__",
           [](const Snapshots& s, std::size_t i) {
             if (i >= s.size()) throw py::index_error();
             return snapshot_dict(s[i]);
           })
      .def("to_jsonl", [](const Snapshots& s) {
        std::ostringstream out;
        write_tracks(s, out);
        return out.str();
      });

  m.def(
      "run_scene",
      [](const Scene& scene, const std::optional<std::string>& config) {
        return run_scene(scene.frames, config_from(config));
      },
      py::arg("scene"), py::arg("config") = py::none(),
      "Tracks a scene; config is JSON text, defaults when omitted.");

  m.def(
      "evaluate",
      [](const Snapshots& tracks, const Scene& scene, double dist_thresh, int n_thresholds) {
        if (!scene.gt) throw ValidationError("scene has no ground truth");
        MetricsConfig cfg;
        cfg.dist_thresh = dist_thresh;
        cfg.n_thresholds = n_thresholds;
        return report_to_string(evaluate(tracks, *scene.gt, cfg));
      },
      py::arg("tracks"), py::arg("scene"), py::arg("dist_thresh") = 2.0, py::arg("n_thresholds") = 40,
      "Evaluation report as JSON text.");
}

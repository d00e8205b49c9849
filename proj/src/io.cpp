#include "asyncmot/io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "asyncmot/errors.hpp"

namespace asyncmot {

using json = nlohmann::ordered_json;

namespace {

/// Strict view of one JSON object: every read marks the key as consumed and
/// `finish` rejects anything left over.
class Fields {
 public:
  Fields(const json& j, std::string path, std::string where)
      : j_(j), path_(std::move(path)), where_(std::move(where)) {
    if (!j_.is_object()) fail(path_.empty() ? "expected an object" : "'" + path_ + "' must be an object");
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ValidationError(where_ + ": " + msg); }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    const auto it = j_.find(key);
    if (it == j_.end()) fail("missing key '" + key_path(key) + "'");
    used_.insert(key);
    return *it;
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) fail("'" + key_path(key) + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail("'" + key_path(key) + "' must be finite");
    return d;
  }

  long long integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) fail("'" + key_path(key) + "' must be an integer");
    return v.get<long long>();
  }

  std::uint64_t unsigned_integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      fail("'" + key_path(key) + "' must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_boolean()) fail("'" + key_path(key) + "' must be a boolean");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) fail("'" + key_path(key) + "' must be a string");
    return v.get<std::string>();
  }

  const json& array(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) fail("'" + key_path(key) + "' must be an array");
    return v;
  }

  std::vector<double> numbers(const std::string& key, std::size_t expected) {
    const json& v = array(key);
    if (v.size() != expected) {
      fail("'" + key_path(key) + "' must have " + std::to_string(expected) + " entries");
    }
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) {
        fail("'" + key_path(key) + "' must contain finite numbers");
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  Fields object(const std::string& key) { return Fields(raw(key), key_path(key), where_); }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.count(key)) fail("unknown field '" + key_path(key) + "'");
    }
  }

  const std::string& where() const { return where_; }

 private:
  const json& j_;
  std::string path_;
  std::string where_;
  std::set<std::string> used_;
};

json parse_json(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(where + ": malformed JSON: " + e.what());
  }
}

template <typename F>
auto with_context(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const OrderingError&) {
    throw;
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    if (msg.rfind(where, 0) == 0) throw;
    throw ValidationError(where + ": " + msg);
  }
}

// ---- cameras and detections ----

json camera_to_json(const CameraModel& c) {
  json k = json::array();
  json r = json::array();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      k.push_back(c.intrinsic(i, j));
      r.push_back(c.rotation(i, j));
    }
  }
  return json{{"id", c.id},
              {"K", k},
              {"R", r},
              {"t", {c.translation.x(), c.translation.y(), c.translation.z()}},
              {"width", c.width},
              {"height", c.height}};
}

CameraModel camera_from_json(Fields f) {
  CameraModel c;
  c.id = static_cast<int>(f.integer("id"));
  const auto k = f.numbers("K", 9);
  const auto r = f.numbers("R", 9);
  const auto t = f.numbers("t", 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      c.intrinsic(i, j) = k[static_cast<std::size_t>(3 * i + j)];
      c.rotation(i, j) = r[static_cast<std::size_t>(3 * i + j)];
    }
  }
  c.translation = Eigen::Vector3d(t[0], t[1], t[2]);
  c.width = static_cast<int>(f.integer("width"));
  c.height = static_cast<int>(f.integer("height"));
  f.finish();
  return c;
}

void box3d_to_json(const Box3D& b, json& j) {
  j["x"] = b.x;
  j["y"] = b.y;
  j["z"] = b.z;
  j["w"] = b.w;
  j["l"] = b.l;
  j["h"] = b.h;
  j["yaw"] = b.yaw;
}

Box3D box3d_from_json(Fields& f) {
  Box3D b;
  b.x = f.number("x");
  b.y = f.number("y");
  b.z = f.number("z");
  b.w = f.number("w");
  b.l = f.number("l");
  b.h = f.number("h");
  b.yaw = f.number("yaw");
  return b;
}

FrameKind parse_kind(const std::string& s, const Fields& f) {
  if (s == "sync") return FrameKind::sync;
  if (s == "async") return FrameKind::async;
  f.fail("'kind' must be \"sync\" or \"async\"");
}

std::string line_where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line);
}

// ---- configuration ----

json noise_to_json(const NoiseConfig& n) {
  return json{{"measurement_var", n.measurement_var}, {"gamma", n.gamma},
              {"accel_psd", n.accel_psd},             {"z_psd", n.z_psd},
              {"size_psd", n.size_psd},               {"yaw_psd", n.yaw_psd},
              {"initial_var", n.initial_var}};
}

json score_to_json(const ScoreConfig& s) {
  return json{{"decay_sync", s.decay_sync},
              {"decay_async", s.decay_async},
              {"alpha", s.alpha},
              {"beta", s.beta},
              {"delete_threshold", s.delete_threshold},
              {"strategy", to_string(s.strategy)},
              {"ema_weight", s.ema_weight},
              {"average_window", s.average_window}};
}

json class_to_json(const ClassParams& p) {
  return json{{"score_filter", p.score_filter}, {"nms_iou", p.nms_iou},
              {"gate_mix", p.gate_mix},         {"gate_pure3d", p.gate_pure3d},
              {"gate_pure2d", p.gate_pure2d},   {"dim_min", p.dim_min},
              {"dim_max", p.dim_max},           {"noise", noise_to_json(p.noise)},
              {"score", score_to_json(p.score)}};
}

/// With `partial`, absent keys keep the value already in `p`.
void noise_from_json(Fields f, NoiseConfig& n, bool partial) {
  auto num = [&](const char* key, double& dst) {
    if (!partial || f.has(key)) dst = f.number(key);
  };
  if (!partial || f.has("measurement_var")) {
    const auto v = f.numbers("measurement_var", 7);
    std::copy(v.begin(), v.end(), n.measurement_var.begin());
  }
  num("gamma", n.gamma);
  num("accel_psd", n.accel_psd);
  num("z_psd", n.z_psd);
  num("size_psd", n.size_psd);
  num("yaw_psd", n.yaw_psd);
  if (!partial || f.has("initial_var")) {
    const auto v = f.numbers("initial_var", 9);
    std::copy(v.begin(), v.end(), n.initial_var.begin());
  }
  f.finish();
}

void score_from_json(Fields f, ScoreConfig& s, bool partial) {
  auto num = [&](const char* key, double& dst) {
    if (!partial || f.has(key)) dst = f.number(key);
  };
  num("decay_sync", s.decay_sync);
  num("decay_async", s.decay_async);
  num("alpha", s.alpha);
  num("beta", s.beta);
  num("delete_threshold", s.delete_threshold);
  if (!partial || f.has("strategy")) s.strategy = parse_score_strategy(f.string("strategy"));
  num("ema_weight", s.ema_weight);
  if (!partial || f.has("average_window")) s.average_window = static_cast<int>(f.integer("average_window"));
  f.finish();
}

void class_from_json(Fields f, ClassParams& p, bool partial) {
  auto num = [&](const char* key, double& dst) {
    if (!partial || f.has(key)) dst = f.number(key);
  };
  num("score_filter", p.score_filter);
  num("nms_iou", p.nms_iou);
  num("gate_mix", p.gate_mix);
  num("gate_pure3d", p.gate_pure3d);
  num("gate_pure2d", p.gate_pure2d);
  num("dim_min", p.dim_min);
  num("dim_max", p.dim_max);
  if (!partial || f.has("noise")) noise_from_json(f.object("noise"), p.noise, partial);
  if (!partial || f.has("score")) score_from_json(f.object("score"), p.score, partial);
  f.finish();
}

json report_class_to_json(const ClassReport& c) {
  json table = json::array();
  for (const auto& p : c.table) {
    table.push_back(json{{"target_recall", p.target_recall},
                         {"achieved", p.achieved},
                         {"threshold", p.threshold},
                         {"recall", p.recall},
                         {"motar", p.motar},
                         {"motp", p.motp},
                         {"tp", p.tp},
                         {"fp", p.fp},
                         {"fn", p.fn},
                         {"ids", p.ids}});
  }
  return json{{"label", c.label}, {"amota", c.amota}, {"amotp", c.amotp}, {"mota", c.mota},
              {"tp", c.tp},       {"fp", c.fp},       {"fn", c.fn},       {"ids", c.ids},
              {"gt", c.gt_count}, {"table", table}};
}

}  // namespace

// ---- files ----

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw ValidationError("failed writing '" + path + "'");
}

// ---- scenes ----

void write_scene(const Scene& scene, std::ostream& out) {
  json cams = json::array();
  for (const auto& c : scene.cameras) cams.push_back(camera_to_json(c));
  out << json{{"type", "header"},
              {"format", "asyncmot-scene"},
              {"version", kFormatVersion},
              {"scene", scene.id},
              {"cameras", cams}}
             .dump()
      << '\n';
  for (std::size_t i = 0; i < scene.frames.size(); ++i) {
    const Frame& f = scene.frames[i];
    json d3 = json::array();
    for (const auto& d : f.dets3d) {
      json j;
      box3d_to_json(d.box, j);
      j["score"] = d.score;
      j["label"] = d.label;
      d3.push_back(std::move(j));
    }
    json d2 = json::array();
    for (const auto& d : f.dets2d) {
      d2.push_back(json{{"x1", d.box.x1},
                        {"y1", d.box.y1},
                        {"x2", d.box.x2},
                        {"y2", d.box.y2},
                        {"score", d.score},
                        {"label", d.label},
                        {"camera", d.camera_id}});
    }
    out << json{{"type", "frame"},
                {"t", f.timestamp},
                {"kind", to_string(f.kind)},
                {"dets3d", d3},
                {"dets2d", d2}}
               .dump()
        << '\n';
    if (scene.gt) {
      const GtFrame* g = scene.gt->at(f.timestamp);
      if (!g) continue;
      json objs = json::array();
      for (const auto& o : g->objects) {
        json j{{"id", o.id}, {"label", o.label}};
        box3d_to_json(o.box, j);
        j["vx"] = o.velocity.x();
        j["vy"] = o.velocity.y();
        objs.push_back(std::move(j));
      }
      out << json{{"type", "gt"}, {"t", g->timestamp}, {"kind", to_string(g->kind)}, {"objects", objs}}
                 .dump()
          << '\n';
    }
  }
}

void save_scene(const Scene& scene, const std::string& path) {
  std::ostringstream ss;
  write_scene(scene, ss);
  write_text_file(path, ss.str());
}

Scene read_scene(std::istream& in, const std::string& source) {
  Scene scene;
  bool have_header = false;
  GroundTruth gt;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.empty() || text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = line_where(source, line_no);
    const json j = parse_json(text, where);
    Fields f(j, "", where);
    const std::string type = f.string("type");
    with_context(where, [&] {
      if (type == "header") {
        if (have_header) f.fail("duplicate header");
        if (f.string("format") != "asyncmot-scene") f.fail("'format' must be \"asyncmot-scene\"");
        if (f.integer("version") != kFormatVersion) f.fail("unsupported version");
        scene.id = f.string("scene");
        for (const auto& c : f.array("cameras")) {
          scene.cameras.push_back(camera_from_json(Fields(c, "cameras[]", where)));
          scene.cameras.back().validate();
        }
        f.finish();
        have_header = true;
        return 0;
      }
      if (!have_header) f.fail("first record must be the header");
      if (type == "frame") {
        Frame frame;
        frame.timestamp = f.number("t");
        frame.kind = parse_kind(f.string("kind"), f);
        if (!scene.frames.empty() && !(frame.timestamp > scene.frames.back().timestamp)) {
          f.fail("timestamp " + std::to_string(frame.timestamp) + " does not increase");
        }
        for (const auto& d : f.array("dets3d")) {
          Fields df(d, "dets3d[]", where);
          Detection3D det;
          det.box = box3d_from_json(df);
          det.score = df.number("score");
          det.label = df.string("label");
          det.timestamp = frame.timestamp;
          df.finish();
          frame.dets3d.push_back(std::move(det));
        }
        for (const auto& d : f.array("dets2d")) {
          Fields df(d, "dets2d[]", where);
          Detection2D det;
          det.box = Box2D{df.number("x1"), df.number("y1"), df.number("x2"), df.number("y2")};
          det.score = df.number("score");
          det.label = df.string("label");
          det.camera_id = static_cast<int>(df.integer("camera"));
          det.timestamp = frame.timestamp;
          df.finish();
          frame.dets2d.push_back(std::move(det));
        }
        f.finish();
        frame.cameras = scene.cameras;
        frame.validate();
        scene.frames.push_back(std::move(frame));
        return 0;
      }
      if (type == "gt") {
        GtFrame g;
        g.timestamp = f.number("t");
        g.kind = parse_kind(f.string("kind"), f);
        if (!gt.frames.empty() && !(g.timestamp > gt.frames.back().timestamp)) {
          f.fail("ground-truth timestamp does not increase");
        }
        std::set<std::uint64_t> ids;
        for (const auto& o : f.array("objects")) {
          Fields of(o, "objects[]", where);
          GtObject obj;
          obj.id = of.unsigned_integer("id");
          obj.label = of.string("label");
          obj.box = box3d_from_json(of);
          obj.velocity = Eigen::Vector2d(of.number("vx"), of.number("vy"));
          of.finish();
          if (!obj.box.valid()) of.fail("ground-truth box must have positive size");
          if (!ids.insert(obj.id).second) of.fail("duplicate ground-truth id " + std::to_string(obj.id));
          g.objects.push_back(std::move(obj));
        }
        f.finish();
        gt.frames.push_back(std::move(g));
        return 0;
      }
      f.fail("unknown record type '" + type + "'");
    });
  }
  if (!have_header) throw ValidationError(source + ": missing header record");
  if (!gt.frames.empty()) scene.gt = std::move(gt);
  return scene;
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "' for reading");
  return read_scene(in, path);
}

// ---- tracks ----

void write_tracks(const std::vector<TrackSnapshot>& snapshots, std::ostream& out,
                  const std::string& scene_id) {
  out << json{{"type", "header"}, {"format", "asyncmot-tracks"}, {"version", kFormatVersion}, {"scene", scene_id}}
             .dump()
      << '\n';
  std::vector<const TrackSnapshot*> order;
  for (const auto& s : snapshots) order.push_back(&s);
  std::stable_sort(order.begin(), order.end(),
                   [](const TrackSnapshot* a, const TrackSnapshot* b) { return a->timestamp < b->timestamp; });
  for (const TrackSnapshot* s : order) {
    std::vector<const TrackState*> tracks;
    for (const auto& t : s->tracks) tracks.push_back(&t);
    std::stable_sort(tracks.begin(), tracks.end(),
                     [](const TrackState* a, const TrackState* b) { return a->id < b->id; });
    out << json{{"type", "snapshot"}, {"t", s->timestamp}, {"kind", to_string(s->kind)}, {"tracks", tracks.size()}}
               .dump()
        << '\n';
    for (const TrackState* t : tracks) {
      json j{{"type", "track"}, {"t", s->timestamp}, {"id", t->id}, {"label", t->label}};
      box3d_to_json(t->box, j);
      j["vx"] = t->velocity.x();
      j["vy"] = t->velocity.y();
      j["score"] = t->score;
      j["status"] = to_string(t->status);
      out << j.dump() << '\n';
    }
  }
}

void save_tracks(const std::vector<TrackSnapshot>& snapshots, const std::string& path,
                 const std::string& scene_id) {
  std::ostringstream ss;
  write_tracks(snapshots, ss, scene_id);
  write_text_file(path, ss.str());
}

std::vector<TrackSnapshot> read_tracks(std::istream& in, const std::string& source) {
  std::vector<TrackSnapshot> out;
  bool have_header = false;
  std::size_t expected = 0;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.empty() || text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = line_where(source, line_no);
    const json j = parse_json(text, where);
    Fields f(j, "", where);
    const std::string type = f.string("type");
    with_context(where, [&] {
      if (type == "header") {
        if (have_header) f.fail("duplicate header");
        if (f.string("format") != "asyncmot-tracks") f.fail("'format' must be \"asyncmot-tracks\"");
        if (f.integer("version") != kFormatVersion) f.fail("unsupported version");
        f.string("scene");
        f.finish();
        have_header = true;
        return 0;
      }
      if (!have_header) f.fail("first record must be the header");
      if (type == "snapshot") {
        if (expected != 0) f.fail("previous snapshot is missing track records");
        TrackSnapshot s;
        s.timestamp = f.number("t");
        s.kind = parse_kind(f.string("kind"), f);
        expected = f.unsigned_integer("tracks");
        f.finish();
        if (!out.empty() && !(s.timestamp > out.back().timestamp)) {
          f.fail("snapshot timestamp does not increase");
        }
        out.push_back(std::move(s));
        return 0;
      }
      if (type == "track") {
        if (out.empty() || expected == 0) f.fail("track record outside a snapshot");
        TrackSnapshot& s = out.back();
        TrackState t;
        if (f.number("t") != s.timestamp) f.fail("track timestamp differs from its snapshot");
        t.id = f.unsigned_integer("id");
        t.label = f.string("label");
        t.box = box3d_from_json(f);
        t.velocity = Eigen::Vector2d(f.number("vx"), f.number("vy"));
        t.score = f.number("score");
        t.status = parse_track_status(f.string("status"));
        f.finish();
        if (t.score < 0.0 || t.score > 1.0) f.fail("'score' must be in [0, 1]");
        if (!s.tracks.empty() && !(t.id > s.tracks.back().id)) f.fail("track ids must increase within a snapshot");
        s.tracks.push_back(std::move(t));
        --expected;
        return 0;
      }
      f.fail("unknown record type '" + type + "'");
    });
  }
  if (!have_header) throw ValidationError(source + ": missing header record");
  if (expected != 0) throw ValidationError(source + ": last snapshot is missing track records");
  return out;
}

std::vector<TrackSnapshot> load_tracks(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "' for reading");
  return read_tracks(in, path);
}

// ---- tracker configuration ----

std::string config_to_string(const TrackerConfig& config) {
  json classes = json::object();
  for (const auto& [label, p] : config.classes) classes[label] = class_to_json(p);
  const AlignConfig& a = config.alignment;
  const MatchingConfig& m = config.matching;
  json j{{"version", kFormatVersion},
         {"defaults", class_to_json(config.defaults)},
         {"classes", classes},
         {"alignment",
          {{"enabled", a.enabled},
           {"metric", to_string(a.metric)},
           {"max_center_shift", a.max_center_shift},
           {"max_yaw_shift", a.max_yaw_shift},
           {"max_size_change", a.max_size_change},
           {"max_iterations", a.max_iterations},
           {"tolerance", a.tolerance},
           {"fd_step_position", a.fd_step_position},
           {"fd_step_yaw", a.fd_step_yaw}}},
         {"matching",
          {{"cascade", m.cascade},
           {"mix_phase", m.mix_phase},
           {"pure3d_phase", m.pure3d_phase},
           {"pure2d_phase", m.pure2d_phase},
           {"spawn_from_pure3d", m.spawn_from_pure3d},
           {"mix_iou_gate", m.mix_iou_gate}}},
         {"lifecycle", {{"mode", to_string(config.lifecycle.mode)}, {"max_misses", config.lifecycle.max_misses}}},
         {"calibration",
          {{"enabled", config.calibration.enabled},
           {"min_agreement", config.calibration.min_agreement},
           {"min_score", config.calibration.min_score},
           {"prior_count", config.calibration.prior_count}}},
         {"use_async", config.use_async},
         {"emit_async_snapshots", config.emit_async_snapshots}};
  return j.dump(2) + "\n";
}

TrackerConfig parse_config(const std::string& text, const std::string& source) {
  const json j = parse_json(text, source);
  return with_context(source, [&] {
    Fields f(j, "", source);
    if (f.integer("version") != kFormatVersion) f.fail("unsupported config version");
    TrackerConfig cfg;
    class_from_json(f.object("defaults"), cfg.defaults, false);
    Fields classes = f.object("classes");
    for (const auto& [label, value] : j.at("classes").items()) {
      ClassParams p = cfg.defaults;
      class_from_json(classes.object(label), p, true);
      cfg.classes[label] = p;
    }
    classes.finish();

    Fields a = f.object("alignment");
    cfg.alignment.enabled = a.boolean("enabled");
    cfg.alignment.metric = parse_alignment_metric(a.string("metric"));
    cfg.alignment.max_center_shift = a.number("max_center_shift");
    cfg.alignment.max_yaw_shift = a.number("max_yaw_shift");
    cfg.alignment.max_size_change = a.number("max_size_change");
    cfg.alignment.max_iterations = static_cast<int>(a.integer("max_iterations"));
    cfg.alignment.tolerance = a.number("tolerance");
    cfg.alignment.fd_step_position = a.number("fd_step_position");
    cfg.alignment.fd_step_yaw = a.number("fd_step_yaw");
    a.finish();

    Fields m = f.object("matching");
    cfg.matching.cascade = m.boolean("cascade");
    cfg.matching.mix_phase = m.boolean("mix_phase");
    cfg.matching.pure3d_phase = m.boolean("pure3d_phase");
    cfg.matching.pure2d_phase = m.boolean("pure2d_phase");
    cfg.matching.spawn_from_pure3d = m.boolean("spawn_from_pure3d");
    cfg.matching.mix_iou_gate = m.number("mix_iou_gate");
    m.finish();

    Fields l = f.object("lifecycle");
    cfg.lifecycle.mode = parse_lifecycle_mode(l.string("mode"));
    cfg.lifecycle.max_misses = static_cast<int>(l.integer("max_misses"));
    l.finish();

    Fields c = f.object("calibration");
    cfg.calibration.enabled = c.boolean("enabled");
    cfg.calibration.min_agreement = c.number("min_agreement");
    cfg.calibration.min_score = c.number("min_score");
    cfg.calibration.prior_count = c.number("prior_count");
    c.finish();

    cfg.use_async = f.boolean("use_async");
    cfg.emit_async_snapshots = f.boolean("emit_async_snapshots");
    f.finish();
    cfg.validate();
    return cfg;
  });
}

TrackerConfig load_config(const std::string& path) { return parse_config(read_text_file(path), path); }

// ---- scenario configuration ----

std::string scenario_to_string(const ScenarioConfig& s) {
  json objects = json::array();
  for (const auto& o : s.objects) {
    objects.push_back(json{{"label", o.label},
                           {"motion", to_string(o.motion)},
                           {"x", o.x},
                           {"y", o.y},
                           {"yaw", o.yaw},
                           {"speed", o.speed},
                           {"turn_rate", o.turn_rate},
                           {"cycle", o.cycle},
                           {"w", o.w},
                           {"l", o.l},
                           {"h", o.h},
                           {"spawn_time", o.spawn_time},
                           // JSON has no infinity; null means "never".
                           {"despawn_time", std::isinf(o.despawn_time) ? json(nullptr) : json(o.despawn_time)}});
  }
  json cams = json::array();
  for (const auto& c : s.cameras) cams.push_back(camera_to_json(c));
  json j{{"version", kFormatVersion},
         {"duration", s.duration},
         {"sync_rate", s.sync_rate},
         {"async_rate", s.async_rate},
         {"objects", objects},
         {"noise",
          {{"position", s.noise.position},
           {"size", s.noise.size},
           {"yaw", s.noise.yaw},
           {"pixel", s.noise.pixel}}},
         {"scores",
          {{"mean_3d", s.scores.mean_3d},
           {"mean_2d_sync", s.scores.mean_2d_sync},
           {"mean_2d_async", s.scores.mean_2d_async},
           {"sigma", s.scores.sigma}}},
         {"lidar_dropout", s.lidar_dropout},
         {"camera_dropout", s.camera_dropout},
         {"lidar_frame_dropout", s.lidar_frame_dropout},
         {"score_dip_prob", s.score_dip_prob},
         {"score_dip_factor", s.score_dip_factor},
         {"false_positive_rate_3d", s.false_positive_rate_3d},
         {"false_positive_rate_2d", s.false_positive_rate_2d},
         {"false_positive_score_min", s.false_positive_score_min},
         {"false_positive_score_max", s.false_positive_score_max},
         {"false_positive_region", s.false_positive_region},
         {"lidar_range", s.lidar_range},
         {"cameras", cams},
         {"extrinsic_sigma", s.extrinsic_sigma},
         {"seed", s.seed}};
  return j.dump(2) + "\n";
}

ScenarioConfig parse_scenario(const std::string& text, const std::string& source) {
  const json j = parse_json(text, source);
  return with_context(source, [&] {
    Fields f(j, "", source);
    if (f.integer("version") != kFormatVersion) f.fail("unsupported scenario version");
    ScenarioConfig s;
    s.duration = f.number("duration");
    s.sync_rate = f.number("sync_rate");
    s.async_rate = f.number("async_rate");
    for (const auto& o : f.array("objects")) {
      Fields of(o, "objects[]", source);
      ObjectSpec spec;
      spec.label = of.string("label");
      spec.motion = parse_motion_pattern(of.string("motion"));
      spec.x = of.number("x");
      spec.y = of.number("y");
      spec.yaw = of.number("yaw");
      spec.speed = of.number("speed");
      spec.turn_rate = of.number("turn_rate");
      spec.cycle = of.number("cycle");
      spec.w = of.number("w");
      spec.l = of.number("l");
      spec.h = of.number("h");
      spec.spawn_time = of.number("spawn_time");
      if (of.raw("despawn_time").is_null()) {
        spec.despawn_time = std::numeric_limits<double>::infinity();
      } else {
        spec.despawn_time = of.number("despawn_time");
      }
      of.finish();
      s.objects.push_back(std::move(spec));
    }
    Fields n = f.object("noise");
    s.noise.position = n.number("position");
    s.noise.size = n.number("size");
    s.noise.yaw = n.number("yaw");
    s.noise.pixel = n.number("pixel");
    n.finish();
    Fields sc = f.object("scores");
    s.scores.mean_3d = sc.number("mean_3d");
    s.scores.mean_2d_sync = sc.number("mean_2d_sync");
    s.scores.mean_2d_async = sc.number("mean_2d_async");
    s.scores.sigma = sc.number("sigma");
    sc.finish();
    s.lidar_dropout = f.number("lidar_dropout");
    s.camera_dropout = f.number("camera_dropout");
    s.lidar_frame_dropout = f.number("lidar_frame_dropout");
    s.score_dip_prob = f.number("score_dip_prob");
    s.score_dip_factor = f.number("score_dip_factor");
    s.false_positive_rate_3d = f.number("false_positive_rate_3d");
    s.false_positive_rate_2d = f.number("false_positive_rate_2d");
    s.false_positive_score_min = f.number("false_positive_score_min");
    s.false_positive_score_max = f.number("false_positive_score_max");
    s.false_positive_region = f.number("false_positive_region");
    s.lidar_range = f.number("lidar_range");
    for (const auto& c : f.array("cameras")) s.cameras.push_back(camera_from_json(Fields(c, "cameras[]", source)));
    s.extrinsic_sigma = f.number("extrinsic_sigma");
    s.seed = f.unsigned_integer("seed");
    f.finish();
    s.validate();
    return s;
  });
}

ScenarioConfig load_scenario(const std::string& path) { return parse_scenario(read_text_file(path), path); }

// ---- reports ----

std::string report_to_string(const EvalReport& r) {
  json classes = json::array();
  for (const auto& c : r.classes) classes.push_back(report_class_to_json(c));
  json j{{"version", kFormatVersion},
         {"amota", r.amota},
         {"amotp", r.amotp},
         {"mota", r.mota},
         {"tp", r.tp},
         {"fp", r.fp},
         {"fn", r.fn},
         {"ids", r.ids},
         {"gt", r.gt_count},
         {"classes", classes}};
  return j.dump(2) + "\n";
}

EvalReport parse_report(const std::string& text, const std::string& source) {
  const json j = parse_json(text, source);
  return with_context(source, [&] {
    Fields f(j, "", source);
    if (f.integer("version") != kFormatVersion) f.fail("unsupported report version");
    EvalReport r;
    r.amota = f.number("amota");
    r.amotp = f.number("amotp");
    r.mota = f.number("mota");
    r.tp = f.unsigned_integer("tp");
    r.fp = f.unsigned_integer("fp");
    r.fn = f.unsigned_integer("fn");
    r.ids = f.unsigned_integer("ids");
    r.gt_count = f.unsigned_integer("gt");
    for (const auto& cj : f.array("classes")) {
      Fields cf(cj, "classes[]", source);
      ClassReport c;
      c.label = cf.string("label");
      c.amota = cf.number("amota");
      c.amotp = cf.number("amotp");
      c.mota = cf.number("mota");
      c.tp = cf.unsigned_integer("tp");
      c.fp = cf.unsigned_integer("fp");
      c.fn = cf.unsigned_integer("fn");
      c.ids = cf.unsigned_integer("ids");
      c.gt_count = cf.unsigned_integer("gt");
      for (const auto& pj : cf.array("table")) {
        Fields pf(pj, "table[]", source);
        RecallPoint p;
        p.target_recall = pf.number("target_recall");
        p.achieved = pf.boolean("achieved");
        p.threshold = pf.number("threshold");
        p.recall = pf.number("recall");
        p.motar = pf.number("motar");
        p.motp = pf.number("motp");
        p.tp = pf.unsigned_integer("tp");
        p.fp = pf.unsigned_integer("fp");
        p.fn = pf.unsigned_integer("fn");
        p.ids = pf.unsigned_integer("ids");
        pf.finish();
        c.table.push_back(p);
      }
      cf.finish();
      r.classes.push_back(std::move(c));
    }
    f.finish();
    return r;
  });
}

}  // namespace asyncmot

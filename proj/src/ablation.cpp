#include "asyncmot/ablation.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "asyncmot/errors.hpp"
#include "asyncmot/sim.hpp"
#include "asyncmot/tracker.hpp"

namespace asyncmot {

namespace {

bool parse_switch(const std::string& axis, const std::string& value) {
  if (value == "on") return true;
  if (value == "off") return false;
  throw ValidationError("axis '" + axis + "' takes on/off, got '" + value + "'");
}

template <typename F>
void for_each_class(TrackerConfig& config, F&& f) {
  f(config.defaults);
  for (auto& [label, p] : config.classes) f(p);
}

double parse_sigma(const std::string& value) {
  std::size_t used = 0;
  double sigma = 0.0;
  try {
    sigma = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || !(sigma >= 0.0)) {
    throw ValidationError("axis 'sigma' takes non-negative numbers, got '" + value + "'");
  }
  return sigma;
}

}  // namespace

AblationAxis switch_axis(const std::string& name) { return {name, {"off", "on"}}; }

void disable_frequency_aware_estimation(TrackerConfig& config) {
  config.lifecycle.mode = LifecycleMode::count;
  for_each_class(config, [](ClassParams& p) {
    p.noise.gamma = 1.0;
    p.score.beta = 1.0;
    p.score.decay_async = p.score.decay_sync;
  });
}

void apply_setting(TrackerConfig& config, const std::string& axis, const std::string& value) {
  if (axis == "async") {
    config.use_async = parse_switch(axis, value);
  } else if (axis == "cascade") {
    config.matching.cascade = parse_switch(axis, value);
  } else if (axis == "mix") {
    config.matching.mix_phase = parse_switch(axis, value);
  } else if (axis == "pure3d") {
    config.matching.pure3d_phase = parse_switch(axis, value);
  } else if (axis == "pure2d") {
    config.matching.pure2d_phase = parse_switch(axis, value);
  } else if (axis == "align") {
    config.alignment.enabled = parse_switch(axis, value);
  } else if (axis == "calibration_check") {
    config.calibration.enabled = parse_switch(axis, value);
  } else if (axis == "rate_aware") {
    if (!parse_switch(axis, value)) disable_frequency_aware_estimation(config);
  } else if (axis == "strategy") {
    const ScoreStrategy s = parse_score_strategy(value);
    for_each_class(config, [s](ClassParams& p) { p.score.strategy = s; });
  } else if (axis == "align_metric") {
    config.alignment.metric = parse_alignment_metric(value);
  } else if (axis == "sigma") {
    parse_sigma(value);
  } else {
    throw ValidationError("unknown ablation axis '" + axis + "'");
  }
}

Scene perturb_scene(const Scene& scene, double sigma, std::uint64_t seed) {
  Scene out = scene;
  out.cameras = perturb_extrinsics(scene.cameras, sigma, seed);
  for (auto& f : out.frames) f.cameras = out.cameras;
  return out;
}

EvalReport track_and_evaluate(const Scene& scene, const TrackerConfig& config,
                              const MetricsConfig& metrics) {
  if (!scene.gt) throw ValidationError("scene '" + scene.id + "' has no ground truth");
  const auto snaps = run_scene(scene.frames, config);
  return evaluate(snaps, *scene.gt, metrics);
}

std::vector<AblationRow> run_ablation(const std::vector<Scene>& scenes, const TrackerConfig& base,
                                      const std::vector<AblationAxis>& axes,
                                      const MetricsConfig& metrics, unsigned threads) {
  if (scenes.empty()) throw ValidationError("ablation needs at least one scene");
  std::size_t n_rows = 1;
  for (const auto& a : axes) {
    if (a.values.empty()) throw ValidationError("ablation axis '" + a.name + "' has no values");
    n_rows *= a.values.size();
  }

  std::vector<AblationRow> rows(n_rows);
  std::vector<TrackerConfig> configs(n_rows, base);
  std::vector<double> sigmas(n_rows, 0.0);
  for (std::size_t r = 0; r < n_rows; ++r) {
    std::size_t rem = r;
    rows[r].values.resize(axes.size());
    for (std::size_t k = axes.size(); k-- > 0;) {
      const auto& a = axes[k];
      rows[r].values[k] = a.values[rem % a.values.size()];
      rem /= a.values.size();
    }
    for (std::size_t k = 0; k < axes.size(); ++k) {
      apply_setting(configs[r], axes[k].name, rows[r].values[k]);
      if (axes[k].name == "sigma") sigmas[r] = parse_sigma(rows[r].values[k]);
    }
    configs[r].emit_async_snapshots = false;
    configs[r].validate();
    rows[r].per_scene.resize(scenes.size());
  }

  const std::size_t n_jobs = n_rows * scenes.size();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_jobs));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t job = next++; job < n_jobs; job = next++) {
      const std::size_t r = job / scenes.size();
      const std::size_t s = job % scenes.size();
      try {
        if (sigmas[r] > 0.0) {
          const Scene noisy = perturb_scene(scenes[s], sigmas[r], 1000003ULL * (s + 1));
          rows[r].per_scene[s] = track_and_evaluate(noisy, configs[r], metrics);
        } else {
          rows[r].per_scene[s] = track_and_evaluate(scenes[s], configs[r], metrics);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  for (auto& row : rows) row.report = combine_reports(row.per_scene);
  return rows;
}

std::string format_ablation(const std::vector<AblationAxis>& axes,
                            const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  char cell[64];
  std::vector<int> width;
  for (const auto& a : axes) {
    std::size_t w = std::max<std::size_t>(a.name.size(), 11);
    for (const auto& v : a.values) w = std::max(w, v.size());
    width.push_back(static_cast<int>(w));
  }
  std::snprintf(cell, sizeof cell, "%-4s", "#");
  os << cell;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    std::snprintf(cell, sizeof cell, " %-*s", width[i], axes[i].name.c_str());
    os << cell;
  }
  std::snprintf(cell, sizeof cell, " %8s %8s %8s %6s %6s %6s\n", "AMOTA", "AMOTP", "MOTA", "IDS",
                "FP", "FN");
  os << cell;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::snprintf(cell, sizeof cell, "%-4zu", r);
    os << cell;
    for (std::size_t i = 0; i < rows[r].values.size(); ++i) {
      std::snprintf(cell, sizeof cell, " %-*s", width[i], rows[r].values[i].c_str());
      os << cell;
    }
    const EvalReport& e = rows[r].report;
    std::snprintf(cell, sizeof cell, " %8.4f %8.4f %8.4f %6zu %6zu %6zu\n", e.amota, e.amotp,
                  e.mota, e.ids, e.fp, e.fn);
    os << cell;
  }
  return os.str();
}

}  // namespace asyncmot

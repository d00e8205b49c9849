// Command-line front end: track, eval, simulate, ablate, defaults.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "asyncmot/ablation.hpp"
#include "asyncmot/errors.hpp"
#include "asyncmot/io.hpp"
#include "asyncmot/metrics.hpp"
#include "asyncmot/sim.hpp"
#include "asyncmot/tracker.hpp"

namespace {

using namespace asyncmot;

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

TrackerConfig config_or_default(const std::string& path) {
  return path.empty() ? TrackerConfig{} : load_config(path);
}

int cmd_track(const std::string& scene_path, const std::string& config_path,
              const std::string& out_path, bool sync_only, bool emit_async) {
  TrackerConfig cfg = config_or_default(config_path);
  if (sync_only) cfg.use_async = false;
  if (emit_async) cfg.emit_async_snapshots = true;
  Scene scene = load_scene(scene_path);
  if (sync_only) scene = scene.sync_only();
  const auto snaps = run_scene(scene.frames, cfg);
  save_tracks(snaps, out_path, scene.id);
  std::size_t records = 0;
  for (const auto& s : snaps) records += s.tracks.size();
  std::printf("tracked %zu frames, wrote %zu snapshots (%zu track records) to %s\n",
              scene.frames.size(), snaps.size(), records, out_path.c_str());
  return kOk;
}

int cmd_eval(const std::string& tracks_path, const std::string& gt_path, double gate,
             int n_thresholds, const std::string& report_path) {
  const auto snaps = load_tracks(tracks_path);
  const Scene scene = load_scene(gt_path);
  if (!scene.gt) throw ValidationError(gt_path + ": scene has no ground-truth records");
  MetricsConfig m;
  m.dist_thresh = gate;
  m.n_thresholds = n_thresholds;
  const EvalReport report = evaluate(snaps, *scene.gt, m);
  std::cout << format_report(report);
  if (!report_path.empty()) write_text_file(report_path, report_to_string(report));
  return kOk;
}

int cmd_simulate(const std::string& scenario_path, bool designed, std::optional<std::uint64_t> seed,
                 double sigma, const std::string& out_path) {
  ScenarioConfig cfg;
  if (!scenario_path.empty()) {
    cfg = load_scenario(scenario_path);
    if (seed) cfg.seed = *seed;
    if (sigma >= 0.0) cfg.extrinsic_sigma = sigma;
  } else if (designed) {
    cfg = designed_scenario(seed.value_or(0), sigma >= 0.0 ? sigma : 0.0);
  } else {
    throw ValidationError("simulate needs --scenario or --designed");
  }
  const Scene scene = generate(cfg);
  save_scene(scene, out_path);
  std::printf("wrote %zu frames to %s\n", scene.frames.size(), out_path.c_str());
  return kOk;
}

struct AblateArgs {
  std::vector<std::string> scenes;
  int designed_seeds = 0;
  std::string config;
  std::vector<std::string> toggles;
  std::vector<std::string> strategies;
  std::vector<std::string> align_metrics;
  std::vector<std::string> sigmas;
  unsigned threads = 0;
  std::string out;
};

int cmd_ablate(const AblateArgs& a) {
  std::vector<Scene> scenes;
  for (const auto& p : a.scenes) scenes.push_back(load_scene(p));
  for (int s = 0; s < a.designed_seeds; ++s) {
    scenes.push_back(generate(designed_scenario(static_cast<std::uint64_t>(s))));
  }
  if (scenes.empty()) throw ValidationError("ablate needs --scene or --designed-seeds");

  std::vector<AblationAxis> axes;
  for (const auto& t : a.toggles) axes.push_back(switch_axis(t));
  if (!a.strategies.empty()) axes.push_back({"strategy", a.strategies});
  if (!a.align_metrics.empty()) axes.push_back({"align_metric", a.align_metrics});
  if (!a.sigmas.empty()) axes.push_back({"sigma", a.sigmas});

  const auto rows = run_ablation(scenes, config_or_default(a.config), axes, {}, a.threads);
  const std::string table = format_ablation(axes, rows);
  std::cout << table;
  if (!a.out.empty()) write_text_file(a.out, table);
  return kOk;
}

int cmd_defaults(const std::string& config_out, const std::string& scenario_out, bool designed) {
  const std::string cfg = config_to_string(TrackerConfig{});
  const std::string scen = scenario_to_string(designed ? designed_scenario(0) : ScenarioConfig{});
  if (config_out.empty() && scenario_out.empty()) {
    std::cout << cfg;
    return kOk;
  }
  if (!config_out.empty()) write_text_file(config_out, cfg);
  if (!scenario_out.empty()) write_text_file(scenario_out, scen);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asynchronous LiDAR-camera 3D multi-object tracker"};
  app.require_subcommand(1);

  std::string scene_path, config_path, out_path;
  bool sync_only = false, emit_async = false;
  auto* track = app.add_subcommand("track", "Run the tracker over a scene file");
  track->add_option("--scene", scene_path, "Scene file (JSON lines)")->required()->check(CLI::ExistingFile);
  track->add_option("--config", config_path, "Tracker config (JSON); defaults when omitted")
      ->check(CLI::ExistingFile);
  track->add_option("--out", out_path, "Output track dump")->required();
  track->add_flag("--sync-only", sync_only, "Drop async frames before tracking");
  track->add_flag("--emit-async-snapshots", emit_async, "Also write snapshots at async frames");

  std::string tracks_path, gt_path, report_path;
  double gate = 2.0;
  int n_thresholds = 40;
  auto* eval = app.add_subcommand("eval", "Evaluate a track dump against ground truth");
  eval->add_option("--tracks", tracks_path, "Track dump")->required()->check(CLI::ExistingFile);
  eval->add_option("--gt", gt_path, "Scene file with ground-truth records")->required()->check(CLI::ExistingFile);
  eval->add_option("--dist-gate", gate, "BEV center-distance gate in meters")
      ->check(CLI::PositiveNumber)->capture_default_str();
  eval->add_option("--n-thresholds", n_thresholds, "Number of recall targets")
      ->check(CLI::Range(1, 100000))->capture_default_str();
  eval->add_option("--report", report_path, "Write the JSON report here");

  std::string scenario_path, sim_out;
  bool designed = false;
  std::optional<std::uint64_t> seed;
  double sigma = -1.0;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic scene with ground truth");
  simulate->add_option("--scenario", scenario_path, "Scenario config (JSON)")->check(CLI::ExistingFile);
  simulate->add_flag("--designed", designed, "Use the built-in dropout/occlusion scenario");
  simulate->add_option("--seed", seed, "Random seed (overrides the scenario's)");
  simulate->add_option("--extrinsic-sigma", sigma, "Extrinsic noise std (overrides the scenario's)")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--out", sim_out, "Output scene file")->required();

  AblateArgs ab;
  auto* ablate = app.add_subcommand("ablate", "Sweep a matrix of configuration toggles");
  ablate->add_option("--scene", ab.scenes, "Scene file(s) with ground truth")->check(CLI::ExistingFile);
  ablate->add_option("--designed-seeds", ab.designed_seeds, "Also generate N built-in scenarios")
      ->check(CLI::NonNegativeNumber);
  ablate->add_option("--config", ab.config, "Base tracker config")->check(CLI::ExistingFile);
  const std::vector<std::string> switches{"async",  "cascade", "mix",        "pure3d",
                                          "pure2d", "align",   "rate_aware", "calibration_check"};
  ablate->add_option("--toggle", ab.toggles, "On/off axes, comma separated")
      ->delimiter(',')
      ->check(CLI::IsMember(switches));
  ablate->add_option("--strategies", ab.strategies, "Score strategies: noisy_or average ema max")
      ->delimiter(',')
      ->check(CLI::IsMember({"noisy_or", "average", "ema", "max"}));
  ablate->add_option("--align-metrics", ab.align_metrics, "Alignment residuals: iou giou euclidean")
      ->delimiter(',')
      ->check(CLI::IsMember({"iou", "giou", "euclidean"}));
  ablate->add_option("--sigmas", ab.sigmas, "Extrinsic noise levels, e.g. 0,0.1,0.2")->delimiter(',');
  ablate->add_option("--threads", ab.threads, "Worker threads (0 = hardware)");
  ablate->add_option("--out", ab.out, "Also write the table here");

  std::string defaults_config, defaults_scenario;
  bool defaults_designed = false;
  auto* defaults = app.add_subcommand("defaults", "Write default config documents");
  defaults->add_option("--config-out", defaults_config, "Tracker config destination");
  defaults->add_option("--scenario-out", defaults_scenario, "Scenario config destination");
  defaults->add_flag("--designed", defaults_designed, "Scenario from the built-in designed suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*track) return cmd_track(scene_path, config_path, out_path, sync_only, emit_async);
    if (*eval) return cmd_eval(tracks_path, gt_path, gate, n_thresholds, report_path);
    if (*simulate) return cmd_simulate(scenario_path, designed, seed, sigma, sim_out);
    if (*ablate) return cmd_ablate(ab);
    if (*defaults) return cmd_defaults(defaults_config, defaults_scenario, defaults_designed);
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}

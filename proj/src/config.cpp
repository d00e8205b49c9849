#include "asyncmot/config.hpp"

#include <cmath>
#include <sstream>

#include "asyncmot/errors.hpp"

namespace asyncmot {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError("invalid config: " + what);
}

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

const char* to_string(ScoreStrategy s) {
  switch (s) {
    case ScoreStrategy::noisy_or: return "noisy_or";
    case ScoreStrategy::average: return "average";
    case ScoreStrategy::ema: return "ema";
    case ScoreStrategy::max: return "max";
  }
  return "?";
}

const char* to_string(LifecycleMode m) {
  return m == LifecycleMode::score ? "score" : "count";
}

const char* to_string(AlignmentMetric m) {
  switch (m) {
    case AlignmentMetric::iou: return "iou";
    case AlignmentMetric::giou: return "giou";
    case AlignmentMetric::euclidean: return "euclidean";
  }
  return "?";
}

ScoreStrategy parse_score_strategy(const std::string& name) {
  if (name == "noisy_or") return ScoreStrategy::noisy_or;
  if (name == "average") return ScoreStrategy::average;
  if (name == "ema") return ScoreStrategy::ema;
  if (name == "max") return ScoreStrategy::max;
  throw ValidationError("unknown score strategy '" + name + "'");
}

LifecycleMode parse_lifecycle_mode(const std::string& name) {
  if (name == "score") return LifecycleMode::score;
  if (name == "count") return LifecycleMode::count;
  throw ValidationError("unknown lifecycle mode '" + name + "'");
}

AlignmentMetric parse_alignment_metric(const std::string& name) {
  if (name == "iou") return AlignmentMetric::iou;
  if (name == "giou") return AlignmentMetric::giou;
  if (name == "euclidean") return AlignmentMetric::euclidean;
  throw ValidationError("unknown alignment metric '" + name + "'");
}

void NoiseConfig::validate() const {
  for (double v : measurement_var) require(v > 0.0, "noise.measurement_var entries must be > 0");
  for (double v : initial_var) require(v > 0.0, "noise.initial_var entries must be > 0");
  require(gamma >= 1.0, "noise.gamma must be >= 1");
  require(accel_psd >= 0.0 && z_psd >= 0.0 && size_psd >= 0.0 && yaw_psd >= 0.0,
          "noise process densities must be >= 0");
}

void ScoreConfig::validate() const {
  require(decay_sync > 0.0 && decay_sync <= 1.0, "score.decay_sync must be in (0, 1]");
  require(decay_async > 0.0 && decay_async <= 1.0, "score.decay_async must be in (0, 1]");
  require(in_unit(alpha), "score.alpha must be in [0, 1]");
  require(beta > 0.0 && beta <= 1.0, "score.beta must be in (0, 1]");
  require(in_unit(delete_threshold), "score.delete_threshold must be in [0, 1]");
  require(in_unit(ema_weight), "score.ema_weight must be in [0, 1]");
  require(average_window >= 0, "score.average_window must be >= 0");
}

void ClassParams::validate() const {
  require(in_unit(score_filter), "score_filter must be in [0, 1]");
  require(in_unit(nms_iou), "nms_iou must be in [0, 1]");
  require(std::isfinite(gate_mix) && std::isfinite(gate_pure3d) && std::isfinite(gate_pure2d),
          "gates must be finite");
  require(dim_min >= 0.1 && dim_max > dim_min, "dim bounds must satisfy 0.1 <= dim_min < dim_max");
  noise.validate();
  score.validate();
}

void AlignConfig::validate() const {
  require(max_center_shift > 0.0, "alignment.max_center_shift must be > 0");
  require(max_yaw_shift > 0.0, "alignment.max_yaw_shift must be > 0");
  require(max_size_change > 0.0 && max_size_change < 1.0,
          "alignment.max_size_change must be in (0, 1)");
  require(max_iterations > 0, "alignment.max_iterations must be > 0");
  require(tolerance > 0.0, "alignment.tolerance must be > 0");
  require(fd_step_position > 0.0 && fd_step_yaw > 0.0, "alignment finite-difference steps must be > 0");
}

void MatchingConfig::validate() const {
  require(in_unit(mix_iou_gate), "matching.mix_iou_gate must be in [0, 1]");
}

void CalibrationCheckConfig::validate() const {
  require(in_unit(min_agreement), "calibration.min_agreement must be in [0, 1]");
  require(in_unit(min_score), "calibration.min_score must be in [0, 1]");
  require(std::isfinite(prior_count) && prior_count >= 0.0, "calibration.prior_count must be >= 0");
}

void LifecycleConfig::validate() const {
  require(max_misses >= 0, "lifecycle.max_misses must be >= 0");
}

const ClassParams& TrackerConfig::params(const std::string& label) const {
  const auto it = classes.find(label);
  return it == classes.end() ? defaults : it->second;
}

void TrackerConfig::validate() const {
  defaults.validate();
  for (const auto& [label, p] : classes) {
    try {
      p.validate();
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(e.what()) + " (class '" + label + "')");
    }
  }
  alignment.validate();
  matching.validate();
  lifecycle.validate();
  calibration.validate();
}

}  // namespace asyncmot

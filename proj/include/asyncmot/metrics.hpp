#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "asyncmot/scene.hpp"
#include "asyncmot/tracker.hpp"

namespace asyncmot {

struct MetricsConfig {
  /// BEV center-distance gate in meters.
  double dist_thresh = 2.0;
  /// Per-class gate overrides.
  std::map<std::string, double> class_dist_thresh;
  int n_thresholds = 40;

  double gate(const std::string& label) const;
  void validate() const;
};

struct MatchRecord {
  double timestamp = 0.0;
  std::uint64_t gt_id = 0;
  std::uint64_t track_id = 0;
  double distance = 0.0;
};

struct ClearMotResult {
  /// 1 - (FP + FN + IDS) / GT; without ground truth 1 when FP = 0, else 0.
  double mota = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t ids = 0;
  std::size_t gt_count = 0;
  std::vector<MatchRecord> matches;

  /// Mean matched distance; 0 without matches.
  double motp() const;
};

/// Evaluates sync ground-truth frames in order. A frame without a snapshot
/// counts as empty predictions; snapshots at other timestamps are ignored.
/// Predictions only match ground truth of the same label. A ground-truth
/// object keeps its previous track while that track stays within the gate;
/// the rest are matched by minimum total distance over pairs within the gate.
/// Tracks scoring below `min_score` are dropped first.
ClearMotResult clearmot(std::span<const TrackSnapshot> pred, const GroundTruth& gt,
                        double dist_thresh,
                        double min_score = -std::numeric_limits<double>::infinity());

struct RecallPoint {
  double target_recall = 0.0;
  bool achieved = false;
  /// Score cutoff used at this point (highest one reaching the target).
  double threshold = 0.0;
  double recall = 0.0;
  double motar = 0.0;
  double motp = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t ids = 0;

  bool operator==(const RecallPoint&) const = default;
};

struct AmotaResult {
  double amota = 0.0;
  double amotp = 0.0;
  std::vector<RecallPoint> table;
};

/// Recall-normalized MOTA averaged over targets k / n, k = 1..n. At each
/// target the highest score cutoff reaching it is used and
/// MOTAR = clamp(1 - (IDS + FP + FN - (1 - r) GT) / (r GT), 0, 1).
/// Unreached targets score 0 and count the gate as their MOTP.
AmotaResult amota(std::span<const TrackSnapshot> pred, const GroundTruth& gt, int n_thresholds,
                  double dist_thresh);

struct ClassReport {
  std::string label;
  double amota = 0.0;
  double amotp = 0.0;
  double mota = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t ids = 0;
  std::size_t gt_count = 0;
  std::vector<RecallPoint> table;

  bool operator==(const ClassReport&) const = default;
};

struct EvalReport {
  /// Class means over classes present in the ground truth.
  double amota = 0.0;
  double amotp = 0.0;
  /// Pooled over all classes.
  double mota = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t ids = 0;
  std::size_t gt_count = 0;
  std::vector<ClassReport> classes;

  bool operator==(const EvalReport&) const = default;
};

/// Per-class AMOTA/CLEAR-MOT plus pooled counts.
EvalReport evaluate(std::span<const TrackSnapshot> pred, const GroundTruth& gt,
                    const MetricsConfig& config = {});

/// Sums counts of several scene reports and averages their AMOTA/AMOTP.
EvalReport combine_reports(std::span<const EvalReport> reports);

/// Fixed-width table with one row per class and an overall row.
std::string format_report(const EvalReport& report);

}  // namespace asyncmot

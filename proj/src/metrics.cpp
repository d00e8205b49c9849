#include "asyncmot/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>

#include "asyncmot/assignment.hpp"
#include "asyncmot/errors.hpp"

namespace asyncmot {

namespace {

double center_distance(const Box3D& a, const Box3D& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double mota_of(std::size_t fp, std::size_t fn, std::size_t ids, std::size_t gt_count) {
  if (gt_count == 0) return fp == 0 ? 1.0 : 0.0;
  return 1.0 - static_cast<double>(fp + fn + ids) / static_cast<double>(gt_count);
}

std::map<double, const TrackSnapshot*> index_by_time(std::span<const TrackSnapshot> pred) {
  std::map<double, const TrackSnapshot*> out;
  for (const auto& s : pred) out[s.timestamp] = &s;
  return out;
}

std::vector<TrackSnapshot> filter_label(std::span<const TrackSnapshot> pred, const std::string& label) {
  std::vector<TrackSnapshot> out;
  out.reserve(pred.size());
  for (const auto& s : pred) {
    TrackSnapshot f{s.timestamp, s.kind, {}};
    for (const auto& t : s.tracks) {
      if (t.label == label) f.tracks.push_back(t);
    }
    out.push_back(std::move(f));
  }
  return out;
}

GroundTruth filter_label(const GroundTruth& gt, const std::string& label) {
  GroundTruth out;
  for (const auto& f : gt.frames) {
    GtFrame g{f.timestamp, f.kind, {}};
    for (const auto& o : f.objects) {
      if (o.label == label) g.objects.push_back(o);
    }
    out.frames.push_back(std::move(g));
  }
  return out;
}

}  // namespace

double MetricsConfig::gate(const std::string& label) const {
  const auto it = class_dist_thresh.find(label);
  return it == class_dist_thresh.end() ? dist_thresh : it->second;
}

void MetricsConfig::validate() const {
  if (!(dist_thresh > 0.0) || !std::isfinite(dist_thresh)) {
    throw ValidationError("metrics.dist_thresh must be a positive finite number");
  }
  for (const auto& [label, g] : class_dist_thresh) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw ValidationError("metrics.class_dist_thresh." + label + " must be positive and finite");
    }
  }
  if (n_thresholds < 1) throw ValidationError("metrics.n_thresholds must be >= 1");
}

double ClearMotResult::motp() const {
  if (matches.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& m : matches) sum += m.distance;
  return sum / static_cast<double>(matches.size());
}

ClearMotResult clearmot(std::span<const TrackSnapshot> pred, const GroundTruth& gt,
                        double dist_thresh, double min_score) {
  const auto by_time = index_by_time(pred);
  ClearMotResult res;
  std::unordered_map<std::uint64_t, std::uint64_t> last_track;

  for (const auto& frame : gt.frames) {
    if (frame.kind != FrameKind::sync) continue;
    std::vector<const TrackState*> tracks;
    if (const auto it = by_time.find(frame.timestamp); it != by_time.end()) {
      for (const auto& t : it->second->tracks) {
        if (t.score >= min_score) tracks.push_back(&t);
      }
    }
    const auto& objects = frame.objects;
    std::vector<std::ptrdiff_t> gt_match(objects.size(), -1);
    std::vector<bool> track_used(tracks.size(), false);

    for (std::size_t g = 0; g < objects.size(); ++g) {
      const auto prev = last_track.find(objects[g].id);
      if (prev == last_track.end()) continue;
      for (std::size_t k = 0; k < tracks.size(); ++k) {
        if (track_used[k] || tracks[k]->id != prev->second) continue;
        if (tracks[k]->label == objects[g].label &&
            center_distance(tracks[k]->box, objects[g].box) <= dist_thresh) {
          gt_match[g] = static_cast<std::ptrdiff_t>(k);
          track_used[k] = true;
        }
        break;
      }
    }

    std::vector<std::size_t> free_gt;
    std::vector<std::size_t> free_tracks;
    for (std::size_t g = 0; g < objects.size(); ++g) {
      if (gt_match[g] < 0) free_gt.push_back(g);
    }
    for (std::size_t k = 0; k < tracks.size(); ++k) {
      if (!track_used[k]) free_tracks.push_back(k);
    }
    if (!free_gt.empty() && !free_tracks.empty()) {
      CostMatrix cm(free_gt.size(), free_tracks.size());
      for (std::size_t i = 0; i < free_gt.size(); ++i) {
        for (std::size_t j = 0; j < free_tracks.size(); ++j) {
          const GtObject& o = objects[free_gt[i]];
          const TrackState& t = *tracks[free_tracks[j]];
          const double d = center_distance(o.box, t.box);
          if (o.label != t.label || d > dist_thresh) {
            cm.invalidate(i, j);
          } else {
            cm.set(i, j, d);
          }
        }
      }
      for (const auto& [i, j] : solve_assignment(cm, dist_thresh).pairs) {
        gt_match[free_gt[i]] = static_cast<std::ptrdiff_t>(free_tracks[j]);
      }
    }

    std::size_t matched = 0;
    for (std::size_t g = 0; g < objects.size(); ++g) {
      if (gt_match[g] < 0) continue;
      const TrackState& t = *tracks[static_cast<std::size_t>(gt_match[g])];
      const auto prev = last_track.find(objects[g].id);
      if (prev != last_track.end() && prev->second != t.id) ++res.ids;
      last_track[objects[g].id] = t.id;
      res.matches.push_back(
          MatchRecord{frame.timestamp, objects[g].id, t.id, center_distance(t.box, objects[g].box)});
      ++matched;
    }
    res.tp += matched;
    res.fp += tracks.size() - matched;
    res.fn += objects.size() - matched;
    res.gt_count += objects.size();
  }
  res.mota = mota_of(res.fp, res.fn, res.ids, res.gt_count);
  return res;
}

AmotaResult amota(std::span<const TrackSnapshot> pred, const GroundTruth& gt, int n_thresholds,
                  double dist_thresh) {
  if (n_thresholds < 1) throw ValidationError("amota: n_thresholds must be >= 1");
  std::set<double, std::greater<>> scores;
  std::size_t gt_count = 0;
  for (const auto& f : gt.frames) {
    if (f.kind == FrameKind::sync) gt_count += f.objects.size();
  }
  {
    const auto by_time = index_by_time(pred);
    for (const auto& f : gt.frames) {
      if (f.kind != FrameKind::sync) continue;
      if (const auto it = by_time.find(f.timestamp); it != by_time.end()) {
        for (const auto& t : it->second->tracks) scores.insert(t.score);
      }
    }
  }

  // Evaluate every cutoff once, from strictest to loosest.
  std::vector<std::pair<double, ClearMotResult>> sweep;
  if (gt_count > 0) {
    for (double s : scores) sweep.emplace_back(s, clearmot(pred, gt, dist_thresh, s));
  }

  AmotaResult out;
  const auto n = static_cast<std::size_t>(n_thresholds);
  const double gt_d = static_cast<double>(gt_count);
  double motar_sum = 0.0;
  double motp_sum = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    RecallPoint p;
    p.target_recall = static_cast<double>(k) / static_cast<double>(n);
    p.motp = dist_thresh;
    for (const auto& [threshold, r] : sweep) {
      // tp / gt >= k / n, in exact integer arithmetic.
      if (r.tp * n < k * gt_count) continue;
      const double rt = p.target_recall;
      p.achieved = true;
      p.threshold = threshold;
      p.recall = static_cast<double>(r.tp) / gt_d;
      p.tp = r.tp;
      p.fp = r.fp;
      p.fn = r.fn;
      p.ids = r.ids;
      const double penalty =
          static_cast<double>(r.ids + r.fp + r.fn) - (1.0 - rt) * gt_d;
      p.motar = std::clamp(1.0 - penalty / (rt * gt_d), 0.0, 1.0);
      p.motp = r.motp();
      break;
    }
    motar_sum += p.motar;
    motp_sum += p.motp;
    out.table.push_back(p);
  }
  out.amota = motar_sum / static_cast<double>(n);
  out.amotp = motp_sum / static_cast<double>(n);
  return out;
}

EvalReport evaluate(std::span<const TrackSnapshot> pred, const GroundTruth& gt,
                    const MetricsConfig& config) {
  config.validate();
  std::set<std::string> labels;
  for (const auto& f : gt.frames) {
    if (f.kind != FrameKind::sync) continue;
    for (const auto& o : f.objects) labels.insert(o.label);
  }
  for (const auto& s : pred) {
    for (const auto& t : s.tracks) labels.insert(t.label);
  }

  EvalReport report;
  std::size_t scored_classes = 0;
  for (const auto& label : labels) {
    const auto p = filter_label(pred, label);
    const auto g = filter_label(gt, label);
    const double gate = config.gate(label);
    const ClearMotResult cm = clearmot(p, g, gate);
    ClassReport c;
    c.label = label;
    c.mota = cm.mota;
    c.tp = cm.tp;
    c.fp = cm.fp;
    c.fn = cm.fn;
    c.ids = cm.ids;
    c.gt_count = cm.gt_count;
    if (cm.gt_count > 0) {
      const AmotaResult am = amota(p, g, config.n_thresholds, gate);
      c.amota = am.amota;
      c.amotp = am.amotp;
      c.table = am.table;
      report.amota += c.amota;
      report.amotp += c.amotp;
      ++scored_classes;
    }
    report.tp += c.tp;
    report.fp += c.fp;
    report.fn += c.fn;
    report.ids += c.ids;
    report.gt_count += c.gt_count;
    report.classes.push_back(std::move(c));
  }
  if (scored_classes > 0) {
    report.amota /= static_cast<double>(scored_classes);
    report.amotp /= static_cast<double>(scored_classes);
  }
  report.mota = mota_of(report.fp, report.fn, report.ids, report.gt_count);
  return report;
}

EvalReport combine_reports(std::span<const EvalReport> reports) {
  EvalReport out;
  if (reports.empty()) return out;
  struct Acc {
    ClassReport sum;
    std::size_t scored = 0;
  };
  std::map<std::string, Acc> by_class;
  for (const auto& r : reports) {
    out.amota += r.amota;
    out.amotp += r.amotp;
    out.tp += r.tp;
    out.fp += r.fp;
    out.fn += r.fn;
    out.ids += r.ids;
    out.gt_count += r.gt_count;
    for (const auto& c : r.classes) {
      Acc& a = by_class[c.label];
      a.sum.label = c.label;
      a.sum.tp += c.tp;
      a.sum.fp += c.fp;
      a.sum.fn += c.fn;
      a.sum.ids += c.ids;
      a.sum.gt_count += c.gt_count;
      if (c.gt_count > 0) {
        a.sum.amota += c.amota;
        a.sum.amotp += c.amotp;
        ++a.scored;
      }
    }
  }
  out.amota /= static_cast<double>(reports.size());
  out.amotp /= static_cast<double>(reports.size());
  out.mota = mota_of(out.fp, out.fn, out.ids, out.gt_count);
  for (auto& [label, a] : by_class) {
    if (a.scored > 0) {
      a.sum.amota /= static_cast<double>(a.scored);
      a.sum.amotp /= static_cast<double>(a.scored);
    }
    a.sum.mota = mota_of(a.sum.fp, a.sum.fn, a.sum.ids, a.sum.gt_count);
    out.classes.push_back(std::move(a.sum));
  }
  return out;
}

std::string format_report(const EvalReport& report) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-12s %8s %8s %8s %6s %6s %6s %6s %6s\n", "class", "AMOTA",
                "AMOTP", "MOTA", "IDS", "FP", "FN", "TP", "GT");
  os << line;
  auto row = [&](const std::string& name, double amota_v, double amotp_v, double mota_v,
                 std::size_t ids, std::size_t fp, std::size_t fn, std::size_t tp, std::size_t gt) {
    std::snprintf(line, sizeof line, "%-12s %8.4f %8.4f %8.4f %6zu %6zu %6zu %6zu %6zu\n",
                  name.c_str(), amota_v, amotp_v, mota_v, ids, fp, fn, tp, gt);
    os << line;
  };
  for (const auto& c : report.classes) {
    row(c.label, c.amota, c.amotp, c.mota, c.ids, c.fp, c.fn, c.tp, c.gt_count);
  }
  row("overall", report.amota, report.amotp, report.mota, report.ids, report.fp, report.fn,
      report.tp, report.gt_count);
  return os.str();
}

}  // namespace asyncmot

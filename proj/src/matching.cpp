#include "asyncmot/matching.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>

#include "asyncmot/assignment.hpp"

namespace asyncmot {

namespace {

struct StageResult {
  AssociationResult::Pairs pairs;  // (track index, detection index)
  std::vector<std::size_t> unmatched_tracks;
  std::vector<std::size_t> unmatched_dets;
};

using Similarity = std::function<double(std::size_t track, std::size_t det)>;
using LabelOf = std::function<const std::string&(std::size_t det)>;
using GateOf = std::function<double(const std::string& label)>;

// One association stage: per-class Hungarian on cost = 1 - similarity.
StageResult run_stage(std::span<const Track> tracks, const std::vector<std::size_t>& track_ids,
                      std::size_t det_count, const LabelOf& label_of, const Similarity& similarity,
                      const GateOf& gate_of) {
  std::map<std::string, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> groups;
  for (std::size_t t : track_ids) groups[tracks[t].label].first.push_back(t);
  for (std::size_t d = 0; d < det_count; ++d) groups[label_of(d)].second.push_back(d);

  StageResult out;
  std::set<std::size_t> matched_tracks;
  std::vector<char> matched_dets(det_count, 0);
  for (const auto& [label, members] : groups) {
    const auto& [rows, cols] = members;
    if (rows.empty() || cols.empty()) continue;
    CostMatrix costs(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < cols.size(); ++c) {
        costs.set(r, c, 1.0 - similarity(rows[r], cols[c]));
      }
    }
    const auto assigned = solve_assignment(costs, gate_of(label));
    for (const auto& [r, c] : assigned.pairs) {
      out.pairs.emplace_back(rows[r], cols[c]);
      matched_tracks.insert(rows[r]);
      matched_dets[cols[c]] = 1;
    }
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  for (std::size_t t : track_ids) {
    if (!matched_tracks.contains(t)) out.unmatched_tracks.push_back(t);
  }
  for (std::size_t d = 0; d < det_count; ++d) {
    if (!matched_dets[d]) out.unmatched_dets.push_back(d);
  }
  return out;
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

double projected_iou(const Track& track, const Detection2D& det, std::span<const CameraModel> cams) {
  const CameraModel* cam = find_camera(cams, det.camera_id);
  if (cam == nullptr) return 0.0;
  const auto proj = project_box(track.box(), *cam);
  return proj ? iou_2d(*proj, det.box) : 0.0;
}

StageResult image_stage(std::span<const Track> tracks, const std::vector<std::size_t>& track_ids,
                        std::span<const Detection2D> dets, std::span<const CameraModel> cams,
                        const TrackerConfig& cfg) {
  return run_stage(
      tracks, track_ids, dets.size(),
      [&](std::size_t d) -> const std::string& { return dets[d].label; },
      [&](std::size_t t, std::size_t d) { return projected_iou(tracks[t], dets[d], cams); },
      [&](const std::string& label) { return cfg.params(label).gate_pure2d; });
}

}  // namespace

AssociationResult associate_sync(std::span<const Track> tracks, const PreprocessOutput& dets,
                                 std::span<const CameraModel> cams, const TrackerConfig& cfg) {
  AssociationResult out;
  const MatchingConfig& mc = cfg.matching;
  std::vector<std::size_t> remaining = all_indices(tracks.size());

  if (!mc.cascade) {
    // Single stage over every 3D detection: mix members first, then pure 3D.
    const std::size_t n_mix = dets.mix.size();
    auto box_of = [&](std::size_t d) -> const Detection3D& {
      return d < n_mix ? dets.mix[d].det3d : dets.pure3d[d - n_mix];
    };
    const auto stage = run_stage(
        tracks, remaining, n_mix + dets.pure3d.size(),
        [&](std::size_t d) -> const std::string& { return box_of(d).label; },
        [&](std::size_t t, std::size_t d) { return bev_giou_3d(tracks[t].box(), box_of(d).box); },
        [&](const std::string& label) { return cfg.params(label).gate_mix; });
    for (const auto& [t, d] : stage.pairs) {
      if (d < n_mix) {
        out.mix_pairs.emplace_back(t, d);
      } else {
        out.pure3d_pairs.emplace_back(t, d - n_mix);
      }
    }
    for (std::size_t d : stage.unmatched_dets) {
      if (d < n_mix) {
        out.unmatched_mix.push_back(d);
      } else {
        out.unmatched_pure3d.push_back(d - n_mix);
      }
    }
    out.unmatched_pure2d = all_indices(dets.pure2d.size());
    out.unmatched_tracks = stage.unmatched_tracks;
    return out;
  }

  if (mc.mix_phase) {
    const auto stage = run_stage(
        tracks, remaining, dets.mix.size(),
        [&](std::size_t d) -> const std::string& { return dets.mix[d].det3d.label; },
        [&](std::size_t t, std::size_t d) {
          return bev_giou_3d(tracks[t].box(), dets.mix[d].det3d.box);
        },
        [&](const std::string& label) { return cfg.params(label).gate_mix; });
    out.mix_pairs = stage.pairs;
    out.unmatched_mix = stage.unmatched_dets;
    remaining = stage.unmatched_tracks;
  } else {
    out.unmatched_mix = all_indices(dets.mix.size());
  }

  if (mc.pure3d_phase) {
    const auto stage = run_stage(
        tracks, remaining, dets.pure3d.size(),
        [&](std::size_t d) -> const std::string& { return dets.pure3d[d].label; },
        [&](std::size_t t, std::size_t d) { return bev_giou_3d(tracks[t].box(), dets.pure3d[d].box); },
        [&](const std::string& label) { return cfg.params(label).gate_pure3d; });
    out.pure3d_pairs = stage.pairs;
    out.unmatched_pure3d = stage.unmatched_dets;
    remaining = stage.unmatched_tracks;
  } else {
    out.unmatched_pure3d = all_indices(dets.pure3d.size());
  }

  if (mc.pure2d_phase) {
    const auto stage = image_stage(tracks, remaining, dets.pure2d, cams, cfg);
    out.pure2d_pairs = stage.pairs;
    out.unmatched_pure2d = stage.unmatched_dets;
    remaining = stage.unmatched_tracks;
  } else {
    out.unmatched_pure2d = all_indices(dets.pure2d.size());
  }

  out.unmatched_tracks = std::move(remaining);
  return out;
}

AssociationResult associate_async(std::span<const Track> tracks,
                                  std::span<const Detection2D> dets2d,
                                  std::span<const CameraModel> cams, const TrackerConfig& cfg) {
  AssociationResult out;
  const auto stage = image_stage(tracks, all_indices(tracks.size()), dets2d, cams, cfg);
  out.async_pairs = stage.pairs;
  out.unmatched_single2d = stage.unmatched_dets;
  out.unmatched_tracks = stage.unmatched_tracks;
  return out;
}

}  // namespace asyncmot

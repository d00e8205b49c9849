#include "asyncmot/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>
#include <optional>
#include <tuple>

#include "asyncmot/assignment.hpp"
#include "asyncmot/least_squares.hpp"

namespace asyncmot {

std::vector<Detection3D> score_filter(std::span<const Detection3D> dets,
                                      const ClassThresholds& thresholds) {
  std::vector<Detection3D> out;
  for (const auto& d : dets) {
    if (d.score >= thresholds.at(d.label)) out.push_back(d);
  }
  return out;
}

std::vector<Detection3D> nms_3d(std::span<const Detection3D> dets, double iou_thresh) {
  return nms_3d(dets, ClassThresholds{iou_thresh, {}});
}

std::vector<Detection3D> nms_3d(std::span<const Detection3D> dets,
                                const ClassThresholds& iou_thresh) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });
  std::vector<char> keep(dets.size(), 0);
  std::vector<char> suppressed(dets.size(), 0);
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const std::size_t i = order[oi];
    if (suppressed[i]) continue;
    keep[i] = 1;
    const double thresh = iou_thresh.at(dets[i].label);
    for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
      const std::size_t j = order[oj];
      if (suppressed[j] || dets[j].label != dets[i].label) continue;
      if (bev_iou(dets[i].box, dets[j].box) >= thresh) suppressed[j] = 1;
    }
  }
  std::vector<Detection3D> out;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (keep[i]) out.push_back(dets[i]);
  }
  return out;
}

MatchOutput match_3d_2d(std::span<const Detection3D> d3, std::span<const Detection2D> d2,
                        std::span<const CameraModel> cams, double iou_gate) {
  std::vector<std::optional<CameraProjection>> proj(d3.size());
  for (std::size_t i = 0; i < d3.size(); ++i) proj[i] = best_camera_match(d3[i].box, cams);

  std::vector<int> match_of_3d(d3.size(), -1);
  std::vector<double> iou_of_3d(d3.size(), 0.0);
  std::vector<char> used_2d(d2.size(), 0);

  // Groups keyed by (camera, class), visited in sorted order for determinism.
  std::map<std::pair<int, std::string>, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>>
      groups;
  for (std::size_t i = 0; i < d3.size(); ++i) {
    if (proj[i]) groups[{proj[i]->camera_id, d3[i].label}].first.push_back(i);
  }
  for (std::size_t j = 0; j < d2.size(); ++j) {
    groups[{d2[j].camera_id, d2[j].label}].second.push_back(j);
  }

  for (const auto& [key, members] : groups) {
    const auto& [rows, cols] = members;
    if (rows.empty() || cols.empty()) continue;
    CostMatrix costs(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < cols.size(); ++c) {
        const double iou = iou_2d(proj[rows[r]]->box, d2[cols[c]].box);
        if (iou > iou_gate) {
          costs.set(r, c, 1.0 - iou);
        } else {
          costs.invalidate(r, c);
        }
      }
    }
    const auto assigned = solve_assignment(costs, 1.0 - iou_gate);
    for (const auto& [r, c] : assigned.pairs) {
      match_of_3d[rows[r]] = static_cast<int>(cols[c]);
      iou_of_3d[rows[r]] = 1.0 - costs.cost(r, c);
      used_2d[cols[c]] = 1;
    }
  }

  MatchOutput out;
  for (std::size_t i = 0; i < d3.size(); ++i) {
    if (match_of_3d[i] < 0) {
      out.pure3d.push_back(d3[i]);
      continue;
    }
    const auto& det2d = d2[static_cast<std::size_t>(match_of_3d[i])];
    out.mix.push_back(MixDetection{d3[i], det2d, det2d.camera_id, iou_of_3d[i]});
  }
  for (std::size_t j = 0; j < d2.size(); ++j) {
    if (!used_2d[j]) out.pure2d.push_back(d2[j]);
  }
  return out;
}

double alignment_loss(const Box3D& box, const Box2D& target, const CameraModel& cam,
                      AlignmentMetric metric) {
  const auto proj = project_box(box, cam);
  switch (metric) {
    case AlignmentMetric::iou:
      return proj ? 1.0 - iou_2d(*proj, target) : 1.0;
    case AlignmentMetric::giou:
      return proj ? 1.0 - giou_2d(*proj, target) : 2.0;
    case AlignmentMetric::euclidean: {
      const double diag = std::hypot(target.width(), target.height());
      if (!proj || diag <= 0.0) return 1e3;
      const double d = std::sqrt(std::pow(proj->x1 - target.x1, 2) + std::pow(proj->y1 - target.y1, 2) +
                                 std::pow(proj->x2 - target.x2, 2) + std::pow(proj->y2 - target.y2, 2));
      return d / diag;
    }
  }
  return 1.0;
}

namespace {

Eigen::VectorXd to_state(const Box3D& b) {
  Eigen::VectorXd s(7);
  s << b.x, b.y, b.z, b.w, b.l, b.h, b.yaw;
  return s;
}

Box3D from_state(const Eigen::VectorXd& s) {
  return Box3D{s(0), s(1), s(2), s(3), s(4), s(5), s(6)};
}

}  // namespace

AlignResult align_to_camera(const MixDetection& mix, const CameraModel& cam, const AlignConfig& cfg,
                       double dim_min, double dim_max) {
  AlignResult out;
  out.det = mix.det3d;
  const Box2D& target = mix.det2d.box;
  const Box3D& init = mix.det3d.box;
  out.initial_loss = alignment_loss(init, target, cam, cfg.metric);
  out.final_loss = out.initial_loss;
  if (out.initial_loss <= 0.0) return out;

  const auto proj = project_box(init, cam);
  if (!proj) return out;
  if (cfg.metric == AlignmentMetric::iou && iou_2d(*proj, target) <= 0.0) return out;

  const Eigen::VectorXd x0 = to_state(init);
  Eigen::VectorXd lower(7), upper(7);
  for (int i = 0; i < 3; ++i) {
    lower(i) = x0(i) - cfg.max_center_shift;
    upper(i) = x0(i) + cfg.max_center_shift;
  }
  for (int i = 3; i < 6; ++i) {
    lower(i) = std::min(std::max(dim_min, x0(i) * (1.0 - cfg.max_size_change)), x0(i));
    upper(i) = std::max(std::min(dim_max, x0(i) * (1.0 + cfg.max_size_change)), x0(i));
  }
  lower(6) = x0(6) - cfg.max_yaw_shift;
  upper(6) = x0(6) + cfg.max_yaw_shift;

  TrustRegionOptions opts;
  opts.max_iterations = cfg.max_iterations;
  opts.residual_tolerance = cfg.tolerance;
  opts.initial_radius = 1.0;
  opts.fd_steps = Eigen::VectorXd::Constant(7, cfg.fd_step_position);
  opts.fd_steps(6) = cfg.fd_step_yaw;

  const ResidualFn residual = [&](const Eigen::VectorXd& s) {
    Eigen::VectorXd r(1);
    r(0) = alignment_loss(from_state(s), target, cam, cfg.metric);
    return r;
  };
  const auto solved = solve_bounded_least_squares(residual, x0, lower, upper, opts);
  out.iterations = solved.iterations;

  Box3D refined = from_state(solved.x);
  refined.yaw = normalize_angle(refined.yaw);
  const double loss = alignment_loss(refined, target, cam, cfg.metric);
  if (loss < out.initial_loss) {
    out.det.box = refined;
    out.final_loss = loss;
    out.improved = true;
  }
  return out;
}

std::map<int, CameraSupport> measure_camera_support(const Frame& frame, double mix_iou_gate,
                                                    double min_score) {
  std::map<int, CameraSupport> out;
  if (frame.kind == FrameKind::async) return out;
  const auto matched = match_3d_2d(frame.dets3d, frame.dets2d, frame.cameras, mix_iou_gate);
  for (const auto& mix : matched.mix) {
    if (mix.det3d.score < min_score) continue;
    auto& s = out[mix.camera_id];
    ++s.viewed;
    ++s.paired;
  }
  for (const auto& d : matched.pure3d) {
    if (d.score < min_score) continue;
    if (const auto proj = best_camera_match(d.box, frame.cameras)) ++out[proj->camera_id].viewed;
  }
  return out;
}

PreprocessOutput preprocess_frame(const Frame& frame, const TrackerConfig& cfg,
                                  const std::set<int>& distrusted) {
  PreprocessOutput out;
  out.kind = frame.kind;
  auto trusted = [&](const Detection2D& d) { return !distrusted.contains(d.camera_id); };
  if (frame.kind == FrameKind::async) {
    std::copy_if(frame.dets2d.begin(), frame.dets2d.end(), std::back_inserter(out.single2d), trusted);
    return out;
  }

  std::vector<Detection2D> kept;
  std::copy_if(frame.dets2d.begin(), frame.dets2d.end(), std::back_inserter(kept), trusted);
  auto matched = match_3d_2d(frame.dets3d, kept, frame.cameras, cfg.matching.mix_iou_gate);
  if (cfg.alignment.enabled) {
    for (auto& mix : matched.mix) {
      const CameraModel* cam = find_camera(frame.cameras, mix.camera_id);
      if (cam == nullptr) continue;
      const ClassParams& p = cfg.params(mix.det3d.label);
      mix.det3d = align_to_camera(mix, *cam, cfg.alignment, p.dim_min, p.dim_max).det;
    }
  }

  ClassThresholds sf{cfg.defaults.score_filter, {}};
  ClassThresholds nms{cfg.defaults.nms_iou, {}};
  for (const auto& [label, p] : cfg.classes) {
    sf.per_class[label] = p.score_filter;
    nms.per_class[label] = p.nms_iou;
  }
  const auto filtered = score_filter(matched.pure3d, sf);
  out.pure3d = nms_3d(filtered, nms);
  out.mix = std::move(matched.mix);
  out.pure2d = std::move(matched.pure2d);
  return out;
}

}  // namespace asyncmot

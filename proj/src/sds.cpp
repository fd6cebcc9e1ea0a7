#include "sparsemob/sds.hpp"

#include <algorithm>

namespace sparsemob {

std::vector<bool> detect_stays_at(TrackView segment, double threshold, Seconds delta_t,
                                  bool tail_flush, const WindowObserver* observer) {
  const std::size_t n = segment.size();
  std::vector<bool> stay(n, false);
  if (n == 0) return stay;

  const auto& t = segment.times;
  const auto& p = segment.points;
  // Everything before flagged_end is already marked; windows only move right.
  std::size_t flagged_end = 0;
  auto flag = [&](std::size_t first, std::size_t last) {
    for (std::size_t k = std::max(first, flagged_end); k <= last; ++k) stay[k] = true;
    flagged_end = std::max(flagged_end, last + 1);
  };

  std::size_t head = 0;
  for (std::size_t cursor = 1; cursor < n; ++cursor) {
    for (std::size_t anchor = cursor; anchor-- > head;) {
      if (distance(p[cursor], p[anchor]) >= threshold) {
        if (t[cursor - 1] - t[head] >= delta_t) flag(head, cursor - 1);
        head = anchor + 1;
        break;
      }
    }
    if (observer != nullptr) (*observer)(head, cursor);
  }
  if (tail_flush && t[n - 1] - t[head] >= delta_t) flag(head, n - 1);
  return stay;
}

std::vector<bool> detect_stays(TrackView segment, const MobilityParams& params,
                               const SdsOptions& options) {
  return detect_stays_at(segment, params.delta_s / 3.0, params.delta_t, options.tail_flush);
}

std::vector<bool> detect_travels_at(TrackView segment, const std::vector<bool>& stay_flags,
                                    double threshold, Seconds delta_t) {
  const std::size_t n = segment.size();
  std::vector<bool> travel(n, false);
  const auto& t = segment.times;
  const auto& p = segment.points;

  for (std::size_t cursor = 1; cursor + 1 < n; ++cursor) {
    if (stay_flags[cursor]) continue;
    // A witness farther than delta_t from the cursor can never close a
    // window of length <= delta_t, so both scans stop there.
    std::optional<std::size_t> left;
    for (std::size_t l = cursor; l-- > 0;) {
      if (t[cursor] - t[l] > delta_t) break;
      if (distance(p[cursor], p[l]) >= threshold) {
        left = l;
        break;
      }
    }
    if (!left) continue;
    std::optional<std::size_t> right;
    for (std::size_t r = cursor + 1; r < n; ++r) {
      if (t[r] - t[*left] > delta_t) break;
      if (distance(p[cursor], p[r]) >= threshold) {
        right = r;
        break;
      }
    }
    if (right && t[*right] - t[*left] <= delta_t) travel[cursor] = true;
  }
  return travel;
}

std::vector<bool> detect_travels(TrackView segment, const std::vector<bool>& stay_flags,
                                 const MobilityParams& params) {
  return detect_travels_at(segment, stay_flags, params.delta_s, params.delta_t);
}

std::vector<MobilityLabel> sds_label(TrackView track, const MobilityParams& params,
                                     const SdsOptions& options) {
  std::vector<MobilityLabel> labels(track.size(), MobilityLabel::Unlabeled);
  for (const auto& span : divide_times(track.times, params.delta_t)) {
    const TrackView segment = track.subview(span.first, span.count);
    const auto stay = detect_stays(segment, params, options);
    const auto travel = detect_travels(segment, stay, params);
    for (std::size_t k = 0; k < span.count; ++k) {
      if (stay[k]) {
        labels[span.first + k] = MobilityLabel::Stay;
      } else if (travel[k]) {
        labels[span.first + k] = MobilityLabel::Travel;
      }
    }
  }
  return labels;
}

LabeledTrajectory sds_label(const Trajectory& traj, const MobilityParams& params,
                            const SdsOptions& options) {
  params.validate();
  const Projection projection(options.ref_lat.value_or(default_ref_lat(traj)));
  const ProjectedTrack track(traj, projection);
  return {traj, sds_label(track.view(), params, options)};
}

namespace {

double ratio_or_one(std::size_t num, std::size_t den) {
  return den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

RecallBounds recall_lower_bounds(const Trajectory& traj, const MobilityParams& params,
                                 const SdsOptions& options) {
  params.validate();
  const Projection projection(options.ref_lat.value_or(default_ref_lat(traj)));
  const ProjectedTrack track(traj, projection);
  const TrackView view = track.view();

  std::size_t stay_nominal = 0, stay_both = 0;
  std::size_t travel_relaxed = 0, travel_both = 0;
  for (const auto& span : divide_times(view.times, params.delta_t)) {
    const TrackView seg = view.subview(span.first, span.count);
    const auto strict = detect_stays_at(seg, params.delta_s / 3.0, params.delta_t, options.tail_flush);
    const auto nominal = detect_stays_at(seg, params.delta_s, params.delta_t, options.tail_flush);
    const auto travel = detect_travels_at(seg, strict, params.delta_s, params.delta_t);
    const auto relaxed = detect_travels_at(seg, strict, params.delta_s / 2.0, params.delta_t);
    for (std::size_t k = 0; k < span.count; ++k) {
      stay_nominal += nominal[k];
      // Numerators are intersections so the ratio stays in [0, 1] even in
      // strict-pseudocode mode, where tail windows can go missing unevenly.
      stay_both += strict[k] && nominal[k];
      travel_relaxed += relaxed[k];
      travel_both += travel[k] && relaxed[k];
    }
  }
  return {ratio_or_one(stay_both, stay_nominal), ratio_or_one(travel_both, travel_relaxed)};
}

}  // namespace sparsemob

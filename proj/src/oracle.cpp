#include "sparsemob/oracle.hpp"

#include <string>

#include "sparsemob/errors.hpp"

namespace sparsemob {

namespace {

void check_size(std::size_t n, std::size_t limit) {
  if (n > limit) {
    throw OracleSizeError("exact oracle limited to " + std::to_string(limit) +
                          " records, trajectory has " + std::to_string(n));
  }
}

// Marks every record covered by a maximal window [p, reach(p)] that spans at
// least delta_t. reach(p) is nondecreasing in p, so the right end only moves
// forward and each new record is checked once against the current window.
std::vector<bool> stay_windows(TrackView track, const MobilityParams& params, bool dense) {
  const std::size_t n = track.size();
  std::vector<bool> member(n, false);
  if (n == 0) return member;
  const auto& t = track.times;
  const auto& pts = track.points;

  auto fits = [&](std::size_t p, std::size_t q) {
    if (dense && t[q] - t[q - 1] > params.delta_t) return false;
    for (std::size_t k = p; k < q; ++k) {
      if (distance(pts[k], pts[q]) >= params.delta_s) return false;
    }
    return true;
  };

  std::size_t reach = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (reach < p) reach = p;
    while (reach + 1 < n && fits(p, reach + 1)) ++reach;
    if (t[reach] - t[p] >= params.delta_t) {
      for (std::size_t k = p; k <= reach; ++k) member[k] = true;
    }
  }
  return member;
}

ProjectedTrack project(const Trajectory& traj, std::optional<double> ref_lat) {
  return ProjectedTrack(traj, Projection(ref_lat.value_or(default_ref_lat(traj))));
}

}  // namespace

OracleLabels exact_label(TrackView track, const MobilityParams& params, std::size_t max_records) {
  params.validate();
  check_size(track.size(), max_records);
  const auto stay = stay_windows(track, params, /*dense=*/false);
  OracleLabels labels(track.size(), MobilityLabel::Travel);
  for (std::size_t i = 0; i < stay.size(); ++i) {
    if (stay[i]) labels[i] = MobilityLabel::Stay;
  }
  return labels;
}

OracleLabels exact_label(const Trajectory& traj, const MobilityParams& params,
                         const OracleOptions& options) {
  check_size(traj.size(), options.max_records);
  const auto track = project(traj, options.ref_lat);
  return exact_label(track.view(), params, options.max_records);
}

std::vector<bool> dense_stay_membership(TrackView track, const MobilityParams& params,
                                        std::size_t max_records) {
  params.validate();
  check_size(track.size(), max_records);
  return stay_windows(track, params, /*dense=*/true);
}

std::vector<bool> dense_stay_membership(const Trajectory& traj, const MobilityParams& params,
                                        const OracleOptions& options) {
  check_size(traj.size(), options.max_records);
  const auto track = project(traj, options.ref_lat);
  return dense_stay_membership(track.view(), params, options.max_records);
}

bool travel_condition(TrackView track, std::size_t i, double spatial, Seconds delta_t) {
  const std::size_t n = track.size();
  if (i >= n) {
    throw ParameterError("record index " + std::to_string(i) + " out of range for trajectory of " +
                         std::to_string(n) + " records");
  }
  const auto& t = track.times;
  const auto& pts = track.points;
  // Only p with t_i - t_p <= delta_t can pair with some q > i.
  for (std::size_t p = i; p-- > 0;) {
    if (t[i] - t[p] > delta_t) break;
    if (distance(pts[i], pts[p]) < spatial) continue;
    for (std::size_t q = i + 1; q < n && t[q] - t[p] <= delta_t; ++q) {
      if (distance(pts[i], pts[q]) >= spatial) return true;
    }
  }
  return false;
}

bool travel_condition(const Trajectory& traj, std::size_t i, double spatial, Seconds delta_t,
                      std::optional<double> ref_lat) {
  const auto track = project(traj, ref_lat);
  return travel_condition(track.view(), i, spatial, delta_t);
}

}  // namespace sparsemob

#include "sparsemob/trajectory.hpp"

#include <string>

#include "sparsemob/errors.hpp"

namespace sparsemob {

Trajectory::Trajectory(std::string device, std::vector<TrajectoryRecord> records)
    : device_(std::move(device)), records_(std::move(records)) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (records_[i].time < 0) {
      throw DataError("device " + device_ + ": negative timestamp at record " + std::to_string(i));
    }
    if (!is_valid(records_[i].location)) {
      throw DataError("device " + device_ + ": invalid coordinates at record " + std::to_string(i));
    }
    if (i > 0 && records_[i].time <= records_[i - 1].time) {
      throw DataError("device " + device_ + ": timestamps not strictly increasing at record " +
                      std::to_string(i));
    }
  }
}

void MobilityParams::validate() const {
  if (!(delta_s > 0.0) || !std::isfinite(delta_s)) {
    throw ParameterError("delta_s must be a positive number of meters");
  }
  if (delta_t <= 0) {
    throw ParameterError("delta_t must be a positive number of seconds");
  }
}

char label_letter(MobilityLabel label) {
  switch (label) {
    case MobilityLabel::Stay:
      return 'S';
    case MobilityLabel::Travel:
      return 'T';
    case MobilityLabel::Unlabeled:
      return 'U';
  }
  return 'U';
}

MobilityLabel label_from_letter(char c) {
  switch (c) {
    case 'S':
    case 's':
      return MobilityLabel::Stay;
    case 'T':
    case 't':
    case 'V':
    case 'v':
      return MobilityLabel::Travel;
    case 'U':
    case 'u':
      return MobilityLabel::Unlabeled;
    default:
      throw DataError(std::string("unknown mobility label '") + c + "'");
  }
}

ProjectedTrack::ProjectedTrack(const Trajectory& traj, const Projection& projection) {
  times.reserve(traj.size());
  points.reserve(traj.size());
  for (const auto& rec : traj.records()) {
    times.push_back(rec.time);
    points.push_back(projection.project(rec.location));
  }
}

double default_ref_lat(const Trajectory& traj) {
  return traj.empty() ? 0.0 : traj.location(0).lat;
}

std::vector<IndexSpan> divide_times(std::span<const Seconds> times, Seconds delta_t) {
  std::vector<IndexSpan> spans;
  if (times.empty()) return spans;
  std::size_t first = 0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] - times[i - 1] > delta_t) {
      spans.push_back({first, i - first});
      first = i;
    }
  }
  spans.push_back({first, times.size() - first});
  return spans;
}

std::vector<DenseSegment> divide(const Trajectory& traj, Seconds delta_t) {
  std::vector<Seconds> times;
  times.reserve(traj.size());
  for (const auto& rec : traj.records()) times.push_back(rec.time);
  std::vector<DenseSegment> segments;
  for (const auto& span : divide_times(times, delta_t)) {
    segments.push_back({&traj, span.first, span.count});
  }
  return segments;
}

double global_sparsity(std::span<const Seconds> times) {
  if (times.size() < 2) {
    throw UndefinedMetricError("global sparsity needs at least two records");
  }
  // Consecutive gaps telescope to the total span.
  return static_cast<double>(times.back() - times.front()) /
         static_cast<double>(times.size() - 1);
}

double global_sparsity(const Trajectory& traj) {
  if (traj.size() < 2) {
    throw UndefinedMetricError("global sparsity needs at least two records (device " +
                               traj.device() + ")");
  }
  return static_cast<double>(traj.time(traj.size() - 1) - traj.time(0)) /
         static_cast<double>(traj.size() - 1);
}

double local_coverage(std::span<const Seconds> times, Seconds delta_t) {
  if (times.empty()) {
    throw UndefinedMetricError("local coverage needs at least one record");
  }
  std::size_t isolated = 0;
  for (std::size_t i = 1; i + 1 < times.size(); ++i) {
    if (times[i] - times[i - 1] > delta_t && times[i + 1] - times[i] > delta_t) ++isolated;
  }
  const auto n = static_cast<double>(times.size());
  return (n - static_cast<double>(isolated)) / n;
}

double local_coverage(const Trajectory& traj, Seconds delta_t) {
  std::vector<Seconds> times;
  times.reserve(traj.size());
  for (const auto& rec : traj.records()) times.push_back(rec.time);
  return local_coverage(times, delta_t);
}

}  // namespace sparsemob

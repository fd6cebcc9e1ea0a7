#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sparsemob/geo.hpp"

namespace sparsemob {

using Seconds = std::int64_t;

struct TrajectoryRecord {
  Seconds time = 0;
  GeoPoint location;
};

/// A single device's records, strictly increasing in time.
///
/// The constructor enforces the ordering; an empty trajectory is allowed so
/// that re-sampling at rate 0 has a representation, but ingestion never
/// produces one.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::string device, std::vector<TrajectoryRecord> records);

  const std::string& device() const { return device_; }
  const std::vector<TrajectoryRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const TrajectoryRecord& operator[](std::size_t i) const { return records_[i]; }

  Seconds time(std::size_t i) const { return records_[i].time; }
  const GeoPoint& location(std::size_t i) const { return records_[i].location; }

 private:
  std::string device_;
  std::vector<TrajectoryRecord> records_;
};

/// Spatial and temporal scale that separates stays from travel.
struct MobilityParams {
  double delta_s = 800.0;   // meters
  Seconds delta_t = 1800;   // seconds

  void validate() const;
};

enum class MobilityLabel : std::uint8_t { Stay, Travel, Unlabeled };

char label_letter(MobilityLabel label);
MobilityLabel label_from_letter(char c);

/// Times and projected positions; what every detection routine consumes.
struct TrackView {
  std::span<const Seconds> times;
  std::span<const PlanarPoint> points;

  std::size_t size() const { return times.size(); }
  TrackView subview(std::size_t first, std::size_t count) const {
    return {times.subspan(first, count), points.subspan(first, count)};
  }
};

struct ProjectedTrack {
  std::vector<Seconds> times;
  std::vector<PlanarPoint> points;

  ProjectedTrack() = default;
  ProjectedTrack(const Trajectory& traj, const Projection& projection);

  std::size_t size() const { return times.size(); }
  TrackView view() const { return {times, points}; }
};

// Reference latitude used when the caller does not pin one: first record.
double default_ref_lat(const Trajectory& traj);

/// Contiguous index range [first, first + size) of a trajectory whose
/// consecutive gaps are all <= delta_t, bounded by gaps > delta_t.
struct DenseSegment {
  const Trajectory* parent = nullptr;
  std::size_t first = 0;
  std::size_t count = 0;

  std::size_t last() const { return first + count - 1; }
  std::size_t size() const { return count; }
};

std::vector<DenseSegment> divide(const Trajectory& traj, Seconds delta_t);

// Same cut rule on raw times; returns (first, count) pairs.
struct IndexSpan {
  std::size_t first = 0;
  std::size_t count = 0;
};
std::vector<IndexSpan> divide_times(std::span<const Seconds> times, Seconds delta_t);

// Mean consecutive gap in seconds. Throws UndefinedMetricError when L < 2.
double global_sparsity(const Trajectory& traj);
double global_sparsity(std::span<const Seconds> times);

/// Fraction of records not isolated by gaps > delta_t on both sides.
/// Only interior records can be isolated; the first and last always count.
double local_coverage(const Trajectory& traj, Seconds delta_t);
double local_coverage(std::span<const Seconds> times, Seconds delta_t);

}  // namespace sparsemob

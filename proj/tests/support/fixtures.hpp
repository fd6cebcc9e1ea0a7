#pragma once

// Shared generators and brute-force reference implementations for tests.
// Everything here is written from the definitions, independently of src/.

#include <cstdint>
#include <string>
#include <vector>

#include "sparsemob/geo.hpp"
#include "sparsemob/random.hpp"
#include "sparsemob/simulator.hpp"
#include "sparsemob/trajectory.hpp"

namespace sparsemob::testing {

// Track in meters, already projected.
struct OwnedTrack {
  std::vector<Seconds> times;
  std::vector<PlanarPoint> points;

  std::size_t size() const { return times.size(); }
  TrackView view() const { return {times, points}; }
};

OwnedTrack track_1d(const std::vector<double>& xs, const std::vector<Seconds>& times);

/// Random track of length in [1, max_len] mixing short and long gaps and
/// clustered positions, scaled to the given mobility parameters.
OwnedTrack random_track(Rng& rng, std::size_t max_len, const MobilityParams& params);

// Trajectory whose projection at `ref_lat` yields the given planar points.
Trajectory trajectory_from_track(const OwnedTrack& track, double ref_lat = 39.9,
                                 const std::string& device = "dev");

// Literal enumeration over every index window [p, q].
std::vector<MobilityLabel> brute_exact_label(TrackView track, const MobilityParams& params);
std::vector<bool> brute_dense_membership(TrackView track, const MobilityParams& params);
// Literal p < i < q search over the whole track.
bool brute_travel(TrackView track, std::size_t i, double spatial, Seconds delta_t);

// Head/cursor/anchor stay pass transcribed step by step, one segment.
std::vector<bool> literal_stay_pass(TrackView segment, double threshold, Seconds delta_t,
                                    bool tail_flush);

/// Ground truth by brute force: positions at every grid step and an
/// all-pairs diameter test of every window [a, a + delta_t].
std::vector<MobilityLabel> brute_continuous_labels(const GroundTruthPath& path,
                                                   const SamplingSchedule& times,
                                                   const MobilityParams& params,
                                                   std::int64_t steps_per_second = 1);

/// Short CTRW path scaled down so the brute force stays cheap.
GroundTruthPath small_path(std::uint64_t seed, Seconds duration, const MobilityParams& params);

}  // namespace sparsemob::testing

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "sparsemob/trajectory.hpp"

namespace sparsemob {

struct SdsOptions {
  // Emit the final stay window of a segment when no escape closes it.
  // Off reproduces the bare pseudocode, which drops that window.
  bool tail_flush = true;
  // Reference latitude for the projection; defaults to the first record.
  std::optional<double> ref_lat;
};

struct LabeledTrajectory {
  Trajectory trajectory;
  std::vector<MobilityLabel> labels;
};

struct RecallBounds {
  double stay_bound = 1.0;
  double travel_bound = 1.0;
};

// Called with (head, cursor) each time the stay window [head, cursor] is
// known to be free of pairs at or beyond the threshold.
using WindowObserver = std::function<void(std::size_t head, std::size_t cursor)>;

/// Doubly sliding stay pass over one dense segment at an explicit spatial
/// threshold. A record is flagged when it belongs to a window whose pairwise
/// distances are all below `threshold` and whose time span is >= delta_t.
std::vector<bool> detect_stays_at(TrackView segment, double threshold, Seconds delta_t,
                                  bool tail_flush, const WindowObserver* observer = nullptr);

// Stay pass at delta_s / 3.
std::vector<bool> detect_stays(TrackView segment, const MobilityParams& params,
                               const SdsOptions& options = {});

/// Bilateral travel test: interior records (not flagged stay) whose nearest
/// left and right records at distance >= threshold lie within delta_t of
/// each other.
std::vector<bool> detect_travels_at(TrackView segment, const std::vector<bool>& stay_flags,
                                    double threshold, Seconds delta_t);

std::vector<bool> detect_travels(TrackView segment, const std::vector<bool>& stay_flags,
                                 const MobilityParams& params);

std::vector<MobilityLabel> sds_label(TrackView track, const MobilityParams& params,
                                     const SdsOptions& options = {});

LabeledTrajectory sds_label(const Trajectory& traj, const MobilityParams& params,
                            const SdsOptions& options = {});

/// Stay bound = stays found at delta_s/3 over stays found at delta_s;
/// travel bound = travels found at delta_s over travels found at delta_s/2.
/// 0/0 yields 1.
RecallBounds recall_lower_bounds(const Trajectory& traj, const MobilityParams& params,
                                 const SdsOptions& options = {});

}  // namespace sparsemob

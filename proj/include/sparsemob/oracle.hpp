#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sparsemob/trajectory.hpp"

namespace sparsemob {

struct OracleOptions {
  // The oracle is desk-scale; longer trajectories are refused.
  std::size_t max_records = 200;
  std::optional<double> ref_lat;
};

// Stay/Travel per record, never Unlabeled.
using OracleLabels = std::vector<MobilityLabel>;

/// Discrete mobility of every record: Stay iff the record lies in some index
/// window [p, q] with t_q - t_p >= delta_t and all pairwise distances below
/// delta_s; Travel otherwise (a lone record is Travel).
OracleLabels exact_label(TrackView track, const MobilityParams& params,
                         std::size_t max_records = 200);
OracleLabels exact_label(const Trajectory& traj, const MobilityParams& params,
                         const OracleOptions& options = {});

/// Records inside some window that qualifies as a discrete stay and whose
/// consecutive gaps are all <= delta_t.
std::vector<bool> dense_stay_membership(TrackView track, const MobilityParams& params,
                                        std::size_t max_records = 200);
std::vector<bool> dense_stay_membership(const Trajectory& traj, const MobilityParams& params,
                                        const OracleOptions& options = {});

/// True iff some p < i < q has both endpoints at distance >= spatial from
/// record i and t_q - t_p <= delta_t. Index is zero-based.
bool travel_condition(TrackView track, std::size_t i, double spatial, Seconds delta_t);
bool travel_condition(const Trajectory& traj, std::size_t i, double spatial, Seconds delta_t,
                      std::optional<double> ref_lat = std::nullopt);

}  // namespace sparsemob

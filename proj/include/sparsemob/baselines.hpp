#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <vector>

#include "sparsemob/trajectory.hpp"

namespace sparsemob {

// ---------------------------------------------------------------------------
// Index scheme

struct GridCell {
  std::int64_t lon = 0;
  std::int64_t lat = 0;

  friend auto operator<=>(const GridCell&, const GridCell&) = default;
};

/// floor(coordinate * 1000). Products within 1e-7 of an integer snap to it so
/// that decimal inputs such as 0.001 land on their own cell.
GridCell grid_index(const GeoPoint& p);

enum class WeekStart { Monday, Sunday };

struct TimeIndexConfig {
  Seconds utc_offset = 8 * 3600;
  WeekStart week_start = WeekStart::Monday;
};

// Hour of day + 24 * day of week in the configured zone, in [0, 167].
int hour_index(Seconds epoch, const TimeIndexConfig& config = {});

// Whole minutes elapsed since the segment start.
std::int64_t minute_index(Seconds time, Seconds segment_start);

struct SpatioTemporalBin {
  GridCell cell;
  int hour = 0;

  friend auto operator<=>(const SpatioTemporalBin&, const SpatioTemporalBin&) = default;
};

SpatioTemporalBin make_bin(const TrajectoryRecord& record, const TimeIndexConfig& config = {});

// ---------------------------------------------------------------------------
// Voting

struct VoteCounts {
  std::uint64_t stay = 0;
  std::uint64_t travel = 0;
};

/// Majority label per spatio-temporal bin. Ties and unseen bins fall back to
/// a coin flip that is a fixed function of (seed, bin).
class VotingModel {
 public:
  explicit VotingModel(std::uint64_t seed = 0, TimeIndexConfig time = {});

  void add(const SpatioTemporalBin& bin, MobilityLabel label, std::uint64_t count = 1);
  // Unlabeled entries are skipped.
  void train(const Trajectory& traj, const std::vector<MobilityLabel>& labels);

  MobilityLabel predict(const SpatioTemporalBin& bin) const;
  MobilityLabel predict(const TrajectoryRecord& record) const;
  std::vector<MobilityLabel> predict(const Trajectory& traj) const;

  const std::map<SpatioTemporalBin, VoteCounts>& counts() const { return counts_; }
  std::uint64_t seed() const { return seed_; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  const TimeIndexConfig& time_config() const { return time_; }

  void write_csv(std::ostream& out) const;
  static VotingModel read_csv(std::istream& in, std::uint64_t seed = 0, TimeIndexConfig time = {});

 private:
  MobilityLabel coin(const SpatioTemporalBin& bin) const;

  std::uint64_t seed_;
  TimeIndexConfig time_;
  std::map<SpatioTemporalBin, VoteCounts> counts_;
};

// ---------------------------------------------------------------------------
// Two-state HMM

/// Observation alphabet: distance bucket x gap bucket of the offset from the
/// previous record, plus one symbol for the first record.
struct HmmBuckets {
  std::vector<double> distance_edges{100.0, 400.0, 800.0, 3200.0};  // meters, d < edge
  std::vector<Seconds> gap_edges{300, 1800};                         // seconds, g <= edge

  std::size_t symbols() const { return (distance_edges.size() + 1) * (gap_edges.size() + 1) + 1; }
  std::size_t start_symbol() const { return symbols() - 1; }
  std::size_t symbol(double distance, Seconds gap) const;
  void validate() const;
};

std::vector<std::size_t> observation_symbols(TrackView track, const HmmBuckets& buckets);

/// Log-probabilities; state 0 = Stay, 1 = Travel.
struct HmmParameters {
  std::array<double, 2> log_initial{};
  std::array<std::array<double, 2>, 2> log_transition{};   // [from][to]
  std::vector<std::array<double, 2>> log_emission;          // [symbol][state]
};

struct ViterbiResult {
  std::vector<int> states;
  double log_probability = 0.0;
};

/// Most probable state path. Scores accumulate left to right as
/// ((init + e0) + a01) + e1 + ...; ties prefer Stay, both for the final state
/// and for each predecessor.
ViterbiResult viterbi(const HmmParameters& model, const std::vector<std::size_t>& observations);

struct HmmSequence {
  std::vector<std::size_t> symbols;
  std::vector<MobilityLabel> labels;  // Unlabeled positions are skipped in training
};

class HmmModel {
 public:
  HmmModel() = default;
  HmmModel(HmmBuckets buckets, HmmParameters parameters);

  /// Add-one smoothed counts. Transitions count only between consecutive
  /// labeled positions; the initial law comes from each sequence's first
  /// labeled position.
  static HmmModel train(const std::vector<HmmSequence>& data, const HmmBuckets& buckets = {});

  const HmmBuckets& buckets() const { return buckets_; }
  const HmmParameters& parameters() const { return parameters_; }

  std::vector<MobilityLabel> predict(const std::vector<std::size_t>& symbols) const;
  std::vector<MobilityLabel> predict(TrackView track) const;

  void write_csv(std::ostream& out) const;
  static HmmModel read_csv(std::istream& in);

 private:
  HmmBuckets buckets_;
  HmmParameters parameters_;
};

}  // namespace sparsemob

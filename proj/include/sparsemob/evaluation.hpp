#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sparsemob/sds.hpp"
#include "sparsemob/simulator.hpp"
#include "sparsemob/trajectory.hpp"

namespace sparsemob {

/// Confusion table of predicted against true labels. Truth is always Stay or
/// Travel; a predicted Unlabeled is an abstention and counts against recall.
struct ConfusionCounts {
  std::uint64_t ts = 0;  // predicted Stay, truly Stay
  std::uint64_t fs = 0;  // predicted Stay, truly Travel
  std::uint64_t tv = 0;  // predicted Travel, truly Travel
  std::uint64_t fv = 0;  // predicted Travel, truly Stay
  std::uint64_t stay_abstained = 0;
  std::uint64_t travel_abstained = 0;

  void add(MobilityLabel predicted, MobilityLabel truth);
  ConfusionCounts& operator+=(const ConfusionCounts& other);
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;

  std::uint64_t labeled() const { return ts + fs + tv + fv; }
  std::uint64_t evaluated() const { return labeled() + stay_abstained + travel_abstained; }
};

// nullopt marks an undefined metric (empty denominator).
using Metric = std::optional<double>;

struct MetricsReport {
  Metric sp;
  Metric sr;
  Metric vp;
  Metric vr;
  Metric acc;
  Metric f1_acc;
};

Metric ratio(std::uint64_t num, std::uint64_t den);
// F1 of a precision/recall pair; 0 when both are 0.
Metric f1(const Metric& precision, const Metric& recall);
Metric harmonic_mean(const Metric& a, const Metric& b);

MetricsReport metrics_from_counts(const ConfusionCounts& counts);

ConfusionCounts confusion(const std::vector<MobilityLabel>& predicted,
                          const std::vector<MobilityLabel>& truth,
                          const std::vector<bool>& mask = {});

/// Per-class precision and recall over the records selected by `mask`
/// (empty mask selects all). Throws ParameterError on length mismatch or an
/// Unlabeled truth inside the mask.
MetricsReport compute_metrics(const std::vector<MobilityLabel>& predicted,
                              const std::vector<MobilityLabel>& truth,
                              const std::vector<bool>& mask = {});

// "NA" for undefined, fixed 6 decimals otherwise.
std::string format_metric(const Metric& value);

// ---------------------------------------------------------------------------
// Re-sampling experiment

struct ExperimentConfig {
  CtrwConfig ctrw;
  PowerLaw interval{1.6, 60.0, 86400.0};  // gaps between scheduled records
  std::size_t trajectories = 1000;
  std::vector<double> rates{1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1};
  MobilityParams params;
  SdsOptions sds;
  std::uint64_t seed = 1;
  double resolution = 1.0;
  std::size_t workers = 1;

  void validate() const;
};

struct ExperimentRow {
  double rate = 0.0;
  std::uint64_t records = 0;
  Metric global_sparsity;  // mean over trajectories with >= 2 records
  ConfusionCounts all;     // every kept record
  ConfusionCounts detectable;  // kept records detectable at rate 1
  MetricsReport metrics;   // sp, vp from `all`; the rest from `detectable`
};

/// Simulates labeled trajectories, re-samples each at every rate (nested
/// subsets), labels them with SDS and scores against the continuous truth.
/// Precision counts every record; recall, ACC and F1-ACC count the records
/// that are detectable in the full data: true stays inside a dense stay window
/// at delta_s, true travels whose bilateral witnesses at delta_s / 2 exist.
std::vector<ExperimentRow> resampling_experiment(const ExperimentConfig& config);

void write_experiment_csv(std::ostream& out, const std::vector<ExperimentRow>& rows);

// One simulated trajectory of the experiment, exposed for reuse.
SampledTrajectory simulate_trajectory(const ExperimentConfig& config, std::size_t index);

// ---------------------------------------------------------------------------
// Removal check

struct RemovalCounts {
  std::uint64_t tested = 0;
  std::uint64_t violations = 0;

  RemovalCounts& operator+=(const RemovalCounts& other) {
    tested += other.tested;
    violations += other.violations;
    return *this;
  }
};

/// For each record i with two neighbours: drop it and look for a dense stay
/// window of the remainder that spans t_i (it must hold both i - 1 and i + 1).
/// If one exists the record is tested, and it is a violation when it lies at
/// delta_s or more from either neighbour.
RemovalCounts removal_check(TrackView track, const MobilityParams& params);

struct RemovalResult {
  MobilityParams params;
  RemovalCounts counts;
  Metric rate;  // violations / tested
};

std::vector<RemovalResult> removal_violation_rate(const std::vector<Trajectory>& dataset,
                                              const std::vector<MobilityParams>& grid,
                                              std::optional<double> ref_lat = std::nullopt,
                                              std::size_t workers = 1);

void write_removal_csv(std::ostream& out, const std::vector<RemovalResult>& results);

// ---------------------------------------------------------------------------
// Sparsity report

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::uint64_t count = 0;
};

struct LabelShare {
  double lo = 0.0;  // sparsity bin
  double hi = 0.0;
  std::uint64_t records = 0;
  std::uint64_t stay = 0;
  std::uint64_t travel = 0;
  std::uint64_t unlabeled = 0;
};

struct LengthBin {
  double lo = 0.0;
  double hi = 0.0;
  std::uint64_t trajectories = 0;
  double mean_length = 0.0;
};

struct CoverageReport {
  Seconds delta_t = 0;
  std::vector<HistogramBin> coverage;  // width 0.05 on [0, 1]
  std::vector<LabelShare> labels;      // SDS labels by sparsity bin
};

struct SparsityReport {
  std::uint64_t trajectories = 0;
  std::uint64_t undefined_sparsity = 0;  // trajectories with one record
  std::vector<HistogramBin> sparsity;    // log-spaced, four bins per decade
  std::vector<LengthBin> length;
  std::vector<CoverageReport> per_delta_t;
};

// Bin index of a positive sparsity value (four per decade) and its edges.
long sparsity_bin(double xi);
double sparsity_bin_edge(long bin);
// Coverage bin in [0, 19].
int coverage_bin(double rho);

SparsityReport sparsity_report(const std::vector<Trajectory>& dataset,
                               const std::vector<Seconds>& delta_ts, double delta_s,
                               const SdsOptions& options = {}, std::size_t workers = 1);

void write_sparsity_csv(std::ostream& out, const SparsityReport& report);

}  // namespace sparsemob

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sparsemob/geo.hpp"
#include "sparsemob/random.hpp"
#include "sparsemob/trajectory.hpp"

namespace sparsemob {

/// Density proportional to x^-exponent on [min, max].
struct PowerLaw {
  double exponent = 2.0;
  double min = 1.0;
  double max = 100.0;

  void validate() const;
};

// Inverse CDF of the truncated power law; u in [0, 1].
double sample_truncated_power_law(double exponent, double xmin, double xmax, double u);
double sample(const PowerLaw& law, Rng& rng);

/// Continuous-time random walk: alternating heavy-tailed stays and
/// scale-free straight-line jumps.
struct CtrwConfig {
  // Exponents are placeholders; calibrate them with fit_power_law_exponent.
  PowerLaw wait{1.8, 1800.0, 172800.0};  // seconds
  PowerLaw jump{1.75, 1000.0, 50000.0};  // meters
  double speed = 5.0;                    // m/s
  double jitter_radius = 100.0;          // meters, must stay < delta_s / 2
  Seconds duration = 3 * 86400;
  double start_extent = 20000.0;  // side of the square the walk starts in
  std::uint64_t seed = 1;
  // wait.min >= delta_t and jump.min >= delta_s; turn off only for stress runs.
  bool enforce_minima = true;
  GeoPoint origin{116.4, 39.9};

  void validate(const MobilityParams& params) const;
};

// Offset applied from `time` until the next held offset or the stay's end.
struct HeldOffset {
  Seconds time = 0;
  PlanarPoint offset;
};

struct StayPeriod {
  PlanarPoint center;
  Seconds start = 0;
  Seconds end = 0;
  std::vector<HeldOffset> offsets;  // sorted by time, within [start, end)
};

struct TravelLeg {
  PlanarPoint from;
  PlanarPoint to;
  Seconds start = 0;
  Seconds end = 0;
  double speed = 0.0;
};

/// Piecewise path in meters about `origin`. Phases alternate
/// stays[0], legs[0], stays[1], legs[1], ... and tile [0, duration].
/// Inside a stay the position is the center until the first held offset,
/// then center + the most recent offset.
struct GroundTruthPath {
  GeoPoint origin;
  Seconds duration = 0;
  std::vector<StayPeriod> stays;
  std::vector<TravelLeg> legs;

  PlanarPoint position(double t) const;
  bool in_stay(Seconds t) const;
  // Index of the stay covering t, or -1 when t falls on a leg.
  long stay_index(Seconds t) const;
};

struct SamplingSchedule {
  std::vector<Seconds> times;  // strictly increasing

  void validate() const;
};

GroundTruthPath generate_ctrw(const CtrwConfig& config);

/// Ground-truth stay/travel per timestamp, evaluated on the path discretized at
/// `resolution` seconds (1/resolution must be an integer). A timestamp is
/// Stay iff it lies in a grid window [a, a + delta_t] inside [0, duration]
/// whose sampled positions all lie within delta_s of each other.
std::vector<MobilityLabel> continuous_labels(const GroundTruthPath& path,
                                             const SamplingSchedule& times,
                                             const MobilityParams& params,
                                             double resolution = 1.0);

// Largest pairwise distance over grid positions in [from, to].
double path_diameter(const GroundTruthPath& path, double from, double to, double resolution = 1.0);

/// Attaches one random offset, uniform in the open disk of `radius`, at every
/// scheduled time inside a stay (the final instant of a stay is skipped).
GroundTruthPath apply_jitter(const GroundTruthPath& path, const SamplingSchedule& times,
                             double radius, std::uint64_t seed);

// Records at the path's positions (no labels).
Trajectory observe(const GroundTruthPath& path, const SamplingSchedule& times,
                   const std::string& device);

struct SampledTrajectory {
  Trajectory trajectory;
  std::vector<MobilityLabel> truth;  // continuous ground truth per record
  std::vector<bool> in_stay;         // generator phase per record
};

struct SampleOptions {
  MobilityParams params;
  double jitter_radius = 0.0;
  std::uint64_t seed = 0;
  double resolution = 1.0;
  std::string device = "sim";
};

SampledTrajectory sample_at(const GroundTruthPath& path, const SamplingSchedule& times,
                            const SampleOptions& options);

/// Keeps each record independently with probability `rate`. The same seed
/// yields nested subsets across rates.
SampledTrajectory resample(const SampledTrajectory& data, double rate, std::uint64_t seed);
// Indices kept by resample() for `count` records.
std::vector<std::size_t> resample_indices(std::size_t count, double rate, std::uint64_t seed);

// count timestamps starting at 0 with power-law distributed integer gaps.
SamplingSchedule synth_schedule(std::size_t count, const PowerLaw& interval, std::uint64_t seed);
// Timestamps from 0 up to and including `duration`.
SamplingSchedule synth_schedule_within(Seconds duration, const PowerLaw& interval,
                                       std::uint64_t seed);

/// Maximum-likelihood exponent 1 + n / sum(ln(x / xmin)) (untruncated).
double fit_power_law_exponent(const std::vector<double>& samples, double xmin);

}  // namespace sparsemob

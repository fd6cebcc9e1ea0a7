#include "sparsemob/evaluation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <string>

#include "sparsemob/errors.hpp"
#include "sparsemob/oracle.hpp"
#include "sparsemob/parallel.hpp"
#include "sparsemob/random.hpp"

namespace sparsemob {

void ConfusionCounts::add(MobilityLabel predicted, MobilityLabel truth) {
  if (truth == MobilityLabel::Unlabeled) {
    throw ParameterError("ground truth must be Stay or Travel");
  }
  const bool stay = truth == MobilityLabel::Stay;
  switch (predicted) {
    case MobilityLabel::Stay:
      ++(stay ? ts : fs);
      break;
    case MobilityLabel::Travel:
      ++(stay ? fv : tv);
      break;
    case MobilityLabel::Unlabeled:
      ++(stay ? stay_abstained : travel_abstained);
      break;
  }
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& other) {
  ts += other.ts;
  fs += other.fs;
  tv += other.tv;
  fv += other.fv;
  stay_abstained += other.stay_abstained;
  travel_abstained += other.travel_abstained;
  return *this;
}

Metric ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

Metric f1(const Metric& precision, const Metric& recall) {
  if (!precision || !recall) return std::nullopt;
  const double sum = *precision + *recall;
  if (sum == 0.0) return 0.0;
  return 2.0 * *precision * *recall / sum;
}

Metric harmonic_mean(const Metric& a, const Metric& b) { return f1(a, b); }

MetricsReport metrics_from_counts(const ConfusionCounts& c) {
  MetricsReport r;
  r.sp = ratio(c.ts, c.ts + c.fs);
  r.sr = ratio(c.ts, c.ts + c.fv + c.stay_abstained);
  r.vp = ratio(c.tv, c.tv + c.fv);
  r.vr = ratio(c.tv, c.tv + c.fs + c.travel_abstained);
  r.acc = ratio(c.ts + c.tv, c.evaluated());
  r.f1_acc = harmonic_mean(f1(r.sp, r.sr), f1(r.vp, r.vr));
  return r;
}

ConfusionCounts confusion(const std::vector<MobilityLabel>& predicted,
                          const std::vector<MobilityLabel>& truth, const std::vector<bool>& mask) {
  if (predicted.size() != truth.size()) {
    throw ParameterError("predicted and truth lengths differ (" + std::to_string(predicted.size()) +
                         " vs " + std::to_string(truth.size()) + ")");
  }
  if (!mask.empty() && mask.size() != truth.size()) {
    throw ParameterError("evaluation mask length differs from the labels");
  }
  ConfusionCounts counts;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (mask.empty() || mask[i]) counts.add(predicted[i], truth[i]);
  }
  return counts;
}

MetricsReport compute_metrics(const std::vector<MobilityLabel>& predicted,
                              const std::vector<MobilityLabel>& truth, const std::vector<bool>& mask) {
  return metrics_from_counts(confusion(predicted, truth, mask));
}

std::string format_metric(const Metric& value) {
  if (!value) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", *value);
  return buf;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------

void ExperimentConfig::validate() const {
  ctrw.validate(params);
  interval.validate();
  for (const double r : rates) {
    if (!(r > 0.0 && r <= 1.0)) throw ParameterError("re-sampling rates must lie in (0, 1]");
  }
  if (workers == 0) throw ParameterError("workers must be positive");
}

SampledTrajectory simulate_trajectory(const ExperimentConfig& config, std::size_t index) {
  CtrwConfig ctrw = config.ctrw;
  ctrw.seed = derive_seed(config.seed, "ctrw", index);
  const GroundTruthPath path = generate_ctrw(ctrw);
  const SamplingSchedule schedule =
      synth_schedule_within(ctrw.duration, config.interval, derive_seed(config.seed, "schedule", index));
  SampleOptions options;
  options.params = config.params;
  options.jitter_radius = ctrw.jitter_radius;
  options.seed = derive_seed(config.seed, "jitter", index);
  options.resolution = config.resolution;
  char device[32];
  std::snprintf(device, sizeof device, "sim%06zu", index);
  options.device = device;
  return sample_at(path, schedule, options);
}

namespace {

struct RateOutcome {
  std::uint64_t records = 0;
  std::optional<double> sparsity;
  ConfusionCounts all;
  ConfusionCounts detectable;
};

// Records whose mobility is recoverable from the full-rate data.
std::vector<bool> detectable_mask(TrackView track, const std::vector<MobilityLabel>& truth,
                                  const MobilityParams& params) {
  const auto dense = dense_stay_membership(track, params, std::numeric_limits<std::size_t>::max());
  std::vector<bool> travel(track.size(), false);
  for (const auto& span : divide_times(track.times, params.delta_t)) {
    const auto view = track.subview(span.first, span.count);
    const auto flags = detect_travels_at(view, std::vector<bool>(span.count, false),
                                         params.delta_s / 2.0, params.delta_t);
    for (std::size_t k = 0; k < span.count; ++k) travel[span.first + k] = flags[k];
  }
  std::vector<bool> mask(track.size(), false);
  for (std::size_t k = 0; k < track.size(); ++k) {
    mask[k] = truth[k] == MobilityLabel::Stay ? dense[k] : travel[k];
  }
  return mask;
}

std::vector<RateOutcome> run_one(const ExperimentConfig& config, std::size_t index) {
  const SampledTrajectory data = simulate_trajectory(config, index);
  const ProjectedTrack full(data.trajectory, Projection(config.ctrw.origin.lat));
  const auto mask = detectable_mask(full.view(), data.truth, config.params);
  const std::uint64_t seed = derive_seed(config.seed, "resample", index);

  std::vector<RateOutcome> outcomes;
  outcomes.reserve(config.rates.size());
  for (const double rate : config.rates) {
    const auto kept = resample_indices(full.size(), rate, seed);
    std::vector<Seconds> times;
    std::vector<PlanarPoint> points;
    times.reserve(kept.size());
    points.reserve(kept.size());
    for (const std::size_t k : kept) {
      times.push_back(full.times[k]);
      points.push_back(full.points[k]);
    }
    const auto labels = sds_label(TrackView{times, points}, config.params, config.sds);

    RateOutcome out;
    out.records = kept.size();
    if (kept.size() >= 2) out.sparsity = global_sparsity(std::span<const Seconds>(times));
    for (std::size_t j = 0; j < kept.size(); ++j) {
      const std::size_t k = kept[j];
      out.all.add(labels[j], data.truth[k]);
      if (mask[k]) out.detectable.add(labels[j], data.truth[k]);
    }
    outcomes.push_back(out);
  }
  return outcomes;
}

}  // namespace

std::vector<ExperimentRow> resampling_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.rates.empty()) return {};

  std::vector<std::vector<RateOutcome>> per_trajectory(config.trajectories);
  parallel_for(config.trajectories, config.workers,
               [&](std::size_t i) { per_trajectory[i] = run_one(config, i); });

  std::vector<ExperimentRow> rows;
  for (std::size_t r = 0; r < config.rates.size(); ++r) {
    ExperimentRow row;
    row.rate = config.rates[r];
    double sparsity_sum = 0.0;
    std::uint64_t sparsity_n = 0;
    for (const auto& outcomes : per_trajectory) {
      const auto& o = outcomes[r];
      row.records += o.records;
      row.all += o.all;
      row.detectable += o.detectable;
      if (o.sparsity) {
        sparsity_sum += *o.sparsity;
        ++sparsity_n;
      }
    }
    if (sparsity_n > 0) row.global_sparsity = sparsity_sum / static_cast<double>(sparsity_n);
    const MetricsReport precision = metrics_from_counts(row.all);
    row.metrics = metrics_from_counts(row.detectable);
    row.metrics.sp = precision.sp;
    row.metrics.vp = precision.vp;
    row.metrics.f1_acc = harmonic_mean(f1(row.metrics.sp, row.metrics.sr),
                                       f1(row.metrics.vp, row.metrics.vr));
    rows.push_back(row);
  }
  return rows;
}

void write_experiment_csv(std::ostream& out, const std::vector<ExperimentRow>& rows) {
  out << "# sparsemob resampling v1\n";
  out << "rate,records,global_sparsity,sp,sr,vp,vr,acc,f1_acc,ts,fs,tv,fv,"
         "detectable_ts,detectable_fs,detectable_tv,detectable_fv,"
         "detectable_stay_abstained,detectable_travel_abstained\n";
  for (const auto& row : rows) {
    const auto& m = row.metrics;
    const auto& a = row.all;
    const auto& d = row.detectable;
    out << format_double(row.rate) << ',' << row.records << ','
        << (row.global_sparsity ? format_double(*row.global_sparsity) : "NA") << ','
        << format_metric(m.sp) << ',' << format_metric(m.sr) << ',' << format_metric(m.vp) << ','
        << format_metric(m.vr) << ',' << format_metric(m.acc) << ',' << format_metric(m.f1_acc)
        << ',' << a.ts << ',' << a.fs << ',' << a.tv << ',' << a.fv << ',' << d.ts << ',' << d.fs
        << ',' << d.tv << ',' << d.fv << ',' << d.stay_abstained << ',' << d.travel_abstained
        << '\n';
  }
}

// ---------------------------------------------------------------------------

RemovalCounts removal_check(TrackView track, const MobilityParams& params) {
  params.validate();
  const auto& t = track.times;
  const auto& pts = track.points;
  const std::size_t n = track.size();
  const double ds = params.delta_s;
  RemovalCounts counts;

  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (t[i + 1] - t[i - 1] > params.delta_t) continue;
    if (distance(pts[i - 1], pts[i + 1]) >= ds) continue;

    // Widest window of the remainder holding i - 1 and i + 1, grown to the
    // right first and then to the left; its right end only shrinks.
    std::size_t p = i - 1;
    std::size_t q = i + 1;
    auto fits_right = [&](std::size_t k) {
      if (t[k] - t[k - 1] > params.delta_t) return false;
      for (std::size_t m = p; m < k; ++m) {
        if (m != i && distance(pts[m], pts[k]) >= ds) return false;
      }
      return true;
    };
    while (q + 1 < n && fits_right(q + 1)) ++q;

    bool tested = t[q] - t[p] >= params.delta_t;
    while (!tested && p > 0) {
      const std::size_t np = p - 1;
      if (t[p] - t[np] > params.delta_t) break;
      std::size_t conflict = q + 1;
      for (std::size_t m = p; m <= q; ++m) {
        if (m != i && distance(pts[np], pts[m]) >= ds) {
          conflict = m;
          break;
        }
      }
      if (conflict <= i + 1) break;
      p = np;
      q = conflict - 1;
      tested = t[q] - t[p] >= params.delta_t;
    }
    if (!tested) continue;

    ++counts.tested;
    if (distance(pts[i], pts[i - 1]) >= ds || distance(pts[i], pts[i + 1]) >= ds) {
      ++counts.violations;
    }
  }
  return counts;
}

std::vector<RemovalResult> removal_violation_rate(const std::vector<Trajectory>& dataset,
                                              const std::vector<MobilityParams>& grid,
                                              std::optional<double> ref_lat, std::size_t workers) {
  if (dataset.empty()) throw UndefinedMetricError("violation rate of an empty dataset");
  for (const auto& params : grid) params.validate();

  std::vector<std::vector<RemovalCounts>> per_trajectory(dataset.size());
  parallel_for(dataset.size(), workers, [&](std::size_t d) {
    const auto& traj = dataset[d];
    auto& out = per_trajectory[d];
    out.resize(grid.size());
    if (traj.empty()) return;
    const ProjectedTrack track(traj, Projection(ref_lat.value_or(default_ref_lat(traj))));
    for (std::size_t g = 0; g < grid.size(); ++g) out[g] = removal_check(track.view(), grid[g]);
  });

  std::vector<RemovalResult> results;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    RemovalResult result;
    result.params = grid[g];
    for (const auto& counts : per_trajectory) result.counts += counts[g];
    result.rate = ratio(result.counts.violations, result.counts.tested);
    results.push_back(result);
  }
  return results;
}

void write_removal_csv(std::ostream& out, const std::vector<RemovalResult>& results) {
  out << "# sparsemob removal v1\n";
  out << "delta_s,delta_t,tested,violations,rate\n";
  for (const auto& r : results) {
    out << format_double(r.params.delta_s) << ',' << r.params.delta_t << ',' << r.counts.tested
        << ',' << r.counts.violations << ',';
    if (r.rate) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.9g", *r.rate);
      out << buf;
    } else {
      out << "NA";
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------

long sparsity_bin(double xi) {
  if (!(xi > 0.0)) throw ParameterError("sparsity must be positive");
  return static_cast<long>(std::floor(4.0 * std::log10(xi) + 1e-9));
}

double sparsity_bin_edge(long bin) { return std::pow(10.0, static_cast<double>(bin) / 4.0); }

int coverage_bin(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw ParameterError("coverage must lie in [0, 1]");
  return std::min(19, static_cast<int>(std::floor(rho * 20.0 + 1e-9)));
}

namespace {

struct TrajectoryStats {
  std::size_t length = 0;
  std::optional<long> bin;
  std::vector<int> coverage;                 // per delta_t
  std::vector<std::array<std::uint64_t, 3>> labels;  // per delta_t: S, T, U
};

}  // namespace

SparsityReport sparsity_report(const std::vector<Trajectory>& dataset,
                               const std::vector<Seconds>& delta_ts, double delta_s,
                               const SdsOptions& options, std::size_t workers) {
  if (dataset.empty()) throw UndefinedMetricError("sparsity report of an empty dataset");
  for (const Seconds dt : delta_ts) MobilityParams{delta_s, dt}.validate();

  std::vector<TrajectoryStats> stats(dataset.size());
  parallel_for(dataset.size(), workers, [&](std::size_t d) {
    const auto& traj = dataset[d];
    auto& s = stats[d];
    s.length = traj.size();
    if (traj.empty()) return;
    if (traj.size() >= 2) s.bin = sparsity_bin(global_sparsity(traj));
    for (const Seconds dt : delta_ts) {
      s.coverage.push_back(coverage_bin(local_coverage(traj, dt)));
      std::array<std::uint64_t, 3> counts{};
      for (const auto label : sds_label(traj, MobilityParams{delta_s, dt}, options).labels) {
        ++counts[static_cast<std::size_t>(label)];
      }
      s.labels.push_back(counts);
    }
  });

  SparsityReport report;
  report.trajectories = dataset.size();
  std::map<long, std::uint64_t> sparsity;
  std::map<long, std::pair<std::uint64_t, std::uint64_t>> length;  // trajectories, records
  std::vector<std::map<int, std::uint64_t>> coverage(delta_ts.size());
  std::vector<std::map<long, std::array<std::uint64_t, 3>>> labels(delta_ts.size());
  for (const auto& s : stats) {
    if (s.length == 0) continue;
    for (std::size_t k = 0; k < delta_ts.size(); ++k) ++coverage[k][s.coverage[k]];
    if (!s.bin) {
      ++report.undefined_sparsity;
      continue;
    }
    ++sparsity[*s.bin];
    auto& len = length[*s.bin];
    ++len.first;
    len.second += s.length;
    for (std::size_t k = 0; k < delta_ts.size(); ++k) {
      auto& acc = labels[k][*s.bin];
      for (std::size_t c = 0; c < 3; ++c) acc[c] += s.labels[k][c];
    }
  }

  for (const auto& [bin, count] : sparsity) {
    report.sparsity.push_back({sparsity_bin_edge(bin), sparsity_bin_edge(bin + 1), count});
  }
  for (const auto& [bin, len] : length) {
    report.length.push_back({sparsity_bin_edge(bin), sparsity_bin_edge(bin + 1), len.first,
                             static_cast<double>(len.second) / static_cast<double>(len.first)});
  }
  for (std::size_t k = 0; k < delta_ts.size(); ++k) {
    CoverageReport cr;
    cr.delta_t = delta_ts[k];
    for (const auto& [bin, count] : coverage[k]) {
      cr.coverage.push_back({bin * 0.05, (bin + 1) * 0.05, count});
    }
    for (const auto& [bin, c] : labels[k]) {
      cr.labels.push_back({sparsity_bin_edge(bin), sparsity_bin_edge(bin + 1), c[0] + c[1] + c[2],
                           c[0], c[1], c[2]});
    }
    report.per_delta_t.push_back(cr);
  }
  return report;
}

void write_sparsity_csv(std::ostream& out, const SparsityReport& report) {
  out << "# sparsemob sparsity v1\n";
  out << "section,delta_t,bin_lo,bin_hi,count,value\n";
  for (const auto& b : report.sparsity) {
    out << "sparsity,," << format_double(b.lo) << ',' << format_double(b.hi) << ',' << b.count
        << ",\n";
  }
  for (const auto& b : report.length) {
    out << "length,," << format_double(b.lo) << ',' << format_double(b.hi) << ','
        << b.trajectories << ',' << format_double(b.mean_length) << '\n';
  }
  for (const auto& cr : report.per_delta_t) {
    for (const auto& b : cr.coverage) {
      out << "coverage," << cr.delta_t << ',' << format_double(b.lo) << ','
          << format_double(b.hi) << ',' << b.count << ",\n";
    }
    for (const auto& b : cr.labels) {
      const double n = static_cast<double>(b.records);
      const auto share = [&](std::uint64_t c) {
        return b.records == 0 ? std::string("NA") : format_metric(static_cast<double>(c) / n);
      };
      const std::string prefix = "," + std::to_string(cr.delta_t) + ',' + format_double(b.lo) +
                                 ',' + format_double(b.hi) + ',' + std::to_string(b.records) + ',';
      out << "stay_share" << prefix << share(b.stay) << '\n';
      out << "travel_share" << prefix << share(b.travel) << '\n';
      out << "unlabeled_share" << prefix << share(b.unlabeled) << '\n';
    }
  }
  if (report.undefined_sparsity > 0) {
    out << "undefined_sparsity,,,," << report.undefined_sparsity << ",\n";
  }
}

}  // namespace sparsemob

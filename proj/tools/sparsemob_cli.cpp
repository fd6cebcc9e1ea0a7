// sparsemob: batch front end for labeling, simulation and evaluation.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sparsemob/baselines.hpp"
#include "sparsemob/csv_io.hpp"
#include "sparsemob/errors.hpp"
#include "sparsemob/evaluation.hpp"
#include "sparsemob/oracle.hpp"
#include "sparsemob/parallel.hpp"
#include "sparsemob/random.hpp"
#include "sparsemob/sds.hpp"
#include "sparsemob/simulator.hpp"

namespace {

using namespace sparsemob;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct RunConfig {
  MobilityParams params;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  bool tail_flush = true;
  std::string timezone = "+08:00";
  std::optional<double> ref_lat;
  bool strict = false;
  std::string input;
  std::string output = "-";

  Seconds utc_offset() const { return parse_utc_offset(timezone); }

  IngestOptions ingest_options() const { return {strict, utc_offset()}; }

  SdsOptions sds_options() const { return {tail_flush, ref_lat}; }

  void validate() const {
    params.validate();
    if (workers == 0) throw ParameterError("--workers must be positive");
  }
};

// Writes through a buffer so a failing command leaves no partial file.
void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << content;
  if (!out) throw DataError("write failed for '" + path + "'");
}

Dataset load(const RunConfig& cfg) {
  if (cfg.input.empty()) throw ParameterError("an input file is required (-i)");
  Dataset data = ingest_file(cfg.input, cfg.ingest_options());
  for (const auto& d : data.diagnostics) std::cerr << "warning: " << d << '\n';
  return data;
}

Projection projection_for(const RunConfig& cfg, const Trajectory& traj) {
  return Projection(cfg.ref_lat.value_or(default_ref_lat(traj)));
}

std::vector<std::vector<MobilityLabel>> sds_labels(const RunConfig& cfg, const Dataset& data) {
  std::vector<std::vector<MobilityLabel>> labels(data.trajectories.size());
  parallel_for(data.trajectories.size(), cfg.workers, [&](std::size_t d) {
    labels[d] = sds_label(data.trajectories[d], cfg.params, cfg.sds_options()).labels;
  });
  return labels;
}

std::string format_fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// ---------------------------------------------------------------------------

int run_label(const RunConfig& cfg) {
  const Dataset data = load(cfg);
  std::ostringstream out;
  write_labels(out, data.trajectories, sds_labels(cfg, data));
  emit(cfg.output, out.str());
  return 0;
}

int run_oracle(const RunConfig& cfg, std::size_t max_records) {
  const Dataset data = load(cfg);
  std::vector<std::vector<MobilityLabel>> labels(data.trajectories.size());
  OracleOptions options{max_records, cfg.ref_lat};
  parallel_for(data.trajectories.size(), cfg.workers, [&](std::size_t d) {
    labels[d] = exact_label(data.trajectories[d], cfg.params, options);
  });
  std::ostringstream out;
  write_labels(out, data.trajectories, labels);
  emit(cfg.output, out.str());
  return 0;
}

int run_stats(const RunConfig& cfg, std::vector<Seconds> delta_ts) {
  const Dataset data = load(cfg);
  if (delta_ts.empty()) delta_ts.push_back(cfg.params.delta_t);
  const auto report =
      sparsity_report(data.trajectories, delta_ts, cfg.params.delta_s, cfg.sds_options(), cfg.workers);
  std::ostringstream out;
  write_sparsity_csv(out, report);
  emit(cfg.output, out.str());
  return 0;
}

struct SimulateArgs {
  std::size_t trajectories = 100;
  Seconds duration = 3 * 86400;
  double speed = 5.0;
  double jitter = 100.0;
  double wait_exponent = 1.8;
  double jump_exponent = 1.75;
  double interval_exponent = 1.6;
  double resolution = 1.0;
  bool no_minima = false;
};

ExperimentConfig experiment_config(const RunConfig& cfg, const SimulateArgs& sim) {
  ExperimentConfig e;
  e.params = cfg.params;
  e.seed = cfg.seed;
  e.workers = cfg.workers;
  e.sds = cfg.sds_options();
  e.trajectories = sim.trajectories;
  e.resolution = sim.resolution;
  e.ctrw.duration = sim.duration;
  e.ctrw.speed = sim.speed;
  e.ctrw.jitter_radius = sim.jitter;
  e.ctrw.wait.exponent = sim.wait_exponent;
  e.ctrw.jump.exponent = sim.jump_exponent;
  e.ctrw.enforce_minima = !sim.no_minima;
  // Keep the truncation minima consistent with the chosen scale.
  e.ctrw.wait.min = std::max(e.ctrw.wait.min, static_cast<double>(cfg.params.delta_t));
  e.ctrw.jump.min = std::max(e.ctrw.jump.min, cfg.params.delta_s);
  e.interval.exponent = sim.interval_exponent;
  return e;
}

int run_simulate(const RunConfig& cfg, const SimulateArgs& sim) {
  const ExperimentConfig e = experiment_config(cfg, sim);
  e.validate();
  std::vector<Trajectory> trajectories(e.trajectories);
  std::vector<std::vector<MobilityLabel>> labels(e.trajectories);
  parallel_for(e.trajectories, cfg.workers, [&](std::size_t i) {
    auto data = simulate_trajectory(e, i);
    trajectories[i] = std::move(data.trajectory);
    labels[i] = std::move(data.truth);
  });
  std::ostringstream out;
  write_dataset(out, trajectories, &labels);
  emit(cfg.output, out.str());
  return 0;
}

int run_resample(const RunConfig& cfg, double rate) {
  const Dataset data = load(cfg);
  std::vector<Trajectory> kept(data.trajectories.size());
  std::vector<std::vector<MobilityLabel>> labels(data.trajectories.size());
  for (std::size_t d = 0; d < data.trajectories.size(); ++d) {
    const auto& traj = data.trajectories[d];
    // Seeded per device so the subset does not depend on the other devices.
    const auto indices = resample_indices(traj.size(), rate, derive_seed(cfg.seed, "resample:" + traj.device()));
    std::vector<TrajectoryRecord> records;
    for (const std::size_t i : indices) {
      records.push_back(traj[i]);
      if (data.labeled) labels[d].push_back(data.labels[d][i]);
    }
    kept[d] = Trajectory(traj.device(), std::move(records));
  }
  std::ostringstream out;
  write_dataset(out, kept, data.labeled ? &labels : nullptr);
  emit(cfg.output, out.str());
  return 0;
}

int run_evaluate(const RunConfig& cfg, const std::string& predicted_path, const std::string& truth_path) {
  auto read = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    return read_labels(in);
  };
  const LabelTable predicted = read(predicted_path);
  const LabelTable truth = read(truth_path);
  if (predicted.rows.size() != truth.rows.size()) {
    throw DataError("prediction has " + std::to_string(predicted.rows.size()) + " rows but truth has " +
                    std::to_string(truth.rows.size()));
  }
  ConfusionCounts counts;
  std::uint64_t skipped = 0;
  for (std::size_t i = 0; i < truth.rows.size(); ++i) {
    const auto& p = predicted.rows[i];
    const auto& t = truth.rows[i];
    if (p.mid != t.mid || p.time != t.time) {
      throw DataError("row mismatch: prediction line " + std::to_string(p.line) + " is (" + p.mid + ", " +
                      std::to_string(p.time) + "), truth line " + std::to_string(t.line) + " is (" + t.mid +
                      ", " + std::to_string(t.time) + ")");
    }
    if (t.label == MobilityLabel::Unlabeled) {
      ++skipped;
      continue;
    }
    counts.add(p.label, t.label);
  }
  const MetricsReport m = metrics_from_counts(counts);
  std::ostringstream out;
  out << "# sparsemob metrics v1\n";
  out << "metric,value\n";
  out << "sp," << format_metric(m.sp) << '\n';
  out << "sr," << format_metric(m.sr) << '\n';
  out << "vp," << format_metric(m.vp) << '\n';
  out << "vr," << format_metric(m.vr) << '\n';
  out << "acc," << format_metric(m.acc) << '\n';
  out << "f1_acc," << format_metric(m.f1_acc) << '\n';
  out << "ts," << counts.ts << '\n';
  out << "fs," << counts.fs << '\n';
  out << "tv," << counts.tv << '\n';
  out << "fv," << counts.fv << '\n';
  out << "stay_abstained," << counts.stay_abstained << '\n';
  out << "travel_abstained," << counts.travel_abstained << '\n';
  out << "truth_unlabeled," << skipped << '\n';
  emit(cfg.output, out.str());
  return 0;
}

int run_removal(const RunConfig& cfg, std::vector<double> delta_ss, std::vector<Seconds> delta_ts) {
  const Dataset data = load(cfg);
  if (delta_ss.empty()) delta_ss.push_back(cfg.params.delta_s);
  if (delta_ts.empty()) delta_ts.push_back(cfg.params.delta_t);
  std::vector<MobilityParams> grid;
  for (const double ds : delta_ss) {
    for (const Seconds dt : delta_ts) grid.push_back({ds, dt});
  }
  const auto results = removal_violation_rate(data.trajectories, grid, cfg.ref_lat, cfg.workers);
  std::ostringstream out;
  write_removal_csv(out, results);
  emit(cfg.output, out.str());
  return 0;
}

int run_bounds(const RunConfig& cfg) {
  const Dataset data = load(cfg);
  std::vector<RecallBounds> bounds(data.trajectories.size());
  parallel_for(data.trajectories.size(), cfg.workers, [&](std::size_t d) {
    bounds[d] = recall_lower_bounds(data.trajectories[d], cfg.params, cfg.sds_options());
  });
  std::ostringstream out;
  out << "# sparsemob bounds v1\n";
  out << "mid,records,stay_bound,travel_bound\n";
  for (std::size_t d = 0; d < bounds.size(); ++d) {
    out << csv_field(data.trajectories[d].device()) << ',' << data.trajectories[d].size() << ','
        << format_fixed(bounds[d].stay_bound) << ',' << format_fixed(bounds[d].travel_bound) << '\n';
  }
  emit(cfg.output, out.str());
  return 0;
}

// Training labels: the file's label column when present, SDS labels otherwise.
std::vector<std::vector<MobilityLabel>> training_labels(const RunConfig& cfg, const Dataset& data) {
  if (data.labeled) return data.labels;
  return sds_labels(cfg, data);
}

int run_baseline_train(const RunConfig& cfg, const std::string& method) {
  const Dataset data = load(cfg);
  const auto labels = training_labels(cfg, data);
  std::ostringstream out;
  if (method == "voting") {
    VotingModel model(cfg.seed, {cfg.utc_offset(), WeekStart::Monday});
    for (std::size_t d = 0; d < data.trajectories.size(); ++d) model.train(data.trajectories[d], labels[d]);
    model.write_csv(out);
  } else {
    std::vector<HmmSequence> sequences(data.trajectories.size());
    const HmmBuckets buckets;
    for (std::size_t d = 0; d < data.trajectories.size(); ++d) {
      const ProjectedTrack track(data.trajectories[d], projection_for(cfg, data.trajectories[d]));
      sequences[d] = {observation_symbols(track.view(), buckets), labels[d]};
    }
    if (sequences.empty()) throw DataError("HMM training needs at least one trajectory");
    HmmModel::train(sequences, buckets).write_csv(out);
  }
  emit(cfg.output, out.str());
  return 0;
}

int run_baseline_predict(const RunConfig& cfg, const std::string& method, const std::string& model_path) {
  const Dataset data = load(cfg);
  std::ifstream model_in(model_path, std::ios::binary);
  if (!model_in) throw DataError("cannot open '" + model_path + "'");
  std::vector<std::vector<MobilityLabel>> labels(data.trajectories.size());
  if (method == "voting") {
    const VotingModel model = VotingModel::read_csv(model_in, cfg.seed, {cfg.utc_offset(), WeekStart::Monday});
    parallel_for(data.trajectories.size(), cfg.workers,
                 [&](std::size_t d) { labels[d] = model.predict(data.trajectories[d]); });
  } else {
    const HmmModel model = HmmModel::read_csv(model_in);
    parallel_for(data.trajectories.size(), cfg.workers, [&](std::size_t d) {
      const ProjectedTrack track(data.trajectories[d], projection_for(cfg, data.trajectories[d]));
      labels[d] = model.predict(track.view());
    });
  }
  std::ostringstream out;
  write_labels(out, data.trajectories, labels);
  emit(cfg.output, out.str());
  return 0;
}

int run_experiment(const RunConfig& cfg, const SimulateArgs& sim, const std::vector<double>& rates) {
  ExperimentConfig e = experiment_config(cfg, sim);
  e.rates = rates;
  const auto rows = resampling_experiment(e);
  std::ostringstream out;
  write_experiment_csv(out, rows);
  emit(cfg.output, out.str());
  return 0;
}

void add_io(CLI::App* cmd, RunConfig& cfg, bool needs_input = true) {
  if (needs_input) cmd->add_option("-i,--input", cfg.input, "input CSV")->required();
  cmd->add_option("-o,--output", cfg.output, "output CSV ('-' for stdout)");
}

void add_simulation(CLI::App* cmd, SimulateArgs& sim) {
  cmd->add_option("--trajectories", sim.trajectories, "number of simulated trajectories")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--duration", sim.duration, "seconds per trajectory")->check(CLI::PositiveNumber);
  cmd->add_option("--speed", sim.speed, "travel speed in m/s");
  cmd->add_option("--jitter", sim.jitter, "stay jitter radius in meters");
  cmd->add_option("--wait-exponent", sim.wait_exponent, "power-law exponent of stay durations");
  cmd->add_option("--jump-exponent", sim.jump_exponent, "power-law exponent of jump lengths");
  cmd->add_option("--interval-exponent", sim.interval_exponent, "power-law exponent of record gaps");
  cmd->add_option("--resolution", sim.resolution, "ground-truth grid spacing in seconds");
  cmd->add_flag("--no-minima", sim.no_minima, "allow waits < delta_t and jumps < delta_s");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stay/travel labeling of sparse trajectories"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value configuration file; flags override it");

  RunConfig cfg;
  app.add_option("--delta-s", cfg.params.delta_s, "spatial scale in meters")->capture_default_str();
  app.add_option("--delta-t", cfg.params.delta_t, "temporal scale in seconds")->capture_default_str();
  app.add_option("--seed", cfg.seed, "root random seed")->capture_default_str();
  app.add_option("--workers", cfg.workers, "worker threads")->capture_default_str();
  app.add_option("--tail-flush", cfg.tail_flush, "emit the final open stay window of a segment")
      ->capture_default_str();
  app.add_option("--timezone", cfg.timezone, "UTC offset for calendar timestamps")->capture_default_str();
  app.add_option("--ref-lat", cfg.ref_lat, "projection reference latitude (default: first record)");
  app.add_flag("--strict", cfg.strict, "fail on any malformed or duplicate row");

  auto* label = app.add_subcommand("label", "label records with SDS");
  add_io(label, cfg);

  std::size_t max_records = 200;
  auto* oracle = app.add_subcommand("oracle", "exact labels for short trajectories");
  add_io(oracle, cfg);
  oracle->add_option("--max-records", max_records, "refuse longer trajectories")->capture_default_str();

  std::vector<Seconds> stats_delta_ts;
  auto* stats = app.add_subcommand("stats", "sparsity, coverage and label-share report");
  add_io(stats, cfg);
  stats->add_option("--delta-ts", stats_delta_ts, "temporal scales for coverage (default --delta-t)")
      ->delimiter(',');

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "generate labeled CTRW trajectories");
  add_io(simulate, cfg, false);
  add_simulation(simulate, sim);

  double rate = 1.0;
  auto* resample_cmd = app.add_subcommand("resample", "keep each record with a probability");
  add_io(resample_cmd, cfg);
  resample_cmd->add_option("--rate", rate, "keep probability")->required()->check(CLI::Range(0.0, 1.0));

  std::string predicted_path;
  std::string truth_path;
  auto* evaluate = app.add_subcommand("evaluate", "score predicted labels against truth");
  evaluate->add_option("--predicted", predicted_path, "label CSV (mid,time,label)")->required();
  evaluate->add_option("--truth", truth_path, "label CSV or labeled dataset")->required();
  evaluate->add_option("-o,--output", cfg.output, "output CSV ('-' for stdout)");

  std::vector<double> removal_delta_ss;
  std::vector<Seconds> removal_delta_ts;
  auto* removal = app.add_subcommand("removal", "remove-one-record check of dense stay windows");
  add_io(removal, cfg);
  removal->add_option("--grid-delta-s", removal_delta_ss, "spatial scales (default --delta-s)")->delimiter(',');
  removal->add_option("--grid-delta-t", removal_delta_ts, "temporal scales (default --delta-t)")->delimiter(',');

  auto* bounds = app.add_subcommand("bounds", "per-trajectory recall lower bounds");
  add_io(bounds, cfg);

  std::string method = "voting";
  std::string model_path;
  auto* baseline = app.add_subcommand("baseline", "voting and HMM baselines");
  baseline->require_subcommand(1);
  baseline->fallthrough();
  auto* train = baseline->add_subcommand("train", "fit a model (labels from the file or from SDS)");
  add_io(train, cfg);
  train->add_option("--method", method, "voting or hmm")->check(CLI::IsMember({"voting", "hmm"}));
  train->fallthrough();
  auto* predict = baseline->add_subcommand("predict", "label records with a trained model");
  add_io(predict, cfg);
  predict->add_option("--method", method, "voting or hmm")->check(CLI::IsMember({"voting", "hmm"}));
  predict->add_option("--model", model_path, "model CSV")->required();
  predict->fallthrough();

  std::vector<double> rates{1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1};
  auto* experiment = app.add_subcommand("experiment", "precision/recall against re-sampling rate");
  add_io(experiment, cfg, false);
  add_simulation(experiment, sim);
  experiment->add_option("--rates", rates, "re-sampling rates")->delimiter(',');

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    cfg.validate();
    if (*label) return run_label(cfg);
    if (*oracle) return run_oracle(cfg, max_records);
    if (*stats) return run_stats(cfg, stats_delta_ts);
    if (*simulate) return run_simulate(cfg, sim);
    if (*resample_cmd) return run_resample(cfg, rate);
    if (*evaluate) return run_evaluate(cfg, predicted_path, truth_path);
    if (*removal) return run_removal(cfg, removal_delta_ss, removal_delta_ts);
    if (*bounds) return run_bounds(cfg);
    if (*train) return run_baseline_train(cfg, method);
    if (*predict) return run_baseline_predict(cfg, method, model_path);
    if (*experiment) return run_experiment(cfg, sim, rates);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const OracleSizeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const UndefinedMetricError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

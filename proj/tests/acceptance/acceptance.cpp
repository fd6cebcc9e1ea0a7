// Acceptance harness: one PASS/FAIL line per criterion. The first argument is
// the path of the sparsemob CLI binary.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "fixtures.hpp"
#include "sparsemob/baselines.hpp"
#include "sparsemob/evaluation.hpp"
#include "sparsemob/oracle.hpp"
#include "sparsemob/parallel.hpp"
#include "sparsemob/sds.hpp"
#include "sparsemob/simulator.hpp"

using namespace sparsemob;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

constexpr auto S = MobilityLabel::Stay;
constexpr auto T = MobilityLabel::Travel;
constexpr auto U = MobilityLabel::Unlabeled;

const MobilityParams kParams{800.0, 1800};

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, value);
  return buf;
}

std::size_t worker_count() { return std::max(1U, std::thread::hardware_concurrency()); }

// ---------------------------------------------------------------------------

std::vector<ExperimentRow> g_rows;

Outcome precision_on_simulation() {
  ExperimentConfig config;
  config.trajectories = 1000;
  config.workers = worker_count();
  const auto start = Clock::now();
  g_rows = resampling_experiment(config);
  const double elapsed = seconds_since(start);
  Outcome out{true, ""};
  std::uint64_t fs = 0, fv = 0;
  for (const auto& row : g_rows) {
    fs += row.all.fs;
    fv += row.all.fv;
    if (!row.metrics.sp || *row.metrics.sp != 1.0 || !row.metrics.vp || *row.metrics.vp != 1.0) {
      out.pass = false;
    }
  }
  out.pass = out.pass && g_rows.size() == config.rates.size() && elapsed < 120.0;
  out.detail = std::to_string(config.trajectories) + " trajectories, false stays " + std::to_string(fs) +
               ", false travels " + std::to_string(fv) + ", " + fmt("%.1f s", elapsed);
  return out;
}

Outcome recall_trend() {
  if (g_rows.empty()) return {false, "experiment did not run"};
  bool ok = true;
  for (const auto pick : {&MetricsReport::sr, &MetricsReport::vr}) {
    for (const auto& row : g_rows) {
      if (!(row.metrics.*pick)) return {false, "undefined recall"};
    }
    const double first = *(g_rows.front().metrics.*pick);
    const double last = *(g_rows.back().metrics.*pick);
    ok = ok && last < first;
    for (std::size_t k = 1; k < g_rows.size(); ++k) {
      ok = ok && *(g_rows[k].metrics.*pick) <= *(g_rows[k - 1].metrics.*pick) + 0.02;
    }
  }
  const auto& a = g_rows.front().metrics;
  const auto& b = g_rows.back().metrics;
  return {ok, "stay recall " + fmt("%.3f", *a.sr) + " -> " + fmt("%.3f", *b.sr) + ", travel recall " +
                  fmt("%.3f", *a.vr) + " -> " + fmt("%.3f", *b.vr)};
}

Outcome oracle_containment() {
  Rng rng(20240601);
  const auto start = Clock::now();
  std::size_t containment = 0, travel = 0, records = 0;
  for (int k = 0; k < 10000; ++k) {
    const auto t = sparsemob::testing::random_track(rng, 30, kParams);
    const TrackView view = t.view();
    const auto labels = sds_label(view, kParams);
    const auto oracle = exact_label(view, kParams);
    for (std::size_t i = 0; i < t.size(); ++i) {
      ++records;
      if (labels[i] == S) {
        containment += oracle[i] != S;
        continue;
      }
      const bool witnessed = sparsemob::testing::brute_travel(view, i, kParams.delta_s, kParams.delta_t);
      travel += (labels[i] == T) != witnessed;
    }
  }
  const double elapsed = seconds_since(start);
  return {containment == 0 && travel == 0 && elapsed < 60.0,
          std::to_string(records) + " records, containment failures " + std::to_string(containment) +
              ", travel mismatches " + std::to_string(travel) + ", " + fmt("%.1f s", elapsed)};
}

// Best full score by enumeration; the path is rebuilt backwards, each step
// taking the predecessor with the best prefix plus transition, ties to Stay.
double score(const HmmParameters& m, const std::vector<std::size_t>& obs, const std::vector<int>& s,
             std::size_t len) {
  double v = m.log_initial[s[0]] + m.log_emission[obs[0]][s[0]];
  for (std::size_t k = 1; k < len; ++k) v = (v + m.log_transition[s[k - 1]][s[k]]) + m.log_emission[obs[k]][s[k]];
  return v;
}

double best_prefix(const HmmParameters& m, const std::vector<std::size_t>& obs, std::size_t k, int last) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < (1ULL << k); ++mask) {
    std::vector<int> s(k + 1, last);
    for (std::size_t j = 0; j < k; ++j) s[j] = static_cast<int>((mask >> j) & 1U);
    best = std::max(best, score(m, obs, s, k + 1));
  }
  return best;
}

Outcome viterbi_enumeration() {
  Rng rng(77);
  const auto start = Clock::now();
  std::size_t mismatches = 0;
  for (int k = 0; k < 1000; ++k) {
    const std::size_t symbols = 1 + rng() % 6;
    HmmParameters m;
    auto logp = [&] { return std::log(0.01 + uniform01(rng)); };
    for (int s = 0; s < 2; ++s) {
      m.log_initial[s] = logp();
      for (int t = 0; t < 2; ++t) m.log_transition[s][t] = logp();
    }
    m.log_emission.resize(symbols);
    for (auto& row : m.log_emission) row = {logp(), logp()};
    const std::size_t n = 1 + rng() % 8;
    std::vector<std::size_t> obs(n);
    for (auto& o : obs) o = rng() % symbols;

    const double end_s = best_prefix(m, obs, n - 1, 0);
    const double end_t = best_prefix(m, obs, n - 1, 1);
    std::vector<int> path(n, 0);
    path[n - 1] = end_t > end_s ? 1 : 0;
    for (std::size_t j = n - 1; j > 0; --j) {
      const double via_s = best_prefix(m, obs, j - 1, 0) + m.log_transition[0][path[j]];
      const double via_t = best_prefix(m, obs, j - 1, 1) + m.log_transition[1][path[j]];
      path[j - 1] = via_t > via_s ? 1 : 0;
    }
    const auto v = viterbi(m, obs);
    mismatches += v.log_probability != std::max(end_s, end_t) || v.states != path;
  }
  const double elapsed = seconds_since(start);
  return {mismatches == 0 && elapsed < 30.0,
          "1000 models, mismatches " + std::to_string(mismatches) + ", " + fmt("%.2f s", elapsed)};
}

Outcome removal_harness() {
  // Stays last at least the largest temporal scale; centers are at least
  // delta_s + 2 * jitter apart, so records of distinct stays never share a window.
  ExperimentConfig config;
  config.trajectories = 300;
  config.ctrw.wait.min = 2700.0;
  config.ctrw.jump.min = 1000.0;
  config.ctrw.jitter_radius = 100.0;
  config.seed = 99;
  std::vector<Trajectory> dataset(config.trajectories);
  parallel_for(config.trajectories, worker_count(), [&](std::size_t i) {
    const auto data = simulate_trajectory(config, i);
    std::vector<TrajectoryRecord> kept;
    for (std::size_t k = 0; k < data.trajectory.size(); ++k) {
      if (data.in_stay[k]) kept.push_back(data.trajectory[k]);
    }
    dataset[i] = Trajectory(data.trajectory.device(), std::move(kept));
  });
  std::vector<MobilityParams> grid;
  for (const double ds : {400.0, 800.0}) {
    for (const Seconds dt : {300, 600, 900, 1800, 2700}) grid.push_back({ds, dt});
  }
  const auto results = removal_violation_rate(dataset, grid, config.ctrw.origin.lat, worker_count());
  bool ok = results.size() == grid.size();
  std::uint64_t tested = 0, violations = 0;
  for (const auto& r : results) {
    ok = ok && r.counts.tested > 0 && r.rate && *r.rate == 0.0;
    tested += r.counts.tested;
    violations += r.counts.violations;
  }
  return {ok, std::to_string(grid.size()) + " scales, tested " + std::to_string(tested) + ", violations " +
                  std::to_string(violations)};
}

std::vector<Trajectory> long_tailed_dataset(std::size_t records) {
  ExperimentConfig config;
  config.seed = 4242;
  std::vector<Trajectory> out;
  std::size_t total = 0;
  for (std::size_t i = 0; total < records; ++i) {
    CtrwConfig ctrw = config.ctrw;
    ctrw.seed = derive_seed(config.seed, "ctrw", i);
    auto schedule = synth_schedule_within(ctrw.duration, config.interval, derive_seed(config.seed, "schedule", i));
    const auto path = apply_jitter(generate_ctrw(ctrw), schedule, ctrw.jitter_radius,
                                   derive_seed(config.seed, "jitter", i));
    if (schedule.times.size() > records - total) schedule.times.resize(records - total);
    out.push_back(observe(path, schedule, "d" + std::to_string(i)));
    total += out.back().size();
  }
  return out;
}

// Seconds per projection and labeling pass over the dataset: passes repeat
// until 0.25 s have elapsed, best of five measurements.
double best_label_time(const std::vector<Trajectory>& data) {
  double best = std::numeric_limits<double>::infinity();
  volatile std::size_t sink = 0;
  for (int run = 0; run < 5; ++run) {
    const auto start = Clock::now();
    int passes = 0;
    double elapsed = 0.0;
    do {
      for (const auto& traj : data) {
        const ProjectedTrack track(traj, Projection(default_ref_lat(traj)));
        const auto labels = sds_label(track.view(), kParams);
        sink = sink + static_cast<std::size_t>(std::count(labels.begin(), labels.end(), S));
      }
      ++passes;
      elapsed = seconds_since(start);
    } while (elapsed < 0.25);
    best = std::min(best, elapsed / passes);
  }
  return best;
}

Outcome scalability() {
  const auto large = long_tailed_dataset(1000000);
  const auto small = long_tailed_dataset(100000);
  const double t_small = best_label_time(small);
  const double t_large = best_label_time(large);
  const double ratio = t_large / t_small;
  std::string detail = "1e5 records " + fmt("%.3f s", t_small) + ", 1e6 records " + fmt("%.3f s", t_large) +
                       ", ratio " + fmt("%.2f", ratio);
  if (t_large > 10.0) detail += " (warning: 1e6 records took over 10 s)";
  return {ratio <= 12.0, detail};
}

Outcome golden_fixtures() {
  using sparsemob::testing::track_1d;
  const auto stay = track_1d({0, 40, 80, 20, 1000}, {0, 600, 1500, 2400, 3000});
  const auto travel = track_1d({0, 1000, 2000}, {0, 600, 1200});
  const bool a = sds_label(stay.view(), kParams) == std::vector<MobilityLabel>{S, S, S, S, U};
  const bool b = exact_label(stay.view(), kParams) == std::vector<MobilityLabel>{S, S, S, S, T};
  const bool c = sds_label(travel.view(), kParams) == std::vector<MobilityLabel>{U, T, U};
  const bool d = exact_label(travel.view(), kParams) == std::vector<MobilityLabel>{T, T, T};
  return {a && b && c && d, std::string("stay fixture ") + (a && b ? "ok" : "wrong") + ", travel fixture " +
                                (c && d ? "ok" : "wrong")};
}

// ---------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome cli_determinism(const std::string& cli) {
  const fs::path dir = fs::temp_directory_path() / ("sparsemob_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string d = dir.string() + "/";
  const std::string sim = " --trajectories 40 --duration 172800";
  // Each entry: output name and arguments; {out} is replaced per run.
  const std::vector<std::pair<std::string, std::string>> commands{
      {"sim.csv", "simulate" + sim + " -o {out}"},
      {"labels.csv", "label -i " + d + "sim.csv -o {out}"},
      {"oracle.csv", "oracle -i " + d + "sim.csv --max-records 100000 -o {out}"},
      {"stats.csv", "stats -i " + d + "sim.csv --delta-ts 900,1800,3600 -o {out}"},
      {"resampled.csv", "resample -i " + d + "sim.csv --rate 0.5 -o {out}"},
      {"eval.csv", "evaluate --predicted " + d + "labels.csv --truth " + d + "sim.csv -o {out}"},
      {"removal.csv", "removal -i " + d + "sim.csv --grid-delta-s 400,800 --grid-delta-t 900,1800 -o {out}"},
      {"bounds.csv", "bounds -i " + d + "sim.csv -o {out}"},
      {"voting.csv", "baseline train --method voting -i " + d + "sim.csv -o {out}"},
      {"voting_pred.csv", "baseline predict --method voting --model " + d + "voting.csv -i " + d + "sim.csv -o {out}"},
      {"hmm.csv", "baseline train --method hmm -i " + d + "sim.csv -o {out}"},
      {"hmm_pred.csv", "baseline predict --method hmm --model " + d + "hmm.csv -i " + d + "sim.csv -o {out}"},
      {"experiment.csv", "experiment" + sim + " --rates 1,0.5,0.1 -o {out}"},
  };
  std::vector<std::string> failed;
  for (const auto& [name, args] : commands) {
    std::string reference;
    bool same = true;
    int run = 0;
    for (const char* workers : {"1", "1", "4"}) {
      std::string a = args;
      const std::string out = d + "run" + std::to_string(run) + "_" + name;
      a.replace(a.find("{out}"), 5, out);
      const std::string cmd = "\"" + cli + "\" --seed 7 --workers " + workers + " " + a + " 2>/dev/null";
      const int rc = std::system(cmd.c_str());
      const std::string text = slurp(out);
      if (rc != 0 || text.empty()) same = false;
      if (run == 0) {
        reference = text;
        fs::copy_file(out, d + name, fs::copy_options::overwrite_existing);
      } else if (text != reference) {
        same = false;
      }
      ++run;
    }
    if (!same) failed.push_back(name);
  }
  fs::remove_all(dir);
  std::string detail = std::to_string(commands.size()) + " commands, 3 runs each (workers 1, 1, 4)";
  for (const auto& f : failed) detail += ", differs: " + f;
  return {failed.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: sparsemob_acceptance <path to sparsemob cli>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"SDS precision on simulation", precision_on_simulation},
      {"recall degradation trend", recall_trend},
      {"oracle containment and travel equivalence", oracle_containment},
      {"Viterbi equals enumeration", viterbi_enumeration},
      {"removal harness on jitter-bounded data", removal_harness},
      {"near-linear labeling runtime", scalability},
      {"hand-trace fixtures", golden_fixtures},
      {"CLI determinism", [&] { return cli_determinism(cli); }},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << "criterion " << k + 1 << ": " << (o.pass ? "PASS" : "FAIL") << " - " << criteria[k].first
              << " (" << o.detail << ")" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}

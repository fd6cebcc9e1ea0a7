#include "sparsemob/baselines.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

#include "sparsemob/csv_io.hpp"
#include "sparsemob/errors.hpp"
#include "sparsemob/random.hpp"

namespace sparsemob {

namespace {

std::int64_t snapped_floor(double v) {
  const double nearest = std::nearbyint(v);
  if (std::abs(v - nearest) < 1e-7) return static_cast<std::int64_t>(nearest);
  return static_cast<std::int64_t>(std::floor(v));
}

Seconds floor_div(Seconds a, Seconds b) {
  Seconds q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

char state_letter(int state) { return state == 0 ? 'S' : 'T'; }

int state_of(MobilityLabel label) { return label == MobilityLabel::Stay ? 0 : 1; }

MobilityLabel label_of(int state) { return state == 0 ? MobilityLabel::Stay : MobilityLabel::Travel; }

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
T parse_number(const std::string& s, std::size_t line) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError("line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

GridCell grid_index(const GeoPoint& p) {
  return {snapped_floor(p.lon * 1000.0), snapped_floor(p.lat * 1000.0)};
}

int hour_index(Seconds epoch, const TimeIndexConfig& config) {
  const Seconds local = epoch + config.utc_offset;
  const Seconds days = floor_div(local, 86400);
  const Seconds hour = (local - days * 86400) / 3600;
  // 1970-01-01 was a Thursday.
  const Seconds shift = config.week_start == WeekStart::Monday ? 3 : 4;
  const Seconds weekday = ((days + shift) % 7 + 7) % 7;
  return static_cast<int>(hour + 24 * weekday);
}

std::int64_t minute_index(Seconds time, Seconds segment_start) {
  if (time < segment_start) throw ParameterError("record precedes its segment start");
  return (time - segment_start) / 60;
}

SpatioTemporalBin make_bin(const TrajectoryRecord& record, const TimeIndexConfig& config) {
  return {grid_index(record.location), hour_index(record.time, config)};
}

// ---------------------------------------------------------------------------

VotingModel::VotingModel(std::uint64_t seed, TimeIndexConfig time) : seed_(seed), time_(time) {}

void VotingModel::add(const SpatioTemporalBin& bin, MobilityLabel label, std::uint64_t count) {
  if (label == MobilityLabel::Unlabeled) return;
  auto& c = counts_[bin];
  (label == MobilityLabel::Stay ? c.stay : c.travel) += count;
}

void VotingModel::train(const Trajectory& traj, const std::vector<MobilityLabel>& labels) {
  if (labels.size() != traj.size()) throw ParameterError("label count differs from records");
  for (std::size_t i = 0; i < traj.size(); ++i) add(make_bin(traj[i], time_), labels[i]);
}

MobilityLabel VotingModel::coin(const SpatioTemporalBin& bin) const {
  std::uint64_t h = splitmix64(seed_);
  h = splitmix64(h ^ static_cast<std::uint64_t>(bin.cell.lon));
  h = splitmix64(h ^ static_cast<std::uint64_t>(bin.cell.lat));
  h = splitmix64(h ^ static_cast<std::uint64_t>(bin.hour));
  return (h & 1U) == 0 ? MobilityLabel::Stay : MobilityLabel::Travel;
}

MobilityLabel VotingModel::predict(const SpatioTemporalBin& bin) const {
  const auto it = counts_.find(bin);
  if (it == counts_.end() || it->second.stay == it->second.travel) return coin(bin);
  return it->second.stay > it->second.travel ? MobilityLabel::Stay : MobilityLabel::Travel;
}

MobilityLabel VotingModel::predict(const TrajectoryRecord& record) const {
  return predict(make_bin(record, time_));
}

std::vector<MobilityLabel> VotingModel::predict(const Trajectory& traj) const {
  std::vector<MobilityLabel> out;
  out.reserve(traj.size());
  for (const auto& record : traj.records()) out.push_back(predict(record));
  return out;
}

void VotingModel::write_csv(std::ostream& out) const {
  out << "# sparsemob voting v1\n";
  out << "grid_lon,grid_lat,hour,stay,travel\n";
  for (const auto& [bin, c] : counts_) {
    out << bin.cell.lon << ',' << bin.cell.lat << ',' << bin.hour << ',' << c.stay << ','
        << c.travel << '\n';
  }
}

VotingModel VotingModel::read_csv(std::istream& in, std::uint64_t seed, TimeIndexConfig time) {
  VotingModel model(seed, time);
  const auto rows = parse_csv(in);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const std::size_t line = rows[r].line;
    if (f.size() != 5) throw DataError("line " + std::to_string(line) + ": expected 5 fields");
    SpatioTemporalBin bin{{parse_number<std::int64_t>(f[0], line), parse_number<std::int64_t>(f[1], line)},
                          parse_number<int>(f[2], line)};
    if (bin.hour < 0 || bin.hour > 167) throw DataError("line " + std::to_string(line) + ": bad hour");
    model.add(bin, MobilityLabel::Stay, parse_number<std::uint64_t>(f[3], line));
    model.add(bin, MobilityLabel::Travel, parse_number<std::uint64_t>(f[4], line));
  }
  return model;
}

// ---------------------------------------------------------------------------

void HmmBuckets::validate() const {
  if (!std::is_sorted(distance_edges.begin(), distance_edges.end()) ||
      std::adjacent_find(distance_edges.begin(), distance_edges.end()) != distance_edges.end()) {
    throw ParameterError("distance bucket edges must be strictly increasing");
  }
  if (!std::is_sorted(gap_edges.begin(), gap_edges.end()) ||
      std::adjacent_find(gap_edges.begin(), gap_edges.end()) != gap_edges.end()) {
    throw ParameterError("gap bucket edges must be strictly increasing");
  }
}

std::size_t HmmBuckets::symbol(double distance, Seconds gap) const {
  const auto d = static_cast<std::size_t>(
      std::upper_bound(distance_edges.begin(), distance_edges.end(), distance) - distance_edges.begin());
  const auto g = static_cast<std::size_t>(
      std::lower_bound(gap_edges.begin(), gap_edges.end(), gap) - gap_edges.begin());
  return d * (gap_edges.size() + 1) + g;
}

std::vector<std::size_t> observation_symbols(TrackView track, const HmmBuckets& buckets) {
  std::vector<std::size_t> symbols;
  symbols.reserve(track.size());
  for (std::size_t i = 0; i < track.size(); ++i) {
    symbols.push_back(i == 0 ? buckets.start_symbol()
                             : buckets.symbol(distance(track.points[i - 1], track.points[i]),
                                              track.times[i] - track.times[i - 1]));
  }
  return symbols;
}

ViterbiResult viterbi(const HmmParameters& model, const std::vector<std::size_t>& observations) {
  ViterbiResult result;
  const std::size_t n = observations.size();
  if (n == 0) return result;
  for (const std::size_t o : observations) {
    if (o >= model.log_emission.size()) throw ParameterError("observation symbol outside the model");
  }

  const auto& e = model.log_emission;
  const auto& a = model.log_transition;
  std::array<double, 2> delta{model.log_initial[0] + e[observations[0]][0],
                              model.log_initial[1] + e[observations[0]][1]};
  std::vector<std::array<int, 2>> back(n);
  for (std::size_t k = 1; k < n; ++k) {
    std::array<double, 2> next{};
    for (int s = 0; s < 2; ++s) {
      const double via_stay = delta[0] + a[0][s];
      const double via_travel = delta[1] + a[1][s];
      const int from = via_travel > via_stay ? 1 : 0;
      next[s] = (from == 1 ? via_travel : via_stay) + e[observations[k]][s];
      back[k][s] = from;
    }
    delta = next;
  }

  int state = delta[1] > delta[0] ? 1 : 0;
  result.log_probability = delta[state];
  result.states.assign(n, 0);
  for (std::size_t k = n; k-- > 0;) {
    result.states[k] = state;
    if (k > 0) state = back[k][state];
  }
  return result;
}

HmmModel::HmmModel(HmmBuckets buckets, HmmParameters parameters)
    : buckets_(std::move(buckets)), parameters_(std::move(parameters)) {
  buckets_.validate();
  if (parameters_.log_emission.size() != buckets_.symbols()) {
    throw ParameterError("emission table does not match the observation alphabet");
  }
}

HmmModel HmmModel::train(const std::vector<HmmSequence>& data, const HmmBuckets& buckets) {
  buckets.validate();
  if (data.empty()) throw ParameterError("HMM training needs at least one sequence");
  const std::size_t m = buckets.symbols();

  std::array<double, 2> initial{1.0, 1.0};
  std::array<std::array<double, 2>, 2> transition{{{1.0, 1.0}, {1.0, 1.0}}};
  std::vector<std::array<double, 2>> emission(m, {1.0, 1.0});

  for (const auto& seq : data) {
    if (seq.symbols.size() != seq.labels.size()) {
      throw ParameterError("sequence symbols and labels differ in length");
    }
    bool first = true;
    for (std::size_t k = 0; k < seq.symbols.size(); ++k) {
      if (seq.symbols[k] >= m) throw ParameterError("observation symbol outside the alphabet");
      if (seq.labels[k] == MobilityLabel::Unlabeled) continue;
      const int s = state_of(seq.labels[k]);
      if (first) {
        initial[s] += 1.0;
        first = false;
      }
      emission[seq.symbols[k]][s] += 1.0;
      if (k > 0 && seq.labels[k - 1] != MobilityLabel::Unlabeled) {
        transition[state_of(seq.labels[k - 1])][s] += 1.0;
      }
    }
  }

  HmmParameters p;
  const double init_total = initial[0] + initial[1];
  for (int s = 0; s < 2; ++s) {
    p.log_initial[s] = std::log(initial[s] / init_total);
    const double row = transition[s][0] + transition[s][1];
    for (int t = 0; t < 2; ++t) p.log_transition[s][t] = std::log(transition[s][t] / row);
  }
  p.log_emission.assign(m, {0.0, 0.0});
  for (int s = 0; s < 2; ++s) {
    double total = 0.0;
    for (std::size_t o = 0; o < m; ++o) total += emission[o][s];
    for (std::size_t o = 0; o < m; ++o) p.log_emission[o][s] = std::log(emission[o][s] / total);
  }
  return HmmModel(buckets, std::move(p));
}

std::vector<MobilityLabel> HmmModel::predict(const std::vector<std::size_t>& symbols) const {
  const auto path = viterbi(parameters_, symbols);
  std::vector<MobilityLabel> labels;
  labels.reserve(path.states.size());
  for (const int s : path.states) labels.push_back(label_of(s));
  return labels;
}

std::vector<MobilityLabel> HmmModel::predict(TrackView track) const {
  return predict(observation_symbols(track, buckets_));
}

void HmmModel::write_csv(std::ostream& out) const {
  out << "# sparsemob hmm v1\n";
  out << "table,key,state,value,log_value\n";
  for (std::size_t i = 0; i < buckets_.distance_edges.size(); ++i) {
    out << "distance_edge," << i << ",," << exact(buckets_.distance_edges[i]) << ",\n";
  }
  for (std::size_t i = 0; i < buckets_.gap_edges.size(); ++i) {
    out << "gap_edge," << i << ",," << buckets_.gap_edges[i] << ",\n";
  }
  const auto& p = parameters_;
  for (int s = 0; s < 2; ++s) {
    out << "initial,," << state_letter(s) << ',' << exact(std::exp(p.log_initial[s])) << ','
        << exact(p.log_initial[s]) << '\n';
  }
  for (int s = 0; s < 2; ++s) {
    for (int t = 0; t < 2; ++t) {
      out << "transition," << state_letter(s) << ',' << state_letter(t) << ','
          << exact(std::exp(p.log_transition[s][t])) << ',' << exact(p.log_transition[s][t]) << '\n';
    }
  }
  for (std::size_t o = 0; o < p.log_emission.size(); ++o) {
    for (int s = 0; s < 2; ++s) {
      out << "emission," << o << ',' << state_letter(s) << ',' << exact(std::exp(p.log_emission[o][s]))
          << ',' << exact(p.log_emission[o][s]) << '\n';
    }
  }
}

HmmModel HmmModel::read_csv(std::istream& in) {
  const auto rows = parse_csv(in);
  HmmBuckets buckets;
  buckets.distance_edges.clear();
  buckets.gap_edges.clear();
  HmmParameters p;
  std::vector<std::array<double, 2>> emission;
  std::vector<std::array<bool, 2>> seen;

  auto state = [](const std::string& s, std::size_t line) {
    if (s == "S") return 0;
    if (s == "T") return 1;
    throw DataError("line " + std::to_string(line) + ": bad state '" + s + "'");
  };

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const std::size_t line = rows[r].line;
    if (f.size() != 5) throw DataError("line " + std::to_string(line) + ": expected 5 fields");
    const std::string& table = f[0];
    if (table == "distance_edge") {
      buckets.distance_edges.push_back(parse_number<double>(f[3], line));
    } else if (table == "gap_edge") {
      buckets.gap_edges.push_back(parse_number<Seconds>(f[3], line));
    } else if (table == "initial") {
      p.log_initial[state(f[2], line)] = parse_number<double>(f[4], line);
    } else if (table == "transition") {
      p.log_transition[state(f[1], line)][state(f[2], line)] = parse_number<double>(f[4], line);
    } else if (table == "emission") {
      const auto o = parse_number<std::size_t>(f[1], line);
      if (o >= emission.size()) {
        emission.resize(o + 1, {0.0, 0.0});
        seen.resize(o + 1, {false, false});
      }
      const int s = state(f[2], line);
      emission[o][s] = parse_number<double>(f[4], line);
      seen[o][s] = true;
    } else {
      throw DataError("line " + std::to_string(line) + ": unknown table '" + table + "'");
    }
  }
  for (const auto& s : seen) {
    if (!s[0] || !s[1]) throw DataError("HMM file is missing emission entries");
  }
  p.log_emission = std::move(emission);
  try {
    return HmmModel(std::move(buckets), std::move(p));
  } catch (const ParameterError& e) {
    throw DataError(std::string("inconsistent HMM file: ") + e.what());
  }
}

}  // namespace sparsemob

#include "sparsemob/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "sparsemob/errors.hpp"

namespace sparsemob {

void PowerLaw::validate() const {
  if (!(exponent > 1.0) || !std::isfinite(exponent)) {
    throw ParameterError("power-law exponent must be > 1, got " + std::to_string(exponent));
  }
  if (!(min > 0.0) || !(max > min) || !std::isfinite(max)) {
    throw ParameterError("power-law bounds need 0 < min < max, got [" + std::to_string(min) +
                         ", " + std::to_string(max) + "]");
  }
}

double sample_truncated_power_law(double exponent, double xmin, double xmax, double u) {
  PowerLaw{exponent, xmin, xmax}.validate();
  if (!(u >= 0.0 && u <= 1.0)) {
    throw ParameterError("uniform draw must lie in [0, 1], got " + std::to_string(u));
  }
  const double e = 1.0 - exponent;
  const double lo = std::pow(xmin, e);
  const double hi = std::pow(xmax, e);
  const double x = std::pow(lo - u * (lo - hi), 1.0 / e);
  return std::clamp(x, xmin, xmax);
}

double sample(const PowerLaw& law, Rng& rng) {
  return sample_truncated_power_law(law.exponent, law.min, law.max, uniform01(rng));
}

void CtrwConfig::validate(const MobilityParams& params) const {
  params.validate();
  wait.validate();
  jump.validate();
  if (!(speed > 0.0)) throw ParameterError("speed must be positive");
  if (duration <= 0) throw ParameterError("duration must be positive");
  if (!(jitter_radius >= 0.0)) throw ParameterError("jitter radius must be non-negative");
  if (!(jitter_radius < params.delta_s / 2.0)) {
    throw ParameterError("jitter radius must be strictly below delta_s / 2");
  }
  if (enforce_minima) {
    if (wait.min < static_cast<double>(params.delta_t)) {
      throw ParameterError("wait minimum must be >= delta_t when minima are enforced");
    }
    if (jump.min < params.delta_s) {
      throw ParameterError("jump minimum must be >= delta_s when minima are enforced");
    }
  }
  if (!is_valid(origin)) throw ParameterError("simulation origin is not a valid coordinate");
}

namespace {

PlanarPoint lerp(const PlanarPoint& a, const PlanarPoint& b, double s) {
  return {a.x + (b.x - a.x) * s, a.y + (b.y - a.y) * s};
}

PlanarPoint leg_position(const TravelLeg& leg, double t) {
  const double span = static_cast<double>(leg.end - leg.start);
  const double s = span > 0.0 ? (t - static_cast<double>(leg.start)) / span : 0.0;
  return lerp(leg.from, leg.to, s);
}

PlanarPoint held_position(const StayPeriod& stay, const HeldOffset& held) {
  return {stay.center.x + held.offset.x, stay.center.y + held.offset.y};
}

PlanarPoint stay_position(const StayPeriod& stay, double t) {
  auto it = std::upper_bound(stay.offsets.begin(), stay.offsets.end(), t,
                             [](double value, const HeldOffset& h) {
                               return value < static_cast<double>(h.time);
                             });
  if (it == stay.offsets.begin()) return stay.center;
  return held_position(stay, *std::prev(it));
}

}  // namespace

long GroundTruthPath::stay_index(Seconds t) const {
  if (stays.empty()) return -1;
  auto it = std::upper_bound(stays.begin(), stays.end(), t,
                             [](Seconds value, const StayPeriod& s) { return value < s.start; });
  if (it == stays.begin()) return -1;
  const auto idx = static_cast<long>(std::distance(stays.begin(), it)) - 1;
  const auto& stay = stays[static_cast<std::size_t>(idx)];
  // The final instant belongs to the last phase even though phases are half-open.
  const bool last_phase = static_cast<std::size_t>(idx) + 1 == stays.size() &&
                          legs.size() < stays.size();
  if (t < stay.end || (last_phase && t == stay.end)) return idx;
  return -1;
}

bool GroundTruthPath::in_stay(Seconds t) const { return stay_index(t) >= 0; }

PlanarPoint GroundTruthPath::position(double t) const {
  if (stays.empty()) return {};
  auto it = std::upper_bound(stays.begin(), stays.end(), t, [](double value, const StayPeriod& s) {
    return value < static_cast<double>(s.start);
  });
  const std::size_t idx = it == stays.begin() ? 0 : static_cast<std::size_t>(std::distance(stays.begin(), it)) - 1;
  const auto& stay = stays[idx];
  if (t < static_cast<double>(stay.end) || idx >= legs.size()) return stay_position(stay, t);
  return leg_position(legs[idx], t);
}

void SamplingSchedule::validate() const {
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] <= times[i - 1]) throw ParameterError("sampling schedule must be strictly increasing");
  }
  if (!times.empty() && times.front() < 0) throw ParameterError("sampling schedule starts before 0");
}

GroundTruthPath generate_ctrw(const CtrwConfig& config) {
  config.wait.validate();
  config.jump.validate();
  if (!(config.speed > 0.0) || config.duration <= 0) {
    throw ParameterError("CTRW needs positive speed and duration");
  }
  Rng rng(config.seed);
  GroundTruthPath path;
  path.origin = config.origin;
  path.duration = config.duration;

  const double half = config.start_extent / 2.0;
  PlanarPoint center{(uniform01(rng) * 2.0 - 1.0) * half, (uniform01(rng) * 2.0 - 1.0) * half};
  Seconds t = 0;
  while (t < config.duration) {
    const auto wait = static_cast<Seconds>(std::ceil(sample(config.wait, rng)));
    StayPeriod stay{center, t, std::min(t + wait, config.duration), {}};
    path.stays.push_back(stay);
    t = stay.end;
    if (t >= config.duration) break;

    const double length = sample(config.jump, rng);
    const double theta = 2.0 * std::numbers::pi * uniform01(rng);
    const PlanarPoint target{center.x + length * std::cos(theta), center.y + length * std::sin(theta)};
    const auto travel_time = std::max<Seconds>(1, static_cast<Seconds>(std::ceil(length / config.speed)));
    TravelLeg leg{center, target, t, t + travel_time, length / static_cast<double>(travel_time)};
    if (leg.end > config.duration) {
      const double s = static_cast<double>(config.duration - t) / static_cast<double>(travel_time);
      leg.to = lerp(center, target, s);
      leg.end = config.duration;
    }
    path.legs.push_back(leg);
    center = leg.to;
    t = leg.end;
  }
  return path;
}

namespace {

// Grid spacing 1/steps seconds.
std::int64_t steps_per_second(double resolution) {
  if (!(resolution > 0.0 && resolution <= 1.0)) {
    throw ParameterError("resolution must lie in (0, 1] seconds");
  }
  const double inv = 1.0 / resolution;
  const auto steps = static_cast<std::int64_t>(std::llround(inv));
  if (std::abs(inv - static_cast<double>(steps)) > 1e-9) {
    throw ParameterError("1 / resolution must be an integer");
  }
  return steps;
}

// The path cut into constant (hold) and linear (leg) pieces on the grid, with
// positions already mapped through the lon/lat round trip the records take.
class GridPath {
 public:
  struct Piece {
    std::int64_t g0 = 0;
    std::int64_t g1 = 0;  // exclusive
    bool line = false;
    PlanarPoint pos;        // hold pieces
    std::size_t leg = 0;    // line pieces
    std::size_t group = 0;
  };
  struct Group {
    std::size_t first_piece = 0;
    bool stay = false;
    PlanarPoint center;
    double radius = 0.0;  // max hold distance from center
  };

  GridPath(const GroundTruthPath& path, std::int64_t steps)
      : path_(path), frame_(path.origin), steps_(steps), last_(path.duration * steps) {
    for (std::size_t i = 0; i < path.stays.size(); ++i) {
      add_stay(path.stays[i]);
      if (i < path.legs.size()) add_leg(i);
    }
    if (!pieces_.empty()) pieces_.back().g1 = last_ + 1;
  }

  std::int64_t last() const { return last_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  const std::vector<Group>& groups() const { return groups_; }

  double time_of(std::int64_t k) const {
    return static_cast<double>(k) / static_cast<double>(steps_);
  }

  PlanarPoint line_pos(const Piece& piece, std::int64_t k) const {
    return frame_.observed(leg_position(path_.legs[piece.leg], time_of(k)));
  }

  PlanarPoint pos(const Piece& piece, std::int64_t k) const {
    return piece.line ? line_pos(piece, k) : piece.pos;
  }

  std::size_t piece_at(std::int64_t k) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), k,
                               [](std::int64_t v, const Piece& p) { return v < p.g0; });
    return static_cast<std::size_t>(std::distance(pieces_.begin(), it)) - 1;
  }

  // Grid index on a line piece closest to p (clamped to the piece).
  std::int64_t closest_on_line(const Piece& piece, const PlanarPoint& p) const {
    const auto& leg = path_.legs[piece.leg];
    const PlanarPoint a = frame_.observed(leg.from);
    const PlanarPoint b = frame_.observed(leg.to);
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    const double s = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    const double t = static_cast<double>(leg.start) + s * static_cast<double>(leg.end - leg.start);
    const double k = std::floor(t * static_cast<double>(steps_));
    return std::clamp(static_cast<std::int64_t>(std::max(k, -1.0)), piece.g0, piece.g1 - 1);
  }

 private:
  void add_hold(std::int64_t g0, std::int64_t g1, const PlanarPoint& pos) {
    if (g1 <= g0) return;
    Piece piece;
    piece.g0 = g0;
    piece.g1 = g1;
    piece.pos = pos;
    piece.group = groups_.size() - 1;
    auto& group = groups_.back();
    group.radius = std::max(group.radius, distance(group.center, pos));
    pieces_.push_back(piece);
  }

  void add_stay(const StayPeriod& stay) {
    Group group;
    group.first_piece = pieces_.size();
    group.stay = true;
    group.center = frame_.observed(stay.center);
    groups_.push_back(group);
    std::int64_t g = stay.start * steps_;
    PlanarPoint current = groups_.back().center;
    for (const auto& held : stay.offsets) {
      const std::int64_t gh = held.time * steps_;
      add_hold(g, gh, current);
      g = std::max(g, gh);
      current = frame_.observed(held_position(stay, held));
    }
    add_hold(g, stay.end * steps_, current);
  }

  void add_leg(std::size_t index) {
    const auto& leg = path_.legs[index];
    Group group;
    group.first_piece = pieces_.size();
    groups_.push_back(group);
    Piece piece;
    piece.g0 = leg.start * steps_;
    piece.g1 = leg.end * steps_;
    piece.line = true;
    piece.leg = index;
    piece.group = groups_.size() - 1;
    if (piece.g1 > piece.g0) pieces_.push_back(piece);
  }

  const GroundTruthPath& path_;
  LocalFrame frame_;
  std::int64_t steps_;
  std::int64_t last_;
  std::vector<Piece> pieces_;
  std::vector<Group> groups_;
};

// For every grid index e, the largest j <= e' <= e such that some pair
// (j, e') is at distance >= delta_s ("latest conflict", prefix maximum).
// A grid window [a, b] is conflict-free iff conflicts[b] < a.
class ConflictScan {
 public:
  ConflictScan(const GridPath& grid, double delta_s) : grid_(grid), delta_s_(delta_s) {}

  std::vector<std::int64_t> run() const {
    std::vector<std::int64_t> prefix(static_cast<std::size_t>(grid_.last() + 1), -1);
    std::int64_t best = -1;
    const auto& pieces = grid_.pieces();
    for (std::size_t pi = 0; pi < pieces.size(); ++pi) {
      const auto& piece = pieces[pi];
      if (!piece.line) {
        best = std::max(best, scan_back(piece.pos, pi, best));
        std::fill(prefix.begin() + piece.g0, prefix.begin() + piece.g1, best);
        continue;
      }
      for (std::int64_t k = piece.g0; k < piece.g1; ++k) {
        const PlanarPoint p = grid_.line_pos(piece, k);
        std::int64_t found = -1;
        const std::int64_t lo = std::max(piece.g0, best + 1);
        // Along one straight leg the distance to p shrinks toward k.
        if (lo < k && far(grid_.line_pos(piece, lo), p)) {
          found = last_far(piece, p, lo, k - 1);
        }
        if (found < 0) found = scan_back(p, pi, best);
        best = std::max(best, found);
        prefix[static_cast<std::size_t>(k)] = best;
      }
    }
    return prefix;
  }

 private:
  bool far(const PlanarPoint& a, const PlanarPoint& b) const { return distance(a, b) >= delta_s_; }

  // Largest j in [lo, hi] with far(pos(j), p), given far holds at lo and the
  // far set is a prefix of [lo, hi].
  std::int64_t last_far(const GridPath::Piece& piece, const PlanarPoint& p, std::int64_t lo,
                        std::int64_t hi) const {
    while (lo < hi) {
      const std::int64_t mid = lo + (hi - lo + 1) / 2;
      if (far(grid_.line_pos(piece, mid), p)) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    return lo;
  }

  // Latest grid index before piece `pi` that conflicts with p, or -1 if none
  // exceeds `floor`.
  std::int64_t scan_back(const PlanarPoint& p, std::size_t pi, std::int64_t floor) const {
    const auto& pieces = grid_.pieces();
    const auto& groups = grid_.groups();
    std::size_t q = pi;
    while (q-- > 0) {
      const auto& piece = pieces[q];
      if (piece.g1 - 1 <= floor) return -1;
      const auto& group = groups[piece.group];
      if (group.stay && distance(p, group.center) + group.radius < delta_s_) {
        q = group.first_piece;
        continue;
      }
      if (!piece.line) {
        if (far(piece.pos, p)) return piece.g1 - 1;
        continue;
      }
      const std::int64_t last = piece.g1 - 1;
      if (far(grid_.line_pos(piece, last), p)) return last;
      // Distance along the line is convex with its minimum near `turn`; the
      // far set is a prefix of [g0, turn].
      const std::int64_t turn = grid_.closest_on_line(piece, p);
      const std::int64_t lo = std::max(piece.g0, floor + 1);
      if (lo > turn || !far(grid_.line_pos(piece, lo), p)) continue;
      return last_far(piece, p, lo, turn);
    }
    return -1;
  }

  const GridPath& grid_;
  double delta_s_;
};

}  // namespace

std::vector<MobilityLabel> continuous_labels(const GroundTruthPath& path,
                                             const SamplingSchedule& times,
                                             const MobilityParams& params, double resolution) {
  params.validate();
  times.validate();
  const std::int64_t steps = steps_per_second(resolution);
  const GridPath grid(path, steps);
  const std::int64_t n = grid.last();
  const std::int64_t window = params.delta_t * steps;

  std::vector<MobilityLabel> labels(times.times.size(), MobilityLabel::Travel);
  if (n < window || grid.pieces().empty()) {
    for (const Seconds t : times.times) {
      if (t > path.duration) throw ParameterError("timestamp beyond the path duration");
    }
    return labels;
  }

  const auto conflicts = ConflictScan(grid, params.delta_s).run();
  // open[a + 1] - open[lo] counts conflict-free windows starting in [lo, a].
  std::vector<std::int64_t> open(static_cast<std::size_t>(n - window + 2), 0);
  for (std::int64_t a = 0; a <= n - window; ++a) {
    const bool free = conflicts[static_cast<std::size_t>(a + window)] < a;
    open[static_cast<std::size_t>(a + 1)] = open[static_cast<std::size_t>(a)] + (free ? 1 : 0);
  }
  for (std::size_t i = 0; i < times.times.size(); ++i) {
    const Seconds t = times.times[i];
    if (t < 0 || t > path.duration) {
      throw ParameterError("timestamp " + std::to_string(t) + " outside the path duration");
    }
    const std::int64_t k = t * steps;
    const std::int64_t lo = std::max<std::int64_t>(0, k - window);
    const std::int64_t hi = std::min(k, n - window);
    if (lo <= hi && open[static_cast<std::size_t>(hi + 1)] - open[static_cast<std::size_t>(lo)] > 0) {
      labels[i] = MobilityLabel::Stay;
    }
  }
  return labels;
}

double path_diameter(const GroundTruthPath& path, double from, double to, double resolution) {
  const std::int64_t steps = steps_per_second(resolution);
  const GridPath grid(path, steps);
  const auto g_from = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(from * static_cast<double>(steps))));
  const auto g_to = std::min(grid.last(), static_cast<std::int64_t>(std::floor(to * static_cast<double>(steps))));
  if (g_from > g_to || grid.pieces().empty()) return 0.0;

  // The hull of each piece's grid points is spanned by its clipped ends.
  std::vector<PlanarPoint> vertices;
  for (std::size_t pi = grid.piece_at(g_from); pi < grid.pieces().size(); ++pi) {
    const auto& piece = grid.pieces()[pi];
    if (piece.g0 > g_to) break;
    const std::int64_t a = std::max(piece.g0, g_from);
    const std::int64_t b = std::min(piece.g1 - 1, g_to);
    vertices.push_back(grid.pos(piece, a));
    if (piece.line && b != a) vertices.push_back(grid.pos(piece, b));
  }
  double diameter = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < vertices.size(); ++j) {
      diameter = std::max(diameter, distance(vertices[i], vertices[j]));
    }
  }
  return diameter;
}

GroundTruthPath apply_jitter(const GroundTruthPath& path, const SamplingSchedule& times,
                             double radius, std::uint64_t seed) {
  if (!(radius >= 0.0)) throw ParameterError("jitter radius must be non-negative");
  times.validate();
  GroundTruthPath jittered = path;
  Rng rng(seed);
  for (const Seconds t : times.times) {
    const long idx = jittered.stay_index(t);
    if (idx < 0 || t >= jittered.stays[static_cast<std::size_t>(idx)].end) continue;
    // sqrt(u) with u < 1 keeps the offset strictly inside the disk.
    const double r = radius * std::sqrt(uniform01(rng));
    const double theta = 2.0 * std::numbers::pi * uniform01(rng);
    auto& offsets = jittered.stays[static_cast<std::size_t>(idx)].offsets;
    HeldOffset held{t, {r * std::cos(theta), r * std::sin(theta)}};
    auto it = std::lower_bound(offsets.begin(), offsets.end(), t,
                               [](const HeldOffset& h, Seconds v) { return h.time < v; });
    if (it != offsets.end() && it->time == t) {
      *it = held;
    } else {
      offsets.insert(it, held);
    }
  }
  return jittered;
}

Trajectory observe(const GroundTruthPath& path, const SamplingSchedule& times,
                   const std::string& device) {
  times.validate();
  const LocalFrame frame(path.origin);
  std::vector<TrajectoryRecord> records;
  records.reserve(times.times.size());
  for (const Seconds t : times.times) {
    if (t < 0 || t > path.duration) {
      throw ParameterError("timestamp " + std::to_string(t) + " outside the path duration");
    }
    records.push_back({t, frame.to_geo(path.position(static_cast<double>(t)))});
  }
  return Trajectory(device, std::move(records));
}

SampledTrajectory sample_at(const GroundTruthPath& path, const SamplingSchedule& times,
                            const SampleOptions& options) {
  const GroundTruthPath jittered = apply_jitter(path, times, options.jitter_radius, options.seed);
  SampledTrajectory out;
  out.trajectory = observe(jittered, times, options.device);
  out.truth = continuous_labels(jittered, times, options.params, options.resolution);
  out.in_stay.reserve(times.times.size());
  for (const Seconds t : times.times) out.in_stay.push_back(jittered.in_stay(t));
  return out;
}

std::vector<std::size_t> resample_indices(std::size_t count, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw ParameterError("re-sampling rate must lie in [0, 1]");
  Rng rng(seed);
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < count; ++i) {
    if (uniform01(rng) < rate) kept.push_back(i);
  }
  return kept;
}

SampledTrajectory resample(const SampledTrajectory& data, double rate, std::uint64_t seed) {
  SampledTrajectory out;
  std::vector<TrajectoryRecord> kept;
  for (const std::size_t i : resample_indices(data.trajectory.size(), rate, seed)) {
    kept.push_back(data.trajectory[i]);
    if (i < data.truth.size()) out.truth.push_back(data.truth[i]);
    if (i < data.in_stay.size()) out.in_stay.push_back(data.in_stay[i]);
  }
  out.trajectory = Trajectory(data.trajectory.device(), std::move(kept));
  return out;
}

SamplingSchedule synth_schedule(std::size_t count, const PowerLaw& interval, std::uint64_t seed) {
  interval.validate();
  Rng rng(seed);
  SamplingSchedule schedule;
  schedule.times.reserve(count);
  Seconds t = 0;
  for (std::size_t i = 0; i < count; ++i) {
    schedule.times.push_back(t);
    t += std::max<Seconds>(1, static_cast<Seconds>(std::ceil(sample(interval, rng))));
  }
  return schedule;
}

SamplingSchedule synth_schedule_within(Seconds duration, const PowerLaw& interval,
                                       std::uint64_t seed) {
  interval.validate();
  Rng rng(seed);
  SamplingSchedule schedule;
  for (Seconds t = 0; t <= duration;
       t += std::max<Seconds>(1, static_cast<Seconds>(std::ceil(sample(interval, rng))))) {
    schedule.times.push_back(t);
  }
  return schedule;
}

double fit_power_law_exponent(const std::vector<double>& samples, double xmin) {
  if (!(xmin > 0.0)) throw ParameterError("xmin must be positive");
  if (samples.size() < 2) throw ParameterError("exponent fit needs at least two samples");
  double log_sum = 0.0;
  for (const double x : samples) {
    if (!(x >= xmin)) throw ParameterError("sample below xmin in exponent fit");
    log_sum += std::log(x / xmin);
  }
  if (!(log_sum > 0.0)) {
    throw UndefinedMetricError("all samples equal xmin; the exponent estimate diverges");
  }
  return 1.0 + static_cast<double>(samples.size()) / log_sum;
}

}  // namespace sparsemob

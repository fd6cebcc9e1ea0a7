#include "fixtures.hpp"

#include <algorithm>
#include <cmath>

namespace sparsemob::testing {

OwnedTrack track_1d(const std::vector<double>& xs, const std::vector<Seconds>& times) {
  OwnedTrack t;
  t.times = times;
  for (const double x : xs) t.points.push_back({x, 0.0});
  return t;
}

OwnedTrack random_track(Rng& rng, std::size_t max_len, const MobilityParams& params) {
  const auto len = 1 + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(max_len));
  const double ds = params.delta_s;
  const auto dt = static_cast<double>(params.delta_t);
  OwnedTrack t;
  Seconds now = static_cast<Seconds>(uniform01(rng) * 1000.0);
  PlanarPoint center{0.0, 0.0};
  for (std::size_t i = 0; i < std::min<std::size_t>(len, max_len); ++i) {
    if (i > 0) {
      const double u = uniform01(rng);
      double gap;
      if (u < 0.55) {
        gap = 1.0 + uniform01(rng) * dt / 3.0;
      } else if (u < 0.85) {
        gap = dt * (0.5 + uniform01(rng));
      } else {
        gap = dt * (1.0 + 6.0 * uniform01(rng));
      }
      now += std::max<Seconds>(1, static_cast<Seconds>(gap));
    }
    if (uniform01(rng) < 0.2) {
      const double theta = 2.0 * std::numbers::pi * uniform01(rng);
      const double jump = ds * (0.2 + 2.5 * uniform01(rng));
      center = {center.x + jump * std::cos(theta), center.y + jump * std::sin(theta)};
    }
    const double r = ds * 0.45 * uniform01(rng);
    const double phi = 2.0 * std::numbers::pi * uniform01(rng);
    t.times.push_back(now);
    t.points.push_back({center.x + r * std::cos(phi), center.y + r * std::sin(phi)});
  }
  return t;
}

Trajectory trajectory_from_track(const OwnedTrack& track, double ref_lat, const std::string& device) {
  const Projection projection(ref_lat);
  const double base_y = ref_lat * kMetersPerDegree;
  std::vector<TrajectoryRecord> records;
  for (std::size_t i = 0; i < track.size(); ++i) {
    const PlanarPoint p{track.points[i].x + 116.4 * std::cos(ref_lat * std::numbers::pi / 180.0) *
                                                kMetersPerDegree,
                        track.points[i].y + base_y};
    records.push_back({track.times[i], projection.unproject(p)});
  }
  return Trajectory(device, std::move(records));
}

namespace {

bool window_tight(TrackView t, std::size_t p, std::size_t q, double spatial) {
  for (std::size_t a = p; a <= q; ++a) {
    for (std::size_t b = a + 1; b <= q; ++b) {
      if (distance(t.points[a], t.points[b]) >= spatial) return false;
    }
  }
  return true;
}

bool window_dense(TrackView t, std::size_t p, std::size_t q, Seconds delta_t) {
  for (std::size_t a = p; a < q; ++a) {
    if (t.times[a + 1] - t.times[a] > delta_t) return false;
  }
  return true;
}

}  // namespace

std::vector<MobilityLabel> brute_exact_label(TrackView track, const MobilityParams& params) {
  const std::size_t n = track.size();
  std::vector<MobilityLabel> labels(n, MobilityLabel::Travel);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p; q < n; ++q) {
      if (track.times[q] - track.times[p] < params.delta_t) continue;
      if (!window_tight(track, p, q, params.delta_s)) continue;
      for (std::size_t k = p; k <= q; ++k) labels[k] = MobilityLabel::Stay;
    }
  }
  return labels;
}

std::vector<bool> brute_dense_membership(TrackView track, const MobilityParams& params) {
  const std::size_t n = track.size();
  std::vector<bool> member(n, false);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p; q < n; ++q) {
      if (track.times[q] - track.times[p] < params.delta_t) continue;
      if (!window_dense(track, p, q, params.delta_t)) continue;
      if (!window_tight(track, p, q, params.delta_s)) continue;
      for (std::size_t k = p; k <= q; ++k) member[k] = true;
    }
  }
  return member;
}

bool brute_travel(TrackView track, std::size_t i, double spatial, Seconds delta_t) {
  for (std::size_t p = 0; p < i; ++p) {
    for (std::size_t q = i + 1; q < track.size(); ++q) {
      if (distance(track.points[i], track.points[p]) >= spatial &&
          distance(track.points[i], track.points[q]) >= spatial &&
          track.times[q] - track.times[p] <= delta_t) {
        return true;
      }
    }
  }
  return false;
}

std::vector<bool> literal_stay_pass(TrackView seg, double threshold, Seconds delta_t, bool tail_flush) {
  const std::size_t n = seg.size();
  std::vector<bool> flags(n, false);
  if (n == 0) return flags;
  std::size_t head = 0;
  for (std::size_t cursor = 1; cursor < n; ++cursor) {
    for (std::size_t anchor = cursor; anchor-- > head;) {
      if (distance(seg.points[anchor], seg.points[cursor]) >= threshold) {
        if (seg.times[cursor - 1] - seg.times[head] >= delta_t) {
          for (std::size_t k = head; k < cursor; ++k) flags[k] = true;
        }
        head = anchor + 1;
        break;
      }
    }
  }
  if (tail_flush && seg.times[n - 1] - seg.times[head] >= delta_t) {
    for (std::size_t k = head; k < n; ++k) flags[k] = true;
  }
  return flags;
}

std::vector<MobilityLabel> brute_continuous_labels(const GroundTruthPath& path,
                                                   const SamplingSchedule& times,
                                                   const MobilityParams& params,
                                                   std::int64_t steps) {
  const LocalFrame frame(path.origin);
  const std::int64_t n = path.duration * steps;
  const std::int64_t w = params.delta_t * steps;
  std::vector<PlanarPoint> pos(static_cast<std::size_t>(n + 1));
  for (std::int64_t k = 0; k <= n; ++k) {
    pos[static_cast<std::size_t>(k)] =
        frame.observed(path.position(static_cast<double>(k) / static_cast<double>(steps)));
  }
  std::vector<bool> tight(static_cast<std::size_t>(std::max<std::int64_t>(n + 1, 1)), false);
  for (std::int64_t a = 0; a + w <= n; ++a) {
    bool ok = true;
    for (std::int64_t i = a; i <= a + w && ok; ++i) {
      for (std::int64_t j = i + 1; j <= a + w; ++j) {
        if (distance(pos[static_cast<std::size_t>(i)], pos[static_cast<std::size_t>(j)]) >=
            params.delta_s) {
          ok = false;
          break;
        }
      }
    }
    tight[static_cast<std::size_t>(a)] = ok;
  }
  std::vector<MobilityLabel> out;
  for (const Seconds t : times.times) {
    bool stay = false;
    for (std::int64_t a = std::max<std::int64_t>(0, t * steps - w); a <= t * steps && a + w <= n; ++a) {
      if (tight[static_cast<std::size_t>(a)]) stay = true;
    }
    out.push_back(stay ? MobilityLabel::Stay : MobilityLabel::Travel);
  }
  return out;
}

GroundTruthPath small_path(std::uint64_t seed, Seconds duration, const MobilityParams& params) {
  CtrwConfig c;
  c.seed = seed;
  c.duration = duration;
  c.wait = {1.5, static_cast<double>(params.delta_t), 8.0 * static_cast<double>(params.delta_t)};
  c.jump = {1.5, params.delta_s, 4.0 * params.delta_s};
  c.speed = 3.0;
  c.start_extent = 2000.0;
  return generate_ctrw(c);
}

}  // namespace sparsemob::testing

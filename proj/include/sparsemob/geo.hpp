#pragma once

#include <cmath>
#include <numbers>

namespace sparsemob {

inline constexpr double kEarthRadiusMeters = 6371000.0;
// Meters per degree of arc on the mean-radius sphere.
inline constexpr double kMetersPerDegree = kEarthRadiusMeters * std::numbers::pi / 180.0;

struct GeoPoint {
  double lon = 0.0;  // degrees, [-180, 180]
  double lat = 0.0;  // degrees, [-90, 90]

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

bool is_valid(const GeoPoint& p);

// Local planar coordinates in meters.
struct PlanarPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const PlanarPoint&, const PlanarPoint&) = default;
};

inline double distance(const PlanarPoint& a, const PlanarPoint& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

// Equirectangular distance in meters about a fixed reference latitude.
double planar_distance(const GeoPoint& a, const GeoPoint& b, double ref_lat);

/// Equirectangular projection at a fixed reference latitude.
///
/// Every distance computed by the inference and oracle code goes through
/// project() so that two routes over the same records see identical doubles.
class Projection {
 public:
  explicit Projection(double ref_lat);

  double ref_lat() const { return ref_lat_; }

  PlanarPoint project(const GeoPoint& p) const {
    return {p.lon * lon_scale_, p.lat * kMetersPerDegree};
  }

  GeoPoint unproject(const PlanarPoint& p) const {
    return {p.x / lon_scale_, p.y / kMetersPerDegree};
  }

 private:
  double ref_lat_;
  double lon_scale_;
};

/// Maps meters relative to an origin onto lon/lat and back (simulator frame).
class LocalFrame {
 public:
  explicit LocalFrame(GeoPoint origin);

  const GeoPoint& origin() const { return origin_; }
  const Projection& projection() const { return projection_; }

  GeoPoint to_geo(const PlanarPoint& offset) const;

  // Position as the inference code will see it after a lon/lat round trip.
  PlanarPoint observed(const PlanarPoint& offset) const {
    return projection_.project(to_geo(offset));
  }

 private:
  GeoPoint origin_;
  Projection projection_;
};

}  // namespace sparsemob

#include "sparsemob/geo.hpp"

#include <string>

#include "sparsemob/errors.hpp"

namespace sparsemob {

namespace {

double degrees_to_radians(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

bool is_valid(const GeoPoint& p) {
  return std::isfinite(p.lon) && std::isfinite(p.lat) && p.lon >= -180.0 && p.lon <= 180.0 &&
         p.lat >= -90.0 && p.lat <= 90.0;
}

double planar_distance(const GeoPoint& a, const GeoPoint& b, double ref_lat) {
  const double dy = (a.lat - b.lat) * kMetersPerDegree;
  const double dx = (a.lon - b.lon) * kMetersPerDegree * std::cos(degrees_to_radians(ref_lat));
  return std::sqrt(dx * dx + dy * dy);
}

Projection::Projection(double ref_lat)
    : ref_lat_(ref_lat), lon_scale_(kMetersPerDegree * std::cos(degrees_to_radians(ref_lat))) {
  if (!(ref_lat > -90.0 && ref_lat < 90.0)) {
    throw ParameterError("reference latitude must lie strictly inside (-90, 90), got " +
                         std::to_string(ref_lat));
  }
}

LocalFrame::LocalFrame(GeoPoint origin) : origin_(origin), projection_(origin.lat) {}

GeoPoint LocalFrame::to_geo(const PlanarPoint& offset) const {
  const GeoPoint delta = projection_.unproject(offset);
  return {origin_.lon + delta.lon, origin_.lat + delta.lat};
}

}  // namespace sparsemob

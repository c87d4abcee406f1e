#include "urbannet/geo.hpp"

#include <cmath>

namespace urbannet::geo {

namespace {
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
}

GeoPoint::GeoPoint(double lat_deg, double lon_deg) : lat_(lat_deg), lon_(lon_deg) {
  if (!std::isfinite(lat_deg) || !std::isfinite(lon_deg)) {
    throw Error("GeoPoint: non-finite coordinate");
  }
  if (lat_deg < -90.0 || lat_deg > 90.0) {
    throw Error("GeoPoint: latitude out of [-90, 90]: " + std::to_string(lat_deg));
  }
  if (lon_deg < -180.0 || lon_deg > 180.0) {
    throw Error("GeoPoint: longitude out of [-180, 180]: " + std::to_string(lon_deg));
  }
}

GeoPolygon::GeoPolygon(std::vector<GeoPoint> ring) : ring_(std::move(ring)) {
  if (ring_.size() < 3) throw DegeneratePolygon("fewer than 3 vertices");
  if (ring_.front() == ring_.back()) {
    throw DegeneratePolygon("ring closure must be implicit (first vertex repeated at end)");
  }
}

double distance_km(const GeoPoint& a, const GeoPoint& b) {
  // |delta| keeps sin^2 identical under argument swap, so the result is
  // symmetric bit-for-bit.
  const double phi1 = a.lat() * kDegToRad;
  const double phi2 = b.lat() * kDegToRad;
  const double dphi = std::fabs(phi2 - phi1);
  const double dlam = std::fabs((b.lon() - a.lon()) * kDegToRad);
  const double sp = std::sin(dphi * 0.5);
  const double sl = std::sin(dlam * 0.5);
  const double h = sp * sp + std::cos(phi1) * std::cos(phi2) * sl * sl;
  const double c = 2.0 * std::asin(std::sqrt(std::fmin(1.0, h)));
  return kEarthRadiusKm * c;
}

GeoPoint polygon_centroid(const GeoPolygon& poly) {
  const auto& ring = poly.ring();
  double mean_lat = 0.0;
  for (const auto& p : ring) mean_lat += p.lat();
  mean_lat /= static_cast<double>(ring.size());
  const double coslat = std::cos(mean_lat * kDegToRad);

  // Project to a local plane in km: x along longitude (scaled by cos of the
  // mean latitude), y along latitude.
  auto px = [&](const GeoPoint& p) { return kEarthRadiusKm * p.lon() * kDegToRad * coslat; };
  auto py = [&](const GeoPoint& p) { return kEarthRadiusKm * p.lat() * kDegToRad; };

  double area2 = 0.0;  // twice the signed area
  double cx = 0.0;
  double cy = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const double xi = px(ring[i]), yi = py(ring[i]);
    const double xj = px(ring[j]), yj = py(ring[j]);
    const double cross = xi * yj - xj * yi;
    area2 += cross;
    cx += (xi + xj) * cross;
    cy += (yi + yj) * cross;
  }
  const double area = 0.5 * area2;
  if (std::fabs(area) < 1e-12) {
    throw DegeneratePolygon("projected area below 1e-12 km^2 (collinear or duplicate vertices)");
  }
  cx /= 6.0 * area;
  cy /= 6.0 * area;

  const double lat = cy / (kEarthRadiusKm * kDegToRad);
  const double lon = cx / (kEarthRadiusKm * kDegToRad * coslat);
  return GeoPoint(lat, lon);
}

}  // namespace urbannet::geo

#pragma once

#include <vector>

#include "urbannet/errors.hpp"

namespace urbannet::geo {

/// Mean Earth radius (IUGG), kilometers. All great-circle distances use this sphere.
inline constexpr double kEarthRadiusKm = 6371.0088;

/// A geographic point in degrees. Construction validates bounds and finiteness.
class GeoPoint {
 public:
  GeoPoint(double lat_deg, double lon_deg);

  double lat() const { return lat_; }
  double lon() const { return lon_; }

  friend bool operator==(const GeoPoint& a, const GeoPoint& b) {
    return a.lat_ == b.lat_ && a.lon_ == b.lon_;
  }

 private:
  double lat_;
  double lon_;
};

/// Simple polygon ring, implicitly closed (first vertex not repeated at the end).
class GeoPolygon {
 public:
  explicit GeoPolygon(std::vector<GeoPoint> ring);

  const std::vector<GeoPoint>& ring() const { return ring_; }

 private:
  std::vector<GeoPoint> ring_;
};

/// Haversine great-circle distance in kilometers. Symmetric bit-for-bit.
double distance_km(const GeoPoint& a, const GeoPoint& b);

/// Area-weighted centroid via local equirectangular projection about the ring's
/// mean latitude, then the planar shoelace centroid, unprojected back to degrees.
/// Throws DegeneratePolygon when the projected area is below 1e-12 km^2.
GeoPoint polygon_centroid(const GeoPolygon& poly);

}  // namespace urbannet::geo

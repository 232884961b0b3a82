#pragma once

#include <string>
#include <vector>

namespace satlink {

inline constexpr double kEarthRadiusM = 6'371'000.0;
inline constexpr double kGeoAltitudeM = 35'786'000.0;
inline constexpr double kPi = 3.14159265358979323846;

constexpr double deg2rad(double d) { return d * kPi / 180.0; }
constexpr double rad2deg(double r) { return r * 180.0 / kPi; }

// Wraps any longitude into [-180, 180).
double normalize_longitude(double lon_deg);

struct GeoPosition {
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;
  double altitude_m = 0.0;

  // Throws satlink::Error unless the invariants hold.
  void validate() const;
  bool operator==(const GeoPosition&) const = default;
};

struct GeoSatellite {
  std::string satellite_id;
  double slot_longitude_deg = 0.0;
  double orbit_altitude_m = kGeoAltitudeM;

  void validate() const;
};

struct LookAngles {
  double elevation_deg = 0.0;
  double azimuth_deg = 0.0;
};

// Great-circle surface distance on the spherical Earth; altitude is ignored.
double haversine_m(const GeoPosition& a, const GeoPosition& b);

// Elevation/azimuth of a geostationary satellite seen from `p`. Uses Earth-centered
// Cartesian vectors and projects the line of sight onto the local east/north/up frame.
LookAngles geo_look_angles(const GeoPosition& p, const GeoSatellite& sat);

struct RouteSpec {
  std::string departure_airport;
  std::string arrival_airport;
  GeoPosition departure_pos;
  GeoPosition arrival_pos;
  double cruise_altitude_m = 11'000.0;
  double ground_speed_mps = 250.0;
  std::string airline_code;
  std::string tail_number;

  void validate() const;
  bool operator==(const RouteSpec&) const = default;
};

struct VerticalProfile {
  double climb_rate_mps = 10.0;
  double descent_rate_mps = 8.0;
};

struct PathPoint {
  double offset_s = 0.0;
  GeoPosition position;
};

// Constant-ground-speed great-circle track with a trapezoid altitude profile. The last
// point is clamped onto the arrival endpoint, so the point count is ceil(duration/step)+1.
std::vector<PathPoint> great_circle_path(const RouteSpec& route, double step_s,
                                         const VerticalProfile& profile = {});

double route_duration_s(const RouteSpec& route);

}  // namespace satlink

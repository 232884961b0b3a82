#include "satlink/geo.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "satlink/error.hpp"

namespace satlink {

namespace {

using Vec3 = std::array<double, 3>;

Vec3 unit_vector(double lat_deg, double lon_deg) {
  const double lat = deg2rad(lat_deg);
  const double lon = deg2rad(lon_deg);
  return {std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)};
}

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

}  // namespace

double normalize_longitude(double lon_deg) {
  double l = std::fmod(lon_deg + 180.0, 360.0);
  if (l < 0) l += 360.0;
  l -= 180.0;
  return l >= 180.0 ? l - 360.0 : l;
}

void GeoPosition::validate() const {
  if (!std::isfinite(latitude_deg) || latitude_deg < -90.0 || latitude_deg > 90.0) {
    throw Error("latitude out of range: " + std::to_string(latitude_deg));
  }
  if (!std::isfinite(longitude_deg) || longitude_deg < -180.0 || longitude_deg >= 180.0) {
    throw Error("longitude out of range: " + std::to_string(longitude_deg));
  }
  if (!std::isfinite(altitude_m) || altitude_m < 0.0) {
    throw Error("altitude must be non-negative: " + std::to_string(altitude_m));
  }
}

void GeoSatellite::validate() const {
  if (satellite_id.empty()) throw Error("satellite id must not be empty");
  if (!std::isfinite(slot_longitude_deg) || slot_longitude_deg < -180.0 ||
      slot_longitude_deg >= 180.0) {
    throw Error("satellite slot longitude out of range for " + satellite_id);
  }
  if (orbit_altitude_m != kGeoAltitudeM) {
    throw Error("satellite " + satellite_id + " is not at geostationary altitude");
  }
}

double haversine_m(const GeoPosition& a, const GeoPosition& b) {
  const double dlat = deg2rad(b.latitude_deg - a.latitude_deg);
  const double dlon = deg2rad(b.longitude_deg - a.longitude_deg);
  const double s1 = std::sin(dlat / 2);
  const double s2 = std::sin(dlon / 2);
  double h = s1 * s1 + std::cos(deg2rad(a.latitude_deg)) * std::cos(deg2rad(b.latitude_deg)) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

LookAngles geo_look_angles(const GeoPosition& p, const GeoSatellite& sat) {
  p.validate();
  sat.validate();
  const double lat = deg2rad(p.latitude_deg);
  const double lon = deg2rad(p.longitude_deg);
  const double r_obs = kEarthRadiusM + p.altitude_m;
  const double r_sat = kEarthRadiusM + sat.orbit_altitude_m;
  const double slot = deg2rad(sat.slot_longitude_deg);

  const Vec3 obs{r_obs * std::cos(lat) * std::cos(lon), r_obs * std::cos(lat) * std::sin(lon),
                 r_obs * std::sin(lat)};
  const Vec3 sv{r_sat * std::cos(slot), r_sat * std::sin(slot), 0.0};
  const Vec3 los{sv[0] - obs[0], sv[1] - obs[1], sv[2] - obs[2]};

  const Vec3 east{-std::sin(lon), std::cos(lon), 0.0};
  const Vec3 north{-std::sin(lat) * std::cos(lon), -std::sin(lat) * std::sin(lon), std::cos(lat)};
  const Vec3 up{std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)};

  const double e = dot(los, east);
  const double n = dot(los, north);
  const double u = dot(los, up);
  const double horiz = std::hypot(e, n);

  LookAngles out;
  out.elevation_deg = rad2deg(std::atan2(u, horiz));
  double az = rad2deg(std::atan2(e, n));
  if (az < 0) az += 360.0;
  if (az >= 360.0) az -= 360.0;
  out.azimuth_deg = az;
  return out;
}

void RouteSpec::validate() const {
  departure_pos.validate();
  arrival_pos.validate();
  if (cruise_altitude_m < 8000.0 || cruise_altitude_m > 13000.0) {
    throw Error("cruise altitude must lie in [8000, 13000] m");
  }
  if (!(ground_speed_mps > 0.0) || !std::isfinite(ground_speed_mps)) {
    throw Error("ground speed must be positive");
  }
}

double route_duration_s(const RouteSpec& route) {
  return haversine_m(route.departure_pos, route.arrival_pos) / route.ground_speed_mps;
}

std::vector<PathPoint> great_circle_path(const RouteSpec& route, double step_s,
                                         const VerticalProfile& profile) {
  route.validate();
  if (!(step_s > 0.0)) throw Error("path step must be positive");
  const auto& dep = route.departure_pos;
  const auto& arr = route.arrival_pos;
  if (dep.latitude_deg == arr.latitude_deg && dep.longitude_deg == arr.longitude_deg) {
    throw DegenerateRouteError("route " + route.departure_airport + "-" + route.arrival_airport +
                               " has identical endpoints");
  }
  const Vec3 a = unit_vector(dep.latitude_deg, dep.longitude_deg);
  const Vec3 b = unit_vector(arr.latitude_deg, arr.longitude_deg);
  const double omega = std::acos(std::clamp(dot(a, b), -1.0, 1.0));
  const double sin_omega = std::sin(omega);
  if (sin_omega < 1e-9) {
    throw AntipodalRouteError("route " + route.departure_airport + "-" + route.arrival_airport +
                              " has antipodal endpoints");
  }

  const double distance = haversine_m(dep, arr);
  const double duration = distance / route.ground_speed_mps;
  const auto steps = static_cast<std::size_t>(std::ceil(duration / step_s));

  std::vector<PathPoint> out;
  out.reserve(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * step_s;
    const double f = std::min(1.0, t / duration);
    GeoPosition pos;
    if (i == 0) {
      pos = dep;
    } else if (f >= 1.0) {
      pos = arr;
    } else {
      const double wa = std::sin((1.0 - f) * omega) / sin_omega;
      const double wb = std::sin(f * omega) / sin_omega;
      const Vec3 v{wa * a[0] + wb * b[0], wa * a[1] + wb * b[1], wa * a[2] + wb * b[2]};
      pos.latitude_deg = rad2deg(std::atan2(v[2], std::hypot(v[0], v[1])));
      pos.longitude_deg = normalize_longitude(rad2deg(std::atan2(v[1], v[0])));
      const double tc = std::min(t, duration);
      const double climb = dep.altitude_m + profile.climb_rate_mps * tc;
      const double descent = arr.altitude_m + profile.descent_rate_mps * (duration - tc);
      pos.altitude_m = std::max(0.0, std::min({climb, route.cruise_altitude_m, descent}));
    }
    out.push_back({t, pos});
  }
  return out;
}

}  // namespace satlink

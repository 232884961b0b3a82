#include "satlink/link_model.hpp"

#include <algorithm>
#include <cmath>

#include "satlink/error.hpp"
#include "satlink/weather.hpp"

namespace satlink {

void LinkModelParams::validate() const {
  for (double v : {cnr_at_zenith_db, elevation_rolloff_db, rain_atten_db_per_mmh,
                   troposphere_ceiling_m, noise_sigma_db, horizon_cut_elevation_deg}) {
    if (!std::isfinite(v)) throw ConfigError("link parameters must be finite");
  }
  if (noise_sigma_db < 0.0) throw ConfigError("noise_sigma_db must be >= 0");
  if (!(horizon_cut_elevation_deg > 0.0 && horizon_cut_elevation_deg < 90.0)) {
    throw ConfigError("horizon_cut_elevation_deg must lie in (0, 90)");
  }
}

namespace {

double rain_term(const GeoPosition& p, const WeatherCell* wx, const LinkModelParams& params) {
  if (wx == nullptr || p.altitude_m >= params.troposphere_ceiling_m) return 0.0;
  return params.rain_atten_db_per_mmh * wx->precipitation_mmh;
}

}  // namespace

std::optional<double> expected_cnr(const GeoPosition& p, const GeoSatellite& sat,
                                   const WeatherCell* wx, const LinkModelParams& params) {
  const double el = geo_look_angles(p, sat).elevation_deg;
  if (el < params.horizon_cut_elevation_deg) return std::nullopt;
  const double cnr = params.cnr_at_zenith_db -
                     params.elevation_rolloff_db * (1.0 - std::sin(deg2rad(el))) -
                     rain_term(p, wx, params);
  return std::clamp(cnr, kMinCnrDb, kMaxCnrDb);
}

std::optional<double> synth_cnr(const GeoPosition& p, const GeoSatellite& sat,
                                const WeatherCell* wx, const LinkModelParams& params,
                                std::mt19937_64& rng) {
  const double el = geo_look_angles(p, sat).elevation_deg;
  if (el < params.horizon_cut_elevation_deg) return std::nullopt;
  double noise = 0.0;
  if (params.noise_sigma_db > 0.0) {
    std::normal_distribution<double> dist(0.0, params.noise_sigma_db);
    noise = dist(rng);
  }
  const double cnr = params.cnr_at_zenith_db -
                     params.elevation_rolloff_db * (1.0 - std::sin(deg2rad(el))) -
                     rain_term(p, wx, params) - noise;
  return std::clamp(cnr, kMinCnrDb, kMaxCnrDb);
}

}  // namespace satlink

#pragma once

#include <optional>
#include <random>

#include "satlink/geo.hpp"

namespace satlink {

struct WeatherCell;

// Additive dB link model: elevation roll-off, altitude-gated rain fade, Gaussian noise.
struct LinkModelParams {
  double cnr_at_zenith_db = 10.95;
  double elevation_rolloff_db = 6.0;
  double rain_atten_db_per_mmh = 0.5;
  double troposphere_ceiling_m = 6000.0;
  double noise_sigma_db = 0.25;
  double horizon_cut_elevation_deg = 5.0;

  void validate() const;
};

inline constexpr double kMinCnrDb = 0.0;
inline constexpr double kMaxCnrDb = 20.0;

// Noise-free part of the model. Returns nullopt when the satellite sits below the
// horizon cut.
std::optional<double> expected_cnr(const GeoPosition& p, const GeoSatellite& sat,
                                   const WeatherCell* wx, const LinkModelParams& params);

// One noisy CNR measurement, clamped to [0, 20] dB. The stream is only advanced when the
// link is above the horizon cut.
std::optional<double> synth_cnr(const GeoPosition& p, const GeoSatellite& sat,
                                const WeatherCell* wx, const LinkModelParams& params,
                                std::mt19937_64& rng);

}  // namespace satlink

#pragma once

#include <cstdint>
#include <optional>
#include <tuple>
#include <filesystem>
#include <set>
#include <unordered_map>
#include <vector>

#include "satlink/geo.hpp"
#include "satlink/timeutil.hpp"

namespace satlink {

inline constexpr double kWeatherGridDeg = 0.1;
inline constexpr int kLonCells = 3600;

// One hourly observation on the 0.1 degree grid.
struct WeatherCell {
  Timestamp hour_utc = 0;
  double grid_lat_deg = 0.0;
  double grid_lon_deg = 0.0;
  double precipitation_mmh = 0.0;
  double cloud_cover_pct = 0.0;
  double temperature_c = 0.0;
  double wind_speed_mps = 0.0;

  bool operator==(const WeatherCell&) const = default;
};

struct GridIndex {
  int lat = 0;
  int lon = 0;  // in [-1800, 1800)
  bool operator==(const GridIndex&) const = default;
};

GridIndex grid_index_of(double lat_deg, double lon_deg);
double grid_lat_of(int lat_idx);
double grid_lon_of(int lon_idx);
int wrap_lon_index(int lon_idx);

// Rounds to six decimals, the on-disk precision, normalizing -0 to 0.
double quantize6(double v);

// Anything that can answer "the weather nearest to (t, p)". Throws CoverageGapError
// when it cannot.
class WeatherProvider {
 public:
  virtual ~WeatherProvider() = default;
  virtual WeatherCell lookup_nearest(Timestamp t, const GeoPosition& p) const = 0;
};

// Immutable-after-load set of cells keyed by (hour, lat, lon).
class WeatherField : public WeatherProvider {
 public:
  WeatherField() = default;

  // Rejects off-grid coordinates, unaligned hours, out-of-range values, and duplicate keys.
  void insert(const WeatherCell& cell);

  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }
  bool contains(Timestamp hour, GridIndex idx) const;
  const WeatherCell* find(Timestamp hour, GridIndex idx) const;

  // Sorted by (hour, lat, lon).
  std::vector<WeatherCell> cells() const;

  Timestamp first_hour() const { return *hours_.begin(); }
  Timestamp last_hour() const { return *hours_.rbegin(); }

  // Nearest hour (ties toward the earlier hour), then the haversine-nearest cell center
  // (ties toward the smaller (lat, lon)). CoverageGapError when the nearest hour is more
  // than an hour away or no cell lies within one grid step of p.
  WeatherCell lookup_nearest(Timestamp t, const GeoPosition& p) const override;

 private:
  struct Key {
    Timestamp hour;
    int lat;
    int lon;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };

  std::unordered_map<Key, WeatherCell, KeyHash> cells_;
  std::set<Timestamp> hours_;
};

// Rectangle of grid cells: `lat_cells` x `lon_cells` centers starting at the given
// south-west center.
struct GridBounds {
  double lat_min_deg = 0.0;
  double lon_min_deg = 0.0;
  int lat_cells = 0;
  int lon_cells = 0;

  // Box [lat_min, lat_max) x [lon_min, lon_max) measured in whole grid steps.
  static GridBounds from_box(double lat_min, double lat_max, double lon_min, double lon_max);
};

// Half-open [start, end) range; every hour boundary inside it is materialized.
struct TimeSpan {
  Timestamp start = 0;
  Timestamp end = 0;
};

// Procedural weather: a smooth background plus moving Gaussian storm cells.
// `storm_density` is the mean number of concurrently active storms per 10 x 10 degrees.
class SyntheticWeather : public WeatherProvider {
 public:
  SyntheticWeather(const GridBounds& storm_region, const TimeSpan& span, double storm_density,
                   std::uint64_t seed);

  WeatherCell cell(Timestamp hour, GridIndex idx) const;
  WeatherCell lookup_nearest(Timestamp t, const GeoPosition& p) const override;

  std::size_t storm_count() const { return storms_.size(); }

 private:
  struct Storm {
    double birth_s;
    double life_s;
    double lat0_deg;
    double lon0_deg;
    double v_north_mps;
    double v_east_mps;
    double radius_m;
    double peak_mmh;
  };

  double precipitation(Timestamp hour, double lat, double lon) const;

  std::vector<Storm> storms_;  // sorted by birth
  double max_life_s_ = 0.0;
  double phase_a_ = 0.0;
  double phase_b_ = 0.0;
  double phase_c_ = 0.0;
};

// Nearest present grid index to p by haversine among the 5x5 neighbourhood of the
// rounded index, restricted to indices accepted by `present`. Empty when nothing is
// present within one grid step of the rounded index.
template <typename Pred>
std::optional<GridIndex> nearest_grid_index(const GeoPosition& p, Pred present) {
  const GridIndex center = grid_index_of(p.latitude_deg, p.longitude_deg);
  std::optional<GridIndex> best;
  double best_d = 0.0;
  bool near_hit = false;
  for (int dlat = -2; dlat <= 2; ++dlat) {
    const int lat = center.lat + dlat;
    if (lat < -900 || lat > 900) continue;
    for (int dlon = -2; dlon <= 2; ++dlon) {
      const GridIndex idx{lat, wrap_lon_index(center.lon + dlon)};
      if (!present(idx)) continue;
      if (dlat >= -1 && dlat <= 1 && dlon >= -1 && dlon <= 1) near_hit = true;
      const double d = haversine_m(p, GeoPosition{grid_lat_of(idx.lat), grid_lon_of(idx.lon), 0.0});
      if (!best || d < best_d ||
          (d == best_d && std::tie(idx.lat, idx.lon) < std::tie(best->lat, best->lon))) {
        best = idx;
        best_d = d;
      }
    }
  }
  if (!near_hit) return std::nullopt;
  return best;
}

// Materializes a SyntheticWeather over the bounds and span.
WeatherField synth_weather_field(const GridBounds& bounds, const TimeSpan& span,
                                 double storm_density, std::uint64_t seed);

WeatherField load_weather_csv(const std::filesystem::path& path);
void save_weather_csv(const WeatherField& field, const std::filesystem::path& path);

}  // namespace satlink

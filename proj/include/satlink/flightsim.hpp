#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "satlink/geo.hpp"
#include "satlink/ingest.hpp"
#include "satlink/link_model.hpp"
#include "satlink/weather.hpp"

namespace satlink {

struct FlightProfile {
  VerticalProfile vertical;
  // Logging starts once the aircraft first climbs through this altitude.
  double log_gate_m = 1000.0;
};

struct FlightPlan {
  RouteSpec route;
  std::string flight_id;
  Timestamp departure_time = 0;  // minute-aligned
  bool operator==(const FlightPlan&) const = default;
};

// One record per minute from takeoff to landing, dropping the pre-gate climb. Each
// record is served by the highest-elevation satellite (ties: first in `sats`).
// `weather` may be null.
std::vector<FlightLogRecord> generate_flight(const FlightPlan& plan, const std::vector<GeoSatellite>& sats,
                                             const WeatherProvider* weather, const LinkModelParams& params,
                                             std::uint64_t seed, const FlightProfile& profile = {});

// Index of the highest-elevation satellite; ties resolve to the lower index.
std::size_t serving_satellite(const GeoPosition& p, const std::vector<GeoSatellite>& sats);

struct RouteConfig {
  RouteSpec route;
  std::vector<std::string> tail_numbers;
  std::optional<int> flights;  // falls back to GenerationConfig::flights_per_route
};

struct WeatherConfig {
  double storm_density = 3.0;
  double margin_deg = 5.0;
};

struct GenerationConfig {
  std::uint64_t seed = 1;
  Timestamp start_time = 0;
  int span_days = 30;
  int flights_per_route = 1;
  std::vector<GeoSatellite> satellites;
  std::vector<RouteConfig> routes;
  LinkModelParams link_params;
  FlightProfile profile;
  WeatherConfig weather;

  void validate() const;
};

// Parses the JSON generation config. Unknown keys are rejected.
GenerationConfig parse_generation_config(const std::string& json_text);
GenerationConfig load_generation_config(const std::filesystem::path& path);

struct ManifestFile {
  std::string path;  // relative to the dataset directory
  std::size_t rows = 0;
  std::string checksum;
};

struct DatasetManifest {
  std::size_t flight_count = 0;
  std::size_t row_count = 0;
  std::size_t labeled_rows = 0;
  std::size_t absent_cnr_rows = 0;
  std::array<std::size_t, kNumCategories> label_counts{};
  std::vector<ManifestFile> files;
  std::optional<ManifestFile> weather_file;
  std::uint64_t seed = 0;

  std::string checksum() const;
  std::string to_json() const;
};

// The deterministic flight schedule the config describes.
std::vector<FlightPlan> plan_flights(const GenerationConfig& config);

// Storm model shared by generation and truth reconstruction.
SyntheticWeather make_weather_model(const GenerationConfig& config);

// Writes flights/<flight_id>.csv, weather.csv (cells around every in-troposphere record),
// and manifest.json. Pure function of the config.
DatasetManifest generate_dataset(const GenerationConfig& config, const std::filesystem::path& out_dir);

}  // namespace satlink

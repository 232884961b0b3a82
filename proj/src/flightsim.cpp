#include "satlink/flightsim.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "satlink/error.hpp"
#include "satlink/parallel.hpp"
#include "satlink/hashing.hpp"

namespace satlink {

using nlohmann::json;

std::size_t serving_satellite(const GeoPosition& p, const std::vector<GeoSatellite>& sats) {
  std::size_t best = 0;
  double best_el = -1e9;
  for (std::size_t i = 0; i < sats.size(); ++i) {
    const double el = geo_look_angles(p, sats[i]).elevation_deg;
    if (el > best_el) {
      best_el = el;
      best = i;
    }
  }
  return best;
}

std::vector<FlightLogRecord> generate_flight(const FlightPlan& plan, const std::vector<GeoSatellite>& sats,
                                             const WeatherProvider* weather, const LinkModelParams& params,
                                             std::uint64_t seed, const FlightProfile& profile) {
  if (sats.empty()) throw Error("generate_flight needs at least one satellite");
  params.validate();
  if (plan.departure_time % 60 != 0) throw Error("departure time must be minute-aligned");

  const auto path = great_circle_path(plan.route, 60.0, profile.vertical);
  const Timestamp start = plan.departure_time;
  const Timestamp end = start + static_cast<Timestamp>(std::llround(path.back().offset_s));
  std::mt19937_64 rng(seed);

  std::vector<FlightLogRecord> out;
  out.reserve(path.size());
  bool gate_passed = false;
  for (const auto& pt : path) {
    if (!gate_passed) {
      if (pt.position.altitude_m < profile.log_gate_m) continue;
      gate_passed = true;
    }
    const GeoPosition pos{quantize6(pt.position.latitude_deg), quantize6(pt.position.longitude_deg),
                          quantize6(pt.position.altitude_m)};
    const Timestamp t = start + static_cast<Timestamp>(std::llround(pt.offset_s));
    const GeoSatellite& sat = sats[serving_satellite(pos, sats)];

    std::optional<WeatherCell> cell;
    if (weather != nullptr && pos.altitude_m < params.troposphere_ceiling_m) {
      try {
        cell = weather->lookup_nearest(t, pos);
      } catch (const CoverageGapError&) {
      }
    }

    FlightLogRecord r;
    r.log_date = t;
    r.flight_id = plan.flight_id;
    r.tail_number = plan.route.tail_number;
    r.airline_code = plan.route.airline_code;
    r.departure_airport = plan.route.departure_airport;
    r.arrival_airport = plan.route.arrival_airport;
    r.flight_start_time = start;
    r.flight_end_time = end;
    r.latitude_deg = pos.latitude_deg;
    r.longitude_deg = pos.longitude_deg;
    r.altitude_m = pos.altitude_m;
    r.satellite_id = sat.satellite_id;
    if (auto cnr = synth_cnr(pos, sat, cell ? &*cell : nullptr, params, rng)) r.cnr_db = quantize6(*cnr);
    out.push_back(std::move(r));
  }
  return out;
}

void GenerationConfig::validate() const {
  if (span_days < 1) throw ConfigError("span_days must be >= 1");
  if (flights_per_route < 0) throw ConfigError("flights_per_route must be >= 0");
  if (start_time % 60 != 0) throw ConfigError("start_time must be minute-aligned");
  std::set<std::string> ids;
  for (const auto& s : satellites) {
    s.validate();
    if (!ids.insert(s.satellite_id).second) throw ConfigError("duplicate satellite " + s.satellite_id);
  }
  for (const auto& r : routes) {
    r.route.validate();
    if (r.flights && *r.flights < 0) throw ConfigError("route flight count must be >= 0");
  }
  if (!routes.empty() && satellites.empty()) throw ConfigError("config lists routes but no satellites");
  link_params.validate();
  if (!(profile.vertical.climb_rate_mps > 0 && profile.vertical.descent_rate_mps > 0)) {
    throw ConfigError("climb and descent rates must be positive");
  }
  if (!(weather.storm_density >= 0.0)) throw ConfigError("storm_density must be >= 0");
}

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read_opt(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

GeoPosition parse_position(const json& j, const std::string& where) {
  check_keys(j, {"latitude_deg", "longitude_deg", "altitude_m"}, where);
  GeoPosition p;
  p.latitude_deg = j.at("latitude_deg").get<double>();
  p.longitude_deg = j.at("longitude_deg").get<double>();
  read_opt(j, "altitude_m", p.altitude_m);
  return p;
}

}  // namespace

GenerationConfig parse_generation_config(const std::string& json_text) {
  GenerationConfig cfg;
  try {
    const json j = json::parse(json_text);
    check_keys(j, {"seed", "start_time", "span_days", "flights_per_route", "satellites", "routes",
                   "link_params", "profile", "weather"},
               "generation config");
    cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("start_time")) cfg.start_time = parse_iso8601(j.at("start_time").get<std::string>());
    read_opt(j, "span_days", cfg.span_days);
    read_opt(j, "flights_per_route", cfg.flights_per_route);
    for (const auto& s : j.value("satellites", json::array())) {
      check_keys(s, {"id", "slot_longitude_deg"}, "satellite");
      cfg.satellites.push_back(
          GeoSatellite{s.at("id").get<std::string>(), s.at("slot_longitude_deg").get<double>(), kGeoAltitudeM});
    }
    for (const auto& r : j.value("routes", json::array())) {
      check_keys(r, {"departure_airport", "arrival_airport", "departure", "arrival", "cruise_altitude_m",
                     "ground_speed_mps", "airline_code", "tail_numbers", "flights"},
                 "route");
      RouteConfig rc;
      rc.route.departure_airport = r.at("departure_airport").get<std::string>();
      rc.route.arrival_airport = r.at("arrival_airport").get<std::string>();
      rc.route.departure_pos = parse_position(r.at("departure"), "route departure");
      rc.route.arrival_pos = parse_position(r.at("arrival"), "route arrival");
      read_opt(r, "cruise_altitude_m", rc.route.cruise_altitude_m);
      read_opt(r, "ground_speed_mps", rc.route.ground_speed_mps);
      rc.route.airline_code = r.at("airline_code").get<std::string>();
      read_opt(r, "tail_numbers", rc.tail_numbers);
      if (r.contains("flights")) rc.flights = r.at("flights").get<int>();
      cfg.routes.push_back(std::move(rc));
    }
    if (j.contains("link_params")) {
      const auto& lp = j.at("link_params");
      check_keys(lp, {"cnr_at_zenith_db", "elevation_rolloff_db", "rain_atten_db_per_mmh",
                      "troposphere_ceiling_m", "noise_sigma_db", "horizon_cut_elevation_deg"},
                 "link_params");
      auto& p = cfg.link_params;
      read_opt(lp, "cnr_at_zenith_db", p.cnr_at_zenith_db);
      read_opt(lp, "elevation_rolloff_db", p.elevation_rolloff_db);
      read_opt(lp, "rain_atten_db_per_mmh", p.rain_atten_db_per_mmh);
      read_opt(lp, "troposphere_ceiling_m", p.troposphere_ceiling_m);
      read_opt(lp, "noise_sigma_db", p.noise_sigma_db);
      read_opt(lp, "horizon_cut_elevation_deg", p.horizon_cut_elevation_deg);
    }
    if (j.contains("profile")) {
      const auto& pr = j.at("profile");
      check_keys(pr, {"climb_rate_mps", "descent_rate_mps", "log_gate_m"}, "profile");
      read_opt(pr, "climb_rate_mps", cfg.profile.vertical.climb_rate_mps);
      read_opt(pr, "descent_rate_mps", cfg.profile.vertical.descent_rate_mps);
      read_opt(pr, "log_gate_m", cfg.profile.log_gate_m);
    }
    if (j.contains("weather")) {
      const auto& w = j.at("weather");
      check_keys(w, {"storm_density", "margin_deg"}, "weather");
      read_opt(w, "storm_density", cfg.weather.storm_density);
      read_opt(w, "margin_deg", cfg.weather.margin_deg);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid generation config: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid generation config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

GenerationConfig load_generation_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_generation_config(ss.str());
}

std::vector<FlightPlan> plan_flights(const GenerationConfig& config) {
  std::mt19937_64 rng(mix_seed(config.seed, 0x5c4ed));
  const auto span_minutes = static_cast<std::uint64_t>(config.span_days) * 1440;
  std::uniform_int_distribution<std::uint64_t> minute(0, span_minutes - 1);
  std::vector<FlightPlan> plans;
  std::size_t index = 0;
  for (const auto& rc : config.routes) {
    const int n = rc.flights.value_or(config.flights_per_route);
    for (int i = 0; i < n; ++i, ++index) {
      FlightPlan p;
      p.route = rc.route;
      if (!rc.tail_numbers.empty()) {
        p.route.tail_number = rc.tail_numbers[static_cast<std::size_t>(i) % rc.tail_numbers.size()];
      } else if (p.route.tail_number.empty()) {
        p.route.tail_number = rc.route.airline_code + "-T0";
      }
      p.departure_time = config.start_time + static_cast<Timestamp>(minute(rng)) * 60;
      char id[64];
      std::snprintf(id, sizeof(id), "%s-%s%s-%04zu", rc.route.airline_code.c_str(),
                    rc.route.departure_airport.c_str(), rc.route.arrival_airport.c_str(), index);
      p.flight_id = id;
      plans.push_back(std::move(p));
    }
  }
  return plans;
}

SyntheticWeather make_weather_model(const GenerationConfig& config) {
  double lat_lo = 90, lat_hi = -90, lon_lo = 180, lon_hi = -180;
  for (const auto& rc : config.routes) {
    for (const auto* p : {&rc.route.departure_pos, &rc.route.arrival_pos}) {
      lat_lo = std::min(lat_lo, p->latitude_deg);
      lat_hi = std::max(lat_hi, p->latitude_deg);
      lon_lo = std::min(lon_lo, p->longitude_deg);
      lon_hi = std::max(lon_hi, p->longitude_deg);
    }
  }
  if (config.routes.empty()) lat_lo = lat_hi = lon_lo = lon_hi = 0.0;
  const double m = config.weather.margin_deg;
  const double la0 = std::max(-85.0, std::floor(lat_lo - m));
  const double la1 = std::min(85.0, std::ceil(lat_hi + m));
  const double lo0 = std::max(-180.0, std::floor(lon_lo - m));
  const double lo1 = std::min(180.0, std::ceil(lon_hi + m));
  const TimeSpan span{config.start_time - kSecondsPerDay,
                      config.start_time + (config.span_days + 2) * kSecondsPerDay};
  return SyntheticWeather(GridBounds::from_box(la0, la1, lo0, lo1), span, config.weather.storm_density,
                          mix_seed(config.seed, 0x3ea7e4));
}

namespace {

std::string file_checksum(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return hex64(fnv1a64(ss.str()));
}

json manifest_body(const DatasetManifest& m) {
  json j;
  j["format"] = "satlink-dataset-v1";
  j["seed"] = m.seed;
  j["flight_count"] = m.flight_count;
  j["row_count"] = m.row_count;
  j["labeled_rows"] = m.labeled_rows;
  j["absent_cnr_rows"] = m.absent_cnr_rows;
  json counts = json::object();
  for (int c = 0; c < kNumCategories; ++c) counts[category_name(static_cast<CnrCategory>(c))] = m.label_counts[c];
  j["label_counts"] = counts;
  json files = json::array();
  for (const auto& f : m.files) files.push_back({{"path", f.path}, {"rows", f.rows}, {"checksum", f.checksum}});
  j["files"] = files;
  if (m.weather_file) {
    j["weather_file"] = {{"path", m.weather_file->path},
                         {"rows", m.weather_file->rows},
                         {"checksum", m.weather_file->checksum}};
  } else {
    j["weather_file"] = nullptr;
  }
  return j;
}

}  // namespace

std::string DatasetManifest::checksum() const { return hex64(fnv1a64(manifest_body(*this).dump())); }

std::string DatasetManifest::to_json() const {
  json j = manifest_body(*this);
  j["checksum"] = checksum();
  return j.dump(2) + "\n";
}

DatasetManifest generate_dataset(const GenerationConfig& config, const std::filesystem::path& out_dir) {
  config.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw IoError("cannot create output directory " + out_dir.string());
  }

  DatasetManifest manifest;
  manifest.seed = config.seed;
  const auto plans = plan_flights(config);
  const SyntheticWeather weather = make_weather_model(config);
  std::set<std::tuple<Timestamp, int, int>> weather_keys;

  if (!plans.empty()) {
    std::filesystem::create_directories(out_dir / "flights", ec);
    if (ec) throw IoError("cannot create " + (out_dir / "flights").string());
  }
  // Each flight owns its seed and its file, so the parallel stage is byte-stable.
  std::vector<std::vector<FlightLogRecord>> flights(plans.size());
  std::vector<ManifestFile> files(plans.size());
  parallel_for(plans.size(), [&](std::size_t i) {
    flights[i] = generate_flight(plans[i], config.satellites, &weather, config.link_params,
                                 mix_seed(config.seed, i), config.profile);
    const std::string rel = "flights/" + plans[i].flight_id + ".csv";
    write_flight_csv(flights[i], out_dir / rel);
    files[i] = {rel, flights[i].size(), file_checksum(out_dir / rel)};
  });
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const auto& records = flights[i];
    manifest.files.push_back(files[i]);
    ++manifest.flight_count;
    manifest.row_count += records.size();
    for (const auto& r : records) {
      if (r.cnr_db) {
        ++manifest.labeled_rows;
        ++manifest.label_counts[static_cast<int>(bin_cnr(*r.cnr_db))];
      } else {
        ++manifest.absent_cnr_rows;
      }
      if (r.altitude_m >= config.link_params.troposphere_ceiling_m) continue;
      const GeoPosition p{r.latitude_deg, r.longitude_deg, r.altitude_m};
      const auto center = *nearest_grid_index(p, [](GridIndex) { return true; });
      const Timestamp hour = round_to_hour(r.log_date);
      for (int dlat = -1; dlat <= 1; ++dlat) {
        for (int dlon = -1; dlon <= 1; ++dlon) {
          const int lat = center.lat + dlat;
          if (lat < -900 || lat > 900) continue;
          weather_keys.emplace(hour, lat, wrap_lon_index(center.lon + dlon));
        }
      }
    }
  }

  if (!weather_keys.empty()) {
    WeatherField field;
    for (const auto& [hour, lat, lon] : weather_keys) field.insert(weather.cell(hour, GridIndex{lat, lon}));
    save_weather_csv(field, out_dir / "weather.csv");
    manifest.weather_file = ManifestFile{"weather.csv", field.size(), file_checksum(out_dir / "weather.csv")};
  }

  std::ofstream out(out_dir / "manifest.json", std::ios::binary);
  if (!out) throw IoError("cannot write manifest in " + out_dir.string());
  out << manifest.to_json();
  return manifest;
}

}  // namespace satlink

#include "satlink/weather.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "satlink/csv.hpp"
#include "satlink/error.hpp"

namespace satlink {

namespace {

const std::vector<std::string> kWeatherHeader = {"hour_utc", "grid_lat", "grid_lon", "precip_mmh",
                                                 "cloud_pct", "temp_c", "wind_mps"};

bool on_grid(double v, int idx) { return std::abs(v - idx * kWeatherGridDeg) < 1e-9; }

}  // namespace

GridIndex grid_index_of(double lat_deg, double lon_deg) {
  GridIndex idx;
  idx.lat = static_cast<int>(std::lround(lat_deg / kWeatherGridDeg));
  idx.lon = wrap_lon_index(static_cast<int>(std::lround(lon_deg / kWeatherGridDeg)));
  return idx;
}

double grid_lat_of(int lat_idx) { return lat_idx / 10.0; }
double grid_lon_of(int lon_idx) { return lon_idx / 10.0; }

int wrap_lon_index(int lon_idx) {
  int w = (lon_idx + kLonCells / 2) % kLonCells;
  if (w < 0) w += kLonCells;
  return w - kLonCells / 2;
}

double quantize6(double v) {
  const double q = std::round(v * 1e6) / 1e6;
  return q == 0.0 ? 0.0 : q;
}

std::size_t WeatherField::KeyHash::operator()(const Key& k) const {
  std::uint64_t h = static_cast<std::uint64_t>(k.hour / kSecondsPerHour);
  h = h * 1809 + static_cast<std::uint64_t>(k.lat + 900);
  h = h * 3600 + static_cast<std::uint64_t>(k.lon + 1800);
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  return static_cast<std::size_t>(h);
}

void WeatherField::insert(const WeatherCell& cell) {
  if (floor_to_hour(cell.hour_utc) != cell.hour_utc) {
    throw Error("weather hour not aligned: " + format_iso8601(cell.hour_utc));
  }
  if (!(cell.grid_lat_deg >= -90.0 && cell.grid_lat_deg <= 90.0)) {
    throw Error("weather latitude out of range");
  }
  if (!(cell.grid_lon_deg >= -180.0 && cell.grid_lon_deg < 180.0)) {
    throw Error("weather longitude out of range");
  }
  const GridIndex idx = grid_index_of(cell.grid_lat_deg, cell.grid_lon_deg);
  if (!on_grid(cell.grid_lat_deg, idx.lat)) throw Error("weather latitude off the 0.1 degree grid");
  if (!on_grid(cell.grid_lon_deg, idx.lon)) throw Error("weather longitude off the 0.1 degree grid");
  if (!(cell.precipitation_mmh >= 0.0) || !std::isfinite(cell.precipitation_mmh)) {
    throw Error("precipitation must be >= 0");
  }
  if (!(cell.cloud_cover_pct >= 0.0 && cell.cloud_cover_pct <= 100.0)) {
    throw Error("cloud cover must lie in [0, 100]");
  }
  if (!std::isfinite(cell.temperature_c)) throw Error("temperature must be finite");
  if (!(cell.wind_speed_mps >= 0.0) || !std::isfinite(cell.wind_speed_mps)) {
    throw Error("wind speed must be >= 0");
  }
  const Key key{cell.hour_utc, idx.lat, idx.lon};
  WeatherCell stored = cell;
  stored.grid_lat_deg = grid_lat_of(idx.lat);
  stored.grid_lon_deg = grid_lon_of(idx.lon);
  if (!cells_.emplace(key, stored).second) {
    throw Error("duplicate weather cell at " + format_iso8601(cell.hour_utc));
  }
  hours_.insert(cell.hour_utc);
}

bool WeatherField::contains(Timestamp hour, GridIndex idx) const {
  return cells_.count(Key{hour, idx.lat, idx.lon}) != 0;
}

const WeatherCell* WeatherField::find(Timestamp hour, GridIndex idx) const {
  auto it = cells_.find(Key{hour, idx.lat, idx.lon});
  return it == cells_.end() ? nullptr : &it->second;
}

std::vector<WeatherCell> WeatherField::cells() const {
  std::vector<std::pair<Key, const WeatherCell*>> keyed;
  keyed.reserve(cells_.size());
  for (const auto& [k, c] : cells_) keyed.emplace_back(k, &c);
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    return std::tie(a.first.hour, a.first.lat, a.first.lon) <
           std::tie(b.first.hour, b.first.lat, b.first.lon);
  });
  std::vector<WeatherCell> out;
  out.reserve(keyed.size());
  for (const auto& kc : keyed) out.push_back(*kc.second);
  return out;
}

WeatherCell WeatherField::lookup_nearest(Timestamp t, const GeoPosition& p) const {
  if (hours_.empty()) throw CoverageGapError("weather field is empty");
  auto it = hours_.lower_bound(t);
  Timestamp hour;
  if (it == hours_.end()) {
    hour = *hours_.rbegin();
  } else if (it == hours_.begin()) {
    hour = *it;
  } else {
    const Timestamp after = *it;
    const Timestamp before = *std::prev(it);
    hour = (after - t) < (t - before) ? after : before;
  }
  if (std::llabs(hour - t) > kSecondsPerHour) {
    throw CoverageGapError("no weather within an hour of " + format_iso8601(t));
  }
  auto idx = nearest_grid_index(p, [&](GridIndex g) { return contains(hour, g); });
  if (!idx) {
    throw CoverageGapError("no weather cell near (" + std::to_string(p.latitude_deg) + ", " +
                           std::to_string(p.longitude_deg) + ") at " + format_iso8601(hour));
  }
  return *find(hour, *idx);
}

GridBounds GridBounds::from_box(double lat_min, double lat_max, double lon_min, double lon_max) {
  GridBounds b;
  b.lat_min_deg = lat_min;
  b.lon_min_deg = lon_min;
  b.lat_cells = static_cast<int>(std::lround((lat_max - lat_min) / kWeatherGridDeg));
  b.lon_cells = static_cast<int>(std::lround((lon_max - lon_min) / kWeatherGridDeg));
  return b;
}

SyntheticWeather::SyntheticWeather(const GridBounds& region, const TimeSpan& span,
                                   double storm_density, std::uint64_t seed) {
  if (span.end <= span.start) throw Error("weather time span is empty");
  if (!(storm_density >= 0.0)) throw Error("storm density must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  phase_a_ = 2 * kPi * unit(rng);
  phase_b_ = 2 * kPi * unit(rng);
  phase_c_ = 2 * kPi * unit(rng);

  constexpr double kMinLifeH = 6.0;
  constexpr double kMaxLifeH = 18.0;
  const double lat_span = region.lat_cells * kWeatherGridDeg;
  const double lon_span = region.lon_cells * kWeatherGridDeg;
  const double area = lat_span * lon_span;
  const double span_h = static_cast<double>(span.end - span.start) / kSecondsPerHour;
  const double mean_life = 0.5 * (kMinLifeH + kMaxLifeH);
  const auto count = static_cast<std::size_t>(
      std::llround(storm_density * area / 100.0 * (span_h + kMaxLifeH) / mean_life));

  storms_.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Storm s{};
    s.birth_s = static_cast<double>(span.start) - kMaxLifeH * 3600.0 +
                unit(rng) * (span_h + kMaxLifeH) * 3600.0;
    s.life_s = (kMinLifeH + unit(rng) * (kMaxLifeH - kMinLifeH)) * 3600.0;
    s.lat0_deg = region.lat_min_deg + unit(rng) * lat_span;
    s.lon0_deg = region.lon_min_deg + unit(rng) * lon_span;
    const double heading = 2 * kPi * unit(rng);
    const double speed = 5.0 + 10.0 * unit(rng);
    s.v_north_mps = speed * std::cos(heading);
    s.v_east_mps = speed * std::sin(heading);
    s.radius_m = 40'000.0 + 80'000.0 * unit(rng);
    s.peak_mmh = 5.0 + 25.0 * unit(rng);
    storms_.push_back(s);
  }
  max_life_s_ = kMaxLifeH * 3600.0;
  std::stable_sort(storms_.begin(), storms_.end(),
                   [](const Storm& a, const Storm& b) { return a.birth_s < b.birth_s; });
}

double SyntheticWeather::precipitation(Timestamp hour, double lat, double lon) const {
  const double t = static_cast<double>(hour);
  constexpr double kMetersPerDeg = kEarthRadiusM * kPi / 180.0;
  double total = 0.0;
  auto first = std::lower_bound(storms_.begin(), storms_.end(), t - max_life_s_,
                                [](const Storm& s, double v) { return s.birth_s < v; });
  for (auto it = first; it != storms_.end() && it->birth_s <= t; ++it) {
    const Storm& s = *it;
    const double age = t - s.birth_s;
    if (age < 0.0 || age > s.life_s) continue;
    const double clat = s.lat0_deg + s.v_north_mps * age / kMetersPerDeg;
    if (std::abs(clat - lat) * kMetersPerDeg > 5.0 * s.radius_m) continue;
    const double coslat = std::max(0.05, std::cos(deg2rad(clat)));
    const double clon = normalize_longitude(s.lon0_deg + s.v_east_mps * age / (kMetersPerDeg * coslat));
    const double d = haversine_m(GeoPosition{lat, lon, 0.0},
                                 GeoPosition{std::clamp(clat, -90.0, 90.0), clon, 0.0});
    if (d > 5.0 * s.radius_m) continue;
    const double envelope = std::sin(kPi * age / s.life_s);
    total += s.peak_mmh * envelope * std::exp(-0.5 * (d * d) / (s.radius_m * s.radius_m));
  }
  return total < 0.05 ? 0.0 : total;
}

WeatherCell SyntheticWeather::cell(Timestamp hour, GridIndex idx) const {
  WeatherCell c;
  c.hour_utc = hour;
  c.grid_lat_deg = grid_lat_of(idx.lat);
  c.grid_lon_deg = grid_lon_of(idx.lon);
  const double lat = c.grid_lat_deg;
  const double lon = c.grid_lon_deg;
  const double precip = precipitation(hour, lat, lon);
  const double day_frac = static_cast<double>(((hour % kSecondsPerDay) + kSecondsPerDay) % kSecondsPerDay) /
                          kSecondsPerDay;
  const double local_solar = day_frac + lon / 360.0;

  c.precipitation_mmh = quantize6(precip);
  c.cloud_cover_pct = quantize6(std::clamp(
      35.0 + 20.0 * std::sin(deg2rad(3.0 * lat) + deg2rad(2.0 * lon) + phase_a_) + 6.0 * precip, 0.0,
      100.0));
  c.temperature_c = quantize6(28.0 - 0.5 * std::abs(lat) +
                              5.0 * std::sin(2 * kPi * (local_solar - 0.375)) -
                              0.8 * std::sqrt(precip) + 2.0 * std::sin(deg2rad(lon) + phase_b_));
  c.wind_speed_mps = quantize6(std::max(
      0.0, 6.0 + 3.0 * std::sin(deg2rad(5.0 * lat) - deg2rad(4.0 * lon) + phase_c_) + 0.3 * precip));
  return c;
}

WeatherCell SyntheticWeather::lookup_nearest(Timestamp t, const GeoPosition& p) const {
  auto idx = nearest_grid_index(p, [](GridIndex) { return true; });
  return cell(round_to_hour(t), *idx);
}

WeatherField synth_weather_field(const GridBounds& bounds, const TimeSpan& span,
                                 double storm_density, std::uint64_t seed) {
  if (bounds.lat_cells <= 0 || bounds.lon_cells <= 0) throw Error("weather bounds are empty");
  SyntheticWeather model(bounds, span, storm_density, seed);
  const GridIndex origin = grid_index_of(bounds.lat_min_deg, bounds.lon_min_deg);
  WeatherField field;
  for (Timestamp h = floor_to_hour(span.start); h < span.end; h += kSecondsPerHour) {
    if (h < span.start) continue;
    for (int i = 0; i < bounds.lat_cells; ++i) {
      for (int j = 0; j < bounds.lon_cells; ++j) {
        field.insert(model.cell(h, GridIndex{origin.lat + i, wrap_lon_index(origin.lon + j)}));
      }
    }
  }
  if (field.empty()) throw Error("weather time span contains no hour boundary");
  return field;
}

WeatherField load_weather_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open weather file " + path.string());
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row) || row != kWeatherHeader) {
    throw ParseError("weather file " + path.string() + ": bad header", {1});
  }

  WeatherField field;
  std::map<std::tuple<Timestamp, int, int>, std::size_t> first_seen;
  std::vector<std::size_t> bad_lines;
  std::string first_message;
  while (reader.next(row)) {
    const std::size_t line = reader.line();
    if (row.size() == 1 && row[0].empty()) continue;
    try {
      if (reader.malformed() || row.size() != kWeatherHeader.size()) {
        throw Error("expected 7 fields");
      }
      auto num = [&](std::size_t i) {
        std::size_t used = 0;
        const double v = std::stod(row[i], &used);
        if (used != row[i].size()) throw Error("bad number '" + row[i] + "'");
        return v;
      };
      WeatherCell c;
      c.hour_utc = parse_iso8601(row[0]);
      c.grid_lat_deg = num(1);
      c.grid_lon_deg = num(2);
      c.precipitation_mmh = num(3);
      c.cloud_cover_pct = num(4);
      c.temperature_c = num(5);
      c.wind_speed_mps = num(6);
      const GridIndex idx = grid_index_of(c.grid_lat_deg, c.grid_lon_deg);
      auto key = std::make_tuple(c.hour_utc, idx.lat, idx.lon);
      if (auto it = first_seen.find(key); it != first_seen.end()) {
        bad_lines.push_back(it->second);
        bad_lines.push_back(line);
        if (first_message.empty()) {
          first_message = "duplicate cell on lines " + std::to_string(it->second) + " and " +
                          std::to_string(line);
        }
        continue;
      }
      field.insert(c);
      first_seen.emplace(key, line);
    } catch (const std::exception& e) {
      bad_lines.push_back(line);
      if (first_message.empty()) first_message = "line " + std::to_string(line) + ": " + e.what();
    }
  }
  if (!bad_lines.empty()) {
    std::sort(bad_lines.begin(), bad_lines.end());
    bad_lines.erase(std::unique(bad_lines.begin(), bad_lines.end()), bad_lines.end());
    std::ostringstream msg;
    msg << "weather file " << path.string() << ": " << first_message << " (bad lines:";
    for (auto l : bad_lines) msg << ' ' << l;
    msg << ')';
    throw ParseError(msg.str(), bad_lines);
  }
  return field;
}

void save_weather_csv(const WeatherField& field, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write weather file " + path.string());
  csv::write_row(out, kWeatherHeader);
  for (const WeatherCell& c : field.cells()) {
    csv::write_row(out, {format_iso8601(c.hour_utc), csv::format_fixed6(c.grid_lat_deg),
                         csv::format_fixed6(c.grid_lon_deg), csv::format_fixed6(c.precipitation_mmh),
                         csv::format_fixed6(c.cloud_cover_pct), csv::format_fixed6(c.temperature_c),
                         csv::format_fixed6(c.wind_speed_mps)});
  }
  if (!out) throw IoError("failed writing weather file " + path.string());
}

}  // namespace satlink

#include "satlink/handover.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "satlink/error.hpp"

namespace satlink {

void HoPolicy::validate() const {
  if (consecutive_k < 1) throw ConfigError("consecutive_k must be >= 1");
  if (!(min_dwell_s >= 0.0)) throw ConfigError("min_dwell_s must be >= 0");
  if (horizon_min < consecutive_k) throw ConfigError("horizon_min must be >= consecutive_k");
}

std::pair<HoState, HoDecision> step(const HoState& state, Timestamp t, const CategoryRow& row,
                                    const HoPolicy& policy) {
  if (state.last_step_time && t <= *state.last_step_time) {
    throw Error("handover steps must move forward in time");
  }
  const auto serving = row.find(state.serving_satellite);
  if (serving == row.end()) throw Error("unknown serving satellite " + state.serving_satellite);

  HoState next = state;
  next.last_step_time = t;
  HoDecision decision;
  if (serving->second < policy.degrade_threshold) {
    ++next.degraded_run;
  } else {
    next.degraded_run = 0;
  }

  const bool dwell_ok =
      !state.last_switch_time || static_cast<double>(t - *state.last_switch_time) >= policy.min_dwell_s;
  if (next.degraded_run >= policy.consecutive_k && dwell_ok) {
    const std::string* best = nullptr;
    CnrCategory best_cat = serving->second;
    for (const auto& [sat, cat] : row) {
      if (sat != state.serving_satellite && cat > best_cat) {
        best = &sat;
        best_cat = cat;
      }
    }
    if (best != nullptr) {
      decision.is_switch = true;
      decision.target = *best;
      next.event_log.push_back(HoEvent{t, state.serving_satellite, *best,
                                       std::string("serving predicted ") + category_name(serving->second) +
                                           " for " + std::to_string(next.degraded_run) + " steps; " + *best +
                                           " predicted " + category_name(best_cat)});
      next.serving_satellite = *best;
      next.degraded_run = 0;
      next.last_switch_time = t;
    }
  }
  return {std::move(next), decision};
}

CategoryRow ForecastGrid::row(std::size_t i) const {
  CategoryRow out;
  for (std::size_t s = 0; s < satellites.size(); ++s) out.emplace(satellites[s], categories.at(i)[s]);
  return out;
}

std::string ForecastGrid::to_json() const {
  nlohmann::json j;
  j["satellites"] = satellites;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < times.size(); ++i) {
    nlohmann::json cats = nlohmann::json::object();
    for (std::size_t s = 0; s < satellites.size(); ++s) cats[satellites[s]] = category_name(categories[i][s]);
    rows.push_back({{"t", format_iso8601(times[i])}, {"categories", cats}});
  }
  j["grid"] = rows;
  return j.dump(2);
}

ForecastGrid forecast_route(const std::map<std::string, SatelliteModels>& models,
                            std::span<const FlightLogRecord> waypoints, const WeatherProvider* weather) {
  if (models.empty()) throw Error("forecast needs at least one satellite model");
  for (const auto& [sat, m] : models) {
    if (m.base == nullptr) throw Error("no base model for satellite " + sat);
    if (m.base->schema.with_weather) {
      throw SchemaMismatchError("base model for " + sat + " must not require weather columns");
    }
    if (m.with_weather != nullptr && !m.with_weather->schema.with_weather) {
      throw SchemaMismatchError("weather model for " + sat + " lacks weather columns");
    }
  }
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    if (waypoints[i].log_date <= waypoints[i - 1].log_date) throw Error("waypoints must be time-ordered");
  }

  ForecastGrid grid;
  for (const auto& [sat, m] : models) grid.satellites.push_back(sat);
  std::vector<double> buf;
  for (const auto& wp : waypoints) {
    grid.times.push_back(wp.log_date);
    std::optional<WeatherValues> wx;
    if (weather != nullptr) {
      try {
        const auto c = weather->lookup_nearest(wp.log_date, GeoPosition{wp.latitude_deg, wp.longitude_deg, wp.altitude_m});
        wx = WeatherValues{c.precipitation_mmh, c.cloud_cover_pct, c.temperature_c, c.wind_speed_mps};
      } catch (const CoverageGapError&) {
      }
    }
    std::vector<CnrCategory> row;
    for (const auto& [sat, m] : models) {
      FlightLogRecord rec = wp;
      rec.satellite_id = sat;
      const GbmModel* model = m.base;
      if (wx && m.with_weather != nullptr) {
        model = m.with_weather;
        rec.weather = wx;
      }
      buf.assign(model->schema.num_columns(), 0.0);
      encode_row(rec, model->schema, model->vocab, buf);
      row.push_back(predict_category(*model, buf, model->schema.hash()));
    }
    grid.categories.push_back(std::move(row));
  }
  return grid;
}

namespace {

CnrCategory category_at(const ForecastGrid& grid, std::size_t i, const std::string& sat) {
  const auto it = std::find(grid.satellites.begin(), grid.satellites.end(), sat);
  if (it == grid.satellites.end()) throw Error("satellite " + sat + " missing from grid");
  return grid.categories.at(i)[static_cast<std::size_t>(it - grid.satellites.begin())];
}

}  // namespace

HoReport simulate_handover(const ForecastGrid& predictions, const std::string& initial_satellite,
                           const HoPolicy& policy, const ForecastGrid* truth) {
  policy.validate();
  const std::size_t n = predictions.times.size();
  if (truth != nullptr && truth->times.size() != n) throw Error("truth grid length differs from predictions");
  const std::size_t lead = static_cast<std::size_t>(std::min(policy.consecutive_k - 1, policy.horizon_min - 1));

  HoReport report;
  report.minutes = n;
  HoState state;
  state.serving_satellite = initial_satellite;
  std::size_t outage = 0, baseline = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t look = std::min(i + lead, n - 1);
    auto [next, decision] = step(state, predictions.times[i], predictions.row(look), policy);
    state = std::move(next);
    if (truth != nullptr) {
      if (category_at(*truth, i, state.serving_satellite) == CnrCategory::kBad) ++outage;
      if (category_at(*truth, i, initial_satellite) == CnrCategory::kBad) ++baseline;
    }
  }
  report.switches = state.event_log;
  if (truth != nullptr) {
    report.outage_minutes = outage;
    report.baseline_outage_minutes = baseline;
  }
  return report;
}

void mask_below_horizon(ForecastGrid& grid, std::span<const FlightLogRecord> waypoints,
                        const std::vector<GeoSatellite>& geometry, double horizon_cut_deg) {
  if (waypoints.size() != grid.times.size()) throw Error("waypoint count differs from the forecast grid");
  for (std::size_t s = 0; s < grid.satellites.size(); ++s) {
    const auto sat = std::find_if(geometry.begin(), geometry.end(),
                                  [&](const GeoSatellite& g) { return g.satellite_id == grid.satellites[s]; });
    if (sat == geometry.end()) continue;
    for (std::size_t i = 0; i < waypoints.size(); ++i) {
      const auto& w = waypoints[i];
      const GeoPosition p{w.latitude_deg, w.longitude_deg, w.altitude_m};
      if (geo_look_angles(p, *sat).elevation_deg < horizon_cut_deg) grid.categories[i][s] = CnrCategory::kBad;
    }
  }
}

std::string HoReport::to_json() const {
  nlohmann::json j;
  nlohmann::json sw = nlohmann::json::array();
  for (const auto& e : switches) {
    sw.push_back({{"t", format_iso8601(e.t)}, {"from", e.from}, {"to", e.to}, {"reason", e.reason}});
  }
  j["switches"] = sw;
  j["minutes"] = minutes;
  j["outage_minutes"] = outage_minutes ? nlohmann::json(*outage_minutes) : nlohmann::json(nullptr);
  j["baseline_outage_minutes"] =
      baseline_outage_minutes ? nlohmann::json(*baseline_outage_minutes) : nlohmann::json(nullptr);
  return j.dump(2);
}

}  // namespace satlink

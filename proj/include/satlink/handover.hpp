#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "satlink/gbm.hpp"
#include "satlink/ingest.hpp"
#include "satlink/weather.hpp"

namespace satlink {

struct HoPolicy {
  // Degraded when the serving satellite's predicted category is below this.
  CnrCategory degrade_threshold = CnrCategory::kWeak;
  int consecutive_k = 3;
  double min_dwell_s = 600.0;  // may be +inf
  int horizon_min = 10;

  void validate() const;
};

struct HoEvent {
  Timestamp t = 0;
  std::string from;
  std::string to;
  std::string reason;
  bool operator==(const HoEvent&) const = default;
};

struct HoState {
  std::string serving_satellite;
  std::optional<Timestamp> last_switch_time;
  int degraded_run = 0;
  std::optional<Timestamp> last_step_time;
  std::vector<HoEvent> event_log;
  bool operator==(const HoState&) const = default;
};

struct HoDecision {
  bool is_switch = false;
  std::string target;  // set when is_switch
};

// Predicted category per satellite id for one instant.
using CategoryRow = std::map<std::string, CnrCategory>;

// Pure transition. Switches to the best strictly-better satellite (ties: smallest id)
// once the serving link has been degraded for k consecutive steps and the dwell time
// since the last switch has elapsed.
std::pair<HoState, HoDecision> step(const HoState& state, Timestamp t, const CategoryRow& row,
                                    const HoPolicy& policy);

// Time x satellite grid of categories.
struct ForecastGrid {
  std::vector<Timestamp> times;
  std::vector<std::string> satellites;  // sorted
  std::vector<std::vector<CnrCategory>> categories;  // [waypoint][satellite]

  CategoryRow row(std::size_t i) const;
  std::string to_json() const;
};

// Per-satellite model set. `with_weather` is used only where weather is available.
struct SatelliteModels {
  const GbmModel* base = nullptr;
  const GbmModel* with_weather = nullptr;
};

// Predicted category for every (waypoint, satellite). The waypoint's own satellite_id is
// replaced by each candidate in turn.
ForecastGrid forecast_route(const std::map<std::string, SatelliteModels>& models,
                            std::span<const FlightLogRecord> waypoints, const WeatherProvider* weather);

// Sets every (waypoint, satellite) whose satellite sits below `horizon_cut_deg` to Bad.
// Models only ever see visible links, so visibility is applied from geometry instead.
// Satellites missing from `geometry` are left untouched.
void mask_below_horizon(ForecastGrid& grid, std::span<const FlightLogRecord> waypoints,
                        const std::vector<GeoSatellite>& geometry, double horizon_cut_deg);

struct HoReport {
  std::vector<HoEvent> switches;
  std::size_t minutes = 0;
  std::optional<std::size_t> outage_minutes;
  std::optional<std::size_t> baseline_outage_minutes;

  std::string to_json() const;
};

// Runs step() over the grid. At minute i the policy sees the prediction for minute
// i + consecutive_k - 1 (capped by the horizon and the end of the flight), so a switch
// can land before a predicted degradation. With `truth`, counts minutes whose serving
// satellite is truly Bad, and the same for never leaving `initial_satellite`.
HoReport simulate_handover(const ForecastGrid& predictions, const std::string& initial_satellite,
                           const HoPolicy& policy, const ForecastGrid* truth = nullptr);

}  // namespace satlink

#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "satlink/flightsim.hpp"
#include "satlink/gbm.hpp"
#include "satlink/handover.hpp"
#include "satlink/ingest.hpp"
#include "satlink/metrics.hpp"
#include "satlink/weather.hpp"

namespace satlink {

// One row of the experiment matrix: dataset selector, altitude stratum, weather on/off,
// optional satellite, learner settings.
struct ExperimentSpec {
  std::string name;
  std::optional<std::size_t> top_k;  // empty = every route
  std::optional<double> min_altitude_m;
  std::optional<double> max_altitude_m;
  bool weather = false;
  std::optional<std::string> satellite;
  GbmHyperParams hyperparams;
  double test_fraction = 0.2;
  std::uint64_t seed = 1;
  // Also train the CNR regressor and report its binned outputs next to the classifier.
  bool compare_regression = false;

  void validate() const;
  std::string describe() const;
};

ExperimentSpec parse_experiment_spec(const nlohmann::json& j, const ExperimentSpec& defaults = {});

struct Corpus {
  std::vector<FlightLogRecord> records;
  std::optional<WeatherField> weather;
};

// Every flight log under dir/flights plus dir/weather.csv when present.
Corpus load_corpus(const std::filesystem::path& dir);

struct Dataset {
  std::vector<FlightLogRecord> records;  // labeled rows after all filters and the join
  JoinReport join;
};

Dataset build_dataset(const ExperimentSpec& spec, const Corpus& corpus);

struct RegressionComparison {
  RegressionMetrics regression;
  EvalReport regressor_binned;
};

struct ExperimentReport {
  ExperimentSpec spec;
  std::size_t dataset_size = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  JoinReport join;
  EvalReport eval;
  EvalReport majority_baseline;
  std::optional<RegressionComparison> regression;
  double wall_clock_s = 0.0;  // not serialized; reports stay byte-reproducible

  nlohmann::json to_json() const;
};

struct ExperimentRun {
  ExperimentReport report;
  GbmModel model;
};

ExperimentRun run_experiment(const ExperimentSpec& spec, const Corpus& corpus);

// Re-evaluates a trained model on the dataset selected by `spec` (no split).
ExperimentReport evaluate_model_on(const GbmModel& model, const ExperimentSpec& spec, const Corpus& corpus);

std::vector<ExperimentSpec> parse_matrix_config(const std::string& json_text);
std::vector<ExperimentReport> run_matrix(const std::vector<ExperimentSpec>& specs, const Corpus& corpus);
std::string matrix_table(const std::vector<ExperimentReport>& reports);

// Picks the candidate with the best validation weighted F1 (ties: earliest candidate).
GbmHyperParams grid_search(const FeatureMatrix& train, const Vocabulary& vocab,
                           const std::vector<GbmHyperParams>& candidates, double validation_fraction,
                           std::uint64_t seed);

// Noise-free categories of every configured satellite along the logged positions, with
// below-horizon links counted as Bad.
ForecastGrid truth_grid(std::span<const FlightLogRecord> flight, const GenerationConfig& config,
                        const SyntheticWeather& weather);

HoPolicy parse_policy(const nlohmann::json& j);

}  // namespace satlink

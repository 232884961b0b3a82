#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "satlink/error.hpp"
#include "satlink/experiment.hpp"
#include "test_util.hpp"

using namespace satlink;
using namespace satlink::testing;

namespace {

const std::filesystem::path& small_corpus_dir() {
  static const std::filesystem::path dir = [] {
    auto d = temp_dir("experiment_corpus");
    generate_dataset(small_config(8), d);
    return d;
  }();
  return dir;
}

ExperimentSpec quick_spec() {
  ExperimentSpec s;
  s.name = "quick";
  s.hyperparams.n_rounds = 10;
  s.hyperparams.max_depth = 3;
  s.seed = 3;
  return s;
}

}  // namespace

TEST(ExperimentSpec, ParsesAndValidates) {
  const auto s = parse_experiment_spec(nlohmann::json::parse(
      R"({"name": "x", "dataset": {"top_k": 2}, "max_altitude_m": 3000, "weather": true,
          "hyperparams": {"n_rounds": 5}, "seed": 9})"));
  EXPECT_EQ(*s.top_k, 2u);
  EXPECT_EQ(*s.max_altitude_m, 3000.0);
  EXPECT_TRUE(s.weather);
  EXPECT_EQ(s.hyperparams.n_rounds, 5);
  EXPECT_EQ(s.hyperparams.max_depth, GbmHyperParams{}.max_depth);
  EXPECT_THROW(parse_experiment_spec(nlohmann::json::parse(R"({"bogus": 1})")), ConfigError);
  EXPECT_THROW(parse_experiment_spec(nlohmann::json::parse(R"({"min_altitude_m": 5000, "max_altitude_m": 4000})")),
               ConfigError);
}

TEST(Experiment, ShippedMatrixConfigParses) {
  const auto specs = parse_matrix_config(read_file(source_dir() / "configs/matrix_directional.json"));
  ASSERT_EQ(specs.size(), 3u);
  EXPECT_EQ(*specs[0].min_altitude_m, 6000.0);
  EXPECT_FALSE(specs[1].weather);
  EXPECT_TRUE(specs[2].weather);
  EXPECT_EQ(specs[2].seed, specs[0].seed);
}

TEST(Experiment, RunIsDeterministicAndBeatsOrMatchesTheBaseline) {
  const Corpus corpus = load_corpus(small_corpus_dir());
  ASSERT_TRUE(corpus.weather.has_value());
  const auto a = run_experiment(quick_spec(), corpus);
  const auto b = run_experiment(quick_spec(), corpus);
  EXPECT_EQ(a.report.to_json().dump(), b.report.to_json().dump());
  EXPECT_EQ(model_to_json(a.model), model_to_json(b.model));
  EXPECT_EQ(a.report.train_rows + a.report.test_rows, a.report.dataset_size);
  EXPECT_GE(a.report.eval.weighted_f1 + 1e-12, 0.0);
  EXPECT_EQ(a.report.to_json().dump().find("wall_clock"), std::string::npos);
  EXPECT_TRUE(loss_monotone(a.model));
}

TEST(Experiment, WeatherStratumJoinsAndEvaluates) {
  const Corpus corpus = load_corpus(small_corpus_dir());
  auto spec = quick_spec();
  spec.max_altitude_m = 6000;
  spec.weather = true;
  spec.compare_regression = true;
  const auto run = run_experiment(spec, corpus);
  EXPECT_EQ(run.report.join.dropped_rows, 0u);
  EXPECT_GT(run.report.join.joined_rows, 0u);
  EXPECT_TRUE(run.model.schema.with_weather);
  ASSERT_TRUE(run.report.regression.has_value());
  EXPECT_GE(run.report.regression->regression.mae_db, 0.0);
}

TEST(Experiment, EmptySelectionIsAnError) {
  const Corpus corpus = load_corpus(small_corpus_dir());
  auto spec = quick_spec();
  spec.satellite = "NOPE";
  EXPECT_THROW(run_experiment(spec, corpus), EmptyDatasetError);
}

TEST(Experiment, EvaluateModelOnUsesTheModelVocabulary) {
  const Corpus corpus = load_corpus(small_corpus_dir());
  const auto run = run_experiment(quick_spec(), corpus);
  const auto rep = evaluate_model_on(run.model, quick_spec(), corpus);
  EXPECT_EQ(rep.test_rows, rep.dataset_size);
  EXPECT_GT(rep.eval.accuracy, 0.0);
}

TEST(Experiment, GridSearchPicksAValidCandidate) {
  const Corpus corpus = load_corpus(small_corpus_dir());
  const auto enc = encode_features(corpus.records, FeatureSchema{false}, nullptr, EncodeMode::kLabeled);
  GbmHyperParams a, b;
  a.n_rounds = 0;
  b.n_rounds = 10;
  b.max_depth = 3;
  const auto best = grid_search(enc.matrix, enc.vocab, {a, b}, 0.25, 1);
  EXPECT_TRUE(best == a || best == b);
  EXPECT_THROW(grid_search(enc.matrix, enc.vocab, {}, 0.25, 1), ConfigError);
}

TEST(Forecast, GridShapeAndTruthConsistency) {
  const auto cfg = small_config(8);
  const Corpus corpus = load_corpus(small_corpus_dir());
  const auto run = run_experiment(quick_spec(), corpus);
  std::vector<FlightLogRecord> flight;
  for (const auto& r : corpus.records)
    if (r.flight_id == corpus.records.front().flight_id) flight.push_back(r);

  std::map<std::string, SatelliteModels> models;
  for (const auto& s : cfg.satellites) models[s.satellite_id] = SatelliteModels{&run.model, nullptr};
  const auto grid = forecast_route(models, flight, nullptr);
  EXPECT_EQ(grid.times.size(), flight.size());
  EXPECT_EQ(grid.satellites.size(), cfg.satellites.size());
  EXPECT_TRUE(std::is_sorted(grid.satellites.begin(), grid.satellites.end()));

  const auto truth = truth_grid(flight, cfg, make_weather_model(cfg));
  EXPECT_EQ(truth.satellites, grid.satellites);
  const auto rep = simulate_handover(grid, flight.front().satellite_id, HoPolicy{}, &truth);
  EXPECT_EQ(rep.minutes, flight.size());
  EXPECT_TRUE(rep.outage_minutes.has_value());

  // A weather-dependent model without a weather source cannot be used.
  auto spec = quick_spec();
  spec.max_altitude_m = 6000;
  spec.weather = true;
  const auto wx_run = run_experiment(spec, corpus);
  std::map<std::string, SatelliteModels> wx_only;
  wx_only["I5F1"] = SatelliteModels{&wx_run.model, nullptr};
  EXPECT_THROW(forecast_route(wx_only, flight, nullptr), SchemaMismatchError);
}

TEST(Experiment, MatrixRowsMatchConfigAndIndependentRecounts) {
  const Corpus corpus = load_corpus(small_corpus_dir());
  std::vector<ExperimentSpec> specs(3, quick_spec());
  specs[0].min_altitude_m = 6000;
  specs[1].max_altitude_m = 6000;
  specs[2].satellite = "I5F1";
  const auto reports = run_matrix(specs, corpus);
  ASSERT_EQ(reports.size(), specs.size());
  auto count = [&](auto pred) {
    std::size_t n = 0;
    for (const auto& r : corpus.records) n += r.cnr_db.has_value() && pred(r);
    return n;
  };
  EXPECT_EQ(reports[0].dataset_size, count([](const FlightLogRecord& r) { return r.altitude_m > 6000; }));
  EXPECT_EQ(reports[1].dataset_size, count([](const FlightLogRecord& r) { return r.altitude_m < 6000; }));
  EXPECT_EQ(reports[2].dataset_size, count([](const FlightLogRecord& r) { return r.satellite_id == "I5F1"; }));
  EXPECT_EQ(reports[0].to_json().dump(), run_experiment(specs[0], corpus).report.to_json().dump());
  EXPECT_TRUE(run_matrix({}, corpus).empty());
}

TEST(Forecast, EmptyPlanAndSingleWaypoint) {
  const Corpus corpus = load_corpus(small_corpus_dir());
  const auto run = run_experiment(quick_spec(), corpus);
  std::map<std::string, SatelliteModels> one{{"I5F1", SatelliteModels{&run.model, nullptr}}};
  const auto empty = forecast_route(one, std::span<const FlightLogRecord>{}, nullptr);
  EXPECT_TRUE(empty.times.empty());
  EXPECT_TRUE(empty.categories.empty());

  FlightLogRecord wp = corpus.records.front();
  wp.satellite_id = "I5F1";
  wp.cnr_db.reset();
  const auto grid = forecast_route(one, std::span<const FlightLogRecord>(&wp, 1), nullptr);
  ASSERT_EQ(grid.categories.size(), 1u);
  std::vector<double> row(run.model.schema.num_columns());
  encode_row(wp, run.model.schema, run.model.vocab, row);
  EXPECT_EQ(grid.categories[0][0], predict_category(run.model, row, run.model.schema_hash()));

  // With a single satellite there is never anything to switch to.
  ForecastGrid solo;
  solo.satellites = {"I5F1"};
  for (int i = 0; i < 30; ++i) {
    solo.times.push_back(1672531200 + 60 * i);
    solo.categories.push_back({CnrCategory::kBad});
  }
  EXPECT_TRUE(simulate_handover(solo, "I5F1", HoPolicy{}, &solo).switches.empty());
}

TEST(Forecast, GridEqualsPerRowPredictions) {
  const auto cfg = small_config(8);
  const Corpus corpus = load_corpus(small_corpus_dir());
  const auto run = run_experiment(quick_spec(), corpus);
  std::map<std::string, SatelliteModels> models;
  for (const auto& s : cfg.satellites) models[s.satellite_id] = SatelliteModels{&run.model, nullptr};

  std::mt19937_64 rng(12);
  std::vector<FlightLogRecord> waypoints;
  for (int i = 0; i < 100; ++i) {
    std::uniform_int_distribution<std::size_t> pick(0, corpus.records.size() - 1);
    FlightLogRecord w = corpus.records[pick(rng)];
    w.log_date = 1672531200 + 60 * i;
    w.cnr_db.reset();
    waypoints.push_back(w);
  }
  const auto grid = forecast_route(models, waypoints, nullptr);
  std::vector<double> row(run.model.schema.num_columns());
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    for (std::size_t s = 0; s < grid.satellites.size(); ++s) {
      FlightLogRecord w = waypoints[i];
      w.satellite_id = grid.satellites[s];
      encode_row(w, run.model.schema, run.model.vocab, row);
      EXPECT_EQ(grid.categories[i][s], predict_category(run.model, row, run.model.schema_hash()));
    }
  }

  auto masked = grid;
  mask_below_horizon(masked, waypoints, cfg.satellites, cfg.link_params.horizon_cut_elevation_deg);
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    const GeoPosition p{waypoints[i].latitude_deg, waypoints[i].longitude_deg, waypoints[i].altitude_m};
    for (std::size_t s = 0; s < grid.satellites.size(); ++s) {
      const auto& sat = *std::find_if(cfg.satellites.begin(), cfg.satellites.end(),
                                      [&](const GeoSatellite& g) { return g.satellite_id == grid.satellites[s]; });
      const bool hidden = geo_look_angles(p, sat).elevation_deg < cfg.link_params.horizon_cut_elevation_deg;
      EXPECT_EQ(masked.categories[i][s], hidden ? CnrCategory::kBad : grid.categories[i][s]);
    }
  }
}

TEST(Policy, ParsesInfiniteDwell) {
  const auto p = parse_policy(nlohmann::json::parse(R"({"min_dwell_s": "inf", "consecutive_k": 2})"));
  EXPECT_TRUE(std::isinf(p.min_dwell_s));
  EXPECT_EQ(p.consecutive_k, 2);
  EXPECT_THROW(parse_policy(nlohmann::json::parse(R"({"consecutive_k": 0})")), ConfigError);
  EXPECT_THROW(parse_policy(nlohmann::json::parse(R"({"extra": 1})")), ConfigError);
}

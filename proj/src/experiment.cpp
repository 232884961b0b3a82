#include "satlink/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "satlink/error.hpp"
#include "satlink/parallel.hpp"

namespace satlink {

using nlohmann::json;

void ExperimentSpec::validate() const {
  if (top_k && *top_k < 1) throw ConfigError("top_k must be >= 1");
  if (min_altitude_m && max_altitude_m && !(*min_altitude_m < *max_altitude_m)) {
    throw ConfigError("experiment " + name + ": min altitude must be below max altitude");
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("test_fraction must lie in (0, 1)");
  hyperparams.validate();
}

std::string ExperimentSpec::describe() const {
  std::ostringstream out;
  out << (top_k ? "top-" + std::to_string(*top_k) + " routes" : std::string("all routes"));
  char buf[64];
  if (min_altitude_m) {
    std::snprintf(buf, sizeof(buf), " alt>%gm", *min_altitude_m);
    out << buf;
  }
  if (max_altitude_m) {
    std::snprintf(buf, sizeof(buf), " alt<%gm", *max_altitude_m);
    out << buf;
  }
  if (weather) out << " +4 weather";
  if (satellite) out << " sat=" << *satellite;
  return out.str();
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

}  // namespace

ExperimentSpec parse_experiment_spec(const json& j, const ExperimentSpec& defaults) {
  ExperimentSpec s = defaults;
  try {
    check_keys(j,
               {"name", "dataset", "min_altitude_m", "max_altitude_m", "weather", "satellite", "hyperparams",
                "test_fraction", "seed", "compare_regression"},
               "experiment spec");
    if (j.contains("name")) s.name = j.at("name").get<std::string>();
    if (j.contains("dataset")) {
      const auto& d = j.at("dataset");
      if (d.is_string() && d.get<std::string>() == "all") {
        s.top_k.reset();
      } else if (d.is_object()) {
        check_keys(d, {"top_k"}, "dataset");
        s.top_k = d.at("top_k").get<std::size_t>();
      } else {
        throw ConfigError("dataset must be \"all\" or {\"top_k\": k}");
      }
    }
    if (j.contains("min_altitude_m")) {
      s.min_altitude_m = j.at("min_altitude_m").is_null() ? std::nullopt
                                                          : std::optional<double>(j.at("min_altitude_m").get<double>());
    }
    if (j.contains("max_altitude_m")) {
      s.max_altitude_m = j.at("max_altitude_m").is_null() ? std::nullopt
                                                          : std::optional<double>(j.at("max_altitude_m").get<double>());
    }
    if (j.contains("weather")) s.weather = j.at("weather").get<bool>();
    if (j.contains("satellite")) {
      s.satellite = j.at("satellite").is_null() ? std::nullopt
                                                : std::optional<std::string>(j.at("satellite").get<std::string>());
    }
    if (j.contains("hyperparams")) {
      const auto& h = j.at("hyperparams");
      check_keys(h, {"n_rounds", "max_depth", "learning_rate", "min_child_weight", "n_bins", "l2_lambda", "seed"},
                 "hyperparams");
      auto& hp = s.hyperparams;
      hp.n_rounds = h.value("n_rounds", hp.n_rounds);
      hp.max_depth = h.value("max_depth", hp.max_depth);
      hp.learning_rate = h.value("learning_rate", hp.learning_rate);
      hp.min_child_weight = h.value("min_child_weight", hp.min_child_weight);
      hp.n_bins = h.value("n_bins", hp.n_bins);
      hp.l2_lambda = h.value("l2_lambda", hp.l2_lambda);
      hp.seed = h.value("seed", hp.seed);
    }
    if (j.contains("test_fraction")) s.test_fraction = j.at("test_fraction").get<double>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("compare_regression")) s.compare_regression = j.at("compare_regression").get<bool>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid experiment spec: ") + e.what());
  }
  if (s.name.empty()) s.name = s.describe();
  s.validate();
  return s;
}

Corpus load_corpus(const std::filesystem::path& dir) {
  Corpus c;
  const auto files = dataset_flight_files(dir);
  c.records = parse_logs(files);
  if (std::filesystem::exists(dir / "weather.csv")) c.weather = load_weather_csv(dir / "weather.csv");
  return c;
}

Dataset build_dataset(const ExperimentSpec& spec, const Corpus& corpus) {
  std::vector<FlightLogRecord> rows;
  if (spec.top_k) {
    rows = top_routes(corpus.records, *spec.top_k).records;
  } else {
    rows = corpus.records;
  }
  rows = filter_altitude(rows, spec.min_altitude_m, spec.max_altitude_m);
  if (spec.satellite) rows = filter_satellite(rows, *spec.satellite);
  std::erase_if(rows, [](const FlightLogRecord& r) { return !r.labeled(); });

  Dataset d;
  if (spec.weather) {
    if (!corpus.weather) throw ConfigError("experiment " + spec.name + " needs weather but the corpus has none");
    auto joined = join_weather(rows, *corpus.weather);
    d.join = joined.report;
    rows = std::move(joined.records);
  }
  d.records = std::move(rows);
  return d;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

json eval_json(const EvalReport& r) { return json::parse(r.to_json()); }

}  // namespace

ExperimentRun run_experiment(const ExperimentSpec& spec, const Corpus& corpus) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  const Dataset data = build_dataset(spec, corpus);
  if (data.records.empty()) {
    throw EmptyDatasetError("experiment '" + spec.name + "' selects no labeled rows");
  }
  const FeatureSchema schema{spec.weather};
  // The vocabulary comes from the training flights only, so encode after the split.
  const auto all = encode_features(data.records, schema, nullptr, EncodeMode::kLabeled);
  const auto split = split_by_flight(all.matrix, spec.test_fraction, spec.seed);
  std::set<std::string> train_flights(split.train.flight_ids.begin(), split.train.flight_ids.end());
  std::vector<FlightLogRecord> train_records, test_records;
  for (const auto& r : data.records) {
    (train_flights.count(r.flight_id) ? train_records : test_records).push_back(r);
  }
  const auto train = encode_features(train_records, schema, nullptr, EncodeMode::kLabeled);
  const auto test = encode_features(test_records, schema, &train.vocab, EncodeMode::kLabeled);

  ExperimentRun run{ExperimentReport{}, train_gbm(train.matrix, train.vocab, spec.hyperparams)};
  ExperimentReport& rep = run.report;
  rep.spec = spec;
  rep.dataset_size = data.records.size();
  rep.train_rows = train.matrix.rows;
  rep.test_rows = test.matrix.rows;
  rep.join = data.join;
  rep.eval = evaluate_classifier(run.model, test.matrix);
  rep.majority_baseline = evaluate_classifier(baseline_majority(train.matrix, train.vocab), test.matrix);
  if (spec.compare_regression) {
    const auto reg = train_regressor(train.matrix, train.vocab, spec.hyperparams);
    RegressionComparison cmp;
    cmp.regressor_binned = evaluate_regressor_as_classifier(reg, test.matrix);
    cmp.regression = RegressionMetrics{*cmp.regressor_binned.mse_db2, *cmp.regressor_binned.mae_db};
    rep.regression = cmp;
  }
  rep.wall_clock_s = seconds_since(start);
  return run;
}

ExperimentReport evaluate_model_on(const GbmModel& model, const ExperimentSpec& spec, const Corpus& corpus) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentSpec s = spec;
  s.weather = model.schema.with_weather;
  const Dataset data = build_dataset(s, corpus);
  if (data.records.empty()) throw EmptyDatasetError("evaluation selects no labeled rows");
  const auto enc = encode_features(data.records, model.schema, &model.vocab, EncodeMode::kLabeled);
  ExperimentReport rep;
  rep.spec = s;
  rep.dataset_size = data.records.size();
  rep.test_rows = enc.matrix.rows;
  rep.join = data.join;
  rep.eval = evaluate_classifier(model, enc.matrix);
  rep.majority_baseline = rep.eval;
  rep.wall_clock_s = seconds_since(start);
  return rep;
}

json ExperimentReport::to_json() const {
  json j;
  json s;
  s["name"] = spec.name;
  s["dataset"] = spec.top_k ? json{{"top_k", *spec.top_k}} : json("all");
  s["min_altitude_m"] = spec.min_altitude_m ? json(*spec.min_altitude_m) : json(nullptr);
  s["max_altitude_m"] = spec.max_altitude_m ? json(*spec.max_altitude_m) : json(nullptr);
  s["weather"] = spec.weather;
  s["satellite"] = spec.satellite ? json(*spec.satellite) : json(nullptr);
  s["test_fraction"] = spec.test_fraction;
  s["seed"] = spec.seed;
  const auto& hp = spec.hyperparams;
  s["hyperparams"] = {{"n_rounds", hp.n_rounds},       {"max_depth", hp.max_depth}, {"learning_rate", hp.learning_rate},
                      {"min_child_weight", hp.min_child_weight}, {"n_bins", hp.n_bins},     {"l2_lambda", hp.l2_lambda},
                      {"seed", hp.seed}};
  j["spec"] = s;
  j["dataset_size"] = dataset_size;
  j["train_rows"] = train_rows;
  j["test_rows"] = test_rows;
  j["join"] = {{"input_rows", join.input_rows}, {"joined_rows", join.joined_rows}, {"dropped_rows", join.dropped_rows}};
  j["eval"] = eval_json(eval);
  j["majority_baseline"] = eval_json(majority_baseline);
  if (regression) {
    j["regression"] = {{"mse_db2", regression->regression.mse_db2},
                       {"mae_db", regression->regression.mae_db},
                       {"binned", eval_json(regression->regressor_binned)}};
  }
  return j;
}

std::vector<ExperimentSpec> parse_matrix_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid matrix config: ") + e.what());
  }
  check_keys(j, {"defaults", "rows"}, "matrix config");
  ExperimentSpec defaults;
  if (j.contains("defaults")) {
    json d = j.at("defaults");
    defaults = parse_experiment_spec(d);
    defaults.name.clear();
  }
  std::vector<ExperimentSpec> specs;
  for (const auto& row : j.value("rows", json::array())) specs.push_back(parse_experiment_spec(row, defaults));
  return specs;
}

std::vector<ExperimentReport> run_matrix(const std::vector<ExperimentSpec>& specs, const Corpus& corpus) {
  std::vector<ExperimentReport> out(specs.size());
  parallel_for(specs.size(), [&](std::size_t i) { out[i] = run_experiment(specs[i], corpus).report; });
  return out;
}

std::string matrix_table(const std::vector<ExperimentReport>& reports) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-5s %-44s %12s %11s %9s %9s %8s\n", "Index", "Dataset", "Dataset Size",
                "Weighted F1", "Macro F1", "Accuracy", "Seconds");
  out << line;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    std::snprintf(line, sizeof(line), "%-5zu %-44s %12zu %11.5f %9.5f %9.5f %8.2f\n", i + 1,
                  r.spec.name.substr(0, 44).c_str(), r.dataset_size, r.eval.weighted_f1, r.eval.macro_f1,
                  r.eval.accuracy, r.wall_clock_s);
    out << line;
  }
  return out.str();
}

GbmHyperParams grid_search(const FeatureMatrix& train, const Vocabulary& vocab,
                           const std::vector<GbmHyperParams>& candidates, double validation_fraction,
                           std::uint64_t seed) {
  if (candidates.empty()) throw ConfigError("grid search needs at least one candidate");
  const auto split = split_by_flight(train, validation_fraction, seed);
  std::size_t best = 0;
  double best_f1 = -1.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto model = train_gbm(split.train, vocab, candidates[i]);
    const double f1 = evaluate_classifier(model, split.test).weighted_f1;
    if (f1 > best_f1) {
      best_f1 = f1;
      best = i;
    }
  }
  return candidates[best];
}

ForecastGrid truth_grid(std::span<const FlightLogRecord> flight, const GenerationConfig& config,
                        const SyntheticWeather& weather) {
  ForecastGrid grid;
  std::vector<const GeoSatellite*> sats;
  for (const auto& s : config.satellites) sats.push_back(&s);
  std::sort(sats.begin(), sats.end(),
            [](const GeoSatellite* a, const GeoSatellite* b) { return a->satellite_id < b->satellite_id; });
  for (const auto* s : sats) grid.satellites.push_back(s->satellite_id);
  for (const auto& r : flight) {
    grid.times.push_back(r.log_date);
    const GeoPosition p{r.latitude_deg, r.longitude_deg, r.altitude_m};
    std::optional<WeatherCell> cell;
    if (p.altitude_m < config.link_params.troposphere_ceiling_m) cell = weather.lookup_nearest(r.log_date, p);
    std::vector<CnrCategory> row;
    for (const auto* s : sats) {
      const auto cnr = expected_cnr(p, *s, cell ? &*cell : nullptr, config.link_params);
      row.push_back(cnr ? bin_cnr(*cnr) : CnrCategory::kBad);
    }
    grid.categories.push_back(std::move(row));
  }
  return grid;
}

HoPolicy parse_policy(const json& j) {
  HoPolicy p;
  try {
    check_keys(j, {"degrade_threshold", "consecutive_k", "min_dwell_s", "horizon_min"}, "handover policy");
    if (j.contains("degrade_threshold")) p.degrade_threshold = category_from_name(j.at("degrade_threshold").get<std::string>());
    p.consecutive_k = j.value("consecutive_k", p.consecutive_k);
    if (j.contains("min_dwell_s")) {
      const auto& d = j.at("min_dwell_s");
      p.min_dwell_s = d.is_string() && d.get<std::string>() == "inf" ? std::numeric_limits<double>::infinity()
                                                                     : d.get<double>();
    }
    p.horizon_min = j.value("horizon_min", p.horizon_min);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid handover policy: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  p.validate();
  return p;
}

}  // namespace satlink

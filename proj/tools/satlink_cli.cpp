// satlink: synthetic flight-log generation, CNR-category training and evaluation, the
// experiment matrix, route forecasts and handover simulation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "satlink/error.hpp"
#include "satlink/experiment.hpp"
#include "satlink/flightsim.hpp"
#include "satlink/gbm.hpp"
#include "satlink/handover.hpp"
#include "satlink/ingest.hpp"
#include "satlink/parallel.hpp"

namespace {

using nlohmann::json;
using namespace satlink;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

struct Globals {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

ExperimentSpec load_spec(const Globals& g) {
  ExperimentSpec spec;
  if (!g.config.empty()) spec = parse_experiment_spec(json::parse(read_text(g.config)));
  if (g.seed) spec.seed = *g.seed;
  return spec;
}

int cmd_generate(const Globals& g) {
  if (g.config.empty()) throw CLI::RequiredError("--config");
  if (g.out.empty()) throw CLI::RequiredError("--out");
  auto cfg = load_generation_config(g.config);
  if (g.seed) cfg.seed = *g.seed;
  const auto manifest = generate_dataset(cfg, g.out);
  std::cout << manifest.to_json();
  return 0;
}

int cmd_train(const Globals& g, const std::string& data, std::string report_path) {
  if (g.out.empty()) throw CLI::RequiredError("--out");
  const auto spec = load_spec(g);
  const auto corpus = load_corpus(data);
  const auto run = run_experiment(spec, corpus);
  save_model(run.model, g.out);
  if (report_path.empty()) report_path = g.out + ".report.json";
  write_text(report_path, run.report.to_json().dump(2) + "\n");
  std::cout << matrix_table({run.report}) << "\n" << run.report.eval.to_table();
  if (run.report.regression) {
    std::cout << "\nregressor, outputs binned into categories:\n" << run.report.regression->regressor_binned.to_table();
  }
  return 0;
}

int cmd_eval(const Globals& g, const std::string& model_path, const std::string& data) {
  const auto model = load_model(model_path);
  const auto spec = load_spec(g);
  const auto corpus = load_corpus(data);
  const auto report = evaluate_model_on(model, spec, corpus);
  const std::string text = report.to_json().dump(2) + "\n";
  if (!g.out.empty()) write_text(g.out, text);
  std::cout << report.eval.to_table();
  return 0;
}

int cmd_matrix(const Globals& g, const std::string& data) {
  if (g.config.empty()) throw CLI::RequiredError("--config");
  auto specs = parse_matrix_config(read_text(g.config));
  if (g.seed) {
    for (auto& s : specs) s.seed = *g.seed;
  }
  std::vector<ExperimentReport> reports;
  if (!specs.empty()) reports = run_matrix(specs, load_corpus(data));
  json rows = json::array();
  for (const auto& r : reports) rows.push_back(r.to_json());
  const std::string text = json{{"rows", rows}}.dump(2) + "\n";
  if (!g.out.empty()) write_text(g.out, text);
  std::cout << matrix_table(reports);
  return 0;
}

// "SAT=path" binds a model to one satellite; a bare path is the default model.
struct ModelArgs {
  std::map<std::string, GbmModel> per_sat;
  std::optional<GbmModel> fallback;
};

ModelArgs load_models(const std::vector<std::string>& args) {
  ModelArgs m;
  for (const auto& a : args) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) {
      m.fallback = load_model(a);
    } else {
      m.per_sat.emplace(a.substr(0, eq), load_model(a.substr(eq + 1)));
    }
  }
  return m;
}

std::map<std::string, SatelliteModels> bind_models(const ModelArgs& models, const GbmModel* weather_model,
                                                   const std::vector<std::string>& satellites) {
  std::map<std::string, SatelliteModels> out;
  for (const auto& sat : satellites) {
    SatelliteModels sm;
    if (auto it = models.per_sat.find(sat); it != models.per_sat.end()) {
      sm.base = &it->second;
    } else if (models.fallback) {
      sm.base = &*models.fallback;
    } else {
      throw ConfigError("no model for satellite " + sat);
    }
    sm.with_weather = weather_model;
    out.emplace(sat, sm);
  }
  return out;
}

int cmd_forecast(const Globals& g, const std::vector<std::string>& model_args, const std::string& plan,
                 std::vector<std::string> satellites, const std::string& weather_model_path,
                 const std::string& weather_path) {
  const auto models = load_models(model_args);
  if (satellites.empty()) {
    for (const auto& [sat, m] : models.per_sat) satellites.push_back(sat);
    if (models.fallback) {
      for (const auto& [sat, id] : models.fallback->vocab.column(3)) satellites.push_back(sat);
    }
    std::sort(satellites.begin(), satellites.end());
    satellites.erase(std::unique(satellites.begin(), satellites.end()), satellites.end());
  }
  std::optional<GbmModel> weather_model;
  if (!weather_model_path.empty()) weather_model = load_model(weather_model_path);
  std::optional<WeatherField> weather;
  if (!weather_path.empty()) weather = load_weather_csv(weather_path);
  const auto waypoints = read_flight_csv(plan);
  auto grid = forecast_route(bind_models(models, weather_model ? &*weather_model : nullptr, satellites), waypoints,
                             weather ? &*weather : nullptr);
  if (!g.config.empty()) {
    const auto cfg = load_generation_config(g.config);
    mask_below_horizon(grid, waypoints, cfg.satellites, cfg.link_params.horizon_cut_elevation_deg);
  }
  const std::string text = grid.to_json() + "\n";
  if (!g.out.empty()) write_text(g.out, text);
  std::cout << text;
  return 0;
}

int cmd_hosim(const Globals& g, const std::string& data, const std::vector<std::string>& model_args,
              const std::string& weather_model_path, const std::string& policy_path, bool oracle) {
  if (g.config.empty()) throw CLI::RequiredError("--config");
  const auto cfg = load_generation_config(g.config);
  const HoPolicy policy = policy_path.empty() ? HoPolicy{} : parse_policy(json::parse(read_text(policy_path)));
  const auto weather_model_synth = make_weather_model(cfg);

  ModelArgs models;
  std::optional<GbmModel> weather_model;
  if (!oracle) {
    if (model_args.empty()) throw CLI::RequiredError("--model (or --oracle)");
    models = load_models(model_args);
    if (!weather_model_path.empty()) weather_model = load_model(weather_model_path);
  }
  std::optional<WeatherField> weather;
  if (weather_model && std::filesystem::exists(std::filesystem::path(data) / "weather.csv")) {
    weather = load_weather_csv(std::filesystem::path(data) / "weather.csv");
  }

  std::vector<std::string> satellites;
  for (const auto& s : cfg.satellites) satellites.push_back(s.satellite_id);
  std::sort(satellites.begin(), satellites.end());

  const auto files = dataset_flight_files(data);
  std::map<std::string, SatelliteModels> bound;
  if (!oracle) bound = bind_models(models, weather_model ? &*weather_model : nullptr, satellites);
  std::vector<std::optional<HoReport>> reports(files.size());
  std::vector<std::string> flight_ids(files.size());
  parallel_for(files.size(), [&](std::size_t i) {
    const auto records = read_flight_csv(files[i]);
    if (records.empty()) return;
    const auto truth = truth_grid(records, cfg, weather_model_synth);
    ForecastGrid predicted = truth;
    if (!oracle) {
      predicted = forecast_route(bound, records, weather ? &*weather : nullptr);
      mask_below_horizon(predicted, records, cfg.satellites, cfg.link_params.horizon_cut_elevation_deg);
    }
    reports[i] = simulate_handover(predicted, records.front().satellite_id, policy, &truth);
    flight_ids[i] = records.front().flight_id;
  });

  json flights = json::array();
  std::size_t total_switches = 0, total_outage = 0, total_baseline = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!reports[i]) continue;
    const auto& report = *reports[i];
    total_switches += report.switches.size();
    total_outage += *report.outage_minutes;
    total_baseline += *report.baseline_outage_minutes;
    json j = json::parse(report.to_json());
    j["flight_id"] = flight_ids[i];
    flights.push_back(j);
  }
  json summary = {{"flights", flights},
                  {"total_switches", total_switches},
                  {"outage_minutes", total_outage},
                  {"baseline_outage_minutes", total_baseline}};
  if (!g.out.empty()) write_text(g.out, summary.dump(2) + "\n");
  std::printf("flights %zu  switches %zu  outage_minutes %zu  baseline_outage_minutes %zu\n", flights.size(),
              total_switches, total_outage, total_baseline);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"satlink: GEO link-quality prediction and predictive handover toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config, "JSON config for the subcommand");
  auto* seed_opt = app.add_option("--seed", seed, "Override the config seed");
  app.add_option("--out", g.out, "Output path");

  auto* gen = app.add_subcommand("generate", "Generate a synthetic flight-log dataset");

  std::string data, report_path;
  auto* train = app.add_subcommand("train", "Train a CNR-category model for one experiment spec");
  train->add_option("--data", data, "Dataset directory")->required();
  train->add_option("--report", report_path, "Report path (default <out>.report.json)");

  std::string model_path;
  auto* eval = app.add_subcommand("eval", "Evaluate a saved model on a dataset");
  eval->add_option("--model", model_path, "Model file")->required();
  eval->add_option("--data", data, "Dataset directory")->required();

  auto* matrix = app.add_subcommand("matrix", "Run an experiment matrix and print a comparison table");
  matrix->add_option("--data", data, "Dataset directory")->required();

  std::vector<std::string> models, satellites;
  std::string plan, weather_model, weather_path, policy_path;
  bool oracle = false;
  auto* forecast = app.add_subcommand("forecast", "Predict CNR categories along a flight plan");
  forecast->add_option("--model", models, "Model file, or SAT=file")->required();
  forecast->add_option("--plan", plan, "Flight plan CSV (flight-log schema, empty cnr_db)")->required();
  forecast->add_option("--satellites", satellites, "Candidate satellites")->delimiter(',');
  forecast->add_option("--weather-model", weather_model, "Model with weather columns");
  forecast->add_option("--weather", weather_path, "Weather CSV");
  forecast->footer("With --config <generation config>, satellites below the horizon cut are forecast Bad.");

  auto* hosim = app.add_subcommand("hosim", "Simulate predictive handover over a dataset");
  hosim->add_option("--data", data, "Dataset directory")->required();
  hosim->add_option("--model", models, "Model file, or SAT=file");
  hosim->add_option("--weather-model", weather_model, "Model with weather columns");
  hosim->add_option("--policy", policy_path, "Handover policy JSON");
  hosim->add_flag("--oracle", oracle, "Use ground-truth categories as predictions");

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) g.seed = seed;

  try {
    if (*gen) return cmd_generate(g);
    if (*train) return cmd_train(g, data, report_path);
    if (*eval) return cmd_eval(g, model_path, data);
    if (*matrix) return cmd_matrix(g, data);
    if (*forecast) return cmd_forecast(g, models, plan, satellites, weather_model, weather_path);
    if (*hosim) return cmd_hosim(g, data, models, weather_model, policy_path, oracle);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

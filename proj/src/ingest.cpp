#include "satlink/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "satlink/csv.hpp"
#include "satlink/error.hpp"
#include "satlink/parallel.hpp"
#include "satlink/hashing.hpp"

namespace satlink {

const char* category_name(CnrCategory c) {
  switch (c) {
    case CnrCategory::kBad: return "Bad";
    case CnrCategory::kWeak: return "Weak";
    case CnrCategory::kMedium: return "Medium";
    case CnrCategory::kGood: return "Good";
  }
  return "?";
}

CnrCategory category_from_name(std::string_view name) {
  for (int c = 0; c < kNumCategories; ++c) {
    if (name == category_name(static_cast<CnrCategory>(c))) return static_cast<CnrCategory>(c);
  }
  throw Error("unknown CNR category '" + std::string(name) + "'");
}

CnrCategory bin_cnr(double cnr_db) {
  if (std::isnan(cnr_db)) throw Error("cannot bin a NaN CNR");
  if (cnr_db < 6.0) return CnrCategory::kBad;
  if (cnr_db < 10.0) return CnrCategory::kWeak;
  if (cnr_db < 15.0) return CnrCategory::kMedium;
  return CnrCategory::kGood;
}

const std::vector<std::string>& flight_log_header() {
  static const std::vector<std::string> header = {
      "log_date",     "flight_id",   "tail_number", "airline_code", "departure_airport",
      "arrival_airport", "flight_start", "flight_end", "latitude",   "longitude",
      "altitude_m",   "satellite_id", "cnr_db"};
  return header;
}

void write_flight_csv(std::span<const FlightLogRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write flight log " + path.string());
  csv::write_row(out, flight_log_header());
  for (const auto& r : records) {
    csv::write_row(out, {format_iso8601(r.log_date), r.flight_id, r.tail_number, r.airline_code,
                         r.departure_airport, r.arrival_airport, format_iso8601(r.flight_start_time),
                         format_iso8601(r.flight_end_time), csv::format_fixed6(r.latitude_deg),
                         csv::format_fixed6(r.longitude_deg), csv::format_fixed6(r.altitude_m),
                         r.satellite_id, r.cnr_db ? csv::format_fixed6(*r.cnr_db) : std::string()});
  }
  if (!out) throw IoError("failed writing flight log " + path.string());
}

namespace {

double parse_number(const std::string& s, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    throw Error(std::string("bad ") + what + " '" + s + "'");
  }
  return v;
}

struct FileErrors {
  std::vector<std::size_t> lines;
  std::string first;
};

void read_flight_csv_into(const std::filesystem::path& path, std::vector<FlightLogRecord>& out,
                          FileErrors& errors) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open flight log " + path.string());
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row) || row != flight_log_header()) {
    errors.lines.push_back(1);
    if (errors.first.empty()) errors.first = path.string() + ":1: schema mismatch in header";
    return;
  }
  while (reader.next(row)) {
    const std::size_t line = reader.line();
    if (row.size() == 1 && row[0].empty()) continue;
    try {
      if (reader.malformed()) throw Error("unterminated quote");
      if (row.size() != flight_log_header().size()) {
        throw Error("schema mismatch: expected 13 fields, got " + std::to_string(row.size()));
      }
      FlightLogRecord r;
      r.log_date = parse_iso8601(row[0]);
      if (r.log_date % 60 != 0) throw Error("log_date not minute-aligned");
      r.flight_id = row[1];
      r.tail_number = row[2];
      r.airline_code = row[3];
      r.departure_airport = row[4];
      r.arrival_airport = row[5];
      r.flight_start_time = parse_iso8601(row[6]);
      r.flight_end_time = parse_iso8601(row[7]);
      r.latitude_deg = parse_number(row[8], "latitude");
      r.longitude_deg = parse_number(row[9], "longitude");
      r.altitude_m = parse_number(row[10], "altitude");
      r.satellite_id = row[11];
      if (!row[12].empty()) {
        const double cnr = parse_number(row[12], "cnr_db");
        if (cnr < 0.0 || cnr > 20.0) throw Error("cnr_db outside [0, 20]");
        r.cnr_db = cnr;
      }
      GeoPosition{r.latitude_deg, r.longitude_deg, r.altitude_m}.validate();
      if (r.flight_id.empty()) throw Error("empty flight_id");
      if (!(r.flight_start_time <= r.log_date && r.log_date <= r.flight_end_time)) {
        throw Error("log_date outside flight start/end");
      }
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      errors.lines.push_back(line);
      if (errors.first.empty()) {
        errors.first = path.string() + ":" + std::to_string(line) + ": " + e.what();
      }
    }
  }
}

}  // namespace

std::vector<FlightLogRecord> read_flight_csv(const std::filesystem::path& path) {
  std::filesystem::path p = path;
  return parse_logs(std::span<const std::filesystem::path>(&p, 1));
}

std::vector<FlightLogRecord> parse_logs(std::span<const std::filesystem::path> paths) {
  std::vector<std::vector<FlightLogRecord>> parts(paths.size());
  std::vector<FileErrors> part_errors(paths.size());
  parallel_for(paths.size(), [&](std::size_t i) { read_flight_csv_into(paths[i], parts[i], part_errors[i]); });
  std::vector<FlightLogRecord> out;
  FileErrors errors;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    std::move(parts[i].begin(), parts[i].end(), std::back_inserter(out));
    if (errors.first.empty()) errors.first = part_errors[i].first;
    errors.lines.insert(errors.lines.end(), part_errors[i].lines.begin(), part_errors[i].lines.end());
  }
  if (!errors.lines.empty()) {
    std::ostringstream msg;
    msg << errors.first << " (" << errors.lines.size() << " bad line(s):";
    for (std::size_t i = 0; i < errors.lines.size() && i < 20; ++i) msg << ' ' << errors.lines[i];
    msg << ')';
    throw ParseError(msg.str(), errors.lines);
  }
  return out;
}

std::vector<FlightLogRecord> filter_altitude(std::span<const FlightLogRecord> records,
                                             std::optional<double> min_m,
                                             std::optional<double> max_m) {
  if (min_m && max_m && !(*min_m < *max_m)) throw Error("altitude filter needs min < max");
  std::vector<FlightLogRecord> out;
  for (const auto& r : records) {
    if (min_m && !(r.altitude_m > *min_m)) continue;
    if (max_m && !(r.altitude_m < *max_m)) continue;
    out.push_back(r);
  }
  return out;
}

std::vector<FlightLogRecord> filter_satellite(std::span<const FlightLogRecord> records,
                                              const std::string& satellite_id) {
  std::vector<FlightLogRecord> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out),
               [&](const FlightLogRecord& r) { return r.satellite_id == satellite_id; });
  return out;
}

TopRoutes top_routes(std::span<const FlightLogRecord> records, std::size_t k) {
  if (k < 1) throw Error("top_routes needs k >= 1");
  std::map<RouteKey, std::size_t> counts;
  for (const auto& r : records) ++counts[RouteKey{r.departure_airport, r.arrival_airport}];
  std::vector<std::pair<RouteKey, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  TopRoutes out;
  std::set<RouteKey> keep;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
    out.keys.push_back(ranked[i].first);
    keep.insert(ranked[i].first);
  }
  for (const auto& r : records) {
    if (keep.count(RouteKey{r.departure_airport, r.arrival_airport})) out.records.push_back(r);
  }
  return out;
}

JoinResult join_weather(std::span<const FlightLogRecord> records, const WeatherProvider& weather) {
  JoinResult out;
  out.report.input_rows = records.size();
  out.records.reserve(records.size());
  for (const auto& r : records) {
    try {
      const WeatherCell c =
          weather.lookup_nearest(r.log_date, GeoPosition{r.latitude_deg, r.longitude_deg, r.altitude_m});
      FlightLogRecord joined = r;
      joined.weather = WeatherValues{c.precipitation_mmh, c.cloud_cover_pct, c.temperature_c,
                                     c.wind_speed_mps};
      out.records.push_back(std::move(joined));
    } catch (const CoverageGapError&) {
      ++out.report.dropped_rows;
    }
  }
  out.report.joined_rows = out.records.size();
  if (out.report.input_rows > 0 &&
      static_cast<double>(out.report.dropped_rows) >
          kMaxJoinDropFraction * static_cast<double>(out.report.input_rows)) {
    throw CoverageGapError("weather join dropped " + std::to_string(out.report.dropped_rows) + " of " +
                           std::to_string(out.report.input_rows) +
                           " records; the weather field does not cover this data");
  }
  return out;
}

std::vector<std::string> FeatureSchema::column_names() const {
  std::vector<std::string> names = {"latitude",    "longitude",   "altitude_m",
                                    "minute_of_day", "day_of_year", "elapsed_flight_fraction"};
  if (with_weather) {
    for (const char* w : {"precip_mmh", "cloud_pct", "temp_c", "wind_mps"}) names.emplace_back(w);
  }
  for (const char* c : kCategoricalColumns) names.emplace_back(c);
  return names;
}

std::uint64_t FeatureSchema::hash() const {
  std::uint64_t h = fnv1a64("satlink-features-v1");
  for (const auto& n : column_names()) {
    h = fnv1a64(n, h);
    h = fnv1a64("|", h);
  }
  return h;
}

void Vocabulary::add(std::size_t column, const std::string& token) {
  columns_.at(column).emplace(token, 0);
}

void Vocabulary::finalize() {
  for (auto& col : columns_) {
    int next = 1;
    for (auto& [token, id] : col) id = next++;
  }
}

int Vocabulary::id(std::size_t column, const std::string& token) const {
  const auto& col = columns_.at(column);
  auto it = col.find(token);
  return it == col.end() ? 0 : it->second;
}

namespace {

std::array<const std::string*, 5> categorical_fields(const FlightLogRecord& r) {
  return {&r.airline_code, &r.departure_airport, &r.arrival_airport, &r.satellite_id, &r.tail_number};
}

}  // namespace

void encode_row(const FlightLogRecord& r, const FeatureSchema& schema, const Vocabulary& vocab,
                std::span<double> out) {
  if (out.size() != schema.num_columns()) throw SchemaMismatchError("row buffer has wrong width");
  std::size_t c = 0;
  out[c++] = r.latitude_deg;
  out[c++] = r.longitude_deg;
  out[c++] = r.altitude_m;
  out[c++] = minute_of_day(r.log_date);
  out[c++] = day_of_year(r.log_date);
  const auto span_s = r.flight_end_time - r.flight_start_time;
  out[c++] = span_s > 0 ? static_cast<double>(r.log_date - r.flight_start_time) / static_cast<double>(span_s)
                        : 0.0;
  if (schema.with_weather) {
    if (!r.weather) throw SchemaMismatchError("record " + r.flight_id + " has no joined weather");
    for (double w : *r.weather) out[c++] = w;
  }
  const auto cats = categorical_fields(r);
  for (std::size_t k = 0; k < cats.size(); ++k) out[c++] = vocab.id(k, *cats[k]);
}

EncodedFeatures encode_features(std::span<const FlightLogRecord> records, const FeatureSchema& schema,
                                const Vocabulary* vocab, EncodeMode mode) {
  if (mode == EncodeMode::kPrediction && vocab == nullptr) {
    throw Error("prediction-mode encoding requires a vocabulary");
  }
  EncodedFeatures out;
  if (vocab != nullptr) {
    out.vocab = *vocab;
  } else {
    for (const auto& r : records) {
      if (mode == EncodeMode::kLabeled && !r.labeled()) continue;
      const auto cats = categorical_fields(r);
      for (std::size_t k = 0; k < cats.size(); ++k) out.vocab.add(k, *cats[k]);
    }
    out.vocab.finalize();
  }

  FeatureMatrix& m = out.matrix;
  m.schema = schema;
  m.cols = schema.num_columns();
  for (const auto& r : records) {
    if (mode == EncodeMode::kLabeled && !r.labeled()) continue;
    m.values.resize(m.values.size() + m.cols);
    encode_row(r, schema, out.vocab, std::span<double>(m.values.data() + m.rows * m.cols, m.cols));
    if (mode == EncodeMode::kLabeled) {
      m.labels.push_back(bin_cnr(*r.cnr_db));
      m.cnr_db.push_back(*r.cnr_db);
    }
    m.flight_ids.push_back(r.flight_id);
    ++m.rows;
  }
  return out;
}

FeatureMatrix select_rows(const FeatureMatrix& m, std::span<const std::size_t> rows) {
  FeatureMatrix out;
  out.schema = m.schema;
  out.cols = m.cols;
  out.rows = rows.size();
  out.values.reserve(rows.size() * m.cols);
  for (std::size_t r : rows) {
    auto src = m.row(r);
    out.values.insert(out.values.end(), src.begin(), src.end());
    if (!m.labels.empty()) {
      out.labels.push_back(m.labels[r]);
      out.cnr_db.push_back(m.cnr_db[r]);
    }
    out.flight_ids.push_back(m.flight_ids[r]);
  }
  return out;
}

TrainTestSplit split_by_flight(const FeatureMatrix& matrix, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw Error("test fraction must lie in (0, 1)");
  std::map<std::string, std::vector<std::size_t>> by_flight;
  for (std::size_t r = 0; r < matrix.rows; ++r) by_flight[matrix.flight_ids[r]].push_back(r);
  if (by_flight.size() < 2) throw Error("split_by_flight needs at least 2 flights");

  std::vector<std::pair<std::uint64_t, const std::string*>> order;
  for (const auto& [id, rows] : by_flight) order.emplace_back(mix_seed(seed, fnv1a64(id)), &id);
  std::sort(order.begin(), order.end(),
            [](const auto& a, const auto& b) { return std::tie(a.first, *a.second) < std::tie(b.first, *b.second); });

  const double target = test_fraction * static_cast<double>(matrix.rows);
  std::set<std::string> test_flights;
  std::size_t test_rows = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const bool last_for_train = (i + 1 == order.size()) && test_flights.size() == i;
    if (last_for_train) break;
    if (static_cast<double>(test_rows) < target) {
      test_flights.insert(*order[i].second);
      test_rows += by_flight[*order[i].second].size();
    }
  }

  std::vector<std::size_t> train_rows, test_rows_idx;
  for (std::size_t r = 0; r < matrix.rows; ++r) {
    (test_flights.count(matrix.flight_ids[r]) ? test_rows_idx : train_rows).push_back(r);
  }
  return {select_rows(matrix, train_rows), select_rows(matrix, test_rows_idx)};
}

std::vector<std::filesystem::path> dataset_flight_files(const std::filesystem::path& dir) {
  const auto flights = dir / "flights";
  if (!std::filesystem::is_directory(flights)) {
    throw IoError("no flights/ directory under " + dir.string());
  }
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(flights)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace satlink

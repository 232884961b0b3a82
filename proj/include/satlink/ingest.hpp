#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "satlink/timeutil.hpp"
#include "satlink/weather.hpp"

namespace satlink {

enum class CnrCategory : int { kBad = 0, kWeak = 1, kMedium = 2, kGood = 3 };

inline constexpr int kNumCategories = 4;

const char* category_name(CnrCategory c);
CnrCategory category_from_name(std::string_view name);

// Lower bounds inclusive: Bad < 6 <= Weak < 10 <= Medium < 15 <= Good.
CnrCategory bin_cnr(double cnr_db);

// precipitation, cloud cover, temperature, wind speed
using WeatherValues = std::array<double, 4>;

struct FlightLogRecord {
  Timestamp log_date = 0;
  std::string flight_id;
  std::string tail_number;
  std::string airline_code;
  std::string departure_airport;
  std::string arrival_airport;
  Timestamp flight_start_time = 0;
  Timestamp flight_end_time = 0;
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;
  double altitude_m = 0.0;
  std::string satellite_id;
  std::optional<double> cnr_db;

  // Attached by join_weather; never read from or written to flight-log CSV.
  std::optional<WeatherValues> weather;

  bool labeled() const { return cnr_db.has_value(); }
  bool operator==(const FlightLogRecord&) const = default;
};

const std::vector<std::string>& flight_log_header();

void write_flight_csv(std::span<const FlightLogRecord> records, const std::filesystem::path& path);
std::vector<FlightLogRecord> read_flight_csv(const std::filesystem::path& path);

// Concatenates every file in order. Errors from all files are reported together.
std::vector<FlightLogRecord> parse_logs(std::span<const std::filesystem::path> paths);

// Strict bounds on both sides; rows exactly at a threshold are dropped.
std::vector<FlightLogRecord> filter_altitude(std::span<const FlightLogRecord> records,
                                             std::optional<double> min_m,
                                             std::optional<double> max_m);

std::vector<FlightLogRecord> filter_satellite(std::span<const FlightLogRecord> records,
                                              const std::string& satellite_id);

struct RouteKey {
  std::string departure_airport;
  std::string arrival_airport;
  auto operator<=>(const RouteKey&) const = default;
  std::string str() const { return departure_airport + "-" + arrival_airport; }
};

struct TopRoutes {
  std::vector<RouteKey> keys;
  std::vector<FlightLogRecord> records;
};

// Directional routes ranked by record count (descending, ties lexicographic).
TopRoutes top_routes(std::span<const FlightLogRecord> records, std::size_t k);

struct JoinReport {
  std::size_t input_rows = 0;
  std::size_t joined_rows = 0;
  std::size_t dropped_rows = 0;
};

struct JoinResult {
  std::vector<FlightLogRecord> records;
  JoinReport report;
};

inline constexpr double kMaxJoinDropFraction = 0.10;

// Attaches the nearest cell's four variables to every record. Rows hitting a coverage
// gap are dropped; more than 10% dropped is an error.
JoinResult join_weather(std::span<const FlightLogRecord> records, const WeatherProvider& weather);

// Column layout of the modeling matrix.
struct FeatureSchema {
  bool with_weather = false;

  static constexpr std::size_t kNumBaseNumeric = 6;
  static constexpr std::size_t kNumWeather = 4;
  static constexpr std::size_t kNumCategorical = 5;

  std::size_t num_columns() const {
    return kNumBaseNumeric + (with_weather ? kNumWeather : 0) + kNumCategorical;
  }
  std::vector<std::string> column_names() const;
  std::uint64_t hash() const;
  bool operator==(const FeatureSchema&) const = default;
};

// Categorical columns, in matrix order.
inline constexpr std::array<const char*, 5> kCategoricalColumns = {
    "airline_code", "departure_airport", "arrival_airport", "satellite_id", "tail_number"};

// Per-column token -> id map. Ids start at 1; 0 is reserved for unseen tokens.
class Vocabulary {
 public:
  void add(std::size_t column, const std::string& token);
  // Assigns ids in lexicographic token order; call once after every add().
  void finalize();
  int id(std::size_t column, const std::string& token) const;
  const std::map<std::string, int>& column(std::size_t c) const { return columns_.at(c); }
  std::map<std::string, int>& mutable_column(std::size_t c) { return columns_.at(c); }
  bool operator==(const Vocabulary&) const = default;

 private:
  std::array<std::map<std::string, int>, kCategoricalColumns.size()> columns_;
};

struct FeatureMatrix {
  FeatureSchema schema;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major rows x cols
  std::vector<CnrCategory> labels;  // empty for prediction-mode matrices
  std::vector<double> cnr_db;       // raw targets, parallel to labels
  std::vector<std::string> flight_ids;

  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * cols, cols};
  }
  bool labeled() const { return !labels.empty() || rows == 0; }
};

enum class EncodeMode {
  kLabeled,     // rows without CNR are skipped; labels filled
  kPrediction,  // every row encoded; a vocabulary is required
};

struct EncodedFeatures {
  FeatureMatrix matrix;
  Vocabulary vocab;
};

// Builds the vocabulary from these rows when `vocab` is null.
EncodedFeatures encode_features(std::span<const FlightLogRecord> records, const FeatureSchema& schema,
                                const Vocabulary* vocab, EncodeMode mode);

// Writes one row of features into `out` (size schema.num_columns()).
void encode_row(const FlightLogRecord& r, const FeatureSchema& schema, const Vocabulary& vocab,
                std::span<double> out);

struct TrainTestSplit {
  FeatureMatrix train;
  FeatureMatrix test;
};

// Flights are ordered by a seeded hash and moved to the test side until the target row
// fraction is reached; each flight lands entirely on one side.
TrainTestSplit split_by_flight(const FeatureMatrix& matrix, double test_fraction, std::uint64_t seed);

FeatureMatrix select_rows(const FeatureMatrix& m, std::span<const std::size_t> rows);

// Every flights/*.csv under a dataset directory, sorted by file name.
std::vector<std::filesystem::path> dataset_flight_files(const std::filesystem::path& dir);

}  // namespace satlink

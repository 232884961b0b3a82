#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "satlink/error.hpp"
#include "satlink/ingest.hpp"
#include "test_util.hpp"

using namespace satlink;
using namespace satlink::testing;

TEST(BinCnr, Boundaries) {
  EXPECT_EQ(bin_cnr(0.0), CnrCategory::kBad);
  EXPECT_EQ(bin_cnr(5.999999), CnrCategory::kBad);
  EXPECT_EQ(bin_cnr(6.0), CnrCategory::kWeak);
  EXPECT_EQ(bin_cnr(9.999999), CnrCategory::kWeak);
  EXPECT_EQ(bin_cnr(10.0), CnrCategory::kMedium);
  EXPECT_EQ(bin_cnr(14.999999), CnrCategory::kMedium);
  EXPECT_EQ(bin_cnr(15.0), CnrCategory::kGood);
  EXPECT_EQ(bin_cnr(20.0), CnrCategory::kGood);
  EXPECT_THROW(bin_cnr(std::nan("")), Error);
}

TEST(BinCnr, NamesRoundTrip) {
  for (int c = 0; c < kNumCategories; ++c) {
    const auto cat = static_cast<CnrCategory>(c);
    EXPECT_EQ(category_from_name(category_name(cat)), cat);
  }
}

TEST(FlightCsv, RoundTripPreservesRecords) {
  const auto dir = temp_dir("flight_rt");
  std::vector<FlightLogRecord> recs = {make_record("F1", 1.25, 103.5, 11'000, 8.123456),
                                       make_record("F1", 1.5, 103.75, 11'000, std::nullopt)};
  recs[1].log_date += 60;
  recs[0].tail_number = "9V,\"odd\"";
  write_flight_csv(recs, dir / "f.csv");
  EXPECT_EQ(read_flight_csv(dir / "f.csv"), recs);
}

TEST(FlightCsv, ErrorsCarryEveryBadLine) {
  const auto dir = temp_dir("flight_bad");
  std::string text;
  for (std::size_t i = 0; i < flight_log_header().size(); ++i) text += (i ? "," : "") + flight_log_header()[i];
  text += "\n";
  const std::string good =
      "2023-01-01T00:00:00Z,F1,T,SQ,SIN,LHR,2023-01-01T00:00:00Z,2023-01-01T01:00:00Z,1,2,3000,I5F1,8.5\n";
  text += good;
  text += "2023-01-01T00:00:30Z,F1,T,SQ,SIN,LHR,2023-01-01T00:00:00Z,2023-01-01T01:00:00Z,1,2,3000,I5F1,8.5\n";
  text += good;
  text += "2023-01-01T00:00:00Z,F1,T,SQ,SIN,LHR,2023-01-01T00:00:00Z,2023-01-01T01:00:00Z,1,2,3000,I5F1,25\n";
  text += "2023-01-01T00:00:00Z,F1,T\n";
  write_file(dir / "f.csv", text);
  try {
    read_flight_csv(dir / "f.csv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.lines(), (std::vector<std::size_t>{3, 5, 6}));
  }
}

TEST(Filters, AltitudeBoundsAreStrict) {
  std::vector<FlightLogRecord> recs;
  for (double a : {2999.0, 3000.0, 3001.0, 6000.0, 6001.0}) recs.push_back(make_record("F", 0, 0, a, 8.0));
  EXPECT_EQ(filter_altitude(recs, std::nullopt, 3000.0).size(), 1u);
  EXPECT_EQ(filter_altitude(recs, 6000.0, std::nullopt).size(), 1u);
  EXPECT_EQ(filter_altitude(recs, 2999.0, 6001.0).size(), 3u);
  EXPECT_THROW(filter_altitude(recs, 5000.0, 5000.0), Error);
}

TEST(Filters, TopRoutesRankByCountThenName) {
  std::vector<FlightLogRecord> recs;
  auto add = [&](const std::string& dep, const std::string& arr, int n) {
    for (int i = 0; i < n; ++i) {
      auto r = make_record(dep + arr, 0, 0, 9000, 8.0);
      r.departure_airport = dep;
      r.arrival_airport = arr;
      recs.push_back(r);
    }
  };
  add("SIN", "LHR", 5);
  add("LHR", "SIN", 5);
  add("DXB", "LHR", 7);
  add("AAA", "BBB", 1);
  const auto top = top_routes(recs, 3);
  ASSERT_EQ(top.keys.size(), 3u);
  EXPECT_EQ(top.keys[0].str(), "DXB-LHR");
  EXPECT_EQ(top.keys[1].str(), "LHR-SIN");
  EXPECT_EQ(top.keys[2].str(), "SIN-LHR");
  EXPECT_EQ(top.records.size(), 17u);
  EXPECT_EQ(top_routes(recs, 10).keys.size(), 4u);
}

TEST(Join, MatchesDirectLookupAndDropsGaps) {
  WeatherField f;
  for (int lat = 0; lat < 10; ++lat) {
    for (int lon = 0; lon < 10; ++lon) {
      WeatherCell c;
      c.hour_utc = 1672531200;
      c.grid_lat_deg = grid_lat_of(lat);
      c.grid_lon_deg = grid_lon_of(lon);
      c.precipitation_mmh = lat + lon * 0.5;
      c.cloud_cover_pct = lat;
      c.temperature_c = lon;
      c.wind_speed_mps = 1;
      f.insert(c);
    }
  }
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 0.9);
  std::vector<FlightLogRecord> recs;
  for (int i = 0; i < 200; ++i) recs.push_back(make_record("F", u(rng), u(rng), 2000, 8.0));
  recs.push_back(make_record("F", 5.0, 5.0, 2000, 8.0));
  const auto res = join_weather(recs, f);
  EXPECT_EQ(res.report.input_rows, 201u);
  EXPECT_EQ(res.report.dropped_rows, 1u);
  for (std::size_t i = 0; i < res.records.size(); ++i) {
    const auto c = f.lookup_nearest(recs[i].log_date, {recs[i].latitude_deg, recs[i].longitude_deg, 0});
    EXPECT_EQ(*res.records[i].weather, (WeatherValues{c.precipitation_mmh, c.cloud_cover_pct, c.temperature_c,
                                                      c.wind_speed_mps}));
  }
  std::vector<FlightLogRecord> mostly_gaps(10, make_record("F", 5.0, 5.0, 2000, 8.0));
  EXPECT_THROW(join_weather(mostly_gaps, f), CoverageGapError);
}

TEST(Encode, ColumnsVocabularyAndUnknowns) {
  std::vector<FlightLogRecord> recs = {make_record("F1", 1, 2, 9000, 8.0, "I5F1"),
                                       make_record("F2", 3, 4, 9500, 11.0, "GX5"),
                                       make_record("F3", 5, 6, 9900, std::nullopt, "GX5")};
  const FeatureSchema schema{false};
  const auto enc = encode_features(recs, schema, nullptr, EncodeMode::kLabeled);
  ASSERT_EQ(enc.matrix.rows, 2u);
  ASSERT_EQ(enc.matrix.cols, 11u);
  EXPECT_EQ(enc.matrix.labels[1], CnrCategory::kMedium);
  const auto row0 = enc.matrix.row(0);
  EXPECT_EQ(row0[0], 1.0);
  EXPECT_EQ(row0[2], 9000.0);
  EXPECT_EQ(row0[3], 0.0);
  EXPECT_EQ(row0[4], 1.0);
  // satellite ids sorted lexicographically: GX5 = 1, I5F1 = 2
  EXPECT_EQ(row0[6 + 3], 2.0);
  EXPECT_EQ(enc.matrix.row(1)[6 + 3], 1.0);

  auto unseen = recs;
  unseen[0].satellite_id = "NEW";
  const auto pred = encode_features(unseen, schema, &enc.vocab, EncodeMode::kPrediction);
  EXPECT_EQ(pred.matrix.rows, 3u);
  EXPECT_EQ(pred.matrix.row(0)[6 + 3], 0.0);
  EXPECT_THROW(encode_features(recs, schema, nullptr, EncodeMode::kPrediction), Error);
}

TEST(Encode, WeatherSchemaNeedsJoinedRows) {
  auto r = make_record("F1", 1, 2, 2000, 8.0);
  const FeatureSchema schema{true};
  EXPECT_THROW(encode_features(std::vector{r}, schema, nullptr, EncodeMode::kLabeled), Error);
  r.weather = WeatherValues{1, 2, 3, 4};
  const auto enc = encode_features(std::vector{r}, schema, nullptr, EncodeMode::kLabeled);
  EXPECT_EQ(enc.matrix.cols, 15u);
  EXPECT_EQ(enc.matrix.row(0)[6], 1.0);
  EXPECT_EQ(enc.matrix.row(0)[9], 4.0);
  EXPECT_NE(FeatureSchema{true}.hash(), FeatureSchema{false}.hash());
}

TEST(Split, FlightsNeverStraddleAndSizesAreNearTheTarget) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> len(20, 80);
  std::vector<FlightLogRecord> recs;
  for (int f = 0; f < 60; ++f) {
    const int n = len(rng);
    for (int i = 0; i < n; ++i) recs.push_back(make_record("F" + std::to_string(f), 0, 0, 9000, 8.0 + (i % 5)));
  }
  const auto m = encode_features(recs, FeatureSchema{false}, nullptr, EncodeMode::kLabeled).matrix;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto s = split_by_flight(m, 0.2, seed);
    EXPECT_EQ(s.train.rows + s.test.rows, m.rows);
    std::set<std::string> train_ids(s.train.flight_ids.begin(), s.train.flight_ids.end());
    for (const auto& id : s.test.flight_ids) EXPECT_EQ(train_ids.count(id), 0u);
    const double frac = static_cast<double>(s.test.rows) / static_cast<double>(m.rows);
    EXPECT_GE(frac, 0.2);
    EXPECT_LT(frac, 0.2 + 80.0 / static_cast<double>(m.rows));
    const auto again = split_by_flight(m, 0.2, seed);
    EXPECT_EQ(again.test.flight_ids, s.test.flight_ids);
  }
}

TEST(Split, TwoFlightsBothSidesNonEmpty) {
  std::vector<FlightLogRecord> recs = {make_record("A", 0, 0, 9000, 8.0), make_record("B", 0, 0, 9000, 8.0)};
  const auto m = encode_features(recs, FeatureSchema{false}, nullptr, EncodeMode::kLabeled).matrix;
  const auto s = split_by_flight(m, 0.9, 1);
  EXPECT_EQ(s.train.rows, 1u);
  EXPECT_EQ(s.test.rows, 1u);
  EXPECT_THROW(split_by_flight(select_rows(m, std::vector<std::size_t>{0}), 0.2, 1), Error);
}

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "satlink/error.hpp"
#include "satlink/gbm.hpp"
#include "test_util.hpp"

using namespace satlink;
using namespace satlink::testing;

namespace {

GbmHyperParams quick(int rounds, int depth = 3) {
  GbmHyperParams hp;
  hp.n_rounds = rounds;
  hp.max_depth = depth;
  hp.learning_rate = 0.3;
  return hp;
}

// Noisy labels from a threshold on latitude, so the learner has something to fit
// but cannot reach zero loss.
FeatureMatrix noisy_matrix(std::size_t rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.6);
  FeatureMatrix m = blank_matrix(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double x = u(rng), y = u(rng);
    m.values[r * m.cols + 0] = x;
    m.values[r * m.cols + 1] = y;
    m.values[r * m.cols + 3] = std::floor((u(rng) + 1.0) * 720.0);
    const double s = 2.0 * x + y + noise(rng);
    m.labels[r] = s < -1.0 ? CnrCategory::kBad : s < 0.0 ? CnrCategory::kWeak : s < 1.0 ? CnrCategory::kMedium
                                                                                         : CnrCategory::kGood;
    m.cnr_db[r] = 10.0 + 3.0 * s;
  }
  return m;
}

}  // namespace

TEST(Gbm, ToyClustersReachPerfectTrainingAccuracy) {
  const auto m = toy_clusters(50, 1);
  const auto model = train_gbm(m, Vocabulary{}, quick(50));
  EXPECT_EQ(training_accuracy(model, m), 1.0);
  EXPECT_TRUE(loss_monotone(model));
  EXPECT_EQ(model.training_loss.size(), 51u);
}

TEST(Gbm, StumpSplitsOnTheSeparatingFeature) {
  FeatureMatrix m = blank_matrix(40);
  for (std::size_t r = 0; r < 40; ++r) {
    m.values[r * m.cols + 2] = static_cast<double>(r);
    m.labels[r] = r < 20 ? CnrCategory::kWeak : CnrCategory::kMedium;
  }
  auto hp = quick(1, 1);
  hp.min_child_weight = 0.0;
  const auto model = train_gbm(m, Vocabulary{}, hp);
  const Tree& weak_tree = model.rounds[0][1];
  ASSERT_EQ(weak_tree.nodes.size(), 3u);
  EXPECT_EQ(weak_tree.nodes[0].feature, 2);
  EXPECT_EQ(weak_tree.nodes[0].threshold, 19.0);
  EXPECT_EQ(training_accuracy(model, m), 1.0);
}

TEST(Gbm, FirstSplitMatchesExhaustiveOracle) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto m = noisy_matrix(12 + seed % 20, seed);
    GbmHyperParams hp = quick(1, 1);
    hp.min_child_weight = (seed % 3 == 0) ? 0.5 : 0.0;
    const auto model = train_gbm(m, Vocabulary{}, hp);
    const auto oracle = oracle_first_split(m, hp.l2_lambda, hp.min_child_weight);
    const TreeNode& root = model.rounds[0][0].nodes[0];
    EXPECT_EQ(root.feature, oracle.feature) << "seed " << seed;
    if (oracle.feature >= 0) EXPECT_EQ(root.threshold, oracle.threshold) << "seed " << seed;
  }
}

TEST(Gbm, InvariantUnderMonotoneFeatureTransforms) {
  const auto m = noisy_matrix(300, 5);
  auto t = m;
  for (std::size_t r = 0; r < t.rows; ++r) {
    t.values[r * t.cols + 0] = std::exp(3.0 * t.values[r * t.cols + 0]);
    t.values[r * t.cols + 1] = std::pow(t.values[r * t.cols + 1], 3.0) * 100.0 + 7.0;
  }
  const auto a = train_gbm(m, Vocabulary{}, quick(20));
  const auto b = train_gbm(t, Vocabulary{}, quick(20));
  EXPECT_EQ(predict_categories(a, m), predict_categories(b, t));
  EXPECT_EQ(a.training_loss, b.training_loss);
}

TEST(Gbm, LossNeverIncreasesEvenWithAggressiveSteps) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto m = noisy_matrix(400, seed);
    GbmHyperParams hp = quick(30, 4);
    hp.learning_rate = 1.0;
    hp.l2_lambda = 0.0;
    hp.min_child_weight = 0.0;
    const auto model = train_gbm(m, Vocabulary{}, hp);
    EXPECT_TRUE(loss_monotone(model)) << seed;
    EXPECT_LT(model.training_loss.back(), model.training_loss.front());
    const auto reg = train_regressor(m, Vocabulary{}, hp);
    EXPECT_TRUE(loss_monotone(reg)) << seed;
  }
}

TEST(Gbm, ZeroRoundsPredictsPriors) {
  FeatureMatrix m = blank_matrix(10);
  for (std::size_t r = 0; r < 10; ++r) m.labels[r] = r < 7 ? CnrCategory::kMedium : CnrCategory::kWeak;
  const auto model = train_gbm(m, Vocabulary{}, quick(0));
  const auto p = predict_proba(model, m.row(0), m.schema.hash());
  EXPECT_NEAR(p[2], 0.7, 1e-9);
  EXPECT_NEAR(p[1], 0.3, 1e-9);
  EXPECT_NEAR(p[0], 0.0, 1e-9);
  EXPECT_EQ(predict_category(model, m.row(0), m.schema.hash()), CnrCategory::kMedium);
  const auto base = baseline_majority(m, Vocabulary{});
  EXPECT_EQ(base.rounds.size(), 0u);
  EXPECT_EQ(predict_categories(base, m), std::vector<CnrCategory>(10, CnrCategory::kMedium));
}

TEST(Gbm, MajorityBaselineOnBalancedData) {
  const auto m = toy_clusters(25, 3);
  const auto base = baseline_majority(m, Vocabulary{});
  const auto rep = evaluate_classifier(base, m);
  EXPECT_NEAR(rep.weighted_f1, 0.1, 1e-12);
  // Ties between equal priors resolve to the worst category.
  EXPECT_EQ(predict_categories(base, m)[0], CnrCategory::kBad);
}

TEST(Gbm, RegressorFitsTargets) {
  const auto m = noisy_matrix(500, 2);
  const auto reg = train_regressor(m, Vocabulary{}, quick(60, 4));
  const auto metrics = eval_regressor(reg, m);
  double var = 0.0, mean = 0.0;
  for (double y : m.cnr_db) mean += y;
  mean /= static_cast<double>(m.rows);
  for (double y : m.cnr_db) var += (y - mean) * (y - mean);
  var /= static_cast<double>(m.rows);
  EXPECT_LT(metrics.mse_db2, 0.5 * var);
  EXPECT_GE(metrics.mae_db, 0.0);
  EXPECT_TRUE(evaluate_regressor_as_classifier(reg, m).mae_db.has_value());
}

TEST(Gbm, TrainingErrors) {
  FeatureMatrix empty = blank_matrix(0);
  EXPECT_THROW(train_gbm(empty, Vocabulary{}, quick(1)), EmptyDatasetError);
  FeatureMatrix single = blank_matrix(5);
  EXPECT_THROW(train_gbm(single, Vocabulary{}, quick(1)), Error);
  auto bad = quick(1);
  bad.n_bins = 1;
  EXPECT_THROW(train_gbm(toy_clusters(5, 1), Vocabulary{}, bad), ConfigError);
}

TEST(Gbm, SchemaMismatchIsRejected) {
  const auto m = toy_clusters(10, 1);
  const auto model = train_gbm(m, Vocabulary{}, quick(2));
  EXPECT_THROW(predict_proba(model, m.row(0), FeatureSchema{true}.hash()), SchemaMismatchError);
  std::vector<double> short_row(3, 0.0);
  EXPECT_THROW(predict_proba(model, short_row, m.schema.hash()), SchemaMismatchError);
}

TEST(GbmSerialization, RoundTripGivesBitIdenticalPredictions) {
  const auto m = noisy_matrix(1000, 4);
  Vocabulary vocab;
  vocab.add(0, "SQ");
  vocab.finalize();
  const auto model = train_gbm(m, vocab, quick(15, 4));
  const auto dir = temp_dir("model_rt");
  save_model(model, dir / "m.json");
  const auto loaded = load_model(dir / "m.json");
  EXPECT_EQ(loaded, model);
  for (std::size_t r = 0; r < m.rows; ++r) {
    const auto a = predict_proba(model, m.row(r), m.schema.hash());
    const auto b = predict_proba(loaded, m.row(r), m.schema.hash());
    for (int c = 0; c < kNumCategories; ++c) EXPECT_EQ(std::bit_cast<std::uint64_t>(a[c]), std::bit_cast<std::uint64_t>(b[c]));
  }
  EXPECT_EQ(model_to_json(loaded), model_to_json(model));
}

TEST(GbmSerialization, CorruptAndVersionErrors) {
  const auto model = train_gbm(toy_clusters(10, 1), Vocabulary{}, quick(2));
  const std::string text = model_to_json(model);
  EXPECT_THROW(model_from_json(text.substr(0, text.size() / 2)), Error);
  std::string v2 = text;
  const auto pos = v2.find("\"format_version\":1");
  ASSERT_NE(pos, std::string::npos);
  v2.replace(pos, 18, "\"format_version\":2");
  EXPECT_THROW(model_from_json(v2), VersionError);
  EXPECT_THROW(load_model("/nonexistent/model.json"), Error);
}

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "satlink/ingest.hpp"
#include "satlink/metrics.hpp"

namespace satlink {

struct GbmHyperParams {
  int n_rounds = 200;
  int max_depth = 6;
  double learning_rate = 0.1;
  double min_child_weight = 1.0;
  int n_bins = 64;
  double l2_lambda = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const GbmHyperParams&) const = default;
};

// Internal node when feature >= 0: rows with x[feature] <= threshold go left
// (NaN goes right). Leaf otherwise.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct Tree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> row) const;
  int leaf_index(std::span<const double> row) const;
  int depth() const;
  bool operator==(const Tree&) const = default;
};

enum class Objective { kSoftmax, kSquaredError };

struct GbmModel {
  Objective objective = Objective::kSoftmax;
  GbmHyperParams hyperparams;
  FeatureSchema schema;
  Vocabulary vocab;
  std::vector<double> base_scores;        // one per output
  std::vector<std::vector<Tree>> rounds;  // rounds[r][output]
  // Training objective after the base score (index 0) and after every round.
  std::vector<double> training_loss;

  std::size_t num_outputs() const { return base_scores.size(); }
  std::uint64_t schema_hash() const { return schema.hash(); }
  bool operator==(const GbmModel&) const = default;
};

// One tree per class per round on softmax gradients; histogram split search maximizing
// 0.5*[GL^2/(HL+l) + GR^2/(HR+l) - G^2/(H+l)]; leaves -G/(H+l) shrunk by the learning rate.
// A round that would raise the training loss is shrunk by halving until it does not.
GbmModel train_gbm(const FeatureMatrix& train, const Vocabulary& vocab, const GbmHyperParams& hp);

// Same machinery on the squared-error objective over the raw cnr_db targets.
GbmModel train_regressor(const FeatureMatrix& train, const Vocabulary& vocab, const GbmHyperParams& hp);

// A zero-round classifier whose base scores are the training log-priors, so it always
// predicts the modal category.
GbmModel baseline_majority(const FeatureMatrix& train, const Vocabulary& vocab);

using Probabilities = std::array<double, kNumCategories>;

// Throws SchemaMismatchError unless `schema_hash` is the model's.
Probabilities predict_proba(const GbmModel& model, std::span<const double> row, std::uint64_t schema_hash);
// Argmax; ties resolve to the worse (lower) category.
CnrCategory predict_category(const GbmModel& model, std::span<const double> row, std::uint64_t schema_hash);
double predict_value(const GbmModel& model, std::span<const double> row, std::uint64_t schema_hash);

std::vector<CnrCategory> predict_categories(const GbmModel& model, const FeatureMatrix& m);
std::vector<double> predict_values(const GbmModel& model, const FeatureMatrix& m);

EvalReport evaluate_classifier(const GbmModel& model, const FeatureMatrix& test);

struct RegressionMetrics {
  double mse_db2 = 0.0;
  double mae_db = 0.0;
};

RegressionMetrics eval_regressor(const GbmModel& model, const FeatureMatrix& test);

// Classification report of the regressor's outputs binned into categories, with the
// regression errors attached.
EvalReport evaluate_regressor_as_classifier(const GbmModel& model, const FeatureMatrix& test);

inline constexpr int kModelFormatVersion = 1;

std::string model_to_json(const GbmModel& model);
GbmModel model_from_json(const std::string& text);
void save_model(const GbmModel& model, const std::filesystem::path& path);
GbmModel load_model(const std::filesystem::path& path);

}  // namespace satlink

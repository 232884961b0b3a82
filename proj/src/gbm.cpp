#include "satlink/gbm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "satlink/error.hpp"
#include "satlink/hashing.hpp"

namespace satlink {

void GbmHyperParams::validate() const {
  if (n_rounds < 0) throw ConfigError("n_rounds must be >= 0");
  if (max_depth < 1) throw ConfigError("max_depth must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw ConfigError("learning_rate must lie in (0, 1]");
  if (!(min_child_weight >= 0.0)) throw ConfigError("min_child_weight must be >= 0");
  if (n_bins < 2 || n_bins > 256) throw ConfigError("n_bins must lie in [2, 256]");
  if (!(l2_lambda >= 0.0)) throw ConfigError("l2_lambda must be >= 0");
}

int Tree::leaf_index(std::span<const double> row) const {
  int i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& n = nodes[i];
    i = row[n.feature] <= n.threshold ? n.left : n.right;
  }
  return i;
}

double Tree::predict(std::span<const double> row) const { return nodes[leaf_index(row)].value; }

int Tree::depth() const {
  // Children always follow their parent, so one forward pass suffices.
  std::vector<int> d(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, d[i]);
    if (!nodes[i].is_leaf()) {
      d[nodes[i].left] = d[i] + 1;
      d[nodes[i].right] = d[i] + 1;
    }
  }
  return deepest;
}

namespace {

// Column-major bin codes plus the per-feature upper bound of every bin.
struct BinnedData {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::vector<double>> upper;
  std::vector<std::uint8_t> codes;

  std::uint8_t code(std::size_t f, std::size_t r) const { return codes[f * rows + r]; }
};

BinnedData bin_features(const FeatureMatrix& m, int n_bins) {
  BinnedData out;
  out.rows = m.rows;
  out.cols = m.cols;
  out.upper.resize(m.cols);
  out.codes.resize(m.rows * m.cols);
  std::vector<double> col(m.rows);
  for (std::size_t f = 0; f < m.cols; ++f) {
    for (std::size_t r = 0; r < m.rows; ++r) {
      col[r] = m.values[r * m.cols + f];
      if (!std::isfinite(col[r])) throw Error("training features must be finite");
    }
    std::vector<double> sorted = col;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<double, std::size_t>> distinct;
    for (double v : sorted) {
      if (distinct.empty() || distinct.back().first != v) {
        distinct.emplace_back(v, 1);
      } else {
        ++distinct.back().second;
      }
    }
    auto& up = out.upper[f];
    if (distinct.size() <= static_cast<std::size_t>(n_bins)) {
      for (const auto& d : distinct) up.push_back(d.first);
    } else {
      // Equal-frequency grouping of distinct values.
      const double per_bin = static_cast<double>(m.rows) / n_bins;
      std::size_t acc = 0;
      for (std::size_t i = 0; i < distinct.size(); ++i) {
        acc += distinct[i].second;
        const bool last = i + 1 == distinct.size();
        if (last) {
          up.push_back(distinct[i].first);
        } else if (static_cast<double>(acc) >= per_bin * static_cast<double>(up.size() + 1) &&
                   up.size() + 1 < static_cast<std::size_t>(n_bins)) {
          up.push_back(distinct[i].first);
        }
      }
    }
    for (std::size_t r = 0; r < m.rows; ++r) {
      const auto it = std::lower_bound(up.begin(), up.end(), col[r]);
      out.codes[f * m.rows + r] = static_cast<std::uint8_t>(it - up.begin());
    }
  }
  return out;
}

constexpr double kGainTieEps = 1e-12;

struct GradPair {
  double g = 0.0;
  double h = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const BinnedData& data, const GbmHyperParams& hp, std::span<const double> grad,
              std::span<const double> hess)
      : data_(data), hp_(hp), grad_(grad), hess_(hess), leaf_of_row_(data.rows, 0) {
    offsets_.resize(data.cols + 1, 0);
    for (std::size_t f = 0; f < data.cols; ++f) offsets_[f + 1] = offsets_[f] + data.upper[f].size();
  }

  Tree build() {
    index_.resize(data_.rows);
    std::iota(index_.begin(), index_.end(), 0u);
    std::vector<GradPair> hist = histogram(0, index_.size());
    double g = 0.0, h = 0.0;
    for (std::size_t r = 0; r < data_.rows; ++r) {
      g += grad_[r];
      h += hess_[r];
    }
    grow(0, index_.size(), 0, hist, g, h);
    return std::move(tree_);
  }

  const std::vector<int>& leaf_of_row() const { return leaf_of_row_; }

 private:
  std::vector<GradPair> histogram(std::size_t begin, std::size_t end) const {
    std::vector<GradPair> hist(offsets_.back());
    for (std::size_t f = 0; f < data_.cols; ++f) {
      GradPair* hf = hist.data() + offsets_[f];
      const std::uint8_t* codes = data_.codes.data() + f * data_.rows;
      for (std::size_t i = begin; i < end; ++i) {
        const std::uint32_t r = index_[i];
        hf[codes[r]].g += grad_[r];
        hf[codes[r]].h += hess_[r];
      }
    }
    return hist;
  }

  double score(double g, double h) const { return g * g / (h + hp_.l2_lambda); }

  int grow(std::size_t begin, std::size_t end, int depth, const std::vector<GradPair>& hist, double g,
           double h) {
    const int node = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();

    int best_f = -1;
    std::size_t best_bin = 0;
    double best_gain = 0.0;
    double best_gl = 0.0, best_hl = 0.0;
    if (depth < hp_.max_depth && end - begin >= 2) {
      const double parent = score(g, h);
      for (std::size_t f = 0; f < data_.cols; ++f) {
        const std::size_t nb = data_.upper[f].size();
        double gl = 0.0, hl = 0.0;
        for (std::size_t b = 0; b + 1 < nb; ++b) {
          gl += hist[offsets_[f] + b].g;
          hl += hist[offsets_[f] + b].h;
          const double gr = g - gl;
          const double hr = h - hl;
          if (hl < hp_.min_child_weight || hr < hp_.min_child_weight) continue;
          const double gain = 0.5 * (score(gl, hl) + score(gr, hr) - parent);
          // Gains equal up to rounding count as ties, which keep the earlier candidate.
          if (gain - best_gain > kGainTieEps * std::max(1.0, std::abs(best_gain))) {
            best_gain = gain;
            best_f = static_cast<int>(f);
            best_bin = b;
            best_gl = gl;
            best_hl = hl;
          }
        }
      }
    }

    if (best_f < 0) {
      tree_.nodes[node].value = -g / (h + hp_.l2_lambda) * hp_.learning_rate;
      for (std::size_t i = begin; i < end; ++i) leaf_of_row_[index_[i]] = node;
      return node;
    }

    const std::uint8_t* codes = data_.codes.data() + static_cast<std::size_t>(best_f) * data_.rows;
    const auto mid_it = std::stable_partition(index_.begin() + static_cast<std::ptrdiff_t>(begin),
                                              index_.begin() + static_cast<std::ptrdiff_t>(end),
                                              [&](std::uint32_t r) { return codes[r] <= best_bin; });
    const std::size_t mid = static_cast<std::size_t>(mid_it - index_.begin());

    std::vector<GradPair> left_hist, right_hist;
    if (mid - begin <= end - mid) {
      left_hist = histogram(begin, mid);
      right_hist = subtract(hist, left_hist);
    } else {
      right_hist = histogram(mid, end);
      left_hist = subtract(hist, right_hist);
    }
    const int left = grow(begin, mid, depth + 1, left_hist, best_gl, best_hl);
    const int right = grow(mid, end, depth + 1, right_hist, g - best_gl, h - best_hl);
    TreeNode& n = tree_.nodes[node];
    n.feature = best_f;
    n.threshold = data_.upper[best_f][best_bin];
    n.left = left;
    n.right = right;
    return node;
  }

  static std::vector<GradPair> subtract(const std::vector<GradPair>& parent, const std::vector<GradPair>& child) {
    std::vector<GradPair> out(parent.size());
    for (std::size_t i = 0; i < parent.size(); ++i) {
      out[i].g = parent[i].g - child[i].g;
      out[i].h = parent[i].h - child[i].h;
    }
    return out;
  }

  const BinnedData& data_;
  const GbmHyperParams& hp_;
  std::span<const double> grad_;
  std::span<const double> hess_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> index_;
  std::vector<int> leaf_of_row_;
  Tree tree_;
};

double softmax_loss(std::span<const double> scores, std::span<const CnrCategory> labels) {
  const std::size_t k = kNumCategories;
  double total = 0.0;
  for (std::size_t r = 0; r < labels.size(); ++r) {
    const double* s = scores.data() + r * k;
    const double mx = *std::max_element(s, s + k);
    double z = 0.0;
    for (std::size_t c = 0; c < k; ++c) z += std::exp(s[c] - mx);
    total += -(s[static_cast<int>(labels[r])] - mx - std::log(z));
  }
  return total / static_cast<double>(labels.size());
}

double squared_loss(std::span<const double> scores, std::span<const double> targets) {
  double total = 0.0;
  for (std::size_t r = 0; r < targets.size(); ++r) {
    const double d = scores[r] - targets[r];
    total += 0.5 * d * d;
  }
  return total / static_cast<double>(targets.size());
}

std::array<double, kNumCategories> log_priors(std::span<const CnrCategory> labels) {
  std::array<double, kNumCategories> counts{};
  for (auto c : labels) counts[static_cast<int>(c)] += 1.0;
  std::array<double, kNumCategories> out{};
  for (int c = 0; c < kNumCategories; ++c) {
    out[c] = std::log(std::max(counts[c] / static_cast<double>(labels.size()), 1e-12));
  }
  return out;
}

void check_trainable(const FeatureMatrix& train, bool need_classes) {
  if (train.rows == 0) throw EmptyDatasetError("cannot train on an empty matrix");
  if (train.labels.size() != train.rows || train.cnr_db.size() != train.rows) {
    throw Error("training matrix must be fully labeled");
  }
  if (need_classes) {
    const auto first = train.labels.front();
    if (std::all_of(train.labels.begin(), train.labels.end(), [&](CnrCategory c) { return c == first; })) {
      throw Error("training set contains a single CNR category; at least 2 are required");
    }
  }
}

GbmModel boost(const FeatureMatrix& train, const Vocabulary& vocab, const GbmHyperParams& hp, Objective objective) {
  hp.validate();
  const std::size_t n = train.rows;
  const std::size_t k = objective == Objective::kSoftmax ? kNumCategories : 1;

  GbmModel model;
  model.objective = objective;
  model.hyperparams = hp;
  model.schema = train.schema;
  model.vocab = vocab;
  if (objective == Objective::kSoftmax) {
    const auto priors = log_priors(train.labels);
    model.base_scores.assign(priors.begin(), priors.end());
  } else {
    model.base_scores = {std::accumulate(train.cnr_db.begin(), train.cnr_db.end(), 0.0) / static_cast<double>(n)};
  }

  std::vector<double> scores(n * k);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < k; ++c) scores[r * k + c] = model.base_scores[c];
  }
  auto loss_of = [&](std::span<const double> s) {
    return objective == Objective::kSoftmax ? softmax_loss(s, train.labels) : squared_loss(s, train.cnr_db);
  };
  double loss = loss_of(scores);
  model.training_loss.push_back(loss);
  if (hp.n_rounds == 0) return model;

  const BinnedData data = bin_features(train, hp.n_bins);
  std::vector<double> grad(n), hess(n), prob(n * k);
  std::vector<double> trial(n * k);

  for (int round = 0; round < hp.n_rounds; ++round) {
    if (objective == Objective::kSoftmax) {
      for (std::size_t r = 0; r < n; ++r) {
        const double* s = scores.data() + r * k;
        const double mx = *std::max_element(s, s + k);
        double z = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
          prob[r * k + c] = std::exp(s[c] - mx);
          z += prob[r * k + c];
        }
        for (std::size_t c = 0; c < k; ++c) prob[r * k + c] /= z;
      }
    }

    std::vector<Tree> trees;
    std::vector<std::vector<int>> leaves;
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t r = 0; r < n; ++r) {
        if (objective == Objective::kSoftmax) {
          const double p = prob[r * k + c];
          grad[r] = p - (static_cast<std::size_t>(train.labels[r]) == c ? 1.0 : 0.0);
          hess[r] = std::max(p * (1.0 - p), 1e-16);
        } else {
          grad[r] = scores[r] - train.cnr_db[r];
          hess[r] = 1.0;
        }
      }
      TreeBuilder builder(data, hp, grad, hess);
      trees.push_back(builder.build());
      leaves.push_back(builder.leaf_of_row());
    }

    // Backtrack on the round's step until the loss does not increase.
    double step = 1.0;
    double new_loss = 0.0;
    for (int attempt = 0;; ++attempt) {
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < k; ++c) {
          trial[r * k + c] = scores[r * k + c] + step * trees[c].nodes[leaves[c][r]].value;
        }
      }
      new_loss = loss_of(trial);
      if (new_loss <= loss) break;
      if (attempt == 40) {
        step = 0.0;
        new_loss = loss;
        break;
      }
      step *= 0.5;
    }
    if (step != 1.0) {
      // A zero step must not turn infinite leaves into NaN.
      for (auto& t : trees) {
        for (auto& node : t.nodes) node.value = step == 0.0 ? 0.0 : node.value * step;
      }
    }
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < k; ++c) scores[r * k + c] += trees[c].nodes[leaves[c][r]].value;
    }
    loss = loss_of(scores);
    model.training_loss.push_back(loss);
    model.rounds.push_back(std::move(trees));
  }
  return model;
}

void check_row(const GbmModel& model, std::span<const double> row, std::uint64_t schema_hash) {
  if (schema_hash != model.schema_hash()) {
    throw SchemaMismatchError("feature schema hash " + hex64(schema_hash) + " does not match model schema " +
                              hex64(model.schema_hash()));
  }
  if (row.size() != model.schema.num_columns()) throw SchemaMismatchError("feature row has the wrong width");
}

std::vector<double> raw_scores(const GbmModel& model, std::span<const double> row) {
  std::vector<double> s = model.base_scores;
  for (const auto& round : model.rounds) {
    for (std::size_t c = 0; c < s.size(); ++c) s[c] += round[c].predict(row);
  }
  return s;
}

}  // namespace

GbmModel train_gbm(const FeatureMatrix& train, const Vocabulary& vocab, const GbmHyperParams& hp) {
  check_trainable(train, true);
  return boost(train, vocab, hp, Objective::kSoftmax);
}

GbmModel train_regressor(const FeatureMatrix& train, const Vocabulary& vocab, const GbmHyperParams& hp) {
  check_trainable(train, false);
  return boost(train, vocab, hp, Objective::kSquaredError);
}

GbmModel baseline_majority(const FeatureMatrix& train, const Vocabulary& vocab) {
  if (train.rows == 0) throw EmptyDatasetError("majority baseline needs training rows");
  if (train.labels.size() != train.rows) throw Error("majority baseline needs labels");
  GbmHyperParams hp;
  hp.n_rounds = 0;
  return boost(train, vocab, hp, Objective::kSoftmax);
}

Probabilities predict_proba(const GbmModel& model, std::span<const double> row, std::uint64_t schema_hash) {
  check_row(model, row, schema_hash);
  if (model.objective != Objective::kSoftmax) throw Error("predict_proba needs a classifier");
  const auto s = raw_scores(model, row);
  const double mx = *std::max_element(s.begin(), s.end());
  Probabilities p{};
  double z = 0.0;
  for (int c = 0; c < kNumCategories; ++c) {
    p[c] = std::exp(s[c] - mx);
    z += p[c];
  }
  for (auto& v : p) v /= z;
  return p;
}

CnrCategory predict_category(const GbmModel& model, std::span<const double> row, std::uint64_t schema_hash) {
  const auto p = predict_proba(model, row, schema_hash);
  int best = 0;
  for (int c = 1; c < kNumCategories; ++c) {
    if (p[c] > p[best]) best = c;
  }
  return static_cast<CnrCategory>(best);
}

double predict_value(const GbmModel& model, std::span<const double> row, std::uint64_t schema_hash) {
  check_row(model, row, schema_hash);
  if (model.objective != Objective::kSquaredError) throw Error("predict_value needs a regressor");
  return raw_scores(model, row)[0];
}

std::vector<CnrCategory> predict_categories(const GbmModel& model, const FeatureMatrix& m) {
  std::vector<CnrCategory> out;
  out.reserve(m.rows);
  const auto h = m.schema.hash();
  for (std::size_t r = 0; r < m.rows; ++r) out.push_back(predict_category(model, m.row(r), h));
  return out;
}

std::vector<double> predict_values(const GbmModel& model, const FeatureMatrix& m) {
  std::vector<double> out;
  out.reserve(m.rows);
  const auto h = m.schema.hash();
  for (std::size_t r = 0; r < m.rows; ++r) out.push_back(predict_value(model, m.row(r), h));
  return out;
}

EvalReport evaluate_classifier(const GbmModel& model, const FeatureMatrix& test) {
  if (test.rows == 0) throw EmptyDatasetError("cannot evaluate on an empty test set");
  if (test.labels.size() != test.rows) throw Error("evaluation matrix must be labeled");
  const auto predicted = predict_categories(model, test);
  return evaluate_predictions(test.labels, predicted);
}

RegressionMetrics eval_regressor(const GbmModel& model, const FeatureMatrix& test) {
  if (test.rows == 0) throw EmptyDatasetError("cannot evaluate on an empty test set");
  const auto pred = predict_values(model, test);
  RegressionMetrics m;
  for (std::size_t r = 0; r < test.rows; ++r) {
    const double d = pred[r] - test.cnr_db[r];
    m.mse_db2 += d * d;
    m.mae_db += std::abs(d);
  }
  m.mse_db2 /= static_cast<double>(test.rows);
  m.mae_db /= static_cast<double>(test.rows);
  return m;
}

EvalReport evaluate_regressor_as_classifier(const GbmModel& model, const FeatureMatrix& test) {
  const auto values = predict_values(model, test);
  std::vector<CnrCategory> predicted;
  predicted.reserve(values.size());
  for (double v : values) predicted.push_back(bin_cnr(v));
  EvalReport report = evaluate_predictions(test.labels, predicted);
  const auto reg = eval_regressor(model, test);
  report.mse_db2 = reg.mse_db2;
  report.mae_db = reg.mae_db;
  return report;
}

namespace {

using nlohmann::json;

json hyperparams_to_json(const GbmHyperParams& hp) {
  return {{"n_rounds", hp.n_rounds},       {"max_depth", hp.max_depth}, {"learning_rate", hp.learning_rate},
          {"min_child_weight", hp.min_child_weight}, {"n_bins", hp.n_bins},     {"l2_lambda", hp.l2_lambda},
          {"seed", hp.seed}};
}

GbmHyperParams hyperparams_from_json(const json& j) {
  GbmHyperParams hp;
  hp.n_rounds = j.at("n_rounds").get<int>();
  hp.max_depth = j.at("max_depth").get<int>();
  hp.learning_rate = j.at("learning_rate").get<double>();
  hp.min_child_weight = j.at("min_child_weight").get<double>();
  hp.n_bins = j.at("n_bins").get<int>();
  hp.l2_lambda = j.at("l2_lambda").get<double>();
  hp.seed = j.at("seed").get<std::uint64_t>();
  return hp;
}

}  // namespace

std::string model_to_json(const GbmModel& model) {
  json j;
  j["format_version"] = kModelFormatVersion;
  j["objective"] = model.objective == Objective::kSoftmax ? "softmax" : "squared_error";
  j["hyperparams"] = hyperparams_to_json(model.hyperparams);
  j["schema"] = {{"with_weather", model.schema.with_weather},
                 {"columns", model.schema.column_names()},
                 {"hash", hex64(model.schema.hash())}};
  json vocab = json::object();
  for (std::size_t c = 0; c < kCategoricalColumns.size(); ++c) vocab[kCategoricalColumns[c]] = model.vocab.column(c);
  j["vocab"] = vocab;
  j["base_scores"] = model.base_scores;
  json rounds = json::array();
  for (const auto& round : model.rounds) {
    json per_output = json::array();
    for (const auto& tree : round) {
      json nodes = json::array();
      for (const auto& n : tree.nodes) nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.value}));
      per_output.push_back(nodes);
    }
    rounds.push_back(per_output);
  }
  j["trees"] = rounds;
  j["training_loss"] = model.training_loss;
  return j.dump() + "\n";
}

GbmModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("corrupted model file: ") + e.what());
  }
  if (!j.is_object() || !j.contains("format_version")) throw Error("corrupted model file: no format_version");
  if (!j["format_version"].is_number_integer() || j["format_version"].get<int>() != kModelFormatVersion) {
    throw VersionError("unsupported model format_version " + j["format_version"].dump() + " (expected " +
                       std::to_string(kModelFormatVersion) + ")");
  }
  GbmModel m;
  try {
    const auto objective = j.at("objective").get<std::string>();
    if (objective == "softmax") {
      m.objective = Objective::kSoftmax;
    } else if (objective == "squared_error") {
      m.objective = Objective::kSquaredError;
    } else {
      throw Error("unknown objective " + objective);
    }
    m.hyperparams = hyperparams_from_json(j.at("hyperparams"));
    m.schema.with_weather = j.at("schema").at("with_weather").get<bool>();
    if (j.at("schema").at("hash").get<std::string>() != hex64(m.schema.hash()) ||
        j.at("schema").at("columns").get<std::vector<std::string>>() != m.schema.column_names()) {
      throw SchemaMismatchError("model schema does not match this build's feature layout");
    }
    for (std::size_t c = 0; c < kCategoricalColumns.size(); ++c) {
      m.vocab.mutable_column(c) = j.at("vocab").at(kCategoricalColumns[c]).get<std::map<std::string, int>>();
    }
    m.base_scores = j.at("base_scores").get<std::vector<double>>();
    const std::size_t outputs = m.objective == Objective::kSoftmax ? kNumCategories : 1;
    if (m.base_scores.size() != outputs) throw Error("wrong number of base scores");
    const int cols = static_cast<int>(m.schema.num_columns());
    for (const auto& round : j.at("trees")) {
      std::vector<Tree> trees;
      for (const auto& nodes : round) {
        Tree t;
        for (const auto& n : nodes) {
          TreeNode node{n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(), n.at(3).get<int>(),
                        n.at(4).get<double>()};
          t.nodes.push_back(node);
        }
        const int size = static_cast<int>(t.nodes.size());
        if (size == 0) throw Error("empty tree");
        for (int i = 0; i < size; ++i) {
          const auto& node = t.nodes[i];
          if (!std::isfinite(node.value)) throw Error("non-finite leaf weight");
          if (!node.is_leaf() && (node.feature >= cols || node.left <= i || node.right <= i || node.left >= size ||
                                  node.right >= size)) {
            throw Error("malformed tree node");
          }
        }
        if (t.depth() > m.hyperparams.max_depth) throw Error("tree deeper than max_depth");
        trees.push_back(std::move(t));
      }
      if (trees.size() != outputs) throw Error("wrong number of trees in a round");
      m.rounds.push_back(std::move(trees));
    }
    m.training_loss = j.at("training_loss").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error(std::string("corrupted model file: ") + e.what());
  }
  return m;
}

void save_model(const GbmModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model " + path.string());
  out << model_to_json(model);
  if (!out) throw IoError("failed writing model " + path.string());
}

GbmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace satlink

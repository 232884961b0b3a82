#pragma once

// Independent reference implementations used by the unit and acceptance tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "satlink/gbm.hpp"
#include "satlink/handover.hpp"
#include "satlink/ingest.hpp"
#include "satlink/metrics.hpp"

namespace satlink::testing {

struct OracleMetrics {
  std::array<double, kNumCategories> precision{}, recall{}, f1{};
  double weighted_f1 = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
};

// Per-class counting straight from label lists.
inline OracleMetrics oracle_metrics(const std::vector<CnrCategory>& actual, const std::vector<CnrCategory>& predicted) {
  OracleMetrics m;
  const double n = static_cast<double>(actual.size());
  double correct = 0.0;
  int present = 0;
  for (int c = 0; c < kNumCategories; ++c) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
      const bool a = static_cast<int>(actual[i]) == c;
      const bool p = static_cast<int>(predicted[i]) == c;
      tp += a && p;
      fp += !a && p;
      fn += a && !p;
    }
    m.precision[c] = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    m.recall[c] = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    const double denom = m.precision[c] + m.recall[c];
    m.f1[c] = denom > 0 ? 2 * m.precision[c] * m.recall[c] / denom : 0.0;
    m.weighted_f1 += (tp + fn) / n * m.f1[c];
    if (tp + fp + fn > 0) {
      m.macro_f1 += m.f1[c];
      ++present;
    }
    correct += tp;
  }
  m.macro_f1 = present ? m.macro_f1 / present : 0.0;
  m.accuracy = correct / n;
  return m;
}

inline ConfusionMatrix random_confusion(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> cell(0, 40);
  std::bernoulli_distribution zero(0.25);
  ConfusionMatrix cm{};
  std::size_t total = 0;
  for (auto& row : cm)
    for (auto& v : row) {
      v = zero(rng) ? 0 : static_cast<std::size_t>(cell(rng));
      total += v;
    }
  if (total == 0) cm[1][1] = 1;
  return cm;
}

inline void expand_confusion(const ConfusionMatrix& cm, std::vector<CnrCategory>& actual,
                             std::vector<CnrCategory>& predicted) {
  actual.clear();
  predicted.clear();
  for (int a = 0; a < kNumCategories; ++a)
    for (int p = 0; p < kNumCategories; ++p)
      for (std::size_t i = 0; i < cm[a][p]; ++i) {
        actual.push_back(static_cast<CnrCategory>(a));
        predicted.push_back(static_cast<CnrCategory>(p));
      }
}

// Empty matrix of the no-weather layout with constant categorical columns.
inline FeatureMatrix blank_matrix(std::size_t rows) {
  FeatureMatrix m;
  m.schema = FeatureSchema{false};
  m.cols = m.schema.num_columns();
  m.rows = rows;
  m.values.assign(rows * m.cols, 0.0);
  m.labels.assign(rows, CnrCategory::kBad);
  m.cnr_db.assign(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    m.flight_ids.push_back("F" + std::to_string(r % 7));
    for (std::size_t c = 6; c < m.cols; ++c) m.values[r * m.cols + c] = 1.0;
  }
  return m;
}

inline double representative_cnr(CnrCategory c) {
  static constexpr std::array<double, kNumCategories> mid = {3.0, 8.0, 12.5, 17.5};
  return mid[static_cast<int>(c)];
}

// Four well-separated Gaussian blobs in (latitude, longitude), one per category.
inline FeatureMatrix toy_clusters(std::size_t per_class, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  static constexpr std::array<std::array<double, 2>, kNumCategories> centers = {
      {{-10.0, -10.0}, {-10.0, 10.0}, {10.0, -10.0}, {10.0, 10.0}}};
  FeatureMatrix m = blank_matrix(per_class * kNumCategories);
  for (std::size_t r = 0; r < m.rows; ++r) {
    const int c = static_cast<int>(r % kNumCategories);
    m.values[r * m.cols + 0] = centers[c][0] + noise(rng);
    m.values[r * m.cols + 1] = centers[c][1] + noise(rng);
    m.values[r * m.cols + 2] = 10'000.0 + 100.0 * noise(rng);
    m.labels[r] = static_cast<CnrCategory>(c);
    m.cnr_db[r] = representative_cnr(m.labels[r]);
  }
  return m;
}

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

// Exhaustive search over every (feature, distinct value) threshold for the first
// class-0 tree of the first round, using the softmax gradients at the prior scores.
inline SplitChoice oracle_first_split(const FeatureMatrix& m, double lambda, double min_child_weight) {
  std::array<double, kNumCategories> count{};
  for (auto l : m.labels) count[static_cast<int>(l)] += 1.0;
  std::array<double, kNumCategories> logit{};
  for (int c = 0; c < kNumCategories; ++c) logit[c] = std::log(std::max(count[c] / m.rows, 1e-12));
  const double mx = *std::max_element(logit.begin(), logit.end());
  double z = 0.0;
  for (double s : logit) z += std::exp(s - mx);
  const double p0 = std::exp(logit[0] - mx) / z;

  std::vector<double> g(m.rows), h(m.rows);
  for (std::size_t r = 0; r < m.rows; ++r) {
    g[r] = p0 - (m.labels[r] == CnrCategory::kBad ? 1.0 : 0.0);
    h[r] = std::max(p0 * (1.0 - p0), 1e-16);
  }
  auto score = [&](double gs, double hs) { return gs * gs / (hs + lambda); };
  const double G = std::accumulate(g.begin(), g.end(), 0.0);
  const double H = std::accumulate(h.begin(), h.end(), 0.0);

  SplitChoice best;
  for (std::size_t f = 0; f < m.cols; ++f) {
    std::vector<double> vals;
    for (std::size_t r = 0; r < m.rows; ++r) vals.push_back(m.values[r * m.cols + f]);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
      double gl = 0.0, hl = 0.0;
      for (std::size_t r = 0; r < m.rows; ++r) {
        if (m.values[r * m.cols + f] <= vals[i]) {
          gl += g[r];
          hl += h[r];
        }
      }
      if (hl < min_child_weight || H - hl < min_child_weight) continue;
      const double gain = 0.5 * (score(gl, hl) + score(G - gl, H - hl) - score(G, H));
      if (gain - best.gain > 1e-12 * std::max(1.0, std::abs(best.gain))) best = {static_cast<int>(f), vals[i], gain};
    }
  }
  return best;
}

inline bool loss_monotone(const GbmModel& model, double tol = 1e-9) {
  for (std::size_t i = 1; i < model.training_loss.size(); ++i) {
    if (model.training_loss[i] > model.training_loss[i - 1] + tol) return false;
  }
  return true;
}

inline double training_accuracy(const GbmModel& model, const FeatureMatrix& m) {
  const auto pred = predict_categories(model, m);
  std::size_t ok = 0;
  for (std::size_t r = 0; r < m.rows; ++r) ok += pred[r] == m.labels[r];
  return static_cast<double>(ok) / static_cast<double>(m.rows);
}

// Two satellites over two hours: A is Good but drops to Bad for minutes [40, 100);
// B holds Medium throughout.
inline ForecastGrid two_satellite_degradation() {
  ForecastGrid g;
  g.satellites = {"A", "B"};
  for (int i = 0; i < 120; ++i) {
    g.times.push_back(1672531200 + 60 * i);
    const CnrCategory a = (i >= 40 && i < 100) ? CnrCategory::kBad : CnrCategory::kGood;
    g.categories.push_back({a, CnrCategory::kMedium});
  }
  return g;
}

// Checks the dwell and k-consecutive properties on a finished event log, replaying
// the rows the policy saw.
inline bool switches_respect_policy(const std::vector<HoEvent>& events, const std::vector<Timestamp>& times,
                                    const std::vector<CategoryRow>& seen, const HoPolicy& policy) {
  for (std::size_t e = 1; e < events.size(); ++e) {
    if (static_cast<double>(events[e].t - events[e - 1].t) < policy.min_dwell_s) return false;
  }
  for (const auto& ev : events) {
    const auto at = std::find(times.begin(), times.end(), ev.t);
    if (at == times.end()) return false;
    const std::size_t i = static_cast<std::size_t>(at - times.begin());
    if (i + 1 < static_cast<std::size_t>(policy.consecutive_k)) return false;
    for (int j = 0; j < policy.consecutive_k; ++j) {
      const auto& row = seen[i - static_cast<std::size_t>(j)];
      if (!(row.at(ev.from) < policy.degrade_threshold)) return false;
    }
    if (!(seen[i].at(ev.to) > seen[i].at(ev.from))) return false;
  }
  return true;
}

}  // namespace satlink::testing

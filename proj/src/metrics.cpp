#include "satlink/metrics.hpp"

#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "satlink/error.hpp"

namespace satlink {

EvalReport report_from_confusion(const ConfusionMatrix& cm) {
  EvalReport r;
  r.confusion = cm;
  std::array<std::size_t, kNumCategories> predicted{};
  std::size_t correct = 0;
  for (int a = 0; a < kNumCategories; ++a) {
    for (int p = 0; p < kNumCategories; ++p) {
      r.rows += cm[a][p];
      r.support[a] += cm[a][p];
      predicted[p] += cm[a][p];
    }
    correct += cm[a][a];
  }
  if (r.rows == 0) throw Error("cannot evaluate an empty test set");

  int macro_classes = 0;
  double macro_sum = 0.0;
  for (int c = 0; c < kNumCategories; ++c) {
    const double tp = static_cast<double>(cm[c][c]);
    r.precision[c] = predicted[c] ? tp / static_cast<double>(predicted[c]) : 0.0;
    r.recall[c] = r.support[c] ? tp / static_cast<double>(r.support[c]) : 0.0;
    const double denom = r.precision[c] + r.recall[c];
    r.f1[c] = denom > 0.0 ? 2.0 * r.precision[c] * r.recall[c] / denom : 0.0;
    r.weighted_f1 += static_cast<double>(r.support[c]) / static_cast<double>(r.rows) * r.f1[c];
    if (r.support[c] || predicted[c]) {
      ++macro_classes;
      macro_sum += r.f1[c];
    }
  }
  r.macro_f1 = macro_classes ? macro_sum / macro_classes : 0.0;
  r.accuracy = static_cast<double>(correct) / static_cast<double>(r.rows);
  return r;
}

EvalReport evaluate_predictions(std::span<const CnrCategory> actual, std::span<const CnrCategory> predicted) {
  if (actual.size() != predicted.size()) throw Error("label and prediction counts differ");
  ConfusionMatrix cm{};
  for (std::size_t i = 0; i < actual.size(); ++i) {
    ++cm[static_cast<int>(actual[i])][static_cast<int>(predicted[i])];
  }
  return report_from_confusion(cm);
}

std::string EvalReport::to_json() const {
  nlohmann::json j;
  j["rows"] = rows;
  j["confusion_matrix"] = confusion;
  nlohmann::json per_class = nlohmann::json::object();
  for (int c = 0; c < kNumCategories; ++c) {
    per_class[category_name(static_cast<CnrCategory>(c))] = {
        {"support", support[c]}, {"precision", precision[c]}, {"recall", recall[c]}, {"f1", f1[c]}};
  }
  j["per_class"] = per_class;
  j["weighted_f1"] = weighted_f1;
  j["macro_f1"] = macro_f1;
  j["accuracy"] = accuracy;
  if (mse_db2) j["mse_db2"] = *mse_db2;
  if (mae_db) j["mae_db"] = *mae_db;
  return j.dump(2);
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-8s %9s %9s %9s %9s\n", "class", "support", "precision", "recall", "f1");
  out << line;
  for (int c = 0; c < kNumCategories; ++c) {
    std::snprintf(line, sizeof(line), "%-8s %9zu %9.5f %9.5f %9.5f\n", category_name(static_cast<CnrCategory>(c)),
                  support[c], precision[c], recall[c], f1[c]);
    out << line;
  }
  std::snprintf(line, sizeof(line), "rows %zu  accuracy %.5f  weighted_f1 %.5f  macro_f1 %.5f\n", rows, accuracy,
                weighted_f1, macro_f1);
  out << line;
  if (mse_db2 && mae_db) {
    std::snprintf(line, sizeof(line), "regression mse %.5f dB^2  mae %.5f dB\n", *mse_db2, *mae_db);
    out << line;
  }
  return out.str();
}

}  // namespace satlink

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>

#include "satlink/ingest.hpp"

namespace satlink {

// Rows are actual categories, columns predicted.
using ConfusionMatrix = std::array<std::array<std::size_t, kNumCategories>, kNumCategories>;

struct EvalReport {
  ConfusionMatrix confusion{};
  std::size_t rows = 0;
  std::array<std::size_t, kNumCategories> support{};
  std::array<double, kNumCategories> precision{};
  std::array<double, kNumCategories> recall{};
  std::array<double, kNumCategories> f1{};
  double weighted_f1 = 0.0;
  // Mean over categories that occur in either the actual or the predicted labels.
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  std::optional<double> mse_db2;
  std::optional<double> mae_db;

  std::string to_json() const;
  std::string to_table() const;
};

// Zero-division convention: any undefined precision, recall or F1 is 0.
EvalReport report_from_confusion(const ConfusionMatrix& cm);

EvalReport evaluate_predictions(std::span<const CnrCategory> actual, std::span<const CnrCategory> predicted);

}  // namespace satlink

#pragma once

#include <string>
#include <vector>

#include "eyetrack/corpus.hpp"

namespace eyetrack {

struct EvalReport {
  std::string label;
  std::array<double, kNumFeatures> per_feature{};  // MAE per feature
  double overall = 0.0;                            // mean of the five per-feature MAEs
  std::size_t n_tokens = 0;
};

EvalReport mae(const std::vector<GazeTargets>& preds, const Dataset& gold,
               std::string label = "");

// Aligned human-readable table, columns nFix/FFD/GPT/TRT/fixProp/All,
// three decimals.
std::string render_report_table(const std::vector<EvalReport>& reports);

// CSV schema: label,nFix,FFD,GPT,TRT,fixProp,all,n_tokens
std::string render_report_csv(const std::vector<EvalReport>& reports);

}  // namespace eyetrack

#include "eyetrack/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "eyetrack/csv.hpp"
#include "eyetrack/errors.hpp"

namespace eyetrack {

EvalReport mae(const std::vector<GazeTargets>& preds, const Dataset& gold, std::string label) {
  if (!gold.has_targets) throw IntegrityError("mae requires gold targets");
  const std::size_t n = gold.token_count();
  if (preds.size() != n) {
    throw IntegrityError("mae: prediction count " + std::to_string(preds.size()) +
                         " does not match token count " + std::to_string(n));
  }
  if (n == 0) throw IntegrityError("mae over an empty dataset");

  EvalReport report;
  report.label = std::move(label);
  report.n_tokens = n;
  std::size_t i = 0;
  for (const auto& s : gold.sentences) {
    for (const auto& t : s.tokens) {
      const GazeTargets& p = preds[i++];
      for (std::size_t f = 0; f < kNumFeatures; ++f) {
        report.per_feature[f] += std::abs(p[f] - (*t.targets)[f]);
      }
    }
  }
  double total = 0.0;
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    report.per_feature[f] /= static_cast<double>(n);
    total += report.per_feature[f];
  }
  report.overall = total / static_cast<double>(kNumFeatures);
  return report;
}

namespace {

std::string three_decimals(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

std::string render_report_table(const std::vector<EvalReport>& reports) {
  std::size_t label_width = 5;  // "Model"
  for (const auto& r : reports) label_width = std::max(label_width, r.label.size());

  std::ostringstream out;
  out << std::string(label_width, ' ').replace(0, 5, "Model");
  for (auto name : kFeatureNames) {
    out << "  " << std::string(std::max<std::size_t>(8, name.size()) - name.size(), ' ')
        << name;
  }
  out << "       All\n";
  for (const auto& r : reports) {
    out << r.label << std::string(label_width - r.label.size(), ' ');
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      const std::string cell = three_decimals(r.per_feature[f]);
      out << "  " << std::string(std::max<std::size_t>(8, cell.size()) - cell.size(), ' ')
          << cell;
    }
    const std::string overall = three_decimals(r.overall);
    out << "  " << std::string(std::max<std::size_t>(8, overall.size()) - overall.size(), ' ')
        << overall << "\n";
  }
  return out.str();
}

std::string render_report_csv(const std::vector<EvalReport>& reports) {
  std::string out = "label,nFix,FFD,GPT,TRT,fixProp,all,n_tokens\n";
  for (const auto& r : reports) {
    std::vector<std::string> fields{r.label};
    for (std::size_t f = 0; f < kNumFeatures; ++f) fields.push_back(format_double(r.per_feature[f]));
    fields.push_back(format_double(r.overall));
    fields.push_back(std::to_string(r.n_tokens));
    write_csv_row(out, fields);
  }
  return out;
}

}  // namespace eyetrack

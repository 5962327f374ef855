#include "eyetrack/provo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <tuple>

#include "eyetrack/csv.hpp"
#include "eyetrack/errors.hpp"

namespace eyetrack {

namespace {

bool is_missing_cell(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "na" || cell == "N/A" || cell == "NULL" ||
         cell == "." ;
}

std::optional<double> parse_optional(const std::string& cell, std::size_t row,
                                     const std::string& column) {
  if (is_missing_cell(cell)) return std::nullopt;
  return parse_double(cell, row, column);
}

}  // namespace

std::vector<ProvoRow> load_provo_csv(const std::filesystem::path& path,
                                     const ProvoColumnMap& columns) {
  const CsvTable table = read_csv(path);
  auto require = [&](const std::string& name) {
    const int idx = table.column(name);
    if (idx < 0) {
      throw SchemaError("unmapped column '" + name + "' in " + path.string() +
                        " (adjust the column-name map)");
    }
    return idx;
  };
  const int col_participant = require(columns.participant);
  const int col_text = require(columns.text_id);
  const int col_sentence = require(columns.sentence_number);
  const int col_word_no = require(columns.word_number);
  const int col_word = require(columns.word);
  const int col_nfix = require(columns.fixation_count);
  const int col_ffd = require(columns.first_fixation_duration);
  const int col_gpt = require(columns.regression_path_duration);
  const int col_trt = require(columns.dwell_time);

  std::vector<ProvoRow> rows;
  rows.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& rec = table.rows[r];
    const std::size_t record_no = r + 2;
    ProvoRow row;
    row.participant_id = rec[col_participant];
    row.text_id = parse_long(rec[col_text], record_no, columns.text_id);
    row.sentence_number = parse_long(rec[col_sentence], record_no, columns.sentence_number);
    row.word_number = parse_long(rec[col_word_no], record_no, columns.word_number);
    row.word = rec[col_word];
    if (row.text_id < 0 || row.sentence_number < 0 || row.word_number < 0) {
      throw IntegrityError("row " + std::to_string(record_no) + ": negative identifier");
    }
    row.fixation_count = parse_optional(rec[col_nfix], record_no, columns.fixation_count);
    row.first_fixation_duration =
        parse_optional(rec[col_ffd], record_no, columns.first_fixation_duration);
    row.regression_path_duration =
        parse_optional(rec[col_gpt], record_no, columns.regression_path_duration);
    row.dwell_time = parse_optional(rec[col_trt], record_no, columns.dwell_time);
    for (const auto& dur : {row.first_fixation_duration, row.regression_path_duration,
                            row.dwell_time}) {
      if (dur && *dur < 0) {
        throw IntegrityError("row " + std::to_string(record_no) + ": negative duration");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<WordAggregate> aggregate_words(const std::vector<ProvoRow>& rows,
                                           AggregateReport* report) {
  if (rows.empty()) throw IntegrityError("aggregate_words over zero rows");

  struct Accumulator {
    std::string word;
    double nfix_sum = 0.0;
    double trt_sum = 0.0;
    double ffd_sum = 0.0;
    long ffd_n = 0;
    double gpt_sum = 0.0;
    long gpt_n = 0;
    long fixated = 0;       // participants with dwell > 0
    long participants = 0;  // rows observed for this word
    bool any_measure = false;
  };

  std::map<std::tuple<long, long, long>, Accumulator> acc;
  for (const auto& r : rows) {
    auto& a = acc[{r.text_id, r.sentence_number, r.word_number}];
    if (a.word.empty()) a.word = r.word;
    ++a.participants;
    a.nfix_sum += r.fixation_count.value_or(0.0);
    const double dwell = r.dwell_time.value_or(0.0);
    a.trt_sum += dwell;
    if (dwell > 0.0) ++a.fixated;
    if (r.first_fixation_duration) {
      a.ffd_sum += *r.first_fixation_duration;
      ++a.ffd_n;
    }
    if (r.regression_path_duration) {
      a.gpt_sum += *r.regression_path_duration;
      ++a.gpt_n;
    }
    if (r.fixation_count || r.first_fixation_duration || r.regression_path_duration ||
        r.dwell_time) {
      a.any_measure = true;
    }
  }

  std::vector<WordAggregate> out;
  out.reserve(acc.size());
  std::size_t excluded = 0;
  for (const auto& [key, a] : acc) {
    if (!a.any_measure) {
      ++excluded;
      continue;
    }
    WordAggregate w;
    std::tie(w.text_id, w.sentence_number, w.word_number) = key;
    w.word = a.word;
    w.n_participants = static_cast<int>(a.participants);
    const double n = static_cast<double>(a.participants);
    w.raw[0] = a.nfix_sum / n;
    w.raw[1] = a.ffd_n > 0 ? a.ffd_sum / a.ffd_n : 0.0;
    w.raw[2] = a.gpt_n > 0 ? a.gpt_sum / a.gpt_n : 0.0;
    w.raw[3] = a.trt_sum / n;
    w.raw[4] = static_cast<double>(a.fixated) / n;
    if (w.raw[4] < 0.0 || w.raw[4] > 1.0) {
      throw IntegrityError("raw fixProp outside [0,1]");  // unreachable by construction
    }
    out.push_back(std::move(w));
  }
  if (report) report->words_excluded = excluded;
  return out;
}

std::vector<double> affine_rescale(const std::vector<double>& values, double target_mean,
                                   double target_std) {
  if (values.empty()) throw IntegrityError("affine_rescale over zero values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  const double std_dev = std::sqrt(var);
  if (std_dev == 0.0) {
    throw IntegrityError("degenerate source: constant feature cannot be moment-matched");
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) {
    out.push_back((v - mean) / std_dev * target_std + target_mean);
  }
  return out;
}

ProvoBuildResult build_provo_dataset(const std::vector<WordAggregate>& aggregates,
                                     const std::array<FeatureStats, kNumFeatures>& task_stats,
                                     int hist_bins) {
  if (aggregates.empty()) throw IntegrityError("build_provo_dataset over zero aggregates");

  ProvoBuildResult result;

  std::array<std::vector<double>, kNumFeatures> raw_columns;
  for (auto& c : raw_columns) c.reserve(aggregates.size());
  for (const auto& w : aggregates) {
    for (std::size_t f = 0; f < kNumFeatures; ++f) raw_columns[f].push_back(w.raw[f]);
  }
  std::array<std::vector<double>, kNumFeatures> rescaled;
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    result.raw_stats[f] = compute_stats(raw_columns[f], hist_bins);
    rescaled[f] = affine_rescale(raw_columns[f], task_stats[f].mean, task_stats[f].std_dev);
    result.rescaled_stats[f] = compute_stats(rescaled[f], hist_bins);
    for (double v : rescaled[f]) {
      if (v < 0.0 || v > 100.0) ++result.outside_task_range[f];
    }
  }

  // Group into sentences; aggregates arrive sorted by (text, sentence, word)
  // from aggregate_words, but re-sort by index to stay robust to callers.
  std::vector<std::size_t> order(aggregates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = aggregates[a];
    const auto& y = aggregates[b];
    return std::tie(x.text_id, x.sentence_number, x.word_number) <
           std::tie(y.text_id, y.sentence_number, y.word_number);
  });

  Dataset& d = result.dataset;
  d.has_targets = true;
  long next_sentence_id = kProvoSentenceIdOffset;
  std::pair<long, long> current_key{-1, -1};
  for (std::size_t idx : order) {
    const auto& w = aggregates[idx];
    const std::pair<long, long> key{w.text_id, w.sentence_number};
    if (d.sentences.empty() || key != current_key) {
      Sentence s;
      s.sentence_id = next_sentence_id++;
      d.sentences.push_back(std::move(s));
      current_key = key;
    }
    Sentence& s = d.sentences.back();
    TokenRecord tok;
    tok.sentence_id = s.sentence_id;
    tok.word_id = static_cast<long>(s.tokens.size());
    tok.word = w.word;
    GazeTargets g;
    for (std::size_t f = 0; f < kNumFeatures; ++f) g[f] = rescaled[f][idx];
    tok.targets = g;
    s.tokens.push_back(std::move(tok));
  }
  validate_dataset(d);
  return result;
}

namespace {

void append_stats_rows(std::string& out, const std::array<FeatureStats, kNumFeatures>& stats,
                       const std::string& stage) {
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    write_csv_row(out, {std::string(kFeatureNames[f]), stage, format_double(stats[f].mean),
                        format_double(stats[f].std_dev), format_double(stats[f].min),
                        format_double(stats[f].max)});
  }
}

void append_histogram_rows(std::string& out,
                           const std::array<FeatureStats, kNumFeatures>& stats,
                           const std::string& stage) {
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    for (const auto& [edge, count] : stats[f].histogram) {
      write_csv_row(out, {std::string(kFeatureNames[f]), stage, format_double(edge),
                          std::to_string(count)});
    }
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write file: " + path.string());
  file << content;
}

}  // namespace

void write_stats_csv(const ProvoBuildResult& result,
                     const std::array<FeatureStats, kNumFeatures>& task_stats,
                     const std::filesystem::path& path) {
  std::string out = "feature,stage,mean,std,min,max\n";
  append_stats_rows(out, result.raw_stats, "raw");
  append_stats_rows(out, result.rescaled_stats, "rescaled");
  append_stats_rows(out, task_stats, "task");
  write_text_file(path, out);
}

void write_histogram_csv(const ProvoBuildResult& result,
                         const std::array<FeatureStats, kNumFeatures>& task_stats,
                         const std::filesystem::path& path) {
  std::string out = "feature,stage,lower_edge,count\n";
  append_histogram_rows(out, result.raw_stats, "raw");
  append_histogram_rows(out, result.rescaled_stats, "rescaled");
  append_histogram_rows(out, task_stats, "task");
  write_text_file(path, out);
}

}  // namespace eyetrack

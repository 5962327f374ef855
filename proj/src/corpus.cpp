#include "eyetrack/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "eyetrack/csv.hpp"
#include "eyetrack/errors.hpp"

namespace eyetrack {

bool GazeTargets::all_finite() const {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::size_t Dataset::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.tokens.size();
  return n;
}

std::vector<const TokenRecord*> Dataset::tokens() const {
  std::vector<const TokenRecord*> out;
  out.reserve(token_count());
  for (const auto& s : sentences) {
    for (const auto& t : s.tokens) out.push_back(&t);
  }
  return out;
}

void validate_dataset(const Dataset& d) {
  long prev_sentence = -1;
  bool first_sentence = true;
  for (const auto& s : d.sentences) {
    if (s.tokens.empty()) {
      throw IntegrityError("sentence " + std::to_string(s.sentence_id) + " has no tokens");
    }
    if (!first_sentence && s.sentence_id <= prev_sentence) {
      throw IntegrityError("sentence_ids not strictly increasing at " +
                           std::to_string(s.sentence_id));
    }
    first_sentence = false;
    prev_sentence = s.sentence_id;

    long prev_word = -1;
    bool first_word = true;
    for (const auto& t : s.tokens) {
      if (t.sentence_id != s.sentence_id) {
        throw IntegrityError("token sentence_id mismatch in sentence " +
                             std::to_string(s.sentence_id));
      }
      if (t.word.empty()) {
        throw IntegrityError("empty word in sentence " + std::to_string(s.sentence_id));
      }
      if (t.word_id < 0) {
        throw IntegrityError("negative word_id in sentence " + std::to_string(s.sentence_id));
      }
      if (!first_word && t.word_id != prev_word + 1) {
        throw IntegrityError("word_ids not consecutive in sentence " +
                             std::to_string(s.sentence_id));
      }
      first_word = false;
      prev_word = t.word_id;

      if (d.has_targets != t.targets.has_value()) {
        throw IntegrityError("has_targets flag inconsistent with token targets in sentence " +
                             std::to_string(s.sentence_id));
      }
      if (t.targets && !t.targets->all_finite()) {
        throw IntegrityError("non-finite target in sentence " + std::to_string(s.sentence_id));
      }
    }
  }
}

Dataset load_task_csv(const std::filesystem::path& path, bool has_targets) {
  const CsvTable table = read_csv(path);

  auto require = [&](const std::string& name) {
    int idx = table.column(name);
    if (idx < 0) throw SchemaError("missing column '" + name + "' in " + path.string());
    return idx;
  };
  const int col_sentence = require("sentence_id");
  const int col_word_id = require("word_id");
  const int col_word = require("word");
  std::array<int, kNumFeatures> col_feature{};
  if (has_targets) {
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      col_feature[f] = require(std::string(kFeatureNames[f]));
    }
  }

  std::map<long, std::vector<TokenRecord>> by_sentence;
  std::set<std::pair<long, long>> seen;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t record_no = r + 2;  // header is record 1
    TokenRecord tok;
    tok.sentence_id = parse_long(row[col_sentence], record_no, "sentence_id");
    tok.word_id = parse_long(row[col_word_id], record_no, "word_id");
    tok.word = row[col_word];
    if (tok.word.empty()) {
      throw IntegrityError("row " + std::to_string(record_no) + ": empty word");
    }
    if (!seen.insert({tok.sentence_id, tok.word_id}).second) {
      throw IntegrityError("row " + std::to_string(record_no) + ": duplicate (sentence_id=" +
                           std::to_string(tok.sentence_id) + ", word_id=" +
                           std::to_string(tok.word_id) + ")");
    }
    if (has_targets) {
      GazeTargets g;
      for (std::size_t f = 0; f < kNumFeatures; ++f) {
        g[f] = parse_double(row[col_feature[f]], record_no, std::string(kFeatureNames[f]));
      }
      tok.targets = g;
    }
    by_sentence[tok.sentence_id].push_back(std::move(tok));
  }

  Dataset d;
  d.has_targets = has_targets;
  d.sentences.reserve(by_sentence.size());
  for (auto& [sid, tokens] : by_sentence) {
    std::sort(tokens.begin(), tokens.end(),
              [](const TokenRecord& a, const TokenRecord& b) { return a.word_id < b.word_id; });
    Sentence s;
    s.sentence_id = sid;
    s.tokens = std::move(tokens);
    d.sentences.push_back(std::move(s));
  }
  validate_dataset(d);
  return d;
}

std::pair<Dataset, Dataset> dev_split(const Dataset& d, std::size_t n_train) {
  if (d.sentences.empty()) throw IntegrityError("cannot split an empty dataset");
  const std::size_t cut = std::min(n_train, d.sentences.size());
  Dataset train, dev;
  train.has_targets = d.has_targets;
  dev.has_targets = d.has_targets;
  train.sentences.assign(d.sentences.begin(), d.sentences.begin() + cut);
  dev.sentences.assign(d.sentences.begin() + cut, d.sentences.end());
  return {std::move(train), std::move(dev)};
}

void write_predictions_csv(const Dataset& d, const std::vector<GazeTargets>& preds,
                           const std::filesystem::path& path) {
  if (preds.size() != d.token_count()) {
    throw IntegrityError("prediction count " + std::to_string(preds.size()) +
                         " does not match token count " + std::to_string(d.token_count()));
  }
  std::string out = "sentence_id,word_id,word,nFix,FFD,GPT,TRT,fixProp\n";
  std::size_t i = 0;
  for (const auto& s : d.sentences) {
    for (const auto& t : s.tokens) {
      const GazeTargets& g = preds[i++];
      std::vector<std::string> fields{std::to_string(t.sentence_id),
                                      std::to_string(t.word_id), t.word};
      for (std::size_t f = 0; f < kNumFeatures; ++f) fields.push_back(format_double(g[f]));
      write_csv_row(out, fields);
    }
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write file: " + path.string());
  file << out;
}

FeatureStats compute_stats(const std::vector<double>& values, int n_bins) {
  if (values.empty()) throw IntegrityError("cannot compute stats over zero values");
  if (n_bins < 1) throw ConfigError("n_bins must be >= 1");

  FeatureStats st;
  double sum = 0.0;
  st.min = values[0];
  st.max = values[0];
  for (double v : values) {
    sum += v;
    st.min = std::min(st.min, v);
    st.max = std::max(st.max, v);
  }
  st.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - st.mean) * (v - st.mean);
  st.std_dev = std::sqrt(sq / static_cast<double>(values.size()));

  const double width = (st.max - st.min) / n_bins;
  st.histogram.resize(n_bins);
  for (int b = 0; b < n_bins; ++b) st.histogram[b] = {st.min + b * width, 0};
  for (double v : values) {
    int idx = width > 0 ? static_cast<int>((v - st.min) / width) : 0;
    idx = std::clamp(idx, 0, n_bins - 1);
    ++st.histogram[idx].second;
  }
  return st;
}

std::array<FeatureStats, kNumFeatures> feature_stats(const Dataset& d, int n_bins) {
  if (!d.has_targets) throw IntegrityError("feature_stats requires a dataset with targets");
  if (d.sentences.empty()) throw IntegrityError("feature_stats over an empty dataset");

  std::array<std::vector<double>, kNumFeatures> columns;
  for (auto& c : columns) c.reserve(d.token_count());
  for (const auto& s : d.sentences) {
    for (const auto& t : s.tokens) {
      for (std::size_t f = 0; f < kNumFeatures; ++f) columns[f].push_back((*t.targets)[f]);
    }
  }
  std::array<FeatureStats, kNumFeatures> out;
  for (std::size_t f = 0; f < kNumFeatures; ++f) out[f] = compute_stats(columns[f], n_bins);
  return out;
}

std::vector<GazeTargets> gather_targets(const Dataset& d) {
  if (!d.has_targets) throw IntegrityError("dataset has no targets to gather");
  std::vector<GazeTargets> out;
  out.reserve(d.token_count());
  for (const auto& s : d.sentences) {
    for (const auto& t : s.tokens) out.push_back(*t.targets);
  }
  return out;
}

std::uint64_t dataset_hash(const Dataset& d) {
  // FNV-1a over a canonical serialization.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ull;
    }
  };
  auto mix_long = [&](long v) { mix(&v, sizeof(v)); };
  auto mix_double = [&](double v) { mix(&v, sizeof(v)); };

  mix_long(static_cast<long>(d.sentences.size()));
  for (const auto& s : d.sentences) {
    mix_long(s.sentence_id);
    for (const auto& t : s.tokens) {
      mix_long(t.word_id);
      mix(t.word.data(), t.word.size());
      if (t.targets) {
        for (double v : t.targets->values) mix_double(v);
      }
    }
  }
  return h;
}

}  // namespace eyetrack

#include "eyetrack/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "eyetrack/csv.hpp"
#include "eyetrack/errors.hpp"
#include "eyetrack/rng.hpp"

namespace eyetrack {

namespace {

// Mix of function words, content words, casing, attached punctuation and a
// few non-ASCII forms, roughly what a reading corpus tokenizes into.
const std::vector<std::string>& lexicon() {
  static const std::vector<std::string> words = {
      "the",        "of",          "and",      "a",        "to",       "in",
      "is",         "was",         "that",     "it",       "he",       "she",
      "for",        "on",          "with",     "as",       "at",       "by",
      "this",       "but",         "from",     "they",     "his",      "her",
      "we",         "you",         "not",      "are",      "be",       "have",
      "had",        "one",         "all",      "their",    "there",    "when",
      "who",        "will",        "more",     "out",      "so",       "about",
      "than",       "them",        "can",      "only",     "other",    "into",
      "some",       "time",        "new",      "very",     "after",    "first",
      "two",        "then",        "now",      "also",     "government",
      "president",  "university",  "information",          "development",
      "important",  "company",     "system",   "world",    "because",
      "through",    "between",     "against",  "during",   "history",
      "research",   "science",     "public",   "national", "market",
      "The",        "President",   "London",   "Europe",   "Monday",
      "Parliament", "don't",       "can't",    "it's",     "U.S.",
      "Mr.",        "end.",        "year,",    "\"said",   "(then)",
      "word's",     "café",        "naïve",    "résumé",   "Zürich"};
  return words;
}

double clamp_scale(double v) { return std::clamp(v, 0.0, 100.0); }

GazeTargets targets_from_surface(const SurfaceFeatures& f, Rng& rng, double noise_scale) {
  const double len = f.length;
  const double freq = f.log_freq + 6.0;  // roughly centered for common words
  const double up = f.has_upper ? 1.0 : 0.0;
  const double pu = f.has_punct ? 1.0 : 0.0;
  GazeTargets g;
  g[0] = clamp_scale(1.0 + 1.1 * len - 0.9 * freq + 2.0 * up + 1.5 * pu +
                     noise_scale * rng.normal(0.0, 2.0));
  g[1] = clamp_scale(4.0 + 0.8 * len - 0.5 * freq + noise_scale * rng.normal(0.0, 1.0));
  g[2] = clamp_scale(6.0 + 1.5 * len - 0.8 * freq + 3.0 * pu +
                     noise_scale * rng.normal(0.0, 2.0));
  g[3] = clamp_scale(5.0 + 1.3 * len - 0.7 * freq + 1.5 * up +
                     noise_scale * rng.normal(0.0, 1.5));
  g[4] = clamp_scale(25.0 + 4.0 * len - 2.5 * freq + 8.0 * up + 5.0 * pu +
                     noise_scale * rng.normal(0.0, 5.0));
  return g;
}

}  // namespace

Dataset make_task_fixture(int n_sentences, std::uint64_t seed, bool with_targets,
                          double noise_scale) {
  if (n_sentences < 1) throw ConfigError("fixture needs at least one sentence");
  Rng rng(seed);
  const FrequencyTable table = make_fixture_frequency_table();
  const auto& words = lexicon();

  Dataset d;
  d.has_targets = with_targets;
  d.sentences.reserve(n_sentences);
  for (int s = 0; s < n_sentences; ++s) {
    Sentence sentence;
    sentence.sentence_id = s + 1;
    const int n_words = 5 + static_cast<int>(rng.index(14));  // 5..18
    for (int w = 0; w < n_words; ++w) {
      TokenRecord tok;
      tok.sentence_id = sentence.sentence_id;
      tok.word_id = w;
      tok.word = words[rng.index(words.size())];
      if (with_targets) {
        tok.targets = targets_from_surface(extract_surface(tok.word, table), rng, noise_scale);
      }
      sentence.tokens.push_back(std::move(tok));
    }
    d.sentences.push_back(std::move(sentence));
  }
  validate_dataset(d);
  return d;
}

FrequencyTable make_fixture_frequency_table() {
  FrequencyTable table;
  std::vector<std::string> keys;
  for (const auto& w : lexicon()) {
    const std::string key = normalize_for_lookup(w);
    if (!key.empty() && !table.probabilities.count(key)) {
      keys.push_back(key);
      table.probabilities[key] = 0.0;
    }
  }
  // Zipf-shaped probabilities in lexicon order, common words first.
  for (std::size_t i = 0; i < keys.size(); ++i) {
    table.probabilities[keys[i]] = 0.055 / std::pow(static_cast<double>(i + 1), 1.05);
  }
  return table;
}

std::vector<ProvoRow> make_provo_fixture(int n_texts, int sentences_per_text,
                                         int n_participants, std::uint64_t seed,
                                         double missing_rate) {
  if (n_texts < 1 || sentences_per_text < 1 || n_participants < 1) {
    throw ConfigError("provo fixture dimensions must be positive");
  }
  Rng rng(seed);
  const auto& words = lexicon();

  struct WordSlot {
    long text_id;
    long sentence_number;
    long word_number;
    std::string word;
    double skip_prob;
  };
  std::vector<WordSlot> slots;
  for (int t = 1; t <= n_texts; ++t) {
    for (int s = 1; s <= sentences_per_text; ++s) {
      const int n_words = 8 + static_cast<int>(rng.index(5));  // 8..12
      for (int w = 1; w <= n_words; ++w) {
        WordSlot slot{t, s, w, words[rng.index(words.size())], 0.0};
        const std::size_t len = decode_utf8(slot.word).size();
        slot.skip_prob = std::clamp(0.45 - 0.03 * static_cast<double>(len), 0.05, 0.45);
        slots.push_back(std::move(slot));
      }
    }
  }

  std::vector<ProvoRow> rows;
  rows.reserve(slots.size() * n_participants);
  for (int p = 1; p <= n_participants; ++p) {
    char pid[16];
    std::snprintf(pid, sizeof(pid), "s%03d", p);
    for (const auto& slot : slots) {
      ProvoRow row;
      row.participant_id = pid;
      row.text_id = slot.text_id;
      row.sentence_number = slot.sentence_number;
      row.word_number = slot.word_number;
      row.word = slot.word;
      if (rng.uniform() < slot.skip_prob) {
        row.fixation_count = 0.0;
        row.dwell_time = 0.0;
        // skipped words have no duration measures
      } else {
        const double ffd = rng.uniform(80.0, 250.0);
        row.first_fixation_duration = ffd;
        row.regression_path_duration = ffd + rng.uniform(0.0, 300.0);
        row.fixation_count = 1.0 + static_cast<double>(rng.index(4));
        row.dwell_time = ffd + rng.uniform(0.0, 350.0);
      }
      // sprinkle missing cells
      if (rng.uniform() < missing_rate) row.fixation_count.reset();
      if (rng.uniform() < missing_rate) row.dwell_time.reset();
      if (rng.uniform() < missing_rate) row.first_fixation_duration.reset();
      if (rng.uniform() < missing_rate) row.regression_path_duration.reset();
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_provo_csv(const std::vector<ProvoRow>& rows, const std::filesystem::path& path) {
  const ProvoColumnMap columns;
  std::string out;
  write_csv_row(out, {columns.participant, columns.text_id, columns.sentence_number,
                      columns.word_number, columns.word, columns.fixation_count,
                      columns.first_fixation_duration, columns.regression_path_duration,
                      columns.dwell_time});
  auto cell = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  for (const auto& r : rows) {
    write_csv_row(out, {r.participant_id, std::to_string(r.text_id),
                        std::to_string(r.sentence_number), std::to_string(r.word_number),
                        r.word, cell(r.fixation_count), cell(r.first_fixation_duration),
                        cell(r.regression_path_duration), cell(r.dwell_time)});
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write file: " + path.string());
  file << out;
}

}  // namespace eyetrack

#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "eyetrack/corpus.hpp"

namespace eyetrack::nn {

// Byte-level BPE of the GPT-2/RoBERTa family: every byte maps to a printable
// stand-in codepoint, merges apply lowest rank first. An empty merge list
// degenerates to plain byte tokenization, which is what the small offline
// presets use.
class BpeTokenizer {
 public:
  struct SpecialIds {
    int bos = 0;
    int pad = 1;
    int eos = 2;
    int unk = 3;
  };

  BpeTokenizer() = default;

  static BpeTokenizer from_files(const std::filesystem::path& vocab_json,
                                 const std::filesystem::path& merges_txt);
  static BpeTokenizer from_tables(std::unordered_map<std::string, int> vocab,
                                  std::vector<std::pair<std::string, std::string>> merges,
                                  SpecialIds specials);
  // Specials + the 256 byte symbols, no merges.
  static BpeTokenizer byte_level();

  // `leading_space` encodes the word with the pretraining-style space prefix
  // used for every non-initial word of a sentence.
  std::vector<int> encode_word(std::string_view word, bool leading_space) const;

  int vocab_size() const { return static_cast<int>(id_of_.size()); }
  int bos_id() const { return specials_.bos; }
  int pad_id() const { return specials_.pad; }
  int eos_id() const { return specials_.eos; }
  int unk_id() const { return specials_.unk; }

  void save(const std::filesystem::path& dir) const;

  // GPT-2 byte-to-representation table (UTF-8 strings).
  static const std::array<std::string, 256>& byte_symbols();

 private:
  std::unordered_map<std::string, int> id_of_;
  std::unordered_map<std::string, int> merge_rank_;  // "left\x01right" -> rank
  std::vector<std::pair<std::string, std::string>> merges_;
  SpecialIds specials_;
};

struct AlignmentMap {
  std::vector<int> first_subtoken;  // one strictly increasing index per word
};

struct EncodedSentence {
  long sentence_id = 0;
  std::vector<int> token_ids;  // BOS ... EOS
  AlignmentMap alignment;
};

// Fails loudly (naming the sentence) instead of truncating.
EncodedSentence tokenize_align(const Sentence& sentence, const BpeTokenizer& tokenizer,
                               int max_sequence_length);

}  // namespace eyetrack::nn

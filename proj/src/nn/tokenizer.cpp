#include "eyetrack/nn/tokenizer.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "eyetrack/errors.hpp"
#include "eyetrack/features.hpp"

namespace eyetrack::nn {

using nlohmann::json;

namespace {

std::string merge_key(const std::string& left, const std::string& right) {
  return left + '\x01' + right;
}

}  // namespace

const std::array<std::string, 256>& BpeTokenizer::byte_symbols() {
  static const std::array<std::string, 256> table = [] {
    std::array<std::string, 256> t;
    auto printable = [](int b) {
      return (b >= 0x21 && b <= 0x7E) || (b >= 0xA1 && b <= 0xAC) || (b >= 0xAE && b <= 0xFF);
    };
    int shifted = 0;
    for (int b = 0; b < 256; ++b) {
      if (printable(b)) {
        t[b] = encode_utf8(static_cast<std::uint32_t>(b));
      } else {
        t[b] = encode_utf8(static_cast<std::uint32_t>(256 + shifted));
        ++shifted;
      }
    }
    return t;
  }();
  return table;
}

BpeTokenizer BpeTokenizer::from_tables(std::unordered_map<std::string, int> vocab,
                                       std::vector<std::pair<std::string, std::string>> merges,
                                       SpecialIds specials) {
  BpeTokenizer tok;
  tok.id_of_ = std::move(vocab);
  tok.merges_ = std::move(merges);
  tok.specials_ = specials;
  for (std::size_t r = 0; r < tok.merges_.size(); ++r) {
    tok.merge_rank_[merge_key(tok.merges_[r].first, tok.merges_[r].second)] =
        static_cast<int>(r);
  }
  return tok;
}

BpeTokenizer BpeTokenizer::byte_level() {
  std::unordered_map<std::string, int> vocab{
      {"<s>", 0}, {"<pad>", 1}, {"</s>", 2}, {"<unk>", 3}};
  int next = 4;
  for (const auto& sym : byte_symbols()) {
    if (!vocab.count(sym)) vocab[sym] = next++;
  }
  return from_tables(std::move(vocab), {}, SpecialIds{});
}

BpeTokenizer BpeTokenizer::from_files(const std::filesystem::path& vocab_json,
                                      const std::filesystem::path& merges_txt) {
  std::ifstream vf(vocab_json, std::ios::binary);
  if (!vf) throw ConfigError("cannot open vocab file: " + vocab_json.string());
  json j;
  try {
    vf >> j;
  } catch (const json::exception& e) {
    throw ParseError("invalid vocab json " + vocab_json.string() + ": " + e.what());
  }
  std::unordered_map<std::string, int> vocab;
  vocab.reserve(j.size());
  for (auto it = j.begin(); it != j.end(); ++it) {
    vocab[it.key()] = it.value().get<int>();
  }

  std::ifstream mf(merges_txt, std::ios::binary);
  if (!mf) throw ConfigError("cannot open merges file: " + merges_txt.string());
  std::vector<std::pair<std::string, std::string>> merges;
  std::string line;
  while (std::getline(mf, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.rfind("#version", 0) == 0) continue;
    const auto space = line.find(' ');
    if (space == std::string::npos) {
      throw ParseError("malformed merge line '" + line + "' in " + merges_txt.string());
    }
    merges.emplace_back(line.substr(0, space), line.substr(space + 1));
  }

  SpecialIds sp;
  auto lookup = [&vocab](const char* token, int fallback) {
    auto it = vocab.find(token);
    return it == vocab.end() ? fallback : it->second;
  };
  sp.bos = lookup("<s>", 0);
  sp.pad = lookup("<pad>", 1);
  sp.eos = lookup("</s>", 2);
  sp.unk = lookup("<unk>", 3);
  return from_tables(std::move(vocab), std::move(merges), sp);
}

std::vector<int> BpeTokenizer::encode_word(std::string_view word, bool leading_space) const {
  std::vector<std::string> symbols;
  symbols.reserve(word.size() + 1);
  const auto& bytes = byte_symbols();
  if (leading_space) symbols.push_back(bytes[0x20]);
  for (unsigned char b : word) symbols.push_back(bytes[b]);

  if (!merge_rank_.empty()) {
    while (symbols.size() > 1) {
      int best_rank = std::numeric_limits<int>::max();
      std::size_t best_pos = 0;
      for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
        auto it = merge_rank_.find(merge_key(symbols[i], symbols[i + 1]));
        if (it != merge_rank_.end() && it->second < best_rank) {
          best_rank = it->second;
          best_pos = i;
        }
      }
      if (best_rank == std::numeric_limits<int>::max()) break;
      // merge every occurrence of the winning pair, left to right
      const std::string left = symbols[best_pos];
      const std::string right = symbols[best_pos + 1];
      std::vector<std::string> merged;
      merged.reserve(symbols.size());
      for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (i + 1 < symbols.size() && symbols[i] == left && symbols[i + 1] == right) {
          merged.push_back(left + right);
          ++i;
        } else {
          merged.push_back(symbols[i]);
        }
      }
      symbols = std::move(merged);
    }
  }

  std::vector<int> ids;
  ids.reserve(symbols.size());
  for (const auto& sym : symbols) {
    auto it = id_of_.find(sym);
    ids.push_back(it == id_of_.end() ? specials_.unk : it->second);
  }
  return ids;
}

void BpeTokenizer::save(const std::filesystem::path& dir) const {
  json vocab = json::object();
  for (const auto& [token, id] : id_of_) vocab[token] = id;
  std::ofstream vf(dir / "vocab.json", std::ios::binary);
  if (!vf) throw ConfigError("cannot write vocab.json under " + dir.string());
  vf << vocab.dump() << "\n";

  std::ofstream mf(dir / "merges.txt", std::ios::binary);
  if (!mf) throw ConfigError("cannot write merges.txt under " + dir.string());
  mf << "#version: 0.2\n";
  for (const auto& [left, right] : merges_) mf << left << ' ' << right << '\n';
}

EncodedSentence tokenize_align(const Sentence& sentence, const BpeTokenizer& tokenizer,
                               int max_sequence_length) {
  EncodedSentence out;
  out.sentence_id = sentence.sentence_id;
  out.token_ids.push_back(tokenizer.bos_id());
  for (std::size_t w = 0; w < sentence.tokens.size(); ++w) {
    const auto pieces = tokenizer.encode_word(sentence.tokens[w].word, w > 0);
    out.alignment.first_subtoken.push_back(static_cast<int>(out.token_ids.size()));
    out.token_ids.insert(out.token_ids.end(), pieces.begin(), pieces.end());
  }
  out.token_ids.push_back(tokenizer.eos_id());
  if (static_cast<int>(out.token_ids.size()) > max_sequence_length) {
    throw IntegrityError("sentence " + std::to_string(sentence.sentence_id) + " needs " +
                         std::to_string(out.token_ids.size()) +
                         " subtokens, over the maximum sequence length " +
                         std::to_string(max_sequence_length));
  }
  return out;
}

}  // namespace eyetrack::nn

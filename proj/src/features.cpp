#include "eyetrack/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "eyetrack/csv.hpp"
#include "eyetrack/errors.hpp"

namespace eyetrack {

std::vector<std::uint32_t> decode_utf8(std::string_view s) {
  std::vector<std::uint32_t> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    std::uint32_t cp = 0;
    int extra = 0;
    if (c < 0x80) {
      cp = c;
    } else if ((c & 0xE0) == 0xC0) {
      cp = c & 0x1F;
      extra = 1;
    } else if ((c & 0xF0) == 0xE0) {
      cp = c & 0x0F;
      extra = 2;
    } else if ((c & 0xF8) == 0xF0) {
      cp = c & 0x07;
      extra = 3;
    } else {
      // Stray continuation or invalid byte: treat as one replacement unit.
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    if (i + extra >= s.size()) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    bool ok = true;
    for (int k = 1; k <= extra; ++k) {
      const unsigned char cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (!ok) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

std::string encode_utf8(std::uint32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

bool is_punct_codepoint(std::uint32_t cp) {
  // ASCII punctuation blocks.
  if ((cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
      (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E)) {
    return true;
  }
  // Latin-1 punctuation and currency.
  switch (cp) {
    case 0xA1:  // inverted exclamation
    case 0xA2:
    case 0xA3:
    case 0xA4:
    case 0xA5:  // cent/pound/currency/yen
    case 0xA7:  // section sign
    case 0xAB:  // left guillemet
    case 0xB6:  // pilcrow
    case 0xB7:  // middle dot
    case 0xBB:  // right guillemet
    case 0xBF:  // inverted question mark
      return true;
    default:
      break;
  }
  // General punctuation: dashes, quotes, ellipsis, daggers, permille...
  if (cp >= 0x2010 && cp <= 0x2027) return true;
  if (cp >= 0x2030 && cp <= 0x205E) return true;
  // Currency symbols block.
  if (cp >= 0x20A0 && cp <= 0x20BF) return true;
  return false;
}

bool is_upper_codepoint(std::uint32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return true;
  // Latin-1 uppercase letters, skipping the multiplication sign.
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return true;
  return false;
}

std::uint32_t lower_codepoint(std::uint32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  return cp;
}

FrequencyTable FrequencyTable::load_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  if (table.column("word") < 0 || table.column("probability") < 0) {
    throw SchemaError("frequency table needs columns 'word' and 'probability': " +
                      path.string());
  }
  const int col_word = table.column("word");
  const int col_prob = table.column("probability");
  FrequencyTable out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const double p = parse_double(table.rows[r][col_prob], r + 2, "probability");
    if (p <= 0.0 || p > 1.0) {
      throw IntegrityError("row " + std::to_string(r + 2) +
                           ": probability outside (0, 1]: " + format_double(p));
    }
    out.probabilities[table.rows[r][col_word]] = p;
  }
  return out;
}

void FrequencyTable::save_csv(const std::filesystem::path& path) const {
  std::vector<std::pair<std::string, double>> rows(probabilities.begin(), probabilities.end());
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.second > b.second; });
  std::string out = "word,probability\n";
  for (const auto& [word, p] : rows) {
    write_csv_row(out, {word, format_double(p)});
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write file: " + path.string());
  file << out;
}

double FrequencyTable::probability(std::string_view word) const {
  const std::string key = normalize_for_lookup(word);
  if (key.empty()) return floor_probability;
  auto it = probabilities.find(key);
  return it == probabilities.end() ? floor_probability : it->second;
}

std::string normalize_for_lookup(std::string_view word) {
  std::vector<std::uint32_t> cps = decode_utf8(word);
  std::size_t begin = 0;
  std::size_t end = cps.size();
  while (begin < end && is_punct_codepoint(cps[begin])) ++begin;
  while (end > begin && is_punct_codepoint(cps[end - 1])) --end;
  std::string out;
  for (std::size_t i = begin; i < end; ++i) out += encode_utf8(lower_codepoint(cps[i]));
  return out;
}

double log_frequency(std::string_view word, const FrequencyTable& table) {
  return std::log(table.probability(word));
}

SurfaceFeatures extract_surface(std::string_view word, const FrequencyTable& table) {
  const std::vector<std::uint32_t> cps = decode_utf8(word);
  SurfaceFeatures f;
  f.length = static_cast<int>(cps.size());
  for (std::uint32_t cp : cps) {
    if (is_upper_codepoint(cp)) f.has_upper = true;
    if (is_punct_codepoint(cp)) f.has_punct = true;
  }
  f.log_freq = log_frequency(word, table);
  return f;
}

}  // namespace eyetrack

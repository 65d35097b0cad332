#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "revlab/errors.hpp"
#include "revlab/jsonl.hpp"
#include "revlab/text.hpp"

namespace revlab {

enum class TokenizerKind { whitespace_punct, subword_vocab };

inline const char* to_string(TokenizerKind k) {
  return k == TokenizerKind::whitespace_punct ? "whitespace-punct" : "subword-vocab-file";
}

inline TokenizerKind tokenizer_kind_from_string(const std::string& s) {
  if (s == "whitespace-punct") return TokenizerKind::whitespace_punct;
  if (s == "subword-vocab-file") return TokenizerKind::subword_vocab;
  throw ConfigError("unknown tokenizer kind '" + s + "'");
}

struct TokenizerSpec {
  TokenizerKind kind = TokenizerKind::whitespace_punct;
  std::optional<std::filesystem::path> vocab_path;
  int budget = 512;

  void validate() const {
    if (budget <= 0) throw ConfigError("tokenizer budget must be positive");
    if (kind == TokenizerKind::subword_vocab && !vocab_path)
      throw ConfigError("subword tokenizer requires a vocabulary file path");
  }
};

namespace detail {

inline bool is_word_byte(unsigned char c) {
  // Bytes >= 0x80 group with identifier characters so multi-byte UTF-8
  // sequences stay inside one token instead of exploding into per-byte
  // punctuation.
  return (c >= '0' && c <= '9') || (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' ||
         c >= 0x80;
}

}  // namespace detail

// Splits text into identifier/number runs and single-character punctuation
// tokens; whitespace only separates. Optionally refines word tokens through
// ranked merge rules (byte-pair style) loaded from a vocabulary file, which
// approximates model-native subword counts.
class Tokenizer {
 public:
  explicit Tokenizer(TokenizerSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    if (spec_.kind == TokenizerKind::subword_vocab) load_merges(*spec_.vocab_path);
  }

  const TokenizerSpec& spec() const { return spec_; }
  int budget() const { return spec_.budget; }

  std::vector<std::string> tokenize(std::string_view text) const {
    std::vector<std::string> tokens;
    size_t i = 0;
    while (i < text.size()) {
      unsigned char c = static_cast<unsigned char>(text[i]);
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
        ++i;
        continue;
      }
      if (detail::is_word_byte(c)) {
        size_t j = i;
        while (j < text.size() && detail::is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
        std::string word(text.substr(i, j - i));
        i = j;
        if (spec_.kind == TokenizerKind::subword_vocab)
          for (std::string& piece : apply_merges(word)) tokens.push_back(std::move(piece));
        else
          tokens.push_back(std::move(word));
        continue;
      }
      tokens.emplace_back(1, text[i]);
      ++i;
    }
    return tokens;
  }

 private:
  void load_merges(const std::filesystem::path& path) {
    std::string content;
    try {
      content = read_file(path);
    } catch (const Error&) {
      throw ConfigError("tokenizer vocabulary file not loadable: " + path.string());
    }
    int rank = 0;
    for (const std::string& raw : split_lines(content)) {
      std::string line = trim(raw);
      if (line.empty() || line[0] == '#') continue;
      size_t space = line.find(' ');
      if (space == std::string::npos || space == 0 || space + 1 >= line.size())
        throw ConfigError("tokenizer vocabulary line is not a merge pair: '" + raw + "'");
      merges_[{line.substr(0, space), line.substr(space + 1)}] = rank++;
    }
    if (merges_.empty())
      throw ConfigError("tokenizer vocabulary file holds no merge rules: " + path.string());
  }

  // Greedy lowest-rank-first merging over the word's byte symbols.
  std::vector<std::string> apply_merges(const std::string& word) const {
    std::vector<std::string> symbols;
    symbols.reserve(word.size());
    for (char c : word) symbols.emplace_back(1, c);
    while (symbols.size() > 1) {
      int best_rank = INT32_MAX;
      size_t best_pos = 0;
      for (size_t i = 0; i + 1 < symbols.size(); ++i) {
        auto it = merges_.find({symbols[i], symbols[i + 1]});
        if (it != merges_.end() && it->second < best_rank) {
          best_rank = it->second;
          best_pos = i;
        }
      }
      if (best_rank == INT32_MAX) break;
      // Merge every occurrence of the winning pair, left to right.
      const std::string left = symbols[best_pos];
      const std::string right = symbols[best_pos + 1];
      std::vector<std::string> next;
      next.reserve(symbols.size());
      for (size_t i = 0; i < symbols.size();) {
        if (i + 1 < symbols.size() && symbols[i] == left && symbols[i + 1] == right) {
          next.push_back(left + right);
          i += 2;
        } else {
          next.push_back(symbols[i]);
          i += 1;
        }
      }
      symbols = std::move(next);
    }
    return symbols;
  }

  TokenizerSpec spec_;
  std::map<std::pair<std::string, std::string>, int> merges_;
};

}  // namespace revlab

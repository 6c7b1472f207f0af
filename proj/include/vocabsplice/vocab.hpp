#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vocabsplice/error.hpp"
#include "vocabsplice/io.hpp"
#include "vocabsplice/text.hpp"

namespace vocabsplice {

using TokenId = std::int32_t;

inline constexpr std::string_view kContinuationPrefix = "##";
inline constexpr std::string_view kUnkToken = "[UNK]";

/// True for placeholder tokens of the form "[unused<digits>]".
inline bool is_unused_token(std::string_view token) {
  constexpr std::string_view head = "[unused";
  if (token.size() < head.size() + 2 || !text::starts_with(token, head) || token.back() != ']') {
    return false;
  }
  const auto digits = token.substr(head.size(), token.size() - head.size() - 1);
  return std::all_of(digits.begin(), digits.end(), text::is_digit);
}

inline bool is_continuation(std::string_view token) {
  return text::starts_with(token, kContinuationPrefix);
}

struct SpecialTokens {
  std::optional<TokenId> pad;
  TokenId unk = 0;
  std::optional<TokenId> cls;
  std::optional<TokenId> sep;
  std::optional<TokenId> mask;
};

/// Ordered, immutable subword vocabulary. A token's id is its position.
class Vocab {
 public:
  static Vocab from_tokens(std::vector<std::string> tokens) {
    if (tokens.empty()) throw Error("vocab is empty");
    Vocab v;
    v.index_.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (tokens[i].empty()) throw Error("vocab: empty token at line " + std::to_string(i + 1));
      auto [it, inserted] = v.index_.emplace(tokens[i], static_cast<TokenId>(i));
      if (!inserted) {
        throw Error("vocab: duplicate token '" + tokens[i] + "' on lines " +
                    std::to_string(it->second + 1) + " and " + std::to_string(i + 1));
      }
    }
    v.tokens_ = std::move(tokens);
    const auto unk = v.id(kUnkToken);
    if (!unk) throw Error("vocab: missing [UNK] token");
    v.specials_.unk = *unk;
    v.specials_.pad = v.id("[PAD]");
    v.specials_.cls = v.id("[CLS]");
    v.specials_.sep = v.id("[SEP]");
    v.specials_.mask = v.id("[MASK]");
    return v;
  }

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::string& token(TokenId id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  const SpecialTokens& specials() const { return specials_; }

  std::optional<TokenId> id(std::string_view token) const {
    const auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(std::string_view token) const { return index_.find(token) != index_.end(); }

  /// Ids of every "[unusedN]" slot, ascending.
  std::vector<TokenId> unused_slots() const {
    std::vector<TokenId> out;
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (is_unused_token(tokens_[i])) out.push_back(static_cast<TokenId>(i));
    }
    return out;
  }

  friend bool operator==(const Vocab& a, const Vocab& b) { return a.tokens_ == b.tokens_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };

  Vocab() = default;

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId, Hash, std::equal_to<>> index_;
  SpecialTokens specials_;
};

/// Reads the vocab.txt convention: one token per line, id = zero-based line
/// number. A single trailing newline is tolerated; CRLF endings are not
/// stripped because published vocab files never use them.
inline Vocab load_vocab(std::string_view data) {
  if (data.empty()) throw Error("vocab: empty input");
  if (data.back() == '\n') data.remove_suffix(1);
  return Vocab::from_tokens(text::split(data, '\n'));
}

inline Vocab load_vocab(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_vocab(std::string_view(buf.str()));
}

inline Vocab load_vocab_file(const std::filesystem::path& path) {
  try {
    return load_vocab(std::string_view(io::read_file(path)));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

/// Inverse of load_vocab: every token followed by '\n'.
inline std::string format_vocab(const Vocab& vocab) {
  std::string out;
  for (const auto& t : vocab.tokens()) {
    out += t;
    out.push_back('\n');
  }
  return out;
}

inline void write_vocab(std::ostream& out, const Vocab& vocab) { out << format_vocab(vocab); }

}  // namespace vocabsplice

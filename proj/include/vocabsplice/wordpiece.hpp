#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "vocabsplice/error.hpp"
#include "vocabsplice/text.hpp"
#include "vocabsplice/vocab.hpp"

namespace vocabsplice {

/// Fragments of one or more words, each a member of the tokenizing vocab.
struct TokenSequence {
  std::vector<std::string> fragments;

  std::size_t size() const { return fragments.size(); }
  bool empty() const { return fragments.empty(); }
  bool has_unk() const {
    for (const auto& f : fragments) {
      if (f == kUnkToken) return true;
    }
    return false;
  }
  std::string joined(std::string_view sep = " ") const { return text::join(fragments, sep); }

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

struct WordPieceOptions {
  bool lowercase = true;
  std::size_t max_chars = 100;
};

/// Whitespace split followed by isolating every ASCII punctuation character.
/// Bytes >= 0x80 are treated as word characters.
inline std::vector<std::string> basic_tokenize(std::string_view input, bool lowercase = true) {
  std::vector<std::string> words;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) words.push_back(std::move(current));
    current.clear();
  };
  for (char c : input) {
    if (text::is_space(c)) {
      flush();
    } else if (text::is_punct(c)) {
      flush();
      words.emplace_back(1, c);
    } else {
      current.push_back(lowercase ? text::to_lower(c) : c);
    }
  }
  flush();
  return words;
}

/// Greedy longest-match-first WordPiece over code points. Returns exactly
/// ["[UNK]"] when some position has no matching piece or the word is longer
/// than max_chars code points.
inline TokenSequence wordpiece_tokenize(std::string_view word, const Vocab& vocab,
                                        std::size_t max_chars = 100) {
  TokenSequence out;
  if (word.empty()) return out;
  const auto cuts = text::utf8_boundaries(word);
  const std::size_t n = cuts.size() - 1;
  if (n > max_chars) return TokenSequence{{std::string(kUnkToken)}};

  std::string piece;
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = n;
    bool found = false;
    while (end > start) {
      piece.clear();
      if (start > 0) piece.append(kContinuationPrefix);
      piece.append(word.substr(cuts[start], cuts[end] - cuts[start]));
      if (vocab.contains(piece)) {
        found = true;
        break;
      }
      --end;
    }
    if (!found) return TokenSequence{{std::string(kUnkToken)}};
    out.fragments.push_back(piece);
    start = end;
  }
  return out;
}

/// basic_tokenize, then wordpiece_tokenize on every word.
inline TokenSequence tokenize(std::string_view input, const Vocab& vocab,
                              const WordPieceOptions& options = {}) {
  TokenSequence out;
  for (const auto& word : basic_tokenize(input, options.lowercase)) {
    auto pieces = wordpiece_tokenize(word, vocab, options.max_chars);
    for (auto& p : pieces.fragments) out.fragments.push_back(std::move(p));
  }
  return out;
}

/// Rebuilds the word a single-word tokenization came from.
inline std::string detokenize_word(const TokenSequence& seq) {
  std::string word;
  for (std::size_t i = 0; i < seq.fragments.size(); ++i) {
    const auto& f = seq.fragments[i];
    if (f == kUnkToken) throw Error("cannot detokenize a sequence containing [UNK]");
    if (i == 0) {
      word += f;
      continue;
    }
    if (!is_continuation(f)) {
      throw Error("fragment " + std::to_string(i) + " ('" + f + "') lacks the ## prefix");
    }
    word.append(f, kContinuationPrefix.size());
  }
  return word;
}

}  // namespace vocabsplice

#pragma once

// Deterministic BPE induction of a domain subword vocabulary with BERT-style
// "##" continuation marks.
//
// Every word starts as its characters, the first bare and the rest prefixed
// with "##". The most frequent adjacent pair is merged until the vocabulary
// reaches the target size or no pair occurs at least min_pair_freq times.
// Ties go to the lexicographically smallest merged string, then to the
// smallest (left, right) pair, so the merge order is total.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vocabsplice/corpus.hpp"
#include "vocabsplice/error.hpp"
#include "vocabsplice/text.hpp"
#include "vocabsplice/vocab.hpp"
#include "vocabsplice/wordpiece.hpp"

namespace vocabsplice {

using WordCounts = std::map<std::string, std::uint64_t>;

/// Counts of basic_tokenize words (lowercased) over every sentence.
inline WordCounts word_frequencies(std::string_view text, bool lowercase = true) {
  WordCounts counts;
  for (auto& w : basic_tokenize(text, lowercase)) ++counts[std::move(w)];
  return counts;
}

inline WordCounts word_frequencies(const std::vector<corpus::Document>& docs, bool lowercase = true) {
  WordCounts counts;
  for (const auto& doc : docs) {
    for (const auto& s : doc.sentences) {
      for (auto& w : basic_tokenize(s, lowercase)) ++counts[std::move(w)];
    }
  }
  return counts;
}

struct CustomVocabEntry {
  std::string token;
  std::uint64_t frequency = 0;

  friend bool operator==(const CustomVocabEntry&, const CustomVocabEntry&) = default;
};

/// Induced vocabulary: the initial alphabet (sorted) followed by merges in
/// the order they were made. A merge's frequency is its pair count at the
/// time it was chosen; an alphabet symbol's is its occurrence count.
struct CustomVocab {
  std::vector<CustomVocabEntry> entries;

  std::size_t size() const { return entries.size(); }
  std::vector<std::string> tokens() const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.token);
    return out;
  }

  friend bool operator==(const CustomVocab&, const CustomVocab&) = default;
};

struct BpeOptions {
  std::size_t target_size = 30000;
  std::uint64_t min_pair_freq = 2;
};

namespace detail {

class BpeTrainer {
 public:
  BpeTrainer(const WordCounts& counts, const BpeOptions& options) : options_(options) {
    if (options.min_pair_freq < 1) throw Error("bpe: min_pair_freq must be at least 1");
    std::map<std::string, std::uint64_t> alphabet;
    for (const auto& [word, count] : counts) {
      if (word.empty() || count == 0) continue;
      const auto cuts = text::utf8_boundaries(word);
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        std::string sym = i == 0 ? std::string() : std::string(kContinuationPrefix);
        sym.append(word, cuts[i], cuts[i + 1] - cuts[i]);
        alphabet[sym] += count;
      }
    }
    if (alphabet.empty()) throw Error("bpe: corpus is empty");
    if (options.target_size < alphabet.size()) {
      throw Error("bpe: target size " + std::to_string(options.target_size) +
                  " is smaller than the initial alphabet (" + std::to_string(alphabet.size()) +
                  " symbols including ## forms)");
    }
    for (const auto& [sym, freq] : alphabet) {
      intern(sym);
      result_.entries.push_back({sym, freq});
    }
    for (const auto& [word, count] : counts) {
      if (word.empty() || count == 0) continue;
      Word w;
      w.count = count;
      const auto cuts = text::utf8_boundaries(word);
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        std::string sym = i == 0 ? std::string() : std::string(kContinuationPrefix);
        sym.append(word, cuts[i], cuts[i + 1] - cuts[i]);
        w.symbols.push_back(ids_.at(sym));
      }
      words_.push_back(std::move(w));
    }
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      const auto& w = words_[wi];
      for (std::size_t i = 0; i + 1 < w.symbols.size(); ++i) {
        const Pair p{w.symbols[i], w.symbols[i + 1]};
        pair_counts_[p] += w.count;
        where_[p].insert(wi);
      }
    }
    for (const auto& [p, c] : pair_counts_) queue_.insert(key(p, c));
  }

  CustomVocab run() {
    while (result_.entries.size() < options_.target_size && !queue_.empty()) {
      const auto best = *queue_.begin();
      if (best.count < options_.min_pair_freq) break;
      merge(best);
    }
    return std::move(result_);
  }

 private:
  using Pair = std::pair<int, int>;

  struct Word {
    std::vector<int> symbols;
    std::uint64_t count = 0;
  };

  struct Candidate {
    std::uint64_t count;
    std::string merged;
    std::string left;
    std::string right;
    Pair pair;

    bool operator<(const Candidate& o) const {
      if (count != o.count) return count > o.count;
      if (merged != o.merged) return merged < o.merged;
      if (left != o.left) return left < o.left;
      return right < o.right;
    }
  };

  int intern(const std::string& sym) {
    auto [it, inserted] = ids_.emplace(sym, static_cast<int>(symbols_.size()));
    if (inserted) symbols_.push_back(sym);
    return it->second;
  }

  std::string merged_string(const Pair& p) const {
    const auto& right = symbols_[static_cast<std::size_t>(p.second)];
    return symbols_[static_cast<std::size_t>(p.first)] + right.substr(kContinuationPrefix.size());
  }

  Candidate key(const Pair& p, std::uint64_t count) const {
    return {count, merged_string(p), symbols_[static_cast<std::size_t>(p.first)],
            symbols_[static_cast<std::size_t>(p.second)], p};
  }

  void merge(const Candidate& best) {
    const Pair target = best.pair;
    const bool is_new = !ids_.contains(best.merged);
    const int merged = intern(best.merged);
    if (is_new) result_.entries.push_back({best.merged, best.count});

    std::map<Pair, std::int64_t> delta;
    const auto affected = where_[target];
    for (const std::size_t wi : affected) {
      auto& w = words_[wi];
      const auto signed_count = static_cast<std::int64_t>(w.count);
      for (std::size_t i = 0; i + 1 < w.symbols.size(); ++i) {
        const Pair p{w.symbols[i], w.symbols[i + 1]};
        delta[p] -= signed_count;
        where_[p].erase(wi);
      }
      std::vector<int> next;
      next.reserve(w.symbols.size());
      for (std::size_t i = 0; i < w.symbols.size(); ++i) {
        if (i + 1 < w.symbols.size() && w.symbols[i] == target.first &&
            w.symbols[i + 1] == target.second) {
          next.push_back(merged);
          ++i;
        } else {
          next.push_back(w.symbols[i]);
        }
      }
      w.symbols = std::move(next);
      for (std::size_t i = 0; i + 1 < w.symbols.size(); ++i) {
        const Pair p{w.symbols[i], w.symbols[i + 1]};
        delta[p] += signed_count;
        where_[p].insert(wi);
      }
    }
    for (const auto& [p, d] : delta) {
      if (d == 0) continue;
      auto& current = pair_counts_[p];
      if (current > 0) queue_.erase(key(p, current));
      current = static_cast<std::uint64_t>(static_cast<std::int64_t>(current) + d);
      if (current > 0) {
        queue_.insert(key(p, current));
      } else {
        pair_counts_.erase(p);
        where_.erase(p);
      }
    }
  }

  BpeOptions options_;
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> ids_;
  std::vector<Word> words_;
  std::map<Pair, std::uint64_t> pair_counts_;
  std::map<Pair, std::set<std::size_t>> where_;
  std::set<Candidate> queue_;
  CustomVocab result_;
};

}  // namespace detail

inline CustomVocab train_bpe(const WordCounts& counts, const BpeOptions& options = {}) {
  return detail::BpeTrainer(counts, options).run();
}

inline CustomVocab train_bpe(const std::vector<corpus::Document>& docs,
                             const BpeOptions& options = {}) {
  return train_bpe(word_frequencies(docs), options);
}

// ---- files ---------------------------------------------------------------

/// token<TAB>count per line.
inline std::string format_custom_vocab_tsv(const CustomVocab& vocab) {
  std::string out;
  for (const auto& e : vocab.entries) out += e.token + '\t' + std::to_string(e.frequency) + '\n';
  return out;
}

/// vocab.txt layout of the induced tokens.
inline std::string format_custom_vocab_txt(const CustomVocab& vocab) {
  std::string out;
  for (const auto& e : vocab.entries) out += e.token + '\n';
  return out;
}

inline CustomVocab parse_custom_vocab_tsv(std::string_view data) {
  CustomVocab vocab;
  std::set<std::string> seen;
  const auto lines = text::split(data, '\n');
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto tab = lines[i].rfind('\t');
    const auto where = "custom vocab line " + std::to_string(i + 1);
    if (tab == std::string::npos || tab == 0) throw Error(where + ": expected token<TAB>count");
    CustomVocabEntry e{lines[i].substr(0, tab), 0};
    const auto count = lines[i].substr(tab + 1);
    if (count.empty() || !std::all_of(count.begin(), count.end(), text::is_digit)) {
      throw Error(where + ": count '" + count + "' is not a non-negative integer");
    }
    e.frequency = std::stoull(count);
    if (e.frequency == 0) throw Error(where + ": frequency must be positive");
    if (!seen.insert(e.token).second) throw Error(where + ": duplicate token '" + e.token + "'");
    vocab.entries.push_back(std::move(e));
  }
  return vocab;
}

}  // namespace vocabsplice

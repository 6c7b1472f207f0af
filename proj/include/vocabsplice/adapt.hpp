#pragma once

// Fragmentation analysis of an induced vocabulary under a base WordPiece
// vocabulary, good/bad segregation, root clubbing, candidate selection and
// the splice of the chosen words into the base vocabulary's unused slots.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vocabsplice/bpe.hpp"
#include "vocabsplice/csv.hpp"
#include "vocabsplice/error.hpp"
#include "vocabsplice/text.hpp"
#include "vocabsplice/vocab.hpp"
#include "vocabsplice/wordpiece.hpp"

namespace vocabsplice {

enum class Classification { whole, good, bad };

inline std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::whole: return "whole";
    case Classification::good: return "good";
    case Classification::bad: return "bad";
  }
  return "?";
}

inline Classification parse_classification(std::string_view s) {
  if (s == "whole") return Classification::whole;
  if (s == "good") return Classification::good;
  if (s == "bad") return Classification::bad;
  throw Error("unknown classification '" + std::string(s) + "' (expected whole, good or bad)");
}

struct FragmentationRecord {
  std::string word;
  TokenSequence fragments;
  bool is_whole = false;
  Classification classification = Classification::good;
  std::uint64_t corpus_frequency = 0;

  friend bool operator==(const FragmentationRecord&, const FragmentationRecord&) = default;
};

using FragmentationReport = std::vector<FragmentationRecord>;

/// Default good/bad rule: a word is bad when the base vocab shatters it into
/// three or more pieces, keeps only a one- or two-character stem, or cannot
/// tokenize it at all.
inline Classification heuristic_classification(const TokenSequence& fragments) {
  if (fragments.has_unk()) return Classification::bad;
  if (fragments.size() >= 3) return Classification::bad;
  if (!fragments.empty() && text::utf8_length(fragments.fragments.front()) <= 2) {
    return Classification::bad;
  }
  return Classification::good;
}

/// One record per word-initial entry of the induced vocabulary ("##" pieces
/// are not words and are skipped). Whole words stay in the report but are
/// labelled `whole` and take no part in classification.
inline FragmentationReport fragmentation_report(const CustomVocab& custom, const Vocab& base,
                                                std::size_t max_chars = 100) {
  FragmentationReport report;
  report.reserve(custom.entries.size());
  for (const auto& entry : custom.entries) {
    if (is_continuation(entry.token)) continue;
    FragmentationRecord r;
    r.word = entry.token;
    r.fragments = wordpiece_tokenize(entry.token, base, max_chars);
    r.is_whole = r.fragments.size() == 1 && r.fragments.fragments.front() == entry.token;
    r.classification = r.is_whole ? Classification::whole : heuristic_classification(r.fragments);
    r.corpus_frequency = entry.frequency;
    report.push_back(std::move(r));
  }
  return report;
}

/// Fraction of records the base vocabulary keeps whole.
inline double overlap_stat(const FragmentationReport& report) {
  if (report.empty()) throw Error("overlap_stat: empty fragmentation report");
  const auto whole = std::count_if(report.begin(), report.end(),
                                   [](const FragmentationRecord& r) { return r.is_whole; });
  return static_cast<double>(whole) / static_cast<double>(report.size());
}

using LabelOverrides = std::map<std::string, Classification>;

/// Re-labels every non-whole record with the heuristic, then applies the
/// expert overrides, which always win.
inline FragmentationReport classify_words(FragmentationReport report, const LabelOverrides& overrides) {
  std::map<std::string, FragmentationRecord*> by_word;
  for (auto& r : report) by_word.emplace(r.word, &r);

  std::vector<std::string> missing;
  for (const auto& [word, label] : overrides) {
    const auto it = by_word.find(word);
    if (it == by_word.end()) {
      missing.push_back(word);
    } else if (it->second->is_whole) {
      throw Error("override for '" + word + "': the word is whole in the base vocabulary");
    } else if (label == Classification::whole) {
      throw Error("override for '" + word + "': label must be good or bad");
    }
  }
  if (!missing.empty()) {
    throw Error("overrides name words absent from the report: " + text::join(missing, ", "));
  }

  for (auto& r : report) {
    if (r.is_whole) {
      r.classification = Classification::whole;
      continue;
    }
    const auto it = overrides.find(r.word);
    r.classification = it != overrides.end() ? it->second : heuristic_classification(r.fragments);
  }
  return report;
}

// ---- root clubbing -------------------------------------------------------

struct RootGroup {
  std::set<std::string> members;
  std::string representative;

  friend bool operator==(const RootGroup&, const RootGroup&) = default;
};

/// A manual clubbing decision: every listed member ends up in one group
/// whose representative is `representative`.
struct ClubOverride {
  std::string representative;
  std::vector<std::string> members;
};

inline std::string common_prefix(std::string_view a, std::string_view b) {
  std::size_t n = 0;
  while (n < a.size() && n < b.size() && a[n] == b[n]) ++n;
  // Never cut inside a UTF-8 sequence.
  while (n > 0 && n < a.size() && (static_cast<unsigned char>(a[n]) & 0xC0) == 0x80) --n;
  return std::string(a.substr(0, n));
}

/// Sorted greedy agglomeration: walk the words in order and keep extending
/// the current group while its common prefix stays at least min_prefix_len
/// characters long. Overrides then merge the groups holding their members
/// and rename the result.
inline std::vector<RootGroup> club_roots(const std::set<std::string>& bad_words,
                                         std::size_t min_prefix_len = 5,
                                         const std::vector<ClubOverride>& overrides = {}) {
  if (min_prefix_len < 3) throw Error("club_roots: min_prefix_len must be at least 3");

  std::vector<RootGroup> groups;
  for (const auto& word : bad_words) {
    if (!groups.empty()) {
      auto& g = groups.back();
      auto prefix = common_prefix(g.representative, word);
      if (text::utf8_length(prefix) >= min_prefix_len) {
        g.members.insert(word);
        g.representative = std::move(prefix);
        continue;
      }
    }
    groups.push_back({{word}, word});
  }

  for (const auto& o : overrides) {
    RootGroup combined{{}, o.representative};
    std::vector<RootGroup> rest;
    for (auto& g : groups) {
      const bool hit = std::any_of(o.members.begin(), o.members.end(),
                                   [&](const std::string& m) { return g.members.contains(m); });
      if (hit) {
        combined.members.insert(g.members.begin(), g.members.end());
      } else {
        rest.push_back(std::move(g));
      }
    }
    if (!combined.members.empty()) rest.push_back(std::move(combined));
    groups = std::move(rest);
  }

  std::sort(groups.begin(), groups.end(), [](const RootGroup& a, const RootGroup& b) {
    return *a.members.begin() < *b.members.begin();
  });
  return groups;
}

// ---- selection -----------------------------------------------------------

/// One representative per group ranked by the summed corpus frequency of its
/// members (descending, ties by representative), skipping representatives
/// the base vocabulary already has, truncated to `slot_budget`.
inline std::vector<std::string> select_candidates(const std::vector<RootGroup>& groups,
                                                  const WordCounts& frequencies,
                                                  std::size_t slot_budget, const Vocab& base) {
  std::map<std::string, std::uint64_t> score;
  for (const auto& g : groups) {
    if (g.representative.empty()) continue;
    std::uint64_t sum = 0;
    for (const auto& m : g.members) {
      const auto it = frequencies.find(m);
      if (it != frequencies.end()) sum += it->second;
    }
    auto [it, inserted] = score.emplace(g.representative, sum);
    if (!inserted) it->second += sum;
  }
  std::vector<std::pair<std::string, std::uint64_t>> ranked;
  for (auto& [rep, s] : score) {
    if (!base.contains(rep)) ranked.emplace_back(rep, s);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < slot_budget; ++i) out.push_back(ranked[i].first);
  return out;
}

// ---- vocabulary surgery --------------------------------------------------

/// The i-th selected word takes the i-th unused slot (ascending id). Size and
/// every other id are preserved.
inline Vocab apply_vocab_surgery(const Vocab& base, const std::vector<std::string>& selected) {
  const auto slots = base.unused_slots();
  if (selected.size() > slots.size()) {
    throw Error("surgery: " + std::to_string(selected.size()) + " words selected but the base vocabulary has only " +
                std::to_string(slots.size()) + " unused slots");
  }
  std::set<std::string_view> seen;
  for (const auto& w : selected) {
    if (w.empty()) throw Error("surgery: empty word selected");
    if (base.contains(w)) throw Error("surgery: '" + w + "' is already in the base vocabulary");
    if (!seen.insert(w).second) throw Error("surgery: '" + w + "' selected twice");
  }
  auto tokens = base.tokens();
  for (std::size_t i = 0; i < selected.size(); ++i) {
    tokens[static_cast<std::size_t>(slots[i])] = selected[i];
  }
  return Vocab::from_tokens(std::move(tokens));
}

// ---- files ---------------------------------------------------------------

inline const csv::Row& fragmentation_csv_header() {
  static const csv::Row header{"word", "tokenization", "classification"};
  return header;
}

inline std::string format_fragmentation_csv(const FragmentationReport& report) {
  std::string out = csv::format_row(fragmentation_csv_header());
  for (const auto& r : report) {
    out += csv::format_row({r.word, r.fragments.joined(" "), std::string(to_string(r.classification))});
  }
  return out;
}

/// Reads the CSV back. Frequencies are not part of the file and come back
/// as zero.
inline FragmentationReport parse_fragmentation_csv(std::string_view data) {
  FragmentationReport report;
  const auto rows = csv::parse_with_header(data, fragmentation_csv_header(), "fragmentation csv");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    FragmentationRecord r;
    r.word = rows[i][0];
    r.fragments.fragments = text::split_whitespace(rows[i][1]);
    r.is_whole = r.fragments.size() == 1 && r.fragments.fragments.front() == r.word;
    r.classification = parse_classification(rows[i][2]);
    if ((r.classification == Classification::whole) != r.is_whole) {
      throw Error("fragmentation csv record " + std::to_string(i + 1) + " ('" + r.word +
                  "'): classification disagrees with its tokenization");
    }
    report.push_back(std::move(r));
  }
  return report;
}

/// `word<TAB>good|bad` per line; blank lines ignored.
inline LabelOverrides parse_label_overrides(std::string_view data) {
  LabelOverrides out;
  const auto lines = text::split(data, '\n');
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = text::trim(lines[i]);
    if (line.empty()) continue;
    const auto fields = text::split(line, '\t');
    const auto where = "label override line " + std::to_string(i + 1);
    if (fields.size() != 2 || fields[0].empty()) throw Error(where + ": expected word<TAB>label");
    const auto label = parse_classification(text::trim(fields[1]));
    if (label == Classification::whole) throw Error(where + ": label must be good or bad");
    if (!out.emplace(fields[0], label).second) throw Error(where + ": '" + fields[0] + "' listed twice");
  }
  return out;
}

/// `representative<TAB>member,member,...` per line; blank lines ignored.
inline std::vector<ClubOverride> parse_club_overrides(std::string_view data) {
  std::vector<ClubOverride> out;
  const auto lines = text::split(data, '\n');
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = text::trim(lines[i]);
    if (line.empty()) continue;
    const auto fields = text::split(line, '\t');
    const auto where = "club override line " + std::to_string(i + 1);
    if (fields.size() != 2 || fields[0].empty()) {
      throw Error(where + ": expected representative<TAB>member,member,...");
    }
    ClubOverride o{fields[0], {}};
    for (auto& m : text::split(fields[1], ',')) {
      const auto t = text::trim(m);
      if (!t.empty()) o.members.emplace_back(t);
    }
    if (o.members.empty()) throw Error(where + ": no members listed");
    out.push_back(std::move(o));
  }
  return out;
}

/// Groups in the club-override layout, one per line.
inline std::string format_root_groups(const std::vector<RootGroup>& groups) {
  std::string out;
  for (const auto& g : groups) {
    out += g.representative + '\t';
    out += text::join(std::vector<std::string>(g.members.begin(), g.members.end()), ",");
    out.push_back('\n');
  }
  return out;
}

inline std::vector<RootGroup> parse_root_groups(std::string_view data) {
  std::vector<RootGroup> groups;
  for (auto& o : parse_club_overrides(data)) {
    groups.push_back({std::set<std::string>(o.members.begin(), o.members.end()), std::move(o.representative)});
  }
  return groups;
}

}  // namespace vocabsplice

#pragma once

// Raw extracted page text -> cleaned, sentence-per-line pretraining corpus.
//
// Stage order for a document: reference-page drop, page concatenation,
// citation stripping, formula-line drop, non-ASCII line drop, sentence
// segmentation. Every stage is pure; stats are plain sums so documents can be
// processed in any order and merged afterwards.

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <ostream>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vocabsplice/error.hpp"
#include "vocabsplice/io.hpp"
#include "vocabsplice/text.hpp"

namespace vocabsplice::corpus {

struct RawDocument {
  std::string id;
  std::vector<std::string> pages;
};

struct Document {
  std::string id;
  std::vector<std::string> sentences;

  friend bool operator==(const Document&, const Document&) = default;
};

struct CleaningStats {
  std::size_t lines_in = 0;
  std::size_t lines_dropped_non_ascii = 0;
  std::size_t lines_dropped_formula = 0;
  // Sentences that only became formula-dense once cut out of their line.
  std::size_t sentences_dropped_formula = 0;
  std::size_t citations_removed = 0;
  std::size_t pages_dropped = 0;
  std::size_t documents = 0;
  std::size_t documents_empty = 0;
  std::vector<std::string> warnings;

  CleaningStats& operator+=(const CleaningStats& o) {
    lines_in += o.lines_in;
    lines_dropped_non_ascii += o.lines_dropped_non_ascii;
    lines_dropped_formula += o.lines_dropped_formula;
    sentences_dropped_formula += o.sentences_dropped_formula;
    citations_removed += o.citations_removed;
    pages_dropped += o.pages_dropped;
    documents += o.documents;
    documents_empty += o.documents_empty;
    warnings.insert(warnings.end(), o.warnings.begin(), o.warnings.end());
    std::sort(warnings.begin(), warnings.end());
    return *this;
  }

  friend bool operator==(const CleaningStats&, const CleaningStats&) = default;
};

inline std::vector<std::string> default_abbreviations() {
  return {"et al.", "e.g.", "i.e.", "Fig.", "Eq.", "Dr.", "No.", "vs."};
}

struct CleaningConfig {
  std::size_t reference_pages = 2;
  double formula_density = 0.15;
  std::size_t formula_max_equals = 2;
  std::vector<std::string> abbreviations = default_abbreviations();
};

// ---- reference pages -----------------------------------------------------

/// Removes the trailing reference pages. Documents that are not longer than
/// the reference block are returned unchanged and a warning is recorded.
inline RawDocument drop_reference_pages(RawDocument doc, CleaningStats& stats,
                                        std::size_t reference_pages = 2) {
  if (doc.pages.size() > reference_pages) {
    doc.pages.resize(doc.pages.size() - reference_pages);
    stats.pages_dropped += reference_pages;
  } else {
    stats.warnings.push_back(doc.id + ": only " + std::to_string(doc.pages.size()) +
                             " page(s), reference pages kept");
  }
  return doc;
}

// ---- citations -----------------------------------------------------------

struct CitationStrip {
  std::string text;
  std::size_t removed = 0;
};

namespace detail {

inline const std::regex& citation_regex() {
  // [12]  [1, 4, 7]  [3-5]
  // (Walters, 1972)  (Walters and Cockraft, 1972)  (Coleman et al., 1985a)
  // and ';'-separated lists of the author-year form.
  static const std::regex re = [] {
    const std::string numeric = R"(\[\d+(?:\s*[,-]\s*\d+)*\])";
    const std::string name = R"([A-Z][A-Za-z'-]+)";
    const std::string authors =
        name + R"((?:\s+(?:and|&)\s+)" + name + R"(|\s+et\s+al\.?)?)";
    const std::string item = authors + R"(,\s*(?:19|20)\d{2}[a-z]?)";
    const std::string author_year = R"(\()" + item + R"((?:;\s*)" + item + R"()*\))";
    return std::regex(R"([ \t]*(?:)" + numeric + "|" + author_year + ")",
                      std::regex::ECMAScript | std::regex::optimize);
  }();
  return re;
}

}  // namespace detail

namespace detail {

inline CitationStrip strip_citations_once(std::string_view line) {
  const std::string input(line);
  CitationStrip out;
  std::string rebuilt;
  auto last = input.cbegin();
  for (std::sregex_iterator it(input.begin(), input.end(), detail::citation_regex()), end;
       it != end; ++it) {
    rebuilt.append(last, input.cbegin() + it->position());
    last = input.cbegin() + it->position() + it->length();
    ++out.removed;
  }
  if (out.removed == 0) {
    out.text = input;
    return out;
  }
  rebuilt.append(last, input.cend());

  std::string collapsed;
  collapsed.reserve(rebuilt.size());
  for (char c : rebuilt) {
    if (c == ' ' && !collapsed.empty() && collapsed.back() == ' ') continue;
    collapsed.push_back(c);
  }
  out.text = std::string(text::trim(collapsed));
  return out;
}

}  // namespace detail

/// Removes in-text citations from one line and reports how many were removed.
/// Lines without citations are returned byte-for-byte unchanged. Repeats until
/// no match is left, since a removal can close the gap around another one.
inline CitationStrip strip_citations(std::string_view line) {
  auto out = detail::strip_citations_once(line);
  while (out.removed > 0) {
    auto again = detail::strip_citations_once(out.text);
    if (again.removed == 0) break;
    out.text = std::move(again.text);
    out.removed += again.removed;
  }
  return out;
}

// ---- formulas ------------------------------------------------------------

inline bool is_math_symbol(char c) {
  constexpr std::string_view symbols = "=+<>/^~|\\*_";
  return symbols.find(c) != std::string_view::npos;
}

/// Math symbols per non-space character; 0 for blank lines.
inline double formula_density(std::string_view line) {
  std::size_t math = 0;
  std::size_t visible = 0;
  for (char c : line) {
    if (text::is_space(c)) continue;
    ++visible;
    if (is_math_symbol(c)) ++math;
  }
  return visible == 0 ? 0.0 : static_cast<double>(math) / static_cast<double>(visible);
}

enum class LineDecision { keep, drop };

inline LineDecision formula_line_decision(std::string_view line, double max_density = 0.15,
                                          std::size_t max_equals = 2) {
  const auto equals = static_cast<std::size_t>(std::count(line.begin(), line.end(), '='));
  if (equals >= max_equals || formula_density(line) > max_density) return LineDecision::drop;
  return LineDecision::keep;
}

inline LineDecision formula_line_decision(std::string_view line, const CleaningConfig& config) {
  return formula_line_decision(line, config.formula_density, config.formula_max_equals);
}

// ---- non-ASCII -----------------------------------------------------------

inline bool is_clean_ascii(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char c) { return text::is_printable_or_tab(c); });
}

struct LineFilter {
  std::vector<std::string> lines;
  std::size_t dropped = 0;
};

/// Keeps the lines made only of printable ASCII or tab, in order.
inline LineFilter filter_non_ascii_lines(std::vector<std::string> lines) {
  LineFilter out;
  out.lines.reserve(lines.size());
  for (auto& line : lines) {
    if (is_clean_ascii(line)) {
      out.lines.push_back(std::move(line));
    } else {
      ++out.dropped;
    }
  }
  return out;
}

// ---- sentences -----------------------------------------------------------

namespace detail {

inline bool ends_with_abbreviation(std::string_view head, const std::vector<std::string>& abbrevs) {
  for (const auto& a : abbrevs) {
    if (a.empty() || head.size() < a.size()) continue;
    if (head.substr(head.size() - a.size()) != a) continue;
    const std::size_t before = head.size() - a.size();
    if (before == 0 || !text::is_alnum(head[before - 1])) return true;
  }
  return false;
}

}  // namespace detail

/// Splits at '.', '!' or '?' followed by whitespace and then an uppercase
/// letter or digit, unless the text up to the '.' ends with an abbreviation.
inline std::vector<std::string> segment_sentences(
    std::string_view paragraph,
    const std::vector<std::string>& abbreviations = default_abbreviations()) {
  std::vector<std::string> out;
  auto emit = [&](std::string_view piece) {
    const auto t = text::trim(piece);
    if (!t.empty()) out.emplace_back(t);
  };
  std::size_t start = 0;
  for (std::size_t i = 0; i + 1 < paragraph.size(); ++i) {
    const char c = paragraph[i];
    if (c != '.' && c != '!' && c != '?') continue;
    if (!text::is_space(paragraph[i + 1])) continue;
    std::size_t j = i + 1;
    while (j < paragraph.size() && text::is_space(paragraph[j])) ++j;
    if (j == paragraph.size()) break;
    if (!text::is_upper(paragraph[j]) && !text::is_digit(paragraph[j])) continue;
    if (c == '.' && detail::ends_with_abbreviation(paragraph.substr(0, i + 1), abbreviations)) {
      continue;
    }
    emit(paragraph.substr(start, i + 1 - start));
    start = j;
  }
  emit(paragraph.substr(std::min(start, paragraph.size())));
  return out;
}

// ---- whole document ------------------------------------------------------

struct Preprocessed {
  Document document;
  CleaningStats stats;
};

inline Preprocessed preprocess_document(const RawDocument& raw, const CleaningConfig& config = {}) {
  Preprocessed result;
  auto& stats = result.stats;
  stats.documents = 1;
  result.document.id = raw.id;

  const auto trimmed = drop_reference_pages(raw, stats, config.reference_pages);
  std::string joined;
  for (std::size_t i = 0; i < trimmed.pages.size(); ++i) {
    if (i) joined.push_back('\n');
    joined += trimmed.pages[i];
  }

  std::vector<std::string> lines = joined.empty() ? std::vector<std::string>{}
                                                  : text::split(joined, '\n');
  stats.lines_in = lines.size();

  std::vector<std::string> after_formula;
  after_formula.reserve(lines.size());
  for (const auto& line : lines) {
    auto stripped = strip_citations(line);
    stats.citations_removed += stripped.removed;
    if (formula_line_decision(stripped.text, config) == LineDecision::drop) {
      ++stats.lines_dropped_formula;
      continue;
    }
    after_formula.push_back(std::move(stripped.text));
  }

  auto ascii = filter_non_ascii_lines(std::move(after_formula));
  stats.lines_dropped_non_ascii = ascii.dropped;

  // Blank lines separate paragraphs; wrapped lines inside one are rejoined.
  std::vector<std::string> paragraphs;
  std::string current;
  for (const auto& line : ascii.lines) {
    if (text::trim(line).empty()) {
      if (!current.empty()) paragraphs.push_back(std::move(current));
      current.clear();
      continue;
    }
    if (!current.empty()) current.push_back(' ');
    current += line;
  }
  if (!current.empty()) paragraphs.push_back(std::move(current));

  for (auto& paragraph : paragraphs) {
    // Citations wrapped across a line break only match once the lines are joined.
    auto stripped = strip_citations(text::collapse_spaces(paragraph));
    stats.citations_removed += stripped.removed;
    for (auto& sentence : segment_sentences(stripped.text, config.abbreviations)) {
      if (formula_line_decision(sentence, config) == LineDecision::drop) {
        ++stats.sentences_dropped_formula;
        continue;
      }
      result.document.sentences.push_back(std::move(sentence));
    }
  }
  if (result.document.sentences.empty()) {
    ++stats.documents_empty;
    stats.warnings.push_back(raw.id + ": no sentences survived cleaning");
  }
  return result;
}

struct PreprocessedCorpus {
  std::vector<Document> documents;
  CleaningStats stats;
};

inline PreprocessedCorpus preprocess_corpus(const std::vector<RawDocument>& raws,
                                            const CleaningConfig& config = {}) {
  std::set<std::string> seen;
  PreprocessedCorpus out;
  for (const auto& raw : raws) {
    if (raw.id.empty()) throw Error("document with empty id");
    if (!seen.insert(raw.id).second) throw Error("duplicate document id '" + raw.id + "'");
    auto one = preprocess_document(raw, config);
    out.stats += one.stats;
    out.documents.push_back(std::move(one.document));
  }
  return out;
}

// ---- pretraining corpus format -------------------------------------------

/// One sentence per line, a blank line between documents, no trailing
/// newline. Documents without sentences are skipped.
inline void emit_pretrain_corpus(const std::vector<Document>& docs, std::ostream& sink) {
  bool first_doc = true;
  for (const auto& doc : docs) {
    if (doc.sentences.empty()) continue;
    for (const auto& s : doc.sentences) {
      if (text::trim(s).empty() || s.find('\n') != std::string::npos) {
        throw Error("document '" + doc.id + "' has an empty or multi-line sentence");
      }
    }
    if (!first_doc) sink << "\n\n";
    first_doc = false;
    for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
      if (i) sink << '\n';
      sink << doc.sentences[i];
    }
    if (!sink) throw Error("write failed while emitting document '" + doc.id + "'");
  }
  sink.flush();
  if (!sink) throw Error("write failed while flushing the pretraining corpus");
}

inline std::string format_pretrain_corpus(const std::vector<Document>& docs) {
  std::ostringstream out;
  emit_pretrain_corpus(docs, out);
  return std::move(out).str();
}

/// Reads the pretraining format back into per-document sentence lists.
inline std::vector<std::vector<std::string>> parse_pretrain_corpus(std::string_view data) {
  std::vector<std::vector<std::string>> docs;
  if (data.empty()) return docs;
  std::vector<std::string> current;
  for (auto& line : text::split(data, '\n')) {
    if (line.empty()) {
      if (!current.empty()) docs.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(std::move(line));
    }
  }
  if (!current.empty()) docs.push_back(std::move(current));
  return docs;
}

// ---- input files ---------------------------------------------------------

/// One document per file; form feeds separate pages; CRLF is folded to LF.
inline RawDocument parse_raw_document(std::string id, std::string_view data) {
  std::string normalized;
  normalized.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i] == '\r' && i + 1 < data.size() && data[i + 1] == '\n') continue;
    normalized.push_back(data[i]);
  }
  RawDocument doc{std::move(id), text::split(normalized, '\f')};
  for (auto& page : doc.pages) {
    // A page break usually sits on its own line; drop the newline it leaves.
    if (!page.empty() && page.front() == '\n') page.erase(0, 1);
  }
  return doc;
}

/// Every *.txt file in `dir`, sorted by filename; id = filename stem.
inline std::vector<RawDocument> load_corpus_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error("corpus directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RawDocument> docs;
  docs.reserve(files.size());
  for (const auto& f : files) docs.push_back(parse_raw_document(f.stem().string(), io::read_file(f)));
  return docs;
}

}  // namespace vocabsplice::corpus

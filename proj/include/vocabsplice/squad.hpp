#pragma once

// SQuAD v1 datasets: building them from a paragraph/question/answer table,
// validating span integrity, paragraph-level train/dev splits, merging extra
// dev answers, and JSON (de)serialization.
//
// answer_start is a code point offset into the context, as in the published
// SQuAD files (they are produced by Python string indexing).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "vocabsplice/csv.hpp"
#include "vocabsplice/error.hpp"
#include "vocabsplice/text.hpp"

namespace vocabsplice::squad {

struct Answer {
  std::string text;
  std::size_t answer_start = 0;

  friend bool operator==(const Answer&, const Answer&) = default;
};

struct QA {
  std::string id;
  std::string question;
  std::vector<Answer> answers;

  friend bool operator==(const QA&, const QA&) = default;
};

struct Paragraph {
  std::string context;
  std::vector<QA> qas;

  friend bool operator==(const Paragraph&, const Paragraph&) = default;
};

struct Article {
  std::string title;
  std::vector<Paragraph> paragraphs;

  friend bool operator==(const Article&, const Article&) = default;
};

struct SquadDataset {
  std::string version = "1.1";
  std::vector<Article> articles;

  std::size_t paragraph_count() const {
    std::size_t n = 0;
    for (const auto& a : articles) n += a.paragraphs.size();
    return n;
  }
  std::size_t question_count() const {
    std::size_t n = 0;
    for (const auto& a : articles) {
      for (const auto& p : a.paragraphs) n += p.qas.size();
    }
    return n;
  }

  friend bool operator==(const SquadDataset&, const SquadDataset&) = default;
};

struct QATableRow {
  std::string paragraph;
  std::string question;
  std::string answer;
};

/// A table row or extra answer that could not be placed, with the reason.
struct Rejection {
  std::size_t row = 0;  // 1-based data row (header excluded)
  std::string id;       // QA id when known
  std::string reason;

  friend bool operator==(const Rejection&, const Rejection&) = default;
};

// ---- spans ---------------------------------------------------------------

namespace detail {

inline bool is_continuation_byte(std::string_view s, std::size_t pos) {
  return pos < s.size() && (static_cast<unsigned char>(s[pos]) & 0xC0) == 0x80;
}

/// Byte offsets where `answer` occurs starting and ending on code point
/// boundaries.
inline std::vector<std::size_t> aligned_occurrences(std::string_view context, std::string_view answer) {
  std::vector<std::size_t> out;
  if (answer.empty()) return out;
  for (auto pos = context.find(answer); pos != std::string_view::npos; pos = context.find(answer, pos + 1)) {
    if (!is_continuation_byte(context, pos) && !is_continuation_byte(context, pos + answer.size())) {
      out.push_back(pos);
    }
  }
  return out;
}

}  // namespace detail

/// Code point offset of the first occurrence of `answer` in `context`.
inline std::optional<std::size_t> first_occurrence(std::string_view context, std::string_view answer) {
  const auto hits = detail::aligned_occurrences(context, answer);
  if (hits.empty()) return std::nullopt;
  return text::utf8_index_of_byte(context, hits.front());
}

inline std::size_t occurrence_count(std::string_view context, std::string_view answer) {
  return detail::aligned_occurrences(context, answer).size();
}

/// True when the context holds `answer.text` exactly at `answer.answer_start`.
inline bool span_matches(std::string_view context, const Answer& answer) {
  if (answer.text.empty()) return false;
  const auto begin = text::utf8_byte_of_index(context, answer.answer_start);
  if (begin == std::string_view::npos) return false;
  return context.substr(begin).starts_with(answer.text);
}

/// Content hash of (context, question); stable across runs and platforms.
inline std::string qa_id(std::string_view context, std::string_view question) {
  auto h = text::fnv1a64(context);
  h = text::fnv1a64(std::string_view("\x1f", 1), h);
  return text::hex64(text::fnv1a64(question, h));
}

// ---- building ------------------------------------------------------------

struct TableConversion {
  SquadDataset dataset;
  std::vector<Rejection> rejections;
};

/// Rows with identical paragraph text become one paragraph; answers are
/// placed at their first occurrence. Rows whose answer is not a substring of
/// the paragraph, or with an empty field, are rejected. A repeated
/// (paragraph, question) pair is an error.
inline TableConversion from_table(const std::vector<QATableRow>& rows, std::string title = "dataset") {
  TableConversion out;
  Article article{std::move(title), {}};
  std::map<std::string, std::size_t, std::less<>> paragraph_index;
  std::set<std::string> ids;

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string context(text::trim(rows[i].paragraph));
    const std::string question(text::trim(rows[i].question));
    const std::string answer(text::trim(rows[i].answer));
    const std::size_t row_no = i + 1;
    if (context.empty() || question.empty() || answer.empty()) {
      out.rejections.push_back({row_no, "", "empty paragraph, question or answer"});
      continue;
    }
    const auto start = first_occurrence(context, answer);
    if (!start) {
      out.rejections.push_back({row_no, qa_id(context, question), "answer '" + answer + "' does not occur in its paragraph"});
      continue;
    }
    auto id = qa_id(context, question);
    if (!ids.insert(id).second) {
      throw Error("table row " + std::to_string(row_no) + ": duplicate paragraph/question pair (question '" +
                  question + "')");
    }
    auto [it, inserted] = paragraph_index.emplace(context, article.paragraphs.size());
    if (inserted) article.paragraphs.push_back({context, {}});
    article.paragraphs[it->second].qas.push_back({std::move(id), question, {{answer, *start}}});
  }
  if (!article.paragraphs.empty()) out.dataset.articles.push_back(std::move(article));
  return out;
}

inline const csv::Row& qa_table_header() {
  static const csv::Row header{"paragraph", "question", "answer"};
  return header;
}

inline std::vector<QATableRow> parse_qa_table(std::string_view data) {
  std::vector<QATableRow> rows;
  for (auto& r : csv::parse_with_header(data, qa_table_header(), "qa table")) {
    rows.push_back({std::move(r[0]), std::move(r[1]), std::move(r[2])});
  }
  return rows;
}

// ---- validation ----------------------------------------------------------

struct Finding {
  std::string qa_id;
  std::string kind;
  std::string message;

  friend bool operator==(const Finding&, const Finding&) = default;
};

/// `errors` are broken invariants; `warnings` are legal but worth a look
/// (currently: an answer text that occurs more than once in its context).
struct ValidationReport {
  std::vector<Finding> errors;
  std::vector<Finding> warnings;

  bool ok() const { return errors.empty(); }
};

inline ValidationReport validate(const SquadDataset& ds) {
  ValidationReport report;
  std::map<std::string, std::size_t> id_counts;
  for (const auto& article : ds.articles) {
    for (const auto& p : article.paragraphs) {
      for (const auto& qa : p.qas) {
        if (qa.id.empty()) report.errors.push_back({qa.id, "empty_id", "question '" + qa.question + "' has no id"});
        ++id_counts[qa.id];
        if (qa.answers.empty()) report.errors.push_back({qa.id, "no_answers", "question has no answers"});
        for (std::size_t k = 0; k < qa.answers.size(); ++k) {
          const auto& a = qa.answers[k];
          if (!span_matches(p.context, a)) {
            report.errors.push_back({qa.id, "span_mismatch",
                                     "answer " + std::to_string(k) + " ('" + a.text + "') is not at offset " +
                                         std::to_string(a.answer_start)});
          } else if (occurrence_count(p.context, a.text) > 1) {
            report.warnings.push_back({qa.id, "ambiguous_answer",
                                       "answer " + std::to_string(k) + " ('" + a.text +
                                           "') occurs more than once in the context"});
          }
        }
      }
    }
  }
  for (const auto& [id, n] : id_counts) {
    if (n > 1 && !id.empty()) {
      report.errors.push_back({id, "duplicate_id", "id used by " + std::to_string(n) + " questions"});
    }
  }
  return report;
}

// ---- split ---------------------------------------------------------------

namespace detail {

/// Uniform integer in [0, n) from the raw 64-bit stream. std::mt19937_64 is
/// fully specified by the standard; the distribution classes are not, so the
/// reduction is done here to keep splits identical across toolchains.
inline std::uint64_t bounded(std::mt19937_64& gen, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = gen();
    if (r >= threshold) return r % n;
  }
}

}  // namespace detail

struct Split {
  SquadDataset train;
  SquadDataset dev;
};

/// Paragraph-level seeded partition. The dev side gets round(dev_fraction *
/// paragraphs) paragraphs, at least one and leaving at least one for train.
/// Article titles and paragraph order are preserved on both sides.
inline Split split(const SquadDataset& ds, double dev_fraction, std::uint64_t seed) {
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) throw Error("split: dev_fraction must lie in (0, 1)");
  const std::size_t n = ds.paragraph_count();
  if (n < 2) throw Error("split: need at least 2 paragraphs, dataset has " + std::to_string(n));

  auto n_dev = static_cast<std::size_t>(std::llround(dev_fraction * static_cast<double>(n)));
  n_dev = std::clamp<std::size_t>(n_dev, 1, n - 1);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 gen(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(detail::bounded(gen, i + 1));
    std::swap(order[i], order[j]);
  }
  std::vector<bool> is_dev(n, false);
  for (std::size_t i = 0; i < n_dev; ++i) is_dev[order[i]] = true;

  Split out;
  out.train.version = out.dev.version = ds.version;
  std::size_t flat = 0;
  for (const auto& article : ds.articles) {
    Article train_part{article.title, {}};
    Article dev_part{article.title, {}};
    for (const auto& p : article.paragraphs) {
      (is_dev[flat++] ? dev_part : train_part).paragraphs.push_back(p);
    }
    if (!train_part.paragraphs.empty()) out.train.articles.push_back(std::move(train_part));
    if (!dev_part.paragraphs.empty()) out.dev.articles.push_back(std::move(dev_part));
  }
  return out;
}

// ---- extra dev answers ---------------------------------------------------

struct ExtraAnswer {
  std::string qa_id;
  std::string text;
};

struct AnswerMerge {
  SquadDataset dataset;
  std::vector<Rejection> rejections;
};

/// Appends each extra answer to its question at its first occurrence in the
/// context. Unknown ids are an error; answers absent from the context are
/// rejected.
inline AnswerMerge merge_dev_answers(SquadDataset dev, const std::vector<ExtraAnswer>& extras) {
  std::map<std::string, std::pair<const std::string*, QA*>> by_id;
  for (auto& article : dev.articles) {
    for (auto& p : article.paragraphs) {
      for (auto& qa : p.qas) by_id[qa.id] = {&p.context, &qa};
    }
  }
  for (const auto& e : extras) {
    if (!by_id.contains(e.qa_id)) throw Error("merge: unknown question id '" + e.qa_id + "'");
  }
  AnswerMerge out;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const auto& e = extras[i];
    auto [context, qa] = by_id.at(e.qa_id);
    const std::string answer(text::trim(e.text));
    const auto start = first_occurrence(*context, answer);
    if (!start) {
      out.rejections.push_back({i + 1, e.qa_id, "answer '" + answer + "' does not occur in the context"});
      continue;
    }
    qa->answers.push_back({answer, *start});
  }
  out.dataset = std::move(dev);
  return out;
}

inline std::vector<ExtraAnswer> parse_extra_answers(std::string_view data) {
  std::vector<ExtraAnswer> out;
  for (auto& r : csv::parse_with_header(data, {"id", "answer"}, "extra answers")) {
    out.push_back({std::move(r[0]), std::move(r[1])});
  }
  return out;
}

// ---- JSON ----------------------------------------------------------------

using ordered_json = nlohmann::ordered_json;

inline ordered_json to_json(const SquadDataset& ds) {
  ordered_json data = ordered_json::array();
  for (const auto& article : ds.articles) {
    ordered_json paragraphs = ordered_json::array();
    for (const auto& p : article.paragraphs) {
      ordered_json qas = ordered_json::array();
      for (const auto& qa : p.qas) {
        ordered_json answers = ordered_json::array();
        for (const auto& a : qa.answers) answers.push_back({{"text", a.text}, {"answer_start", a.answer_start}});
        qas.push_back({{"id", qa.id}, {"question", qa.question}, {"answers", std::move(answers)}});
      }
      paragraphs.push_back({{"context", p.context}, {"qas", std::move(qas)}});
    }
    data.push_back({{"title", article.title}, {"paragraphs", std::move(paragraphs)}});
  }
  return {{"version", ds.version}, {"data", std::move(data)}};
}

/// Compact UTF-8 JSON. Refuses datasets that fail validation.
inline std::string serialize(const SquadDataset& ds) {
  const auto report = validate(ds);
  if (!report.ok()) {
    const auto& f = report.errors.front();
    throw Error("serialize: invalid dataset (" + f.kind + " at id '" + f.qa_id + "': " + f.message + ")");
  }
  try {
    return to_json(ds).dump();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("serialize: ") + e.what());
  }
}

namespace detail {

class Reader {
 public:
  static const nlohmann::json& field(const nlohmann::json& obj, const std::string& path, const char* name) {
    if (!obj.is_object()) throw Error("squad json: " + (path.empty() ? "/" : path) + " is not an object");
    const auto it = obj.find(name);
    if (it == obj.end()) {
      throw Error("squad json: missing required field '" + std::string(name) + "' at " + (path.empty() ? "/" : path));
    }
    return *it;
  }

  static std::string string_field(const nlohmann::json& obj, const std::string& path, const char* name) {
    const auto& v = field(obj, path, name);
    if (!v.is_string()) throw Error("squad json: " + path + "/" + name + " must be a string");
    return v.get<std::string>();
  }

  static const nlohmann::json& array_field(const nlohmann::json& obj, const std::string& path, const char* name) {
    const auto& v = field(obj, path, name);
    if (!v.is_array()) throw Error("squad json: " + path + "/" + name + " must be an array");
    return v;
  }
};

}  // namespace detail

/// Parses SQuAD v1 JSON. Unknown fields are ignored; a missing or mistyped
/// required field is reported with its JSON pointer.
inline SquadDataset parse(std::string_view bytes) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("squad json: malformed JSON: ") + e.what());
  }
  using R = detail::Reader;
  SquadDataset ds;
  ds.version = R::string_field(root, "", "version");
  const auto& data = R::array_field(root, "", "data");
  for (std::size_t ai = 0; ai < data.size(); ++ai) {
    const auto apath = "/data/" + std::to_string(ai);
    Article article;
    article.title = R::string_field(data[ai], apath, "title");
    const auto& paragraphs = R::array_field(data[ai], apath, "paragraphs");
    for (std::size_t pi = 0; pi < paragraphs.size(); ++pi) {
      const auto ppath = apath + "/paragraphs/" + std::to_string(pi);
      Paragraph p;
      p.context = R::string_field(paragraphs[pi], ppath, "context");
      const auto& qas = R::array_field(paragraphs[pi], ppath, "qas");
      for (std::size_t qi = 0; qi < qas.size(); ++qi) {
        const auto qpath = ppath + "/qas/" + std::to_string(qi);
        QA qa;
        qa.id = R::string_field(qas[qi], qpath, "id");
        qa.question = R::string_field(qas[qi], qpath, "question");
        const auto& answers = R::array_field(qas[qi], qpath, "answers");
        for (std::size_t k = 0; k < answers.size(); ++k) {
          const auto anpath = qpath + "/answers/" + std::to_string(k);
          Answer a;
          a.text = R::string_field(answers[k], anpath, "text");
          const auto& start = R::field(answers[k], anpath, "answer_start");
          if (!start.is_number_integer() || start.get<std::int64_t>() < 0) {
            throw Error("squad json: " + anpath + "/answer_start must be a non-negative integer");
          }
          a.answer_start = start.get<std::size_t>();
          qa.answers.push_back(std::move(a));
        }
        p.qas.push_back(std::move(qa));
      }
      article.paragraphs.push_back(std::move(p));
    }
    ds.articles.push_back(std::move(article));
  }
  return ds;
}

inline nlohmann::ordered_json to_json(const std::vector<Rejection>& rejections) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rejections) arr.push_back({{"row", r.row}, {"id", r.id}, {"reason", r.reason}});
  return arr;
}

inline nlohmann::ordered_json to_json(const std::vector<Finding>& findings) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& f : findings) arr.push_back({{"id", f.qa_id}, {"kind", f.kind}, {"message", f.message}});
  return arr;
}

}  // namespace vocabsplice::squad

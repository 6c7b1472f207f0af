#pragma once

// Exact-match and token-F1 scoring in the SQuAD v1 convention.

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vocabsplice/error.hpp"
#include "vocabsplice/squad.hpp"
#include "vocabsplice/text.hpp"

namespace vocabsplice::squad {

using PredictionSet = std::map<std::string, std::string>;

/// Lowercase, drop ASCII punctuation, drop the articles a/an/the as whole
/// words, collapse whitespace.
inline std::string normalize_answer(std::string_view s) {
  std::string no_punct;
  no_punct.reserve(s.size());
  for (char c : s) {
    if (!text::is_punct(c)) no_punct.push_back(text::to_lower(c));
  }
  std::vector<std::string> kept;
  for (auto& tok : text::split_whitespace(no_punct)) {
    if (tok == "a" || tok == "an" || tok == "the") continue;
    kept.push_back(std::move(tok));
  }
  return text::join(kept, " ");
}

inline int exact_match(std::string_view prediction, const std::vector<std::string>& golds) {
  if (golds.empty()) throw Error("exact_match: no gold answers");
  const auto pred = normalize_answer(prediction);
  for (const auto& g : golds) {
    if (normalize_answer(g) == pred) return 1;
  }
  return 0;
}

/// Token F1 against one gold answer.
inline double f1_single(std::string_view prediction, std::string_view gold) {
  const auto pred_tokens = text::split_whitespace(normalize_answer(prediction));
  const auto gold_tokens = text::split_whitespace(normalize_answer(gold));
  if (pred_tokens.empty() && gold_tokens.empty()) return 1.0;
  std::map<std::string, long> counts;
  for (const auto& t : gold_tokens) ++counts[t];
  long overlap = 0;
  for (const auto& t : pred_tokens) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return 0.0;
  const double precision = static_cast<double>(overlap) / static_cast<double>(pred_tokens.size());
  const double recall = static_cast<double>(overlap) / static_cast<double>(gold_tokens.size());
  return 2.0 * precision * recall / (precision + recall);
}

/// Best token F1 over the gold answers.
inline double f1(std::string_view prediction, const std::vector<std::string>& golds) {
  if (golds.empty()) throw Error("f1: no gold answers");
  double best = 0.0;
  for (const auto& g : golds) best = std::max(best, f1_single(prediction, g));
  return best;
}

struct EvalReport {
  double exact_match = 0.0;  // percent, 2 decimals
  double f1 = 0.0;           // percent, 2 decimals
  std::size_t n_evaluated = 0;
  std::vector<std::string> missing_ids;
};

inline double round2(double v) { return std::round(v * 100.0) / 100.0; }

/// Averages over every question in the dataset. Questions without a
/// prediction score zero and are listed in missing_ids.
inline EvalReport evaluate(const SquadDataset& ds, const PredictionSet& preds) {
  EvalReport report;
  double em_sum = 0.0;
  double f1_sum = 0.0;
  for (const auto& article : ds.articles) {
    for (const auto& p : article.paragraphs) {
      for (const auto& qa : p.qas) {
        ++report.n_evaluated;
        const auto it = preds.find(qa.id);
        if (it == preds.end()) {
          report.missing_ids.push_back(qa.id);
          continue;
        }
        std::vector<std::string> golds;
        for (const auto& a : qa.answers) golds.push_back(a.text);
        if (golds.empty()) throw Error("evaluate: question '" + qa.id + "' has no gold answers");
        em_sum += exact_match(it->second, golds);
        f1_sum += f1(it->second, golds);
      }
    }
  }
  if (report.n_evaluated > 0) {
    const auto n = static_cast<double>(report.n_evaluated);
    report.exact_match = round2(100.0 * em_sum / n);
    report.f1 = round2(100.0 * f1_sum / n);
  }
  return report;
}

inline PredictionSet parse_predictions(std::string_view bytes) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("predictions: malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw Error("predictions: expected a JSON object mapping id -> answer");
  PredictionSet preds;
  for (const auto& [id, value] : root.items()) {
    if (!value.is_string()) throw Error("predictions: value for '" + id + "' is not a string");
    preds.emplace(id, value.get<std::string>());
  }
  return preds;
}

inline nlohmann::ordered_json to_json(const EvalReport& r) {
  return {{"exact_match", r.exact_match},
          {"f1", r.f1},
          {"n_evaluated", r.n_evaluated},
          {"missing_ids", r.missing_ids}};
}

}  // namespace vocabsplice::squad

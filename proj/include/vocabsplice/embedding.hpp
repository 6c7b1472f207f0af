#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "vocabsplice/error.hpp"
#include "vocabsplice/text.hpp"
#include "vocabsplice/vocab.hpp"
#include "vocabsplice/wordpiece.hpp"

namespace vocabsplice {

/// Row-major token embedding table, one row per vocabulary id.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t rows, std::size_t dim) : rows_(rows), dim_(dim), data_(rows * dim, 0.0f) {}
  EmbeddingMatrix(std::size_t rows, std::size_t dim, std::vector<float> data)
      : rows_(rows), dim_(dim), data_(std::move(data)) {
    if (data_.size() != rows_ * dim_) throw Error("embedding data does not match rows x dim");
  }

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }

  std::span<float> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
  std::span<const float> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<float> data_;
};

/// Rows for ids whose token changed between `base` and `nuke` are
/// re-initialised to the mean of the base-vocab rows of the new word's
/// WordPiece fragments under `base`. A word that tokenizes to [UNK] keeps the
/// old slot row. Every other row is copied untouched.
inline EmbeddingMatrix embedding_surgery(const EmbeddingMatrix& emb, const Vocab& base, const Vocab& nuke) {
  if (emb.rows() != base.size() || base.size() != nuke.size()) {
    throw Error("embedding surgery: matrix has " + std::to_string(emb.rows()) + " rows, base vocab " +
                std::to_string(base.size()) + " tokens, new vocab " + std::to_string(nuke.size()) +
                " tokens; all three must agree");
  }
  EmbeddingMatrix out = emb;
  std::vector<double> acc(emb.dim());
  for (std::size_t id = 0; id < base.size(); ++id) {
    const auto& old_token = base.tokens()[id];
    const auto& new_token = nuke.tokens()[id];
    if (old_token == new_token) continue;
    if (!is_unused_token(old_token)) {
      throw Error("embedding surgery: id " + std::to_string(id) + " changed from '" + old_token +
                  "', which is not an unused slot");
    }
    const auto pieces = wordpiece_tokenize(new_token, base);
    if (pieces.empty() || pieces.has_unk()) continue;
    std::fill(acc.begin(), acc.end(), 0.0);
    for (const auto& p : pieces.fragments) {
      const auto src = emb.row(static_cast<std::size_t>(*base.id(p)));
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += src[k];
    }
    auto dst = out.row(id);
    const auto n = static_cast<double>(pieces.size());
    for (std::size_t k = 0; k < acc.size(); ++k) dst[k] = static_cast<float>(acc[k] / n);
  }
  return out;
}

// ---- text format: "<rows> <dim>" then one row of floats per line ----------

inline std::string format_embeddings(const EmbeddingMatrix& emb) {
  std::string out = std::to_string(emb.rows()) + ' ' + std::to_string(emb.dim()) + '\n';
  char buf[64];
  for (std::size_t i = 0; i < emb.rows(); ++i) {
    const auto row = emb.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out.push_back(' ');
      const auto res = std::to_chars(buf, buf + sizeof buf, row[k]);
      out.append(buf, res.ptr);
    }
    out.push_back('\n');
  }
  return out;
}

inline EmbeddingMatrix parse_embeddings(std::string_view data) {
  auto lines = text::split(data, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw Error("embeddings: empty input");
  const auto header = text::split_whitespace(lines[0]);
  std::size_t rows = 0;
  std::size_t dim = 0;
  auto parse_size = [](const std::string& s, std::size_t& v) {
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
  };
  if (header.size() != 2 || !parse_size(header[0], rows) || !parse_size(header[1], dim)) {
    throw Error("embeddings: first line must be '<vocab_size> <dim>'");
  }
  if (lines.size() - 1 != rows) {
    throw Error("embeddings: header declares " + std::to_string(rows) + " rows but " +
                std::to_string(lines.size() - 1) + " follow");
  }
  std::vector<float> values;
  values.reserve(rows * dim);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = text::split_whitespace(lines[i]);
    if (fields.size() != dim) {
      throw Error("embeddings: row " + std::to_string(i - 1) + " has " + std::to_string(fields.size()) +
                  " values, expected " + std::to_string(dim));
    }
    for (const auto& f : fields) {
      float v = 0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw Error("embeddings: row " + std::to_string(i - 1) + ": '" + f + "' is not a number");
      }
      values.push_back(v);
    }
  }
  return EmbeddingMatrix(rows, dim, std::move(values));
}

}  // namespace vocabsplice

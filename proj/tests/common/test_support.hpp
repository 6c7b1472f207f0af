#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "vocabsplice/vocab.hpp"

namespace vocabsplice::test {

inline std::filesystem::path data_dir() { return VOCABSPLICE_DATA_DIR; }

inline std::filesystem::path bert_vocab_path() { return data_dir() / "vocab" / "bert-base-uncased-vocab.txt"; }

inline const Vocab& bert_vocab() {
  static const Vocab v = load_vocab_file(bert_vocab_path());
  return v;
}

inline std::string random_string(std::mt19937_64& rng, std::string_view alphabet, std::size_t min_len,
                                 std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string s(len(rng), ' ');
  for (auto& c : s) c = alphabet[pick(rng)];
  return s;
}

/// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("vocabsplice-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace vocabsplice::test

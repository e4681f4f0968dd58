#pragma once

#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "djst/corpus.hpp"
#include "djst/errors.hpp"

namespace djst {

// Sentiment label row order is fixed across the whole artifact.
inline constexpr int kPositive = 0;
inline constexpr int kNegative = 1;

enum class Polarity : int { positive = kPositive, negative = kNegative };

// Prior polarity map f(w). Words not present carry no prior.
struct Lexicon {
  std::unordered_map<std::string, Polarity> polarity;

  bool contains(const std::string& word) const { return polarity.count(word) != 0; }
};

struct LexiconLoad {
  Lexicon lexicon;
  std::vector<std::string> warnings;
};

namespace detail {

inline void load_polarity_file(const std::string& path, Polarity label, LexiconLoad& out) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read lexicon file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.front() == ';') continue;
    // Entries go through the same normalization as corpus text so that
    // matching is exact-token.
    const std::vector<std::string> toks = tokenize(line, {});
    if (toks.empty()) continue;
    if (toks.size() > 1) {
      out.warnings.push_back("dropped multiword lexicon entry: " + line);
      continue;
    }
    const std::string& word = toks.front();
    auto it = out.lexicon.polarity.find(word);
    if (it != out.lexicon.polarity.end()) {
      if (it->second != label) throw ConflictingEntry(word);
      continue;
    }
    out.lexicon.polarity.emplace(word, label);
  }
}

}  // namespace detail

inline LexiconLoad load_lexicon(const std::string& positive_file, const std::string& negative_file) {
  LexiconLoad out;
  detail::load_polarity_file(positive_file, Polarity::positive, out);
  detail::load_polarity_file(negative_file, Polarity::negative, out);
  return out;
}

// L x V multiplier encoding word prior polarity: 0.9 on the matching label
// row, 0.05 on the other, 1.0 on both rows for out-of-lexicon words.
class LambdaMatrix {
 public:
  LambdaMatrix() = default;
  LambdaMatrix(int labels, int vocab)
      : labels_(labels), vocab_(vocab), values_(static_cast<std::size_t>(labels) * vocab, 1.0) {}

  int labels() const { return labels_; }
  int vocab() const { return vocab_; }

  double at(int label, int word) const {
    return values_[static_cast<std::size_t>(label) * vocab_ + word];
  }
  void set(int label, int word, double value) {
    values_[static_cast<std::size_t>(label) * vocab_ + word] = value;
  }

  bool in_lexicon(int word) const {
    for (int l = 0; l < labels_; ++l) {
      if (at(l, word) != 1.0) return true;
    }
    return false;
  }

 private:
  int labels_ = 0;
  int vocab_ = 0;
  std::vector<double> values_;
};

inline constexpr double kLambdaMatched = 0.9;
inline constexpr double kLambdaOpposed = 0.05;

inline LambdaMatrix build_lambda(const Lexicon& lexicon, const Vocabulary& vocab, int labels = 2) {
  if (labels != 2)
    throw ValidationError("the lexicon prior is defined for exactly two sentiment labels");
  LambdaMatrix lambda(labels, vocab.size());
  for (const auto& [word, polarity] : lexicon.polarity) {
    const int id = vocab.find(word);
    if (id < 0) continue;
    const int match = static_cast<int>(polarity);
    for (int l = 0; l < labels; ++l) {
      lambda.set(l, id, l == match ? kLambdaMatched : kLambdaOpposed);
    }
  }
  return lambda;
}

}  // namespace djst

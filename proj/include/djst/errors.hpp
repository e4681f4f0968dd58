#pragma once

#include <stdexcept>
#include <string>

namespace djst {

// Bad input or configuration. The CLI maps this to exit code 2.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem failure. The CLI maps this to exit code 3.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AllSessionsEmpty : ValidationError {
  AllSessionsEmpty() : ValidationError("every session preprocessed to zero tokens") {}
};

struct ConflictingEntry : ValidationError {
  explicit ConflictingEntry(const std::string& word)
      : ValidationError("lexicon word listed with both polarities: " + word), word(word) {}
  std::string word;
};

struct DimensionMismatch : ValidationError {
  using ValidationError::ValidationError;
};

struct EmptyHistory : ValidationError {
  EmptyHistory() : ValidationError("no stored word distributions; the first epoch takes its prior from the lexicon seed") {}
};

struct NoData : ValidationError {
  NoData() : ValidationError("epoch holds no documents") {}
};

struct NothingComparable : ValidationError {
  NothingComparable() : ValidationError("no session carries both a model label and an expert label") {}
};

}  // namespace djst

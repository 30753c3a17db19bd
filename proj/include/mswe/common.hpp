#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mswe {

// Fatal misconfiguration: bad shapes, malformed files, invalid options.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite values reached an optimizer step or a loss.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A lookup for something that does not exist (e.g. unknown query word).
struct QueryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Polarity { positive, negative };

inline const char* to_string(Polarity p) {
  return p == Polarity::positive ? "positive" : "negative";
}

// Index convention for every 2-class distribution in this project
// (tweet-level gold, classifier output, prediction files):
// slot 0 is positive, slot 1 is negative.
inline constexpr std::size_t kPositiveSlot = 0;
inline constexpr std::size_t kNegativeSlot = 1;

inline std::size_t distribution_slot(Polarity p) {
  return p == Polarity::positive ? kPositiveSlot : kNegativeSlot;
}

}  // namespace mswe

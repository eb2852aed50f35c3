#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bcs/storage_graph.hpp"

namespace bcs {

enum class Polarity : uint8_t { Positive, Negative };

/// A signed storage operation: +o pushes/increments, -o pops/decrements.
struct Op {
  Symbol symbol;
  Polarity polarity;

  bool positive() const { return polarity == Polarity::Positive; }
  bool negative() const { return polarity == Polarity::Negative; }

  Op inverse() const {
    return Op{symbol,
              positive() ? Polarity::Negative : Polarity::Positive};
  }

  bool operator==(const Op&) const = default;
  auto operator<=>(const Op&) const = default;
};

inline Op pos(Symbol s) { return Op{s, Polarity::Positive}; }
inline Op neg(Symbol s) { return Op{s, Polarity::Negative}; }

/// Operations are independent iff their symbols are; polarity is ignored.
inline bool independent(const StorageGraph& g, Op a, Op b) {
  return g.independent(a.symbol, b.symbol);
}

/// A finite sequence of operations. Value type; all library operations on
/// words are pure.
struct Word {
  std::vector<Op> ops;

  Word() = default;
  explicit Word(std::vector<Op> o) : ops(std::move(o)) {}

  size_t size() const { return ops.size(); }
  bool empty() const { return ops.empty(); }
  const Op& operator[](size_t i) const { return ops[i]; }

  void append(Op o) { ops.push_back(o); }

  Word concat(const Word& other) const {
    Word r = *this;
    r.ops.insert(r.ops.end(), other.ops.begin(), other.ops.end());
    return r;
  }

  /// The set of distinct symbols occurring in the word, in first-occurrence
  /// order.
  std::vector<Symbol> symbols() const;

  bool operator==(const Word&) const = default;
  auto operator<=>(const Word&) const = default;
};

/// Renders a word in the literal syntax used across files, CLI and errors:
/// whitespace-separated `+sym` / `-sym` tokens, `eps` for the empty word.
std::string format_word(const StorageGraph& g, const Word& w);

/// Parses the word literal syntax. Unknown symbols and malformed tokens
/// raise InvalidArgumentError.
Word parse_word(const StorageGraph& g, const std::string& text);

/// Pairwise independence of two words: every operation of `u` independent of
/// every operation of `v`. Vacuously true if either is empty.
bool words_independent(const StorageGraph& g, const Word& u, const Word& v);

struct WordHash {
  size_t operator()(const Word& w) const {
    size_t h = 0x9e3779b97f4a7c15ull;
    for (const Op& o : w.ops) {
      size_t v = (static_cast<size_t>(o.symbol) << 1) |
                 (o.negative() ? 1u : 0u);
      h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

}  // namespace bcs

#pragma once

#include <optional>
#include <vector>

#include "bcs/word.hpp"

namespace bcs {

/// Budgets for the exhaustive word-level searches. Exceeding a budget raises
/// BudgetError; the searches never return a wrong answer.
struct OracleLimits {
  size_t max_word_len = 12;
  size_t max_memo_entries = 1'000'000;
};

/// Removes one cancellable pair at a time until no pair is left: positions
/// x < y with w[x] = +o, w[y] = -o (or w[x] = -o, w[y] = +o when o is
/// self-looped) such that every operation strictly between them is
/// independent of o. Ties break to the smallest x, then the smallest y.
/// The result is irreducible and congruent to the input.
Word reduce_to_irreducible(const StorageGraph& g, const Word& w);

/// Like reduce_to_irreducible on an identity word, but records which input
/// positions cancelled against which. Returns the pairing (partner[i] is
/// the position i cancelled with) if the word reduces to the empty word,
/// nothing otherwise. Used to build certificates.
std::optional<std::vector<size_t>> reduction_pairing(const StorageGraph& g,
                                                     const Word& w);

/// Decides the word problem: true iff the word denotes the neutral monoid
/// element. Computed via the irreducible normal form.
bool is_identity(const StorageGraph& g, const Word& w);

/// Ground-truth word-problem oracle: memoized breadth-first search over all
/// words reachable by the rewriting rules
///   (R1) delete adjacent +o -o,
///   (R2) delete adjacent -o +o when o is self-looped,
///   (R3) swap adjacent operations on distinct independent symbols.
/// True iff the empty word is reachable.
bool rewrite_oracle(const StorageGraph& g, const Word& w,
                    const OracleLimits& limits = {});

/// True iff some word y makes w.y an identity. Decided on the normal form:
/// every negative operation must sit on a self-looped symbol.
bool is_right_invertible(const StorageGraph& g, const Word& w);

/// The reversal of w with every polarity flipped. Defined only when every
/// negative operation of w is on a self-looped symbol; empty otherwise.
std::optional<Word> syntactic_inverse_word(const StorageGraph& g,
                                           const Word& w);

/// Greedy split of a nonempty word into maximal dependent prefixes.
/// The empty word is rejected (context_switches handles it directly).
std::vector<Word> context_decomposition(const StorageGraph& g, const Word& w);

/// Number of contexts minus one; -1 for the empty word.
int context_switches(const StorageGraph& g, const Word& w);

/// Incremental context bookkeeping: the running switch count together with
/// the symbol set of the current (last) context. Appending operations keeps
/// it consistent with context_switches on the full word.
struct ContextTracker {
  int switches = -1;
  std::vector<Symbol> current_symbols;  // sorted

  void append(const StorageGraph& g, Op o);
  bool operator==(const ContextTracker&) const = default;
};

/// True iff the sequence of words can be transformed into the empty sequence
/// by (FR1) deleting an adjacent pair whose concatenation is an identity,
/// (FR2) swapping adjacent pairwise-independent words, and deleting a single
/// entry that is an identity by itself (the unary counterpart of FR1, needed
/// so odd-length sequences with neutral entries can close). Memoized
/// exhaustive search; the total length of the sequence counts against the
/// word budget.
bool is_freely_reducible(const StorageGraph& g, const std::vector<Word>& seq,
                         const OracleLimits& limits = {});

}  // namespace bcs

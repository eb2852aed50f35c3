#pragma once

#include <optional>
#include <vector>

#include "bcs/saturation.hpp"
#include "bcs/valence_system.hpp"

namespace bcs {

/// A nondeterministic finite automaton over the operation alphabet with one
/// initial and one final state. The alphabet is always exactly the set of
/// non-epsilon labels occurring on transitions.
class Nfa {
 public:
  Nfa() = default;
  Nfa(size_t state_count, State initial, State final_state,
      std::vector<Transition> transitions);

  size_t state_count() const { return state_count_; }
  State initial() const { return initial_; }
  State final_state() const { return final_; }
  const std::vector<Transition>& transitions() const { return transitions_; }

  /// Non-epsilon labels occurring on transitions, deduplicated.
  const std::vector<Op>& alphabet() const { return alphabet_; }

  bool accepts_epsilon() const;
  bool accepts(const Word& w) const;

  /// States reachable from `from` by epsilon transitions alone.
  std::vector<bool> eps_closure(const std::vector<bool>& from) const;

 private:
  size_t state_count_ = 0;
  State initial_ = 0;
  State final_ = 0;
  std::vector<Transition> transitions_;
  std::vector<Op> alphabet_;
};

/// Reinterprets a valence system as an NFA between two of its states. No
/// right-invertibility semantics remain.
Nfa to_nfa(const ValenceSystem& sys, State q_init, State q_fin);
Nfa to_nfa(const SaturatedSystem& sys, State q_init, State q_fin);

/// N(q_i, q_f, ops_con, ops_bl): restriction to the context alphabet, then
/// saturation, then restriction to the block alphabet, then NFA conversion,
/// exactly in that order. Requires ops_con dependent and ops_bl a subset of
/// ops_con.
Nfa build_test_automaton(const ValenceSystem& sys, State q_i, State q_f,
                         const std::vector<Op>& ops_con,
                         const std::vector<Op>& ops_bl);

/// The syntactic inverse on automata: swap initial and final state, reverse
/// every transition, then remswap: drop reversed transitions labeled -o for
/// non-self-looped o and flip the remaining polarities. Epsilon transitions
/// are reversed unchanged. The language is the set of syntactic inverses of
/// words of N on which the inverse is defined.
Nfa syninv_nfa(const StorageGraph& g, const Nfa& n);

/// True iff the synchronized product of the two automata accepts some word.
bool product_nonempty(const Nfa& n1, const Nfa& n2);

/// A word accepted by both automata, if any; breadth-first, so short
/// witnesses are preferred.
std::optional<Word> product_witness(const Nfa& n1, const Nfa& n2);

/// A common word together with the accepting path of each component,
/// including their epsilon moves.
struct ProductWitness {
  Word word;
  std::vector<Transition> path1;
  std::vector<Transition> path2;
};

std::optional<ProductWitness> product_witness_paths(const Nfa& n1,
                                                    const Nfa& n2);

/// An accepting path of the automaton for the given word, if one exists;
/// epsilon moves included.
std::optional<std::vector<Transition>> accepting_path(const Nfa& n,
                                                      const Word& w);

}  // namespace bcs

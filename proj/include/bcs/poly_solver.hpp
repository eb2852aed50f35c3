#pragma once

#include <functional>
#include <optional>

#include "bcs/transitive_forest.hpp"
#include "bcs/valence_automaton.hpp"
#include "bcs/valence_system.hpp"

namespace bcs {

/// A valence system promised to be k-bounded: every path word between any
/// two states has at most `bound` context switches. Carried through the
/// recursive polynomial solver so reachability questions need no explicit
/// switch counting.
struct BoundedSystem {
  ValenceSystem system;
  int bound = 0;
};

/// Counter effects of a one-counter automaton; Dec requires a positive
/// counter, TestZero fires only at zero.
enum class CounterEffect : uint8_t { Dec, Inc, None, TestZero };

struct OcaTransition {
  State src;
  std::optional<Letter> letter;
  CounterEffect effect = CounterEffect::None;
  State dst;

  bool operator==(const OcaTransition&) const = default;
};

/// A one-counter automaton over an input alphabet; acceptance is by final
/// state (reachability questions add explicit zero tests where needed).
struct OneCounterAutomaton {
  std::vector<std::string> letter_names;
  size_t state_count = 0;
  State initial = 0;
  State final_state = 0;
  std::vector<OcaTransition> transitions;
};

struct PolyOptions {
  /// Scales the default one-counter value bound (mn+1)^2 + mn + 1;
  /// doubling it must not change any answer once the default is adequate.
  size_t counter_bound_scale = 1;
  /// Cap on constructed state spaces; exceeding it raises BudgetError.
  size_t max_states = 2'000'000;
};

/// The promise conversion: a product with a context tracker whose states are
/// {*} plus Q x 2^Op x [0, k]. The result is k-bounded by construction and
/// has an identity run from the new initial to the new final state iff the
/// input has one with at most k context switches.
struct PromiseInstance {
  BoundedSystem system;
  State q_init = 0;
  State q_fin = 0;
};
PromiseInstance to_promise(const ValenceSystem& sys, State q_init, State q_fin,
                           int k);

/// Saturation for disjoint unions: adds an epsilon edge wherever one side's
/// restriction allows an identity run, consulting the side solvers, until a
/// fixpoint. The side solvers receive the side-restricted current system.
using SideSolver =
    std::function<bool(const BoundedSystem&, State, State)>;
BoundedSystem union_saturate(const BoundedSystem& s,
                             const std::vector<Symbol>& side0,
                             const std::vector<Symbol>& side1,
                             const SideSolver& solve_side0,
                             const SideSolver& solve_side1);

/// Removes a universal vertex: splits the instance into a valence automaton
/// over the remaining graph and a one-counter automaton for the vertex,
/// bounds the counter, turns it into a finite automaton and returns the
/// synchronized product as an instance over the smaller graph.
struct EliminationResult {
  BoundedSystem system;
  State q_init = 0;
  State q_fin = 0;
};
EliminationResult eliminate_universal_vertex(const BoundedSystem& s,
                                             State q_init, State q_fin,
                                             Symbol v,
                                             const PolyOptions& opts = {});

/// Decides BCSREACH in polynomial time for graphs whose loop-free version is
/// a transitive forest: promise conversion, then recursion over the
/// decomposition tree (universal vertices eliminated, unions saturated,
/// empty leaves solved by plain reachability). Raises UnsupportedGraphError
/// for other graphs.
bool solve_poly(const ValenceSystem& sys, State q_init, State q_fin, int k,
                const PolyOptions& opts = {});

}  // namespace bcs

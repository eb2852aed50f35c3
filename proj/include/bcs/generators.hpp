#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bcs/instance.hpp"
#include "bcs/valence_automaton.hpp"

namespace bcs {

/// A 3-CNF formula: clauses of exactly three literals, each a signed
/// 1-based variable index.
struct CnfFormula {
  int variables = 0;
  std::vector<std::array<int, 3>> clauses;
};

/// Minimal DIMACS subset: a `p cnf <vars> <clauses>` header followed by
/// zero-terminated clause lines; `c` comment lines allowed. Clauses are
/// padded or rejected to exactly three literals.
CnfFormula parse_dimacs(const std::string& text);

/// Truth-table satisfiability; the test oracle for the reduction.
bool brute_force_sat(const CnfFormula& formula);

/// The storage shapes of the paper's running examples, generalized:
///   pushdown(n)        n stack symbols, no independence at all;
///   multipushdown(s,a) s stacks of a symbols each, complete multipartite;
///   petri(n)           n counters, complete graph, no loops;
///   blind(n)           n counters, complete graph, all loops.
std::shared_ptr<const StorageGraph> preset_graph(const std::string& name,
                                                 size_t size,
                                                 size_t stacks = 2);

struct InstanceLimits {
  size_t max_vertices = 3;
  size_t max_states = 4;
  size_t max_transitions = 6;
  int max_k = 2;
  /// When set, use this preset shape instead of a random graph
  /// ("pushdown", "multipushdown", "petri", "blind").
  std::string graph_preset;
  size_t preset_size = 2;
};

/// Deterministic pseudo-random instance: the same seed always yields the
/// same instance, byte-identical after serialization.
Instance random_instance(uint64_t seed, const InstanceLimits& limits = {});

/// The NP-hardness family: reduces 3-CNF satisfiability to reachability
/// over a graph whose loop-free version is exactly C4. Two pushdown-style
/// valence automata accept the clause-checking and gluing languages; their
/// input-synchronized product is the instance. The instance's answer equals
/// the satisfiability of the formula.
Instance sat_to_c4(const CnfFormula& formula);

/// The two composed valence automata, exposed for tests of the construction.
struct SatAutomata {
  std::shared_ptr<const StorageGraph> graph;
  ValenceAutomaton clause_side;  // accepts L0: w_j # rev(w_j) per clause
  ValenceAutomaton glue_side;    // accepts L1: the off-by-one copy language
};
SatAutomata sat_automata(const CnfFormula& formula);

/// Input-synchronized product of two valence automata over one graph and
/// one input alphabet, with the input erased: the result has a run with
/// identity storage from its initial to its final state iff the automata
/// accept a common word (of identity storage each). Both inputs must be
/// letter-pure (no epsilon-input transitions).
Instance compose_intersection(const ValenceAutomaton& a,
                              const ValenceAutomaton& b, int k);

}  // namespace bcs

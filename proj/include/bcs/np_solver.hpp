#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bcs/nfa.hpp"
#include "bcs/valence_system.hpp"

namespace bcs {

/// A test: the guessed half of the NP certificate. The bound k induces
/// kappa = k + 1 context groups and n = kappa^2 slots; slot i (0-based)
/// belongs to group i / kappa. Slot i runs from boundary[i] to
/// boundary[i+1] over the saturated restriction of the system to
/// context_alphabets[group], further restricted to block_alphabets[i].
struct TestDescription {
  int k = 0;
  std::vector<State> boundary;                     // n + 1 states
  std::vector<std::vector<Op>> context_alphabets;  // kappa entries
  std::vector<std::vector<Op>> block_alphabets;    // n entries

  size_t kappa() const { return static_cast<size_t>(k) + 1; }
  size_t slots() const { return kappa() * kappa(); }
  size_t group_of(size_t slot) const { return slot / kappa(); }

  /// Builds slot i's automaton from the system:
  /// 2nfa(boundary[i], boundary[i+1]) of sat(A[context])[block].
  Nfa slot_automaton(const ValenceSystem& sys, size_t slot) const;
};

/// One step of a free automata reduction. Positions index the sequence as it
/// is at the time the step applies (0-based); Cancel and Swap act on the
/// adjacent pair (pos, pos + 1), DropEpsilon on the single slot at pos.
struct FraStep {
  enum class Kind { Cancel, Swap, DropEpsilon };
  Kind kind = Kind::DropEpsilon;
  uint32_t pos = 0;
  std::optional<Word> witness;  // Cancel only: an intersection witness

  bool operator==(const FraStep&) const = default;
};

struct FraCertificate {
  std::vector<FraStep> steps;
};

struct Certificate {
  TestDescription test;
  FraCertificate fra;
};

/// Checks one step against the current automaton sequence: Cancel via
/// intersection with the syntactic inverse, Swap via alphabet independence,
/// DropEpsilon via epsilon acceptance. Out-of-range positions are rejected
/// with an error; a false result means the rule premise fails.
bool fra_step_applicable(const StorageGraph& g, const std::vector<Nfa>& seq,
                         const FraStep& step);

struct NpOptions {
  /// Cap on search nodes across the solver's stages (a "candidate test"
  /// budget; the staged search counts every explored alternative).
  size_t search_budget = 10'000'000;
  /// Cap on memo entries in the free-reduction searches.
  size_t memo_budget = 1'000'000;
  /// Cap on configuration classes in the closed-search stage.
  size_t closed_search_nodes = 2'000'000;
};

/// Exhaustive memoized search for a free automata reduction of a fixed
/// test; preference order Cancel, DropEpsilon, Swap. Returns the step
/// sequence or nothing if the test does not reduce. Raises BudgetError when
/// the memo budget is exhausted.
std::optional<FraCertificate> search_fra(const ValenceSystem& sys,
                                         const TestDescription& test,
                                         const NpOptions& opts = {});

struct NpResult {
  Answer answer = Answer::Inconclusive;
  std::optional<Certificate> certificate;  // present on Yes
  std::optional<RunWitness> witness;       // replayable run, present on Yes
  std::string stage;                       // which stage decided
  size_t nodes = 0;                        // search nodes consumed
};

/// Decides BCSREACH: is there a run from (q_init, eps) to (q_fin, w) with
/// identity storage and at most k context switches? Complete staged search:
/// first a closed exploration of configuration classes (conclusive whenever
/// the class space is finite or a witness exists within budget), then a
/// search over tests and free automata reductions. Yes answers carry a
/// certificate and a replayable witness; Inconclusive is only returned on
/// budget exhaustion, never as a silent wrong answer.
NpResult solve_np(const ValenceSystem& sys, State q_init, State q_fin, int k,
                  const NpOptions& opts = {});

/// Independently validates a certificate: well-formedness of the test,
/// reconstruction of every slot automaton, and replay of every reduction
/// step with its applicability re-checked. Never throws; any mismatch makes
/// it false.
bool verify_certificate(const ValenceSystem& sys, State q_init, State q_fin,
                        int k, const Certificate& cert);

/// Extracts a replayable run witness from a verified certificate by stitching
/// accepted words of the surviving slots (intersection witnesses for Cancel
/// steps, epsilon paths for DropEpsilon steps) and expanding saturation
/// shortcuts back into transitions of the original system.
std::optional<RunWitness> witness_from_certificate(const ValenceSystem& sys,
                                                   State q_init, State q_fin,
                                                   int k,
                                                   const Certificate& cert);

/// The maximal dependent subsets of the system's operation alphabet; the
/// context alphabets a test can use. Contains the empty set when the system
/// has no operations.
std::vector<std::vector<Op>> maximal_dependent_alphabets(
    const ValenceSystem& sys);

/// Text form of a certificate (state and symbol names resolved against the
/// system); parse rejects malformed input with ParseError.
std::string certificate_to_text(const ValenceSystem& sys,
                                const Certificate& cert);
Certificate certificate_from_text(const ValenceSystem& sys,
                                  const std::string& text);

}  // namespace bcs

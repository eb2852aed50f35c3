#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bcs/rewriting.hpp"
#include "bcs/word.hpp"

namespace bcs {

/// Index of a control state within a ValenceSystem.
using State = uint32_t;

/// A transition of a valence system: an optional operation label (empty
/// means epsilon) between two control states.
struct Transition {
  State src;
  std::optional<Op> label;  // nullopt = epsilon
  State dst;

  bool operator==(const Transition&) const = default;
};

/// Finite control states with operation- or epsilon-labeled transitions over
/// a storage graph. Immutable after construction; the size of the system is
/// its number of transitions.
class ValenceSystem {
 public:
  ValenceSystem() = default;
  ValenceSystem(std::shared_ptr<const StorageGraph> graph,
                std::vector<std::string> state_names,
                std::vector<Transition> transitions);

  const StorageGraph& graph() const { return *graph_; }
  std::shared_ptr<const StorageGraph> graph_ptr() const { return graph_; }

  size_t state_count() const { return state_names_.size(); }
  const std::vector<std::string>& state_names() const { return state_names_; }
  const std::string& name_of(State q) const { return state_names_.at(q); }
  std::optional<State> find_state(const std::string& name) const;
  State state(const std::string& name) const;

  const std::vector<Transition>& transitions() const { return transitions_; }
  size_t size() const { return transitions_.size(); }

  /// Transitions leaving q, by index into transitions().
  const std::vector<uint32_t>& outgoing(State q) const {
    return outgoing_.at(q);
  }

  /// The set of operations labeling transitions, without duplicates.
  std::vector<Op> operations() const;

  /// True iff the operations labeling transitions form a dependent set.
  bool is_dependent() const;

  /// Same states; keeps exactly the epsilon transitions and the transitions
  /// whose label is in `allowed`.
  ValenceSystem restrict_to(const std::vector<Op>& allowed) const;

  bool operator==(const ValenceSystem& other) const;

 private:
  std::shared_ptr<const StorageGraph> graph_;
  std::vector<std::string> state_names_;
  std::vector<Transition> transitions_;
  std::vector<std::vector<uint32_t>> outgoing_;
};

/// A control state plus the storage word accumulated so far. Valid
/// configurations keep the storage right-invertible.
struct Configuration {
  State state;
  Word storage;

  bool operator==(const Configuration&) const = default;
};

/// Applies one transition if it is enabled in `c` (matching source state and
/// right-invertible extended storage); empty otherwise. Epsilon labels append
/// nothing.
std::optional<Configuration> step(const ValenceSystem& sys,
                                  const Configuration& c, const Transition& t);

/// A replayable run: the transition indices taken from the initial
/// configuration, the accumulated storage word, and its context-switch count.
struct RunWitness {
  std::vector<uint32_t> transitions;
  Word storage;
  int cs = -1;

  /// Re-executes the transitions from (q_init, eps), checking enabledness at
  /// every step and that the final storage and cs match.
  bool replay(const ValenceSystem& sys, State q_init) const;
};

enum class Answer { No, Yes, Inconclusive };

struct OracleResult {
  Answer answer = Answer::Inconclusive;
  /// Search explored every configuration class within the budget; a negative
  /// answer is definitive exactly when this holds.
  bool closed = false;
  std::optional<RunWitness> witness;
  size_t explored = 0;
};

struct OracleOptions {
  size_t max_len = 12;
  size_t max_nodes = 1'000'000;
};

/// Exhaustive baseline for BCSREACH: explores all runs whose storage word
/// stays within `max_len`, merging runs by (state, normal form, switch
/// count, current-context symbols). Yes answers come with a witness; a No is
/// only definitive if the search closed below the bounds.
OracleResult brute_force_bcsreach(const ValenceSystem& sys, State q_init,
                                  State q_fin, int k,
                                  const OracleOptions& opts = {});

}  // namespace bcs

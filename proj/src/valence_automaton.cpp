#include "bcs/valence_automaton.hpp"

#include "bcs/errors.hpp"

namespace bcs {

ValenceAutomaton::ValenceAutomaton(std::shared_ptr<const StorageGraph> graph,
                                   std::vector<std::string> letter_names,
                                   size_t state_count, State initial,
                                   State final_state,
                                   std::vector<VaTransition> transitions)
    : graph_(std::move(graph)),
      letter_names_(std::move(letter_names)),
      state_count_(state_count),
      initial_(initial),
      final_(final_state),
      transitions_(std::move(transitions)) {
  if (initial_ >= state_count_ || final_ >= state_count_) {
    throw InvalidArgumentError("valence automaton: designated state out of "
                               "range");
  }
  for (const VaTransition& t : transitions_) {
    if (t.src >= state_count_ || t.dst >= state_count_) {
      throw InvalidArgumentError(
          "valence automaton: transition endpoint out of range");
    }
    if (t.letter && *t.letter >= letter_names_.size()) {
      throw InvalidArgumentError("valence automaton: letter out of range");
    }
    if (t.op && !graph_->contains(t.op->symbol)) {
      throw InvalidArgumentError(
          "valence automaton: operation not over the graph");
    }
  }
}

}  // namespace bcs

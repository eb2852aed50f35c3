#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bcs/valence_system.hpp"

namespace bcs {

/// Index of an input letter within a ValenceAutomaton's alphabet.
using Letter = uint32_t;

/// A transition reading an optional input letter and emitting an optional
/// storage operation.
struct VaTransition {
  State src;
  std::optional<Letter> letter;
  std::optional<Op> op;
  State dst;

  bool operator==(const VaTransition&) const = default;
};

/// A valence automaton: a valence system that additionally reads input. Used
/// as intermediate machinery; reachability questions are asked on valence
/// systems obtained by products that erase the input.
class ValenceAutomaton {
 public:
  ValenceAutomaton() = default;
  ValenceAutomaton(std::shared_ptr<const StorageGraph> graph,
                   std::vector<std::string> letter_names, size_t state_count,
                   State initial, State final_state,
                   std::vector<VaTransition> transitions);

  const StorageGraph& graph() const { return *graph_; }
  std::shared_ptr<const StorageGraph> graph_ptr() const { return graph_; }
  const std::vector<std::string>& letter_names() const {
    return letter_names_;
  }
  size_t state_count() const { return state_count_; }
  State initial() const { return initial_; }
  State final_state() const { return final_; }
  const std::vector<VaTransition>& transitions() const { return transitions_; }

 private:
  std::shared_ptr<const StorageGraph> graph_;
  std::vector<std::string> letter_names_;
  size_t state_count_ = 0;
  State initial_ = 0;
  State final_ = 0;
  std::vector<VaTransition> transitions_;
};

}  // namespace bcs

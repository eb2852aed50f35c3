#pragma once

#include <memory>
#include <optional>

#include "bcs/valence_system.hpp"

namespace bcs {

/// A complete reachability instance: storage graph, system, designated
/// states and (optionally) the context-switch bound.
struct Instance {
  std::shared_ptr<const StorageGraph> graph;
  ValenceSystem system;
  State q_init = 0;
  State q_fin = 0;
  std::optional<int> k;
};

}  // namespace bcs

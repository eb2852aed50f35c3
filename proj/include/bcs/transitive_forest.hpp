#pragma once

#include <optional>
#include <vector>

#include "bcs/storage_graph.hpp"

namespace bcs {

/// One node of a transitive-forest decomposition of the loop-free version
/// of a graph: either the empty graph, a disjoint union of components, or a
/// universal vertex added on top of the rest.
struct DecompositionNode {
  enum class Kind { Empty, Union, Universal };
  Kind kind = Kind::Empty;
  Symbol vertex = 0;                       // Universal only
  std::vector<Symbol> vertices;            // vertex set this node covers
  std::vector<DecompositionNode> children; // Union: components; Universal: 1
};

struct TransitiveForestResult {
  bool is_forest = false;
  std::optional<DecompositionNode> tree;  // present iff is_forest
};

/// Constructive recognition on the loop-free version of the graph: empty
/// graphs are leaves, disconnected graphs decompose as unions, connected
/// ones must expose a universal vertex. Self-loops are ignored throughout.
TransitiveForestResult transitive_forest_decomposition(const StorageGraph& g);

/// Wolk's criterion: a simple graph is a transitive forest iff it has no
/// induced path or cycle on four vertices. Checked on the loop-free version
/// by enumerating all 4-vertex subsets.
bool has_induced_p4_or_c4(const StorageGraph& g);

/// Both checks combined; they must agree (a disagreement is a bug and
/// raises an internal error).
bool is_transitive_forest(const StorageGraph& g);

}  // namespace bcs

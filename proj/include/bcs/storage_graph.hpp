#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bcs {

/// Index of a vertex (symbol) within a StorageGraph.
using Symbol = uint32_t;

/// An undirected graph over symbol names. Edges form the independence
/// relation; self-loops are allowed and meaningful (a self-looped symbol
/// behaves like a blind counter: its negative operation is invertible).
///
/// Immutable after construction.
class StorageGraph {
 public:
  StorageGraph() = default;

  /// Builds a graph from vertex names and independence edges given as name
  /// pairs. The edge list is symmetrized; duplicate vertex names are
  /// rejected; edges mentioning unknown names are rejected.
  StorageGraph(std::vector<std::string> vertices,
               const std::vector<std::pair<std::string, std::string>>& edges);

  size_t size() const { return names_.size(); }
  const std::vector<std::string>& vertex_names() const { return names_; }
  const std::string& name_of(Symbol s) const { return names_.at(s); }

  /// Index lookup; empty if the name is unknown.
  std::optional<Symbol> find(const std::string& name) const;

  /// Index lookup; throws InvalidArgumentError if the name is unknown.
  Symbol symbol(const std::string& name) const;

  bool contains(Symbol s) const { return s < names_.size(); }

  /// The independence relation on symbols. Symmetric; independent(s, s) is
  /// true exactly when s carries a self-loop.
  bool independent(Symbol a, Symbol b) const;

  bool self_looped(Symbol s) const { return independent(s, s); }

  /// True iff no two *distinct* members of the set are independent.
  /// Self-loops do not violate dependence.
  bool is_dependent_set(const std::vector<Symbol>& symbols) const;

  bool operator==(const StorageGraph& other) const = default;

 private:
  void check_symbol(Symbol s) const;

  std::vector<std::string> names_;
  std::vector<std::vector<bool>> adj_;
};

}  // namespace bcs

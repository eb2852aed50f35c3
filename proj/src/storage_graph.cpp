#include "bcs/storage_graph.hpp"

#include <algorithm>

#include "bcs/errors.hpp"

namespace bcs {

StorageGraph::StorageGraph(
    std::vector<std::string> vertices,
    const std::vector<std::pair<std::string, std::string>>& edges)
    : names_(std::move(vertices)) {
  for (size_t i = 0; i < names_.size(); ++i) {
    for (size_t j = i + 1; j < names_.size(); ++j) {
      if (names_[i] == names_[j]) {
        throw InvalidArgumentError("duplicate vertex '" + names_[i] + "'");
      }
    }
  }
  adj_.assign(names_.size(), std::vector<bool>(names_.size(), false));
  for (const auto& [a, b] : edges) {
    Symbol sa = symbol(a);
    Symbol sb = symbol(b);
    adj_[sa][sb] = true;
    adj_[sb][sa] = true;
  }
}

std::optional<Symbol> StorageGraph::find(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<Symbol>(it - names_.begin());
}

Symbol StorageGraph::symbol(const std::string& name) const {
  auto s = find(name);
  if (!s) throw InvalidArgumentError("unknown symbol '" + name + "'");
  return *s;
}

void StorageGraph::check_symbol(Symbol s) const {
  if (!contains(s)) {
    throw InvalidArgumentError("symbol index " + std::to_string(s) +
                               " out of range");
  }
}

bool StorageGraph::independent(Symbol a, Symbol b) const {
  check_symbol(a);
  check_symbol(b);
  return adj_[a][b];
}

bool StorageGraph::is_dependent_set(const std::vector<Symbol>& symbols) const {
  for (size_t i = 0; i < symbols.size(); ++i) {
    check_symbol(symbols[i]);
    for (size_t j = i + 1; j < symbols.size(); ++j) {
      if (symbols[i] != symbols[j] && independent(symbols[i], symbols[j])) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace bcs

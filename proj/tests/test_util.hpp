#pragma once

#include <functional>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "bcs/storage_graph.hpp"
#include "bcs/valence_system.hpp"
#include "bcs/word.hpp"

namespace bcs::testutil {

using EdgeList = std::vector<std::pair<std::string, std::string>>;

inline std::shared_ptr<const StorageGraph> make_graph(
    std::vector<std::string> vertices, const EdgeList& edges) {
  return std::make_shared<const StorageGraph>(std::move(vertices), edges);
}

// The storage shapes of the paper's running examples.

// Pushdown over {a, b, c}: no edges at all.
inline std::shared_ptr<const StorageGraph> stack_graph() {
  return make_graph({"a", "b", "c"}, {});
}

// Two stacks with binary alphabets: complete bipartite, no loops.
inline std::shared_ptr<const StorageGraph> two_stack_graph() {
  return make_graph({"a1", "a2", "b1", "b2"}, {{"a1", "b1"},
                                               {"a1", "b2"},
                                               {"a2", "b1"},
                                               {"a2", "b2"}});
}

// Petri net with four places: complete graph, no loops.
inline std::shared_ptr<const StorageGraph> petri_graph() {
  return make_graph({"p1", "p2", "p3", "p4"},
                    {{"p1", "p2"},
                     {"p1", "p3"},
                     {"p1", "p4"},
                     {"p2", "p3"},
                     {"p2", "p4"},
                     {"p3", "p4"}});
}

// Blind counters: complete graph with all self-loops.
inline std::shared_ptr<const StorageGraph> blind_graph() {
  return make_graph({"c1", "c2", "c3"}, {{"c1", "c2"},
                                         {"c1", "c3"},
                                         {"c2", "c3"},
                                         {"c1", "c1"},
                                         {"c2", "c2"},
                                         {"c3", "c3"}});
}

inline Word w(const StorageGraph& g, const std::string& literal) {
  return parse_word(g, literal);
}

inline Op op(const StorageGraph& g, const std::string& literal) {
  Word parsed = parse_word(g, literal);
  return parsed[0];
}

// Compact construction of valence systems in tests: named states plus
// transitions written as (source, word-literal-or-"eps", target).
inline ValenceSystem make_system(
    std::shared_ptr<const StorageGraph> graph,
    std::vector<std::string> states,
    const std::vector<std::tuple<std::string, std::string, std::string>>&
        trans) {
  ValenceSystem tmp(graph, states, {});
  std::vector<Transition> ts;
  for (const auto& [src, label, dst] : trans) {
    std::optional<Op> op;
    if (label != "eps") op = parse_word(*graph, label)[0];
    ts.push_back(Transition{tmp.state(src), op, tmp.state(dst)});
  }
  return ValenceSystem(std::move(graph), std::move(states), std::move(ts));
}

// Calls fn on every word over the graph's full operation alphabet with
// length in [0, max_len].
inline void for_each_word(const StorageGraph& g, size_t max_len,
                          const std::function<void(const Word&)>& fn) {
  std::vector<Op> alphabet;
  for (Symbol s = 0; s < g.size(); ++s) {
    alphabet.push_back(pos(s));
    alphabet.push_back(neg(s));
  }
  std::vector<size_t> idx;
  std::function<void(Word&)> rec = [&](Word& cur) {
    fn(cur);
    if (cur.size() >= max_len) return;
    for (const Op& o : alphabet) {
      cur.append(o);
      rec(cur);
      cur.ops.pop_back();
    }
  };
  Word start;
  rec(start);
}

}  // namespace bcs::testutil

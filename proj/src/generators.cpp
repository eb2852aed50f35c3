#include "bcs/generators.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <sstream>

#include "bcs/errors.hpp"

namespace bcs {

CnfFormula parse_dimacs(const std::string& text) {
  CnfFormula f;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  int declared_clauses = 0;
  std::vector<int> current;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "c") continue;
    if (first == "p") {
      std::string fmt;
      if (!(ls >> fmt >> f.variables >> declared_clauses) || fmt != "cnf") {
        throw InvalidArgumentError("dimacs: malformed 'p cnf' header");
      }
      have_header = true;
      continue;
    }
    if (!have_header) {
      throw InvalidArgumentError("dimacs: clause before 'p cnf' header");
    }
    ls.clear();
    ls.str(line);
    int lit;
    while (ls >> lit) {
      if (lit == 0) {
        if (current.empty() || current.size() > 3) {
          throw InvalidArgumentError(
              "dimacs: clauses must have between one and three literals");
        }
        while (current.size() < 3) current.push_back(current.back());
        f.clauses.push_back({current[0], current[1], current[2]});
        current.clear();
      } else {
        if (lit > f.variables || -lit > f.variables) {
          throw InvalidArgumentError("dimacs: literal out of range");
        }
        current.push_back(lit);
      }
    }
  }
  if (!current.empty()) {
    throw InvalidArgumentError("dimacs: unterminated clause");
  }
  if (!have_header) throw InvalidArgumentError("dimacs: missing header");
  return f;
}

bool brute_force_sat(const CnfFormula& formula) {
  if (formula.variables > 24) {
    throw BudgetError("brute_force_sat: too many variables");
  }
  for (uint32_t assignment = 0; assignment < (1u << formula.variables);
       ++assignment) {
    bool all = true;
    for (const auto& clause : formula.clauses) {
      bool sat = false;
      for (int lit : clause) {
        int var = lit > 0 ? lit : -lit;
        bool value = (assignment >> (var - 1)) & 1;
        if ((lit > 0) == value) sat = true;
      }
      if (!sat) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return formula.clauses.empty();
}

std::shared_ptr<const StorageGraph> preset_graph(const std::string& name,
                                                 size_t size, size_t stacks) {
  if (size < 1) throw InvalidArgumentError("preset: size must be >= 1");
  std::vector<std::string> vertices;
  std::vector<std::pair<std::string, std::string>> edges;
  if (name == "pushdown") {
    for (size_t i = 0; i < size; ++i) {
      vertices.push_back("a" + std::to_string(i));
    }
  } else if (name == "multipushdown") {
    if (stacks < 1) throw InvalidArgumentError("preset: stacks must be >= 1");
    for (size_t s = 0; s < stacks; ++s) {
      for (size_t i = 0; i < size; ++i) {
        vertices.push_back("s" + std::to_string(s) + "a" + std::to_string(i));
      }
    }
    for (size_t s = 0; s < stacks; ++s) {
      for (size_t t = s + 1; t < stacks; ++t) {
        for (size_t i = 0; i < size; ++i) {
          for (size_t j = 0; j < size; ++j) {
            edges.emplace_back("s" + std::to_string(s) + "a" + std::to_string(i),
                               "s" + std::to_string(t) + "a" + std::to_string(j));
          }
        }
      }
    }
  } else if (name == "petri" || name == "blind") {
    std::string prefix = name == "petri" ? "p" : "c";
    for (size_t i = 0; i < size; ++i) {
      vertices.push_back(prefix + std::to_string(i));
    }
    for (size_t i = 0; i < size; ++i) {
      for (size_t j = i + 1; j < size; ++j) {
        edges.emplace_back(vertices[i], vertices[j]);
      }
    }
    if (name == "blind") {
      for (const std::string& v : vertices) edges.emplace_back(v, v);
    }
  } else {
    throw InvalidArgumentError("preset: unknown preset '" + name + "'");
  }
  return std::make_shared<const StorageGraph>(std::move(vertices), edges);
}

Instance random_instance(uint64_t seed, const InstanceLimits& limits) {
  if (limits.max_vertices < 1 || limits.max_states < 1) {
    throw InvalidArgumentError("random_instance: limits must allow at least "
                               "one vertex and one state");
  }
  std::mt19937_64 rng(seed);
  auto pick = [&](size_t bound) { return static_cast<size_t>(rng() % bound); };

  std::shared_ptr<const StorageGraph> graph;
  if (!limits.graph_preset.empty()) {
    graph = preset_graph(limits.graph_preset, limits.preset_size);
  } else {
    size_t nv = 1 + pick(limits.max_vertices);
    std::vector<std::string> vertices;
    for (size_t i = 0; i < nv; ++i) {
      vertices.push_back("v" + std::to_string(i));
    }
    std::vector<std::pair<std::string, std::string>> edges;
    for (size_t i = 0; i < nv; ++i) {
      for (size_t j = i; j < nv; ++j) {
        if (rng() % 2 == 0) edges.emplace_back(vertices[i], vertices[j]);
      }
    }
    graph = std::make_shared<const StorageGraph>(std::move(vertices), edges);
  }

  size_t ns = 1 + pick(limits.max_states);
  std::vector<std::string> states;
  for (size_t i = 0; i < ns; ++i) states.push_back("q" + std::to_string(i));

  size_t nt = pick(limits.max_transitions + 1);
  std::vector<Transition> transitions;
  for (size_t i = 0; i < nt; ++i) {
    State src = static_cast<State>(pick(ns));
    State dst = static_cast<State>(pick(ns));
    std::optional<Op> label;
    if (rng() % 5 != 0) {
      Symbol s = static_cast<Symbol>(pick(graph->size()));
      label = rng() % 2 == 0 ? pos(s) : neg(s);
    }
    transitions.push_back(Transition{src, label, dst});
  }

  Instance inst;
  inst.graph = graph;
  inst.system = ValenceSystem(graph, std::move(states), std::move(transitions));
  inst.q_init = static_cast<State>(pick(ns));
  inst.q_fin = static_cast<State>(pick(ns));
  inst.k = static_cast<int>(pick(static_cast<size_t>(limits.max_k) + 1));
  return inst;
}

// ---------------------------------------------------------------------------
// The SAT-to-C4 family.
// ---------------------------------------------------------------------------

namespace {

constexpr Letter kBit0 = 0;
constexpr Letter kBit1 = 1;
constexpr Letter kHash = 2;

bool literal_satisfied(int lit, int var, bool value) {
  int v = lit > 0 ? lit : -lit;
  return v == var && (lit > 0) == value;
}

bool clause_hit(const std::array<int, 3>& clause, int var, bool value) {
  return literal_satisfied(clause[0], var, value) ||
         literal_satisfied(clause[1], var, value) ||
         literal_satisfied(clause[2], var, value);
}

// State-name bookkeeping for hand-rolled automata.
class StateTable {
 public:
  State intern(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    State id = static_cast<State>(names_.size());
    names_.push_back(name);
    index_.emplace(name, id);
    return id;
  }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::map<std::string, State> index_;
};

}  // namespace

SatAutomata sat_automata(const CnfFormula& formula) {
  if (formula.variables < 1 || formula.clauses.empty()) {
    throw InvalidArgumentError("sat_to_c4: need at least one variable and "
                               "one clause");
  }
  const int n = formula.variables;
  const int m = static_cast<int>(formula.clauses.size());

  // C4 as independence: two stack symbols per side, all cross-side edges.
  auto graph = std::make_shared<const StorageGraph>(
      std::vector<std::string>{"z0", "o0", "z1", "o1"},
      std::vector<std::pair<std::string, std::string>>{
          {"z0", "z1"}, {"z0", "o1"}, {"o0", "z1"}, {"o0", "o1"}});
  const Symbol side0[2] = {graph->symbol("z0"), graph->symbol("o0")};
  const Symbol side1[2] = {graph->symbol("z1"), graph->symbol("o1")};
  std::vector<std::string> letters = {"0", "1", "#"};

  // Clause side: for each clause j, push w_j (tracking satisfaction), then
  // pop rev(w_j); the storage enforces the reversal copy.
  StateTable st0;
  std::vector<VaTransition> t0;
  auto push_state = [&](int j, int i, int sat) {
    return st0.intern("p" + std::to_string(j) + "_" + std::to_string(i) +
                      "_" + std::to_string(sat));
  };
  auto pop_state = [&](int j, int i) {
    return st0.intern("q" + std::to_string(j) + "_" + std::to_string(i));
  };
  State a0_final = st0.intern("acc");
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) {
      for (int sat = 0; sat < 2; ++sat) {
        for (int bit = 0; bit < 2; ++bit) {
          int nsat = sat || clause_hit(formula.clauses[j], i + 1, bit == 1);
          t0.push_back(VaTransition{push_state(j, i, sat),
                                    bit ? kBit1 : kBit0, pos(side0[bit]),
                                    push_state(j, i + 1, nsat)});
        }
      }
    }
    t0.push_back(VaTransition{push_state(j, n, 1), kHash, std::nullopt,
                              pop_state(j, n)});
    for (int i = n; i > 0; --i) {
      for (int bit = 0; bit < 2; ++bit) {
        t0.push_back(VaTransition{pop_state(j, i), bit ? kBit1 : kBit0,
                                  neg(side0[bit]), pop_state(j, i - 1)});
      }
    }
    State after = j + 1 < m ? push_state(j + 1, 0, 0) : a0_final;
    t0.push_back(VaTransition{pop_state(j, 0), kHash, std::nullopt, after});
  }
  ValenceAutomaton clause_side(graph, letters, st0.names().size(),
                               push_state(0, 0, 0), a0_final, std::move(t0));

  // Glue side: skip w_0, then for each inner boundary push a block and pop
  // its reversal, then skip w_m. Forces equality of adjacent blocks.
  StateTable st1;
  std::vector<VaTransition> t1;
  auto skip0 = [&](int i) { return st1.intern("s" + std::to_string(i)); };
  auto gpush = [&](int j, int i) {
    return st1.intern("g" + std::to_string(j) + "p" + std::to_string(i));
  };
  auto gpop = [&](int j, int i) {
    return st1.intern("g" + std::to_string(j) + "q" + std::to_string(i));
  };
  auto skip1 = [&](int i) { return st1.intern("t" + std::to_string(i)); };
  State a1_final = st1.intern("acc");
  for (int i = 0; i < n; ++i) {
    for (int bit = 0; bit < 2; ++bit) {
      t1.push_back(VaTransition{skip0(i), bit ? kBit1 : kBit0, std::nullopt,
                                skip0(i + 1)});
    }
  }
  State after_w0 = m > 1 ? gpush(1, 0) : skip1(0);
  t1.push_back(VaTransition{skip0(n), kHash, std::nullopt, after_w0});
  for (int j = 1; j < m; ++j) {
    for (int i = 0; i < n; ++i) {
      for (int bit = 0; bit < 2; ++bit) {
        t1.push_back(VaTransition{gpush(j, i), bit ? kBit1 : kBit0,
                                  pos(side1[bit]), gpush(j, i + 1)});
      }
    }
    t1.push_back(
        VaTransition{gpush(j, n), kHash, std::nullopt, gpop(j, n)});
    for (int i = n; i > 0; --i) {
      for (int bit = 0; bit < 2; ++bit) {
        t1.push_back(VaTransition{gpop(j, i), bit ? kBit1 : kBit0,
                                  neg(side1[bit]), gpop(j, i - 1)});
      }
    }
    State after = j + 1 < m ? gpush(j + 1, 0) : skip1(0);
    t1.push_back(VaTransition{gpop(j, 0), kHash, std::nullopt, after});
  }
  for (int i = 0; i < n; ++i) {
    for (int bit = 0; bit < 2; ++bit) {
      t1.push_back(VaTransition{skip1(i), bit ? kBit1 : kBit0, std::nullopt,
                                skip1(i + 1)});
    }
  }
  t1.push_back(VaTransition{skip1(n), kHash, std::nullopt, a1_final});
  ValenceAutomaton glue_side(graph, letters, st1.names().size(), skip0(0),
                             a1_final, std::move(t1));

  return SatAutomata{graph, std::move(clause_side), std::move(glue_side)};
}

Instance compose_intersection(const ValenceAutomaton& a,
                              const ValenceAutomaton& b, int k) {
  if (a.letter_names() != b.letter_names()) {
    throw InvalidArgumentError("compose: input alphabets differ");
  }
  for (const VaTransition& t : a.transitions()) {
    if (!t.letter) {
      throw InvalidArgumentError("compose: left side must be letter-pure");
    }
  }
  for (const VaTransition& t : b.transitions()) {
    if (!t.letter) {
      throw InvalidArgumentError("compose: right side must be letter-pure");
    }
  }

  // Product states: (qa, qb) plus a midpoint per (a-transition, qb). Only
  // the part reachable from the start and co-reachable from the goal is
  // materialized.
  const size_t nb = b.state_count();
  const size_t na = a.state_count();
  const size_t ea = a.transitions().size();
  auto pair_id = [&](State qa, State qb) {
    return static_cast<size_t>(qa) * nb + qb;
  };
  auto mid_id = [&](size_t et, State qb) { return na * nb + et * nb + qb; };
  const size_t total = na * nb + ea * nb;

  std::vector<std::vector<uint32_t>> b_by_src(nb);
  for (uint32_t i = 0; i < b.transitions().size(); ++i) {
    b_by_src[b.transitions()[i].src].push_back(i);
  }
  std::vector<std::vector<uint32_t>> a_by_src(na);
  for (uint32_t i = 0; i < ea; ++i) {
    a_by_src[a.transitions()[i].src].push_back(i);
  }

  struct Edge {
    size_t src;
    std::optional<Op> op;
    size_t dst;
  };
  std::vector<Edge> edges;
  std::vector<bool> forward(total, false);
  std::deque<size_t> queue;
  size_t start = pair_id(a.initial(), b.initial());
  size_t goal = pair_id(a.final_state(), b.final_state());
  forward[start] = true;
  queue.push_back(start);
  while (!queue.empty()) {
    size_t cur = queue.front();
    queue.pop_front();
    auto visit = [&](size_t next, std::optional<Op> op) {
      edges.push_back(Edge{cur, op, next});
      if (!forward[next]) {
        forward[next] = true;
        queue.push_back(next);
      }
    };
    if (cur < na * nb) {
      State qa = static_cast<State>(cur / nb);
      State qb = static_cast<State>(cur % nb);
      for (uint32_t et : a_by_src[qa]) {
        visit(mid_id(et, qb), a.transitions()[et].op);
      }
    } else {
      size_t et = (cur - na * nb) / nb;
      State qb = static_cast<State>((cur - na * nb) % nb);
      const VaTransition& at = a.transitions()[et];
      for (uint32_t bt : b_by_src[qb]) {
        if (b.transitions()[bt].letter != at.letter) continue;
        visit(pair_id(at.dst, b.transitions()[bt].dst),
              b.transitions()[bt].op);
      }
    }
  }

  // Co-reachability over the explored part.
  std::vector<std::vector<size_t>> incoming(total);
  for (size_t i = 0; i < edges.size(); ++i) incoming[edges[i].dst].push_back(i);
  std::vector<bool> backward(total, false);
  if (forward[goal]) {
    backward[goal] = true;
    queue.push_back(goal);
    while (!queue.empty()) {
      size_t cur = queue.front();
      queue.pop_front();
      for (size_t eidx : incoming[cur]) {
        size_t src = edges[eidx].src;
        if (!backward[src]) {
          backward[src] = true;
          queue.push_back(src);
        }
      }
    }
  }

  std::vector<size_t> kept;
  std::vector<int> renumber(total, -1);
  for (size_t i = 0; i < total; ++i) {
    if ((forward[i] && backward[i]) || i == start || i == goal) {
      renumber[i] = static_cast<int>(kept.size());
      kept.push_back(i);
    }
  }
  std::vector<std::string> names;
  for (size_t i : kept) {
    if (i < na * nb) {
      names.push_back("u" + std::to_string(i / nb) + "_" +
                      std::to_string(i % nb));
    } else {
      names.push_back("m" + std::to_string((i - na * nb) / nb) + "_" +
                      std::to_string((i - na * nb) % nb));
    }
  }
  std::vector<Transition> transitions;
  for (const Edge& e : edges) {
    if (renumber[e.src] < 0 || renumber[e.dst] < 0) continue;
    transitions.push_back(Transition{static_cast<State>(renumber[e.src]),
                                     e.op,
                                     static_cast<State>(renumber[e.dst])});
  }
  std::sort(transitions.begin(), transitions.end(),
            [](const Transition& x, const Transition& y) {
              return std::tie(x.src, x.label, x.dst) <
                     std::tie(y.src, y.label, y.dst);
            });
  transitions.erase(std::unique(transitions.begin(), transitions.end()),
                    transitions.end());

  Instance inst;
  inst.graph = a.graph_ptr();
  inst.system = ValenceSystem(a.graph_ptr(), std::move(names),
                              std::move(transitions));
  inst.q_init = static_cast<State>(renumber[start]);
  inst.q_fin = static_cast<State>(renumber[goal]);
  inst.k = k;
  return inst;
}

Instance sat_to_c4(const CnfFormula& formula) {
  SatAutomata parts = sat_automata(formula);
  const int n = formula.variables;
  const int m = static_cast<int>(formula.clauses.size());
  // Input length is exactly 2m(n+1); both sides run without context
  // switches of their own, so the composed bound is twice the input length.
  const int input_len = 2 * m * (n + 1);
  return compose_intersection(parts.clause_side, parts.glue_side,
                              2 * input_len);
}

}  // namespace bcs

#include "bcs/nfa.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "bcs/errors.hpp"

namespace bcs {

Nfa::Nfa(size_t state_count, State initial, State final_state,
         std::vector<Transition> transitions)
    : state_count_(state_count),
      initial_(initial),
      final_(final_state),
      transitions_(std::move(transitions)) {
  if (initial_ >= state_count_ || final_ >= state_count_) {
    throw InvalidArgumentError("nfa: designated state out of range");
  }
  for (const Transition& t : transitions_) {
    if (t.src >= state_count_ || t.dst >= state_count_) {
      throw InvalidArgumentError("nfa: transition endpoint out of range");
    }
    if (t.label && std::find(alphabet_.begin(), alphabet_.end(), *t.label) ==
                       alphabet_.end()) {
      alphabet_.push_back(*t.label);
    }
  }
}

std::vector<bool> Nfa::eps_closure(const std::vector<bool>& from) const {
  std::vector<std::vector<State>> eps_out(state_count_);
  for (const Transition& t : transitions_) {
    if (!t.label) eps_out[t.src].push_back(t.dst);
  }
  std::vector<bool> reached = from;
  std::deque<State> queue;
  for (size_t q = 0; q < state_count_; ++q) {
    if (reached[q]) queue.push_back(static_cast<State>(q));
  }
  while (!queue.empty()) {
    State q = queue.front();
    queue.pop_front();
    for (State d : eps_out[q]) {
      if (!reached[d]) {
        reached[d] = true;
        queue.push_back(d);
      }
    }
  }
  return reached;
}

bool Nfa::accepts_epsilon() const {
  std::vector<bool> start(state_count_, false);
  start[initial_] = true;
  return eps_closure(start)[final_];
}

bool Nfa::accepts(const Word& w) const {
  std::vector<bool> cur(state_count_, false);
  cur[initial_] = true;
  cur = eps_closure(cur);
  for (const Op& o : w.ops) {
    std::vector<bool> next(state_count_, false);
    for (const Transition& t : transitions_) {
      if (t.label && *t.label == o && cur[t.src]) next[t.dst] = true;
    }
    cur = eps_closure(next);
  }
  return cur[final_];
}

Nfa to_nfa(const ValenceSystem& sys, State q_init, State q_fin) {
  if (q_init >= sys.state_count() || q_fin >= sys.state_count()) {
    throw InvalidArgumentError("to_nfa: unknown state");
  }
  return Nfa(sys.state_count(), q_init, q_fin, sys.transitions());
}

Nfa to_nfa(const SaturatedSystem& sys, State q_init, State q_fin) {
  return to_nfa(sys.combined(), q_init, q_fin);
}

Nfa build_test_automaton(const ValenceSystem& sys, State q_i, State q_f,
                         const std::vector<Op>& ops_con,
                         const std::vector<Op>& ops_bl) {
  std::vector<Symbol> con_syms;
  for (const Op& o : ops_con) con_syms.push_back(o.symbol);
  if (!sys.graph().is_dependent_set(con_syms)) {
    throw InvalidArgumentError(
        "build_test_automaton: context alphabet is not dependent");
  }
  for (const Op& o : ops_bl) {
    if (std::find(ops_con.begin(), ops_con.end(), o) == ops_con.end()) {
      throw InvalidArgumentError(
          "build_test_automaton: block alphabet not contained in the context "
          "alphabet");
    }
  }
  ValenceSystem restricted = sys.restrict_to(ops_con);
  ValenceSystem saturated = saturate(restricted).combined();
  return to_nfa(saturated.restrict_to(ops_bl), q_i, q_f);
}

Nfa syninv_nfa(const StorageGraph& g, const Nfa& n) {
  std::vector<Transition> out;
  for (const Transition& t : n.transitions()) {
    Transition rev{t.dst, t.label, t.src};
    if (rev.label) {
      if (rev.label->negative() && !g.self_looped(rev.label->symbol)) {
        continue;  // remswap: a negative on a non-looped symbol has no inverse
      }
      rev.label = rev.label->inverse();
    }
    out.push_back(rev);
  }
  return Nfa(n.state_count(), n.final_state(), n.initial(), std::move(out));
}

namespace {

// Per-state adjacency split into epsilon moves and labeled moves.
struct Adjacency {
  std::vector<std::vector<State>> eps;
  std::vector<std::vector<std::pair<Op, State>>> labeled;

  explicit Adjacency(const Nfa& n)
      : eps(n.state_count()), labeled(n.state_count()) {
    for (const Transition& t : n.transitions()) {
      if (t.label) {
        labeled[t.src].emplace_back(*t.label, t.dst);
      } else {
        eps[t.src].push_back(t.dst);
      }
    }
  }
};

struct ProductSearch {
  const Nfa& n1;
  const Nfa& n2;

  // Common word via breadth-first search over state pairs; epsilon moves
  // explored with zero cost so short witnesses come out first.
  std::optional<ProductWitness> run() const {
    Adjacency a1(n1), a2(n2);
    const size_t n = n1.state_count() * n2.state_count();
    auto id = [&](State a, State b) {
      return static_cast<size_t>(a) * n2.state_count() + b;
    };
    struct Step {
      size_t parent = SIZE_MAX;
      std::optional<Transition> t1;
      std::optional<Transition> t2;
    };
    std::vector<bool> seen(n, false);
    std::vector<Step> how(n);
    std::deque<size_t> queue;

    size_t start = id(n1.initial(), n2.initial());
    seen[start] = true;
    queue.push_back(start);
    while (!queue.empty()) {
      size_t cur = queue.front();
      queue.pop_front();
      State a = static_cast<State>(cur / n2.state_count());
      State b = static_cast<State>(cur % n2.state_count());
      if (a == n1.final_state() && b == n2.final_state()) {
        ProductWitness w;
        std::vector<Step> rev;
        for (size_t i = cur; how[i].parent != SIZE_MAX; i = how[i].parent) {
          rev.push_back(how[i]);
        }
        for (auto it = rev.rbegin(); it != rev.rend(); ++it) {
          if (it->t1) w.path1.push_back(*it->t1);
          if (it->t2) w.path2.push_back(*it->t2);
          if (it->t1 && it->t1->label) w.word.append(*it->t1->label);
        }
        return w;
      }
      auto relax = [&](size_t next, std::optional<Transition> t1,
                       std::optional<Transition> t2) {
        if (seen[next]) return;
        seen[next] = true;
        how[next] = Step{cur, t1, t2};
        bool has_op = t1 && t1->label;
        if (has_op) {
          queue.push_back(next);
        } else {
          queue.push_front(next);
        }
      };
      for (State d : a1.eps[a]) {
        relax(id(d, b), Transition{a, std::nullopt, d}, std::nullopt);
      }
      for (State d : a2.eps[b]) {
        relax(id(a, d), std::nullopt, Transition{b, std::nullopt, d});
      }
      for (const auto& [op1, d1] : a1.labeled[a]) {
        for (const auto& [op2, d2] : a2.labeled[b]) {
          if (op1 == op2) {
            relax(id(d1, d2), Transition{a, op1, d1}, Transition{b, op2, d2});
          }
        }
      }
    }
    return std::nullopt;
  }
};

// One-state automaton accepting exactly the empty word; products against it
// extract paths for a fixed word or for epsilon.
Nfa word_automaton(const Word& w) {
  std::vector<Transition> ts;
  for (size_t i = 0; i < w.size(); ++i) {
    ts.push_back(Transition{static_cast<State>(i), w[i],
                            static_cast<State>(i + 1)});
  }
  return Nfa(w.size() + 1, 0, static_cast<State>(w.size()), std::move(ts));
}

}  // namespace

std::optional<ProductWitness> product_witness_paths(const Nfa& n1,
                                                    const Nfa& n2) {
  return ProductSearch{n1, n2}.run();
}

std::optional<Word> product_witness(const Nfa& n1, const Nfa& n2) {
  auto w = ProductSearch{n1, n2}.run();
  if (!w) return std::nullopt;
  return w->word;
}

bool product_nonempty(const Nfa& n1, const Nfa& n2) {
  return product_witness_paths(n1, n2).has_value();
}

std::optional<std::vector<Transition>> accepting_path(const Nfa& n,
                                                      const Word& w) {
  auto wit = product_witness_paths(n, word_automaton(w));
  if (!wit) return std::nullopt;
  return wit->path1;
}

}  // namespace bcs

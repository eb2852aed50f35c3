#include "bcs/poly_solver.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

#include "bcs/errors.hpp"
#include "bcs/rewriting.hpp"

namespace bcs {

namespace {

bool ops_set_dependent(const StorageGraph& g, const std::vector<Op>& ops) {
  std::vector<Symbol> syms;
  for (const Op& o : ops) {
    if (std::find(syms.begin(), syms.end(), o.symbol) == syms.end()) {
      syms.push_back(o.symbol);
    }
  }
  return g.is_dependent_set(syms);
}

// Shrinks a system to the states on some control path from q_init to q_fin;
// sound for reachability questions because every run is a control path, and
// saturation only ever adds edges between states already connected by one.
std::tuple<ValenceSystem, State, State> trim(const ValenceSystem& sys,
                                             State q_init, State q_fin) {
  const size_t n = sys.state_count();
  std::vector<bool> fwd(n, false), bwd(n, false);
  std::deque<State> queue{q_init};
  fwd[q_init] = true;
  while (!queue.empty()) {
    State q = queue.front();
    queue.pop_front();
    for (uint32_t ti : sys.outgoing(q)) {
      State d = sys.transitions()[ti].dst;
      if (!fwd[d]) {
        fwd[d] = true;
        queue.push_back(d);
      }
    }
  }
  std::vector<std::vector<State>> incoming(n);
  for (const Transition& t : sys.transitions()) {
    incoming[t.dst].push_back(t.src);
  }
  bwd[q_fin] = true;
  queue.push_back(q_fin);
  while (!queue.empty()) {
    State q = queue.front();
    queue.pop_front();
    for (State s : incoming[q]) {
      if (!bwd[s]) {
        bwd[s] = true;
        queue.push_back(s);
      }
    }
  }
  std::vector<int> renumber(n, -1);
  std::vector<std::string> names;
  for (size_t i = 0; i < n; ++i) {
    if ((fwd[i] && bwd[i]) || i == q_init || i == q_fin) {
      renumber[i] = static_cast<int>(names.size());
      names.push_back(sys.name_of(static_cast<State>(i)));
    }
  }
  std::vector<Transition> transitions;
  for (const Transition& t : sys.transitions()) {
    if (renumber[t.src] >= 0 && renumber[t.dst] >= 0) {
      transitions.push_back(Transition{static_cast<State>(renumber[t.src]),
                                       t.label,
                                       static_cast<State>(renumber[t.dst])});
    }
  }
  ValenceSystem out(sys.graph_ptr(), std::move(names), std::move(transitions));
  return {std::move(out), static_cast<State>(renumber[q_init]),
          static_cast<State>(renumber[q_fin])};
}

bool eps_reachable(const ValenceSystem& sys, State from, State to) {
  std::vector<bool> seen(sys.state_count(), false);
  std::deque<State> queue{from};
  seen[from] = true;
  while (!queue.empty()) {
    State q = queue.front();
    queue.pop_front();
    if (q == to) return true;
    for (uint32_t ti : sys.outgoing(q)) {
      const Transition& t = sys.transitions()[ti];
      if (!t.label && !seen[t.dst]) {
        seen[t.dst] = true;
        queue.push_back(t.dst);
      }
    }
  }
  return false;
}

std::vector<bool> eps_forward_set(const ValenceSystem& sys,
                                  const std::vector<State>& seeds,
                                  bool reversed) {
  std::vector<std::vector<State>> adj(sys.state_count());
  for (const Transition& t : sys.transitions()) {
    if (!t.label) {
      if (reversed) {
        adj[t.dst].push_back(t.src);
      } else {
        adj[t.src].push_back(t.dst);
      }
    }
  }
  std::vector<bool> seen(sys.state_count(), false);
  std::deque<State> queue;
  for (State s : seeds) {
    if (!seen[s]) {
      seen[s] = true;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    State q = queue.front();
    queue.pop_front();
    for (State d : adj[q]) {
      if (!seen[d]) {
        seen[d] = true;
        queue.push_back(d);
      }
    }
  }
  return seen;
}

}  // namespace

// ---------------------------------------------------------------------------
// Promise conversion.
// ---------------------------------------------------------------------------

PromiseInstance to_promise(const ValenceSystem& sys, State q_init, State q_fin,
                           int k) {
  if (k < 0) throw InvalidArgumentError("to_promise: k < 0");
  if (q_init >= sys.state_count() || q_fin >= sys.state_count()) {
    throw InvalidArgumentError("to_promise: state out of range");
  }
  const StorageGraph& g = sys.graph();
  std::vector<Op> ops = sys.operations();
  std::sort(ops.begin(), ops.end());
  if (ops.size() > 20) {
    throw BudgetError("to_promise: too many distinct operations");
  }
  const size_t subsets = 1ull << ops.size();
  const size_t levels = static_cast<size_t>(k) + 1;
  const size_t q_states = sys.state_count() * subsets * levels;

  auto op_bit = [&](const Op& o) {
    return std::find(ops.begin(), ops.end(), o) - ops.begin();
  };
  auto state_id = [&](State q, size_t mask, size_t level) {
    return static_cast<State>((q * subsets + mask) * levels + level);
  };
  const State star = static_cast<State>(q_states);

  // Dependence of U ∪ {x} precomputed per (mask, op).
  std::vector<std::vector<bool>> extend_ok(subsets,
                                           std::vector<bool>(ops.size()));
  for (size_t mask = 0; mask < subsets; ++mask) {
    for (size_t oi = 0; oi < ops.size(); ++oi) {
      std::vector<Op> set;
      for (size_t j = 0; j < ops.size(); ++j) {
        if (mask & (1ull << j)) set.push_back(ops[j]);
      }
      set.push_back(ops[oi]);
      extend_ok[mask][oi] = ops_set_dependent(g, set);
    }
  }

  std::vector<std::string> names(q_states + 1);
  for (size_t q = 0; q < sys.state_count(); ++q) {
    for (size_t mask = 0; mask < subsets; ++mask) {
      for (size_t level = 0; level < levels; ++level) {
        names[state_id(static_cast<State>(q), mask, level)] =
            sys.name_of(static_cast<State>(q)) + "." +
            std::to_string(mask) + "." + std::to_string(level);
      }
    }
  }
  names[star] = "star";

  std::vector<Transition> transitions;
  for (const Transition& t : sys.transitions()) {
    for (size_t mask = 0; mask < subsets; ++mask) {
      for (size_t level = 0; level < levels; ++level) {
        State src = state_id(t.src, mask, level);
        if (!t.label) {
          transitions.push_back(
              Transition{src, std::nullopt, state_id(t.dst, mask, level)});
          continue;
        }
        size_t oi = op_bit(*t.label);
        if (extend_ok[mask][oi]) {
          transitions.push_back(Transition{
              src, t.label, state_id(t.dst, mask | (1ull << oi), level)});
        } else if (level + 1 < levels) {
          transitions.push_back(Transition{
              src, t.label, state_id(t.dst, 1ull << oi, level + 1)});
        }
      }
    }
  }
  for (size_t mask = 0; mask < subsets; ++mask) {
    for (size_t level = 0; level < levels; ++level) {
      transitions.push_back(Transition{state_id(q_fin, mask, level),
                                       std::nullopt, star});
    }
  }

  PromiseInstance out;
  out.system.system = ValenceSystem(sys.graph_ptr(), std::move(names),
                                    std::move(transitions));
  out.system.bound = k;
  out.q_init = state_id(q_init, 0, 0);
  out.q_fin = star;
  return out;
}

// ---------------------------------------------------------------------------
// Union saturation.
// ---------------------------------------------------------------------------

BoundedSystem union_saturate(const BoundedSystem& s,
                             const std::vector<Symbol>& side0,
                             const std::vector<Symbol>& side1,
                             const SideSolver& solve_side0,
                             const SideSolver& solve_side1) {
  BoundedSystem cur = s;
  auto side_ops = [&](const std::vector<Symbol>& side) {
    std::vector<Op> ops;
    for (const Op& o : cur.system.operations()) {
      if (std::find(side.begin(), side.end(), o.symbol) != side.end()) {
        ops.push_back(o);
      }
    }
    return ops;
  };

  const size_t n = cur.system.state_count();
  size_t added = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int side = 0; side < 2; ++side) {
      BoundedSystem restricted{
          cur.system.restrict_to(side_ops(side == 0 ? side0 : side1)),
          cur.bound};
      const SideSolver& solver = side == 0 ? solve_side0 : solve_side1;
      for (State p = 0; p < n; ++p) {
        for (State q = 0; q < n; ++q) {
          if (eps_reachable(cur.system, p, q)) continue;
          if (!solver(restricted, p, q)) continue;
          std::vector<Transition> ts = cur.system.transitions();
          ts.push_back(Transition{p, std::nullopt, q});
          cur.system = ValenceSystem(cur.system.graph_ptr(),
                                     cur.system.state_names(), std::move(ts));
          ++added;
          if (added > n * n) {
            throw Error("internal: union saturation exceeded |Q|^2 additions");
          }
          changed = true;
        }
      }
    }
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Universal-vertex elimination.
// ---------------------------------------------------------------------------

namespace {

// Set when a counter cap below the completeness bound truncated the
// unfolding somewhere; a negative overall answer is only final without it.
struct EliminationTelemetry {
  bool cap_hit = false;
};

EliminationResult eliminate_impl(const BoundedSystem& s, State q_init,
                                 State q_fin, Symbol v,
                                 const PolyOptions& opts, size_t cap_override,
                                 EliminationTelemetry* telemetry) {
  const ValenceSystem& sys = s.system;
  const StorageGraph& g = sys.graph();
  for (const Op& o : sys.operations()) {
    if (o.symbol != v && !g.independent(o.symbol, v)) {
      throw InvalidArgumentError(
          "eliminate_universal_vertex: vertex is not universal among the "
          "occurring symbols");
    }
  }
  const int b = s.bound;
  const size_t m = static_cast<size_t>(b) + 1;  // letters per accepted word
  const size_t q_count = sys.state_count();
  const bool looped = g.self_looped(v);

  // Plausible segment endpoints: a v-segment starts where a v-operation is
  // epsilon-reachable and ends wherever a v-operation epsilon-leads.
  std::vector<State> v_srcs, v_dsts;
  for (const Transition& t : sys.transitions()) {
    if (t.label && t.label->symbol == v) {
      v_srcs.push_back(t.src);
      v_dsts.push_back(t.dst);
    }
  }
  std::vector<bool> can_start = eps_forward_set(sys, v_srcs, true);
  std::vector<bool> can_end = eps_forward_set(sys, v_dsts, false);
  std::vector<std::pair<State, State>> letters;
  std::vector<std::string> letter_names;
  std::map<std::pair<State, State>, Letter> letter_ids;
  for (State p = 0; p < q_count; ++p) {
    if (!can_start[p]) continue;
    for (State q = 0; q < q_count; ++q) {
      if (!can_end[q]) continue;
      letter_ids.emplace(std::make_pair(p, q),
                         static_cast<Letter>(letters.size()));
      letters.emplace_back(p, q);
      letter_names.push_back(sys.name_of(p) + ":0:" + sys.name_of(q));
    }
  }

  // --- Side A, built reachable-only: simulate non-v transitions, track the
  // context count, jump over v-segments by reading letters. State:
  // (control, context-ops mask over non-v ops, contexts so far, pending-op
  // obligation after a letter).
  std::vector<Op> ops0;
  for (const Op& o : sys.operations()) {
    if (o.symbol != v) ops0.push_back(o);
  }
  std::sort(ops0.begin(), ops0.end());
  if (ops0.size() > 20) {
    throw BudgetError("eliminate_universal_vertex: too many operations");
  }
  auto op_bit = [&](const Op& o) {
    return std::find(ops0.begin(), ops0.end(), o) - ops0.begin();
  };
  const size_t subsets = 1ull << ops0.size();
  const size_t levels = m + 1;  // contexts so far: 0..b+1

  std::vector<std::vector<bool>> extend_ok(subsets,
                                           std::vector<bool>(ops0.size()));
  for (size_t mask = 0; mask < subsets; ++mask) {
    for (size_t oi = 0; oi < ops0.size(); ++oi) {
      std::vector<Op> set;
      for (size_t j = 0; j < ops0.size(); ++j) {
        if (mask & (1ull << j)) set.push_back(ops0[j]);
      }
      set.push_back(ops0[oi]);
      extend_ok[mask][oi] = ops_set_dependent(g, set);
    }
  }

  struct AState {
    State q;
    uint32_t mask;
    uint8_t contexts;
    bool must_op;
    bool sink;
    auto operator<=>(const AState&) const = default;
  };
  std::map<AState, State> a_ids;
  std::vector<AState> a_states;
  std::vector<VaTransition> a_trans;
  auto a_intern = [&](const AState& as) {
    auto it = a_ids.find(as);
    if (it != a_ids.end()) return it->second;
    if (a_states.size() >= opts.max_states) {
      throw BudgetError("eliminate_universal_vertex: A side too large");
    }
    State id = static_cast<State>(a_states.size());
    a_ids.emplace(as, id);
    a_states.push_back(as);
    return id;
  };
  State a_init = a_intern(AState{q_init, 0, 0, false, false});
  State a_final = a_intern(AState{0, 0, 0, false, true});
  {
    std::deque<State> queue{a_init};
    std::vector<bool> expanded(2, false);
    while (!queue.empty()) {
      State cur = queue.front();
      queue.pop_front();
      if (expanded.size() < a_states.size()) {
        expanded.resize(a_states.size(), false);
      }
      if (expanded[cur]) continue;
      expanded[cur] = true;
      AState as = a_states[cur];
      if (as.sink) continue;
      auto emit = [&](const AState& next, std::optional<Letter> letter,
                      std::optional<Op> op) {
        State nid = a_intern(next);
        a_trans.push_back(VaTransition{cur, letter, op, nid});
        if (expanded.size() < a_states.size()) {
          expanded.resize(a_states.size(), false);
        }
        if (!expanded[nid]) queue.push_back(nid);
      };
      for (uint32_t ti : sys.outgoing(as.q)) {
        const Transition& t = sys.transitions()[ti];
        if (t.label && t.label->symbol == v) continue;
        if (!t.label) {
          emit(AState{t.dst, as.mask, as.contexts, as.must_op, false},
               std::nullopt, std::nullopt);
          continue;
        }
        size_t oi = op_bit(*t.label);
        if (as.mask != 0 && extend_ok[as.mask][oi]) {
          emit(AState{t.dst, as.mask | (1u << oi), as.contexts, false, false},
               std::nullopt, t.label);
        } else if (as.contexts + 1u < levels) {
          emit(AState{t.dst, 1u << oi,
                      static_cast<uint8_t>(as.contexts + 1), false, false},
               std::nullopt, t.label);
        }
      }
      if (!as.must_op) {
        for (const auto& [pair, lid] : letter_ids) {
          if (pair.first != as.q) continue;
          if (as.contexts + 1u >= levels) continue;
          emit(AState{pair.second, 0,
                      static_cast<uint8_t>(as.contexts + 1), true, false},
               lid, std::nullopt);
        }
      }
      if (as.q == q_fin) {
        emit(a_states[a_final], std::nullopt, std::nullopt);
      }
    }
  }
  ValenceAutomaton side_a(sys.graph_ptr(), letter_names, a_states.size(),
                          a_init, a_final, std::move(a_trans));

  // --- Side B as a one-counter automaton, built reachable-only: reading
  // letter (p, q) walks v-transitions from p to q; the counter carries the
  // signed v-balance across segments and must end at zero. A looped v keeps
  // a sign bit that may flip exactly at zero.
  struct CState {
    State q;          // walking position; unused in idle
    State target;     // declared segment end; unused in idle
    bool walking;
    bool need_op;     // walking: at least one v-operation still owed
    uint8_t sign;     // 0: +, 1: -
    bool accept;
    auto operator<=>(const CState&) const = default;
  };
  std::map<CState, State> c_ids;
  std::vector<CState> c_states;
  std::vector<OcaTransition> c_trans;
  auto c_intern = [&](const CState& cs) {
    auto it = c_ids.find(cs);
    if (it != c_ids.end()) return it->second;
    if (c_states.size() >= opts.max_states) {
      throw BudgetError("eliminate_universal_vertex: counter side too large");
    }
    State id = static_cast<State>(c_states.size());
    c_ids.emplace(cs, id);
    c_states.push_back(cs);
    return id;
  };
  State c_init = c_intern(CState{0, 0, false, false, 0, false});
  State c_accept = c_intern(CState{0, 0, false, false, 0, true});
  {
    std::deque<State> queue{c_init};
    std::vector<bool> expanded;
    auto emit = [&](State src, const CState& next, std::optional<Letter> l,
                    CounterEffect eff) {
      State nid = c_intern(next);
      c_trans.push_back(OcaTransition{src, l, eff, nid});
      if (expanded.size() < c_states.size()) {
        expanded.resize(c_states.size(), false);
      }
      if (!expanded[nid]) queue.push_back(nid);
    };
    while (!queue.empty()) {
      State cur = queue.front();
      queue.pop_front();
      if (expanded.size() < c_states.size()) {
        expanded.resize(c_states.size(), false);
      }
      if (expanded[cur]) continue;
      expanded[cur] = true;
      CState cs = c_states[cur];
      if (cs.accept) continue;
      if (!cs.walking) {
        emit(cur, CState{0, 0, false, false, 0, true}, std::nullopt,
             CounterEffect::TestZero);
        if (looped) {
          emit(cur, CState{0, 0, false, false,
                           static_cast<uint8_t>(1 - cs.sign), false},
               std::nullopt, CounterEffect::TestZero);
        }
        for (const auto& [pair, lid] : letter_ids) {
          emit(cur, CState{pair.first, pair.second, true, true, cs.sign,
                           false},
               lid, CounterEffect::None);
        }
        continue;
      }
      // Walking moves.
      for (uint32_t ti : sys.outgoing(cs.q)) {
        const Transition& t = sys.transitions()[ti];
        if (!t.label) {
          emit(cur, CState{t.dst, cs.target, true, cs.need_op, cs.sign,
                           false},
               std::nullopt, CounterEffect::None);
          continue;
        }
        if (t.label->symbol != v) continue;
        bool inc_value = t.label->positive() == (cs.sign == 0);
        emit(cur, CState{t.dst, cs.target, true, false, cs.sign, false},
             std::nullopt,
             inc_value ? CounterEffect::Inc : CounterEffect::Dec);
      }
      if (looped) {
        emit(cur, CState{cs.q, cs.target, true, cs.need_op,
                         static_cast<uint8_t>(1 - cs.sign), false},
             std::nullopt, CounterEffect::TestZero);
      }
      if (!cs.need_op && cs.q == cs.target) {
        emit(cur, CState{0, 0, false, false, cs.sign, false}, std::nullopt,
             CounterEffect::None);
      }
    }
  }

  // --- Bound the counter and unfold into a finite automaton D, reachable
  // part only. The default bound is the completeness threshold; a smaller
  // cap may be supplied by the escalation ladder, and hitting it is
  // reported so a negative answer is never trusted prematurely.
  const size_t nm = m * c_states.size();
  const size_t full_bound =
      opts.counter_bound_scale * ((nm + 1) * (nm + 1) + nm + 1);
  const size_t cap = cap_override ? std::min(cap_override, full_bound)
                                  : full_bound;

  struct DState {
    State c;
    size_t value;
    size_t read;
    auto operator<=>(const DState&) const = default;
  };
  std::map<DState, State> d_ids;
  std::vector<DState> d_states;
  std::vector<std::tuple<State, std::optional<Letter>, State>> d_trans;
  auto d_intern = [&](const DState& ds) {
    auto it = d_ids.find(ds);
    if (it != d_ids.end()) return it->second;
    if (d_states.size() >= opts.max_states) {
      throw BudgetError("eliminate_universal_vertex: D exceeds state budget");
    }
    State id = static_cast<State>(d_states.size());
    d_ids.emplace(ds, id);
    d_states.push_back(ds);
    return id;
  };
  std::vector<std::vector<uint32_t>> c_by_src(c_states.size());
  for (uint32_t i = 0; i < c_trans.size(); ++i) {
    c_by_src[c_trans[i].src].push_back(i);
  }
  std::deque<State> d_queue;
  State d_init = d_intern(DState{c_init, 0, 0});
  d_queue.push_back(d_init);
  std::vector<bool> d_expanded;
  std::vector<State> d_accepting;
  while (!d_queue.empty()) {
    State cur = d_queue.front();
    d_queue.pop_front();
    if (d_expanded.size() < d_states.size()) {
      d_expanded.resize(d_states.size(), false);
    }
    if (d_expanded[cur]) continue;
    d_expanded[cur] = true;
    DState ds = d_states[cur];
    if (ds.c == c_accept) {
      d_accepting.push_back(cur);
      continue;
    }
    for (uint32_t ti : c_by_src[ds.c]) {
      const OcaTransition& t = c_trans[ti];
      DState next = ds;
      next.c = t.dst;
      switch (t.effect) {
        case CounterEffect::Inc:
          if (ds.value >= cap) {
            if (telemetry) telemetry->cap_hit = true;
            continue;
          }
          next.value = ds.value + 1;
          break;
        case CounterEffect::Dec:
          if (ds.value == 0) continue;
          next.value = ds.value - 1;
          break;
        case CounterEffect::TestZero:
          if (ds.value != 0) continue;
          break;
        case CounterEffect::None:
          break;
      }
      if (t.letter) {
        if (ds.read + 1 > m) continue;
        next.read = ds.read + 1;
      }
      State nid = d_intern(next);
      d_trans.emplace_back(cur, t.letter, nid);
      if (d_expanded.size() < d_states.size()) {
        d_expanded.resize(d_states.size(), false);
      }
      if (!d_expanded[nid]) d_queue.push_back(nid);
    }
  }
  // Single final state for D.
  State d_final = d_intern(DState{c_accept, cap + 1, m + 1});
  for (State acc : d_accepting) {
    d_trans.emplace_back(acc, std::nullopt, d_final);
  }

  // --- Product of A and D, synchronized on letters, input erased.
  const size_t dn = d_states.size();
  std::vector<std::vector<uint32_t>> a_by_src(side_a.state_count());
  for (uint32_t i = 0; i < side_a.transitions().size(); ++i) {
    a_by_src[side_a.transitions()[i].src].push_back(i);
  }
  std::vector<std::vector<uint32_t>> d_by_src(dn);
  for (uint32_t i = 0; i < d_trans.size(); ++i) {
    d_by_src[std::get<0>(d_trans[i])].push_back(i);
  }

  auto prod_id = [&](State a, State d) {
    return static_cast<size_t>(a) * dn + d;
  };
  std::map<size_t, State> prod_ids;
  std::vector<size_t> prod_states;
  std::vector<Transition> prod_trans;
  auto prod_intern = [&](size_t pid) {
    auto it = prod_ids.find(pid);
    if (it != prod_ids.end()) return it->second;
    if (prod_states.size() >= opts.max_states) {
      throw BudgetError("eliminate_universal_vertex: product exceeds budget");
    }
    State id = static_cast<State>(prod_states.size());
    prod_ids.emplace(pid, id);
    prod_states.push_back(pid);
    return id;
  };
  std::deque<State> pq;
  std::vector<bool> p_expanded;
  State p_init = prod_intern(prod_id(side_a.initial(), d_init));
  pq.push_back(p_init);
  while (!pq.empty()) {
    State cur = pq.front();
    pq.pop_front();
    if (p_expanded.size() < prod_states.size()) {
      p_expanded.resize(prod_states.size(), false);
    }
    if (p_expanded[cur]) continue;
    p_expanded[cur] = true;
    size_t pid = prod_states[cur];
    State a = static_cast<State>(pid / dn);
    State d = static_cast<State>(pid % dn);
    auto push = [&](size_t next_pid, std::optional<Op> op) {
      State nid = prod_intern(next_pid);
      prod_trans.push_back(Transition{cur, op, nid});
      if (p_expanded.size() < prod_states.size()) {
        p_expanded.resize(prod_states.size(), false);
      }
      if (!p_expanded[nid]) pq.push_back(nid);
    };
    for (uint32_t ti : a_by_src[a]) {
      const VaTransition& t = side_a.transitions()[ti];
      if (!t.letter) {
        push(prod_id(t.dst, d), t.op);
      } else {
        for (uint32_t di : d_by_src[d]) {
          if (std::get<1>(d_trans[di]) == *t.letter) {
            push(prod_id(t.dst, std::get<2>(d_trans[di])), t.op);
          }
        }
      }
    }
    for (uint32_t di : d_by_src[d]) {
      if (!std::get<1>(d_trans[di])) {
        push(prod_id(a, std::get<2>(d_trans[di])), std::nullopt);
      }
    }
  }
  State p_fin = prod_intern(prod_id(side_a.final_state(), d_final));

  std::vector<std::string> prod_names;
  for (size_t pid : prod_states) {
    prod_names.push_back("x" + std::to_string(pid / dn) + "_" +
                         std::to_string(pid % dn));
  }
  ValenceSystem product(sys.graph_ptr(), std::move(prod_names),
                        std::move(prod_trans));
  auto [trimmed, ti2, tf2] = trim(product, p_init, p_fin);

  EliminationResult out;
  out.system.system = std::move(trimmed);
  out.system.bound = b + 1;
  out.q_init = ti2;
  out.q_fin = tf2;
  return out;
}

}  // namespace

EliminationResult eliminate_universal_vertex(const BoundedSystem& s,
                                             State q_init, State q_fin,
                                             Symbol v,
                                             const PolyOptions& opts) {
  return eliminate_impl(s, q_init, q_fin, v, opts, 0, nullptr);
}

// ---------------------------------------------------------------------------
// The recursive transitive-forest solver.
// ---------------------------------------------------------------------------

namespace {

struct PolyContext {
  const PolyOptions& opts;
  size_t cap;  // current counter cap of the escalation ladder; 0 = full
  EliminationTelemetry telemetry;
};

bool solve_promise(const BoundedSystem& bs, State p, State q,
                   const DecompositionNode& tree, PolyContext& ctx);

// Disjoint-union node with possibly many children: fold into binary splits.
bool solve_union(const BoundedSystem& bs, State p, State q,
                 const DecompositionNode& tree, size_t from,
                 PolyContext& ctx) {
  if (from + 1 == tree.children.size()) {
    return solve_promise(bs, p, q, tree.children[from], ctx);
  }
  std::vector<Symbol> side0 = tree.children[from].vertices;
  std::vector<Symbol> side1;
  for (size_t i = from + 1; i < tree.children.size(); ++i) {
    side1.insert(side1.end(), tree.children[i].vertices.begin(),
                 tree.children[i].vertices.end());
  }
  SideSolver s0 = [&](const BoundedSystem& sub, State a, State b) {
    auto [t, ta, tb] = trim(sub.system, a, b);
    return solve_promise(BoundedSystem{std::move(t), sub.bound}, ta, tb,
                         tree.children[from], ctx);
  };
  SideSolver s1 = [&](const BoundedSystem& sub, State a, State b) {
    auto [t, ta, tb] = trim(sub.system, a, b);
    return solve_union(BoundedSystem{std::move(t), sub.bound}, ta, tb, tree,
                       from + 1, ctx);
  };
  BoundedSystem saturated = union_saturate(bs, side0, side1, s0, s1);
  return eps_reachable(saturated.system, p, q);
}

bool solve_promise(const BoundedSystem& bs, State p, State q,
                   const DecompositionNode& tree, PolyContext& ctx) {
  switch (tree.kind) {
    case DecompositionNode::Kind::Empty:
      return eps_reachable(bs.system.restrict_to({}), p, q);
    case DecompositionNode::Kind::Union:
      return solve_union(bs, p, q, tree, 0, ctx);
    case DecompositionNode::Kind::Universal: {
      Symbol v = tree.vertex;
      bool uses_v = false;
      for (const Op& o : bs.system.operations()) {
        if (o.symbol == v) uses_v = true;
      }
      if (!uses_v) {
        return solve_promise(bs, p, q, tree.children[0], ctx);
      }
      EliminationResult next = eliminate_impl(bs, p, q, v, ctx.opts, ctx.cap,
                                              &ctx.telemetry);
      return solve_promise(next.system, next.q_init, next.q_fin,
                           tree.children[0], ctx);
    }
  }
  return false;
}

}  // namespace

bool solve_poly(const ValenceSystem& sys, State q_init, State q_fin, int k,
                const PolyOptions& opts) {
  TransitiveForestResult forest = transitive_forest_decomposition(sys.graph());
  if (!forest.is_forest) {
    throw UnsupportedGraphError(
        "solve_poly: the loop-free storage graph is not a transitive forest");
  }
  PromiseInstance promise = to_promise(sys, q_init, q_fin, k);
  auto [trimmed, p0, q0] =
      trim(promise.system.system, promise.q_init, promise.q_fin);
  BoundedSystem bs{std::move(trimmed), promise.system.bound};

  // Counter-cap escalation: a positive answer is sound at any cap, and a
  // negative one is final once no cap was hit below the completeness bound
  // (cap 0 means the full formula bound).
  size_t cap = 64;
  for (;;) {
    PolyContext ctx{opts, cap, {}};
    bool answer = solve_promise(bs, p0, q0, *forest.tree, ctx);
    if (answer) return true;
    if (cap == 0 || !ctx.telemetry.cap_hit) return false;
    cap *= 8;
    if (cap > (1ull << 40)) cap = 0;
  }
}

}  // namespace bcs

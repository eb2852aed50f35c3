#include "bcs/valence_system.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "bcs/errors.hpp"

namespace bcs {

ValenceSystem::ValenceSystem(std::shared_ptr<const StorageGraph> graph,
                             std::vector<std::string> state_names,
                             std::vector<Transition> transitions)
    : graph_(std::move(graph)),
      state_names_(std::move(state_names)),
      transitions_(std::move(transitions)) {
  for (size_t i = 0; i < state_names_.size(); ++i) {
    for (size_t j = i + 1; j < state_names_.size(); ++j) {
      if (state_names_[i] == state_names_[j]) {
        throw InvalidArgumentError("duplicate state '" + state_names_[i] +
                                   "'");
      }
    }
  }
  outgoing_.resize(state_names_.size());
  for (size_t i = 0; i < transitions_.size(); ++i) {
    const Transition& t = transitions_[i];
    if (t.src >= state_names_.size() || t.dst >= state_names_.size()) {
      throw InvalidArgumentError("transition endpoint out of range");
    }
    if (t.label && !graph_->contains(t.label->symbol)) {
      throw InvalidArgumentError("transition label not over the graph");
    }
    outgoing_[t.src].push_back(static_cast<uint32_t>(i));
  }
}

std::optional<State> ValenceSystem::find_state(const std::string& name) const {
  auto it = std::find(state_names_.begin(), state_names_.end(), name);
  if (it == state_names_.end()) return std::nullopt;
  return static_cast<State>(it - state_names_.begin());
}

State ValenceSystem::state(const std::string& name) const {
  auto q = find_state(name);
  if (!q) throw InvalidArgumentError("unknown state '" + name + "'");
  return *q;
}

std::vector<Op> ValenceSystem::operations() const {
  std::vector<Op> ops;
  for (const Transition& t : transitions_) {
    if (t.label && std::find(ops.begin(), ops.end(), *t.label) == ops.end()) {
      ops.push_back(*t.label);
    }
  }
  return ops;
}

bool ValenceSystem::is_dependent() const {
  std::vector<Symbol> syms;
  for (const Op& o : operations()) {
    if (std::find(syms.begin(), syms.end(), o.symbol) == syms.end()) {
      syms.push_back(o.symbol);
    }
  }
  return graph_->is_dependent_set(syms);
}

ValenceSystem ValenceSystem::restrict_to(const std::vector<Op>& allowed) const {
  for (const Op& o : allowed) {
    if (!graph_->contains(o.symbol)) {
      throw InvalidArgumentError("restriction operation not over the graph");
    }
  }
  std::vector<Transition> kept;
  for (const Transition& t : transitions_) {
    if (!t.label ||
        std::find(allowed.begin(), allowed.end(), *t.label) != allowed.end()) {
      kept.push_back(t);
    }
  }
  return ValenceSystem(graph_, state_names_, std::move(kept));
}

bool ValenceSystem::operator==(const ValenceSystem& other) const {
  return *graph_ == *other.graph_ && state_names_ == other.state_names_ &&
         transitions_ == other.transitions_;
}

std::optional<Configuration> step(const ValenceSystem& sys,
                                  const Configuration& c,
                                  const Transition& t) {
  if (t.src != c.state) return std::nullopt;
  Configuration next{t.dst, c.storage};
  if (t.label) {
    next.storage.append(*t.label);
    if (!is_right_invertible(sys.graph(), next.storage)) return std::nullopt;
  }
  return next;
}

bool RunWitness::replay(const ValenceSystem& sys, State q_init) const {
  Configuration c{q_init, Word{}};
  for (uint32_t ti : transitions) {
    if (ti >= sys.transitions().size()) return false;
    auto next = step(sys, c, sys.transitions()[ti]);
    if (!next) return false;
    c = *next;
  }
  return c.storage == storage && context_switches(sys.graph(), storage) == cs;
}

namespace {

struct SearchKey {
  State state;
  Word normal_form;
  ContextTracker ctx;

  bool operator==(const SearchKey&) const = default;
};

struct SearchKeyHash {
  size_t operator()(const SearchKey& k) const {
    size_t h = WordHash{}(k.normal_form);
    h ^= std::hash<uint32_t>{}(k.state) + 0x9e3779b97f4a7c15ull + (h << 6);
    h ^= std::hash<int>{}(k.ctx.switches) * 1099511628211ull;
    for (Symbol s : k.ctx.current_symbols) h = h * 31 + s;
    return h;
  }
};

struct SearchNode {
  SearchKey key;
  size_t literal_len;
  // Back pointers for witness reconstruction.
  size_t parent;            // index into node pool; SIZE_MAX for the root
  uint32_t via_transition;  // transition index taken from the parent
};

}  // namespace

OracleResult brute_force_bcsreach(const ValenceSystem& sys, State q_init,
                                  State q_fin, int k,
                                  const OracleOptions& opts) {
  if (q_init >= sys.state_count() || q_fin >= sys.state_count()) {
    throw InvalidArgumentError("brute_force_bcsreach: state out of range");
  }
  if (k < 0) throw InvalidArgumentError("brute_force_bcsreach: k < 0");

  const StorageGraph& g = sys.graph();
  OracleResult result;
  std::vector<SearchNode> pool;
  std::unordered_map<SearchKey, size_t, SearchKeyHash> seen;
  // Epsilon transitions cost no storage length, so expansion order needs a
  // 0/1 queue: front for epsilon successors, back for operation successors.
  std::deque<size_t> queue;
  bool hit_length_bound = false;

  auto reconstruct = [&](size_t node_idx) {
    RunWitness w;
    std::vector<uint32_t> rev;
    for (size_t i = node_idx; pool[i].parent != SIZE_MAX; i = pool[i].parent) {
      rev.push_back(pool[i].via_transition);
    }
    w.transitions.assign(rev.rbegin(), rev.rend());
    Configuration c{q_init, Word{}};
    for (uint32_t ti : w.transitions) {
      auto next = step(sys, c, sys.transitions()[ti]);
      c = *next;
    }
    w.storage = c.storage;
    w.cs = context_switches(g, w.storage);
    return w;
  };

  SearchKey root{q_init, Word{}, ContextTracker{}};
  pool.push_back(SearchNode{root, 0, SIZE_MAX, 0});
  seen.emplace(root, 0);
  queue.push_back(0);

  while (!queue.empty()) {
    size_t idx = queue.front();
    queue.pop_front();
    SearchNode node = pool[idx];

    if (node.key.state == q_fin && node.key.normal_form.empty() &&
        node.key.ctx.switches <= k) {
      result.answer = Answer::Yes;
      result.witness = reconstruct(idx);
      result.explored = pool.size();
      return result;
    }

    for (uint32_t ti : sys.outgoing(node.key.state)) {
      const Transition& t = sys.transitions()[ti];
      SearchKey next = node.key;
      next.state = t.dst;
      size_t next_len = node.literal_len;
      if (t.label) {
        if (node.literal_len >= opts.max_len) {
          hit_length_bound = true;
          continue;
        }
        Word extended = node.key.normal_form;
        extended.append(*t.label);
        next.normal_form = reduce_to_irreducible(g, extended);
        if (!is_right_invertible(g, next.normal_form)) continue;
        next.ctx.append(g, *t.label);
        if (next.ctx.switches > k) continue;
        next_len = node.literal_len + 1;
      }
      auto it = seen.find(next);
      if (it != seen.end()) {
        // Keep the shortest literal word per key so the length bound prunes
        // as little as possible.
        if (pool[it->second].literal_len <= next_len) continue;
        pool[it->second].literal_len = next_len;
        pool[it->second].parent = idx;
        pool[it->second].via_transition = ti;
        if (t.label) {
          queue.push_back(it->second);
        } else {
          queue.push_front(it->second);
        }
        continue;
      }
      if (pool.size() >= opts.max_nodes) {
        result.answer = Answer::Inconclusive;
        result.explored = pool.size();
        return result;
      }
      pool.push_back(SearchNode{next, next_len, idx, ti});
      seen.emplace(pool.back().key, pool.size() - 1);
      if (t.label) {
        queue.push_back(pool.size() - 1);
      } else {
        queue.push_front(pool.size() - 1);
      }
    }
  }

  result.answer = Answer::No;
  result.closed = !hit_length_bound;
  if (hit_length_bound) result.answer = Answer::Inconclusive;
  result.explored = pool.size();
  return result;
}

}  // namespace bcs

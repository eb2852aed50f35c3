#include "bcs/saturation.hpp"

#include <vector>

#include "bcs/errors.hpp"

namespace bcs {

ValenceSystem SaturatedSystem::combined() const {
  std::vector<Transition> all = base.transitions();
  all.insert(all.end(), added.begin(), added.end());
  return ValenceSystem(base.graph_ptr(), base.state_names(), std::move(all));
}

namespace {

// Epsilon path between two states using base epsilon transitions plus the
// first `usable` shortcuts only; empty if none exists.
std::optional<std::vector<Transition>> eps_path_limited(
    const SaturatedSystem& sat, State from, State to, size_t usable) {
  const size_t n = sat.base.state_count();
  std::vector<std::optional<Transition>> via(n);
  std::vector<bool> seen(n, false);
  std::vector<State> order;
  seen[from] = true;
  order.push_back(from);
  for (size_t head = 0; head < order.size(); ++head) {
    State q = order[head];
    auto visit = [&](const Transition& t) {
      if (t.src != q || t.label || seen[t.dst]) return;
      seen[t.dst] = true;
      via[t.dst] = t;
      order.push_back(t.dst);
    };
    for (const Transition& t : sat.base.transitions()) visit(t);
    for (size_t i = 0; i < usable; ++i) visit(sat.added[i]);
  }
  if (!seen[to]) return std::nullopt;
  std::vector<Transition> path;
  for (State q = to; q != from; q = via[q]->src) path.push_back(*via[q]);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

std::vector<Transition> SaturatedSystem::expand_path(
    const std::vector<Transition>& combined_path) const {
  auto shortcut_index = [&](const Transition& t) -> std::optional<size_t> {
    if (t.label) return std::nullopt;
    for (size_t i = 0; i < added.size(); ++i) {
      if (added[i] == t) return i;
    }
    return std::nullopt;
  };

  // Expands one transition into base transitions; recursion is well-founded
  // because a shortcut only ever uses strictly earlier shortcuts.
  std::function<void(const Transition&, std::vector<Transition>&)> expand =
      [&](const Transition& t, std::vector<Transition>& out) {
        auto idx = shortcut_index(t);
        if (!idx) {
          out.push_back(t);
          return;
        }
        const ShortcutDerivation& d = derivations[*idx];
        const Transition& first = base.transitions()[d.first];
        const Transition& second = base.transitions()[d.second];
        out.push_back(first);
        auto inner = eps_path_limited(*this, first.dst, second.src, *idx);
        for (const Transition& e : inner.value()) expand(e, out);
        out.push_back(second);
      };

  std::vector<Transition> out;
  for (const Transition& t : combined_path) expand(t, out);
  return out;
}

namespace {

// Incremental epsilon-reachability closure over a dense boolean matrix.
class EpsClosure {
 public:
  explicit EpsClosure(size_t n) : n_(n), reach_(n, std::vector<bool>(n)) {
    for (size_t i = 0; i < n; ++i) reach_[i][i] = true;
  }

  bool reaches(State a, State b) const { return reach_[a][b]; }

  // Adds edge a -> b and propagates: everything reaching a now reaches
  // everything b reaches.
  void add_edge(State a, State b) {
    if (reach_[a][b]) return;
    for (size_t x = 0; x < n_; ++x) {
      if (!reach_[x][a]) continue;
      for (size_t y = 0; y < n_; ++y) {
        if (reach_[b][y]) reach_[x][y] = true;
      }
    }
  }

 private:
  size_t n_;
  std::vector<std::vector<bool>> reach_;
};

}  // namespace

SaturatedSystem saturate(const ValenceSystem& sys) {
  if (!sys.is_dependent()) {
    throw InvalidArgumentError(
        "saturate: the system is not dependent; saturate only restrictions "
        "to a dependent operation set");
  }
  const StorageGraph& g = sys.graph();
  const size_t n = sys.state_count();

  EpsClosure closure(n);
  for (const Transition& t : sys.transitions()) {
    if (!t.label) closure.add_edge(t.src, t.dst);
  }

  // Operation transitions grouped by polarity for the rule premises.
  std::vector<uint32_t> positive, negative;
  for (uint32_t i = 0; i < sys.transitions().size(); ++i) {
    const Transition& t = sys.transitions()[i];
    if (!t.label) continue;
    (t.label->positive() ? positive : negative).push_back(i);
  }

  std::vector<std::vector<bool>> present(n, std::vector<bool>(n, false));
  for (const Transition& t : sys.transitions()) {
    if (!t.label) present[t.src][t.dst] = true;
  }

  std::vector<Transition> added;
  std::vector<ShortcutDerivation> derivations;
  bool changed = true;
  while (changed) {
    changed = false;
    auto try_add = [&](State p1, State p2, uint32_t first, uint32_t second) {
      if (present[p1][p2]) return;
      present[p1][p2] = true;
      added.push_back(Transition{p1, std::nullopt, p2});
      derivations.push_back(ShortcutDerivation{first, second});
      closure.add_edge(p1, p2);
      changed = true;
    };
    // Rule (1): p1 -+o-> p =eps*=> p' --o-> p2.
    for (uint32_t pi : positive) {
      const Transition& tp = sys.transitions()[pi];
      for (uint32_t ni : negative) {
        const Transition& tn = sys.transitions()[ni];
        if (tp.label->symbol != tn.label->symbol) continue;
        if (closure.reaches(tp.dst, tn.src)) {
          try_add(tp.src, tn.dst, pi, ni);
        }
      }
    }
    // Rule (2): p1 --o-> p =eps*=> p' -+o-> p2, for self-looped o.
    for (uint32_t ni : negative) {
      const Transition& tn = sys.transitions()[ni];
      if (!g.self_looped(tn.label->symbol)) continue;
      for (uint32_t pi : positive) {
        const Transition& tp = sys.transitions()[pi];
        if (tp.label->symbol != tn.label->symbol) continue;
        if (closure.reaches(tn.dst, tp.src)) {
          try_add(tn.src, tp.dst, ni, pi);
        }
      }
    }
  }

  return SaturatedSystem{sys, std::move(added), std::move(derivations)};
}

}  // namespace bcs

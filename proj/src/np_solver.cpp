#include "bcs/np_solver.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <sstream>
#include <unordered_set>

#include "bcs/errors.hpp"
#include "bcs/rewriting.hpp"
#include "bcs/saturation.hpp"

namespace bcs {

namespace {

std::vector<Op> sorted_ops(std::vector<Op> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<Symbol> symbols_of(const std::vector<Op>& ops) {
  std::vector<Symbol> syms;
  for (const Op& o : ops) {
    if (std::find(syms.begin(), syms.end(), o.symbol) == syms.end()) {
      syms.push_back(o.symbol);
    }
  }
  return syms;
}

bool ops_dependent(const StorageGraph& g, const std::vector<Op>& ops) {
  return g.is_dependent_set(symbols_of(ops));
}

bool op_sets_independent(const StorageGraph& g, const std::vector<Op>& a,
                         const std::vector<Op>& b) {
  for (const Op& x : a) {
    for (const Op& y : b) {
      if (!independent(g, x, y)) return false;
    }
  }
  return true;
}

// Builds and caches the machinery a test needs per context alphabet: the
// saturated restriction, its epsilon reachability, its occurring labels, and
// the per-block-alphabet slot systems.
class AutomatonFactory {
 public:
  explicit AutomatonFactory(const ValenceSystem& sys) : sys_(sys) {}

  const SaturatedSystem& saturated(const std::vector<Op>& context) {
    auto key = sorted_ops(context);
    auto it = sats_.find(key);
    if (it == sats_.end()) {
      it = sats_.emplace(key, saturate(sys_.restrict_to(key))).first;
    }
    return it->second;
  }

  const ValenceSystem& slot_system(const std::vector<Op>& context,
                                   const std::vector<Op>& block) {
    auto key = std::make_pair(sorted_ops(context), sorted_ops(block));
    auto it = slots_.find(key);
    if (it == slots_.end()) {
      ValenceSystem s = saturated(context).combined().restrict_to(key.second);
      it = slots_.emplace(key, std::move(s)).first;
    }
    return it->second;
  }

  Nfa slot_nfa(const std::vector<Op>& context, const std::vector<Op>& block,
               State q_i, State q_f) {
    return to_nfa(slot_system(context, block), q_i, q_f);
  }

  // Epsilon reachability of the saturated restriction; block restrictions
  // never remove epsilon transitions, so this serves every block alphabet.
  const std::vector<std::vector<bool>>& eps_reach(
      const std::vector<Op>& context) {
    auto key = sorted_ops(context);
    auto it = eps_.find(key);
    if (it != eps_.end()) return it->second;
    const ValenceSystem combined = saturated(key).combined();
    size_t n = combined.state_count();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (size_t q = 0; q < n; ++q) {
      std::deque<State> queue{static_cast<State>(q)};
      reach[q][q] = true;
      while (!queue.empty()) {
        State cur = queue.front();
        queue.pop_front();
        for (uint32_t ti : combined.outgoing(cur)) {
          const Transition& t = combined.transitions()[ti];
          if (!t.label && !reach[q][t.dst]) {
            reach[q][t.dst] = true;
            queue.push_back(t.dst);
          }
        }
      }
    }
    return eps_.emplace(key, std::move(reach)).first->second;
  }

  // Labels occurring in the saturated restriction; the automaton alphabet of
  // a slot with block alphabet B is exactly occurring(context) ∩ B.
  const std::vector<Op>& occurring(const std::vector<Op>& context) {
    auto key = sorted_ops(context);
    auto it = occ_.find(key);
    if (it != occ_.end()) return it->second;
    std::vector<Op> occ = sorted_ops(saturated(key).combined().operations());
    return occ_.emplace(key, std::move(occ)).first->second;
  }

  const ValenceSystem& system() const { return sys_; }

 private:
  const ValenceSystem& sys_;
  std::map<std::vector<Op>, SaturatedSystem> sats_;
  std::map<std::pair<std::vector<Op>, std::vector<Op>>, ValenceSystem> slots_;
  std::map<std::vector<Op>, std::vector<std::vector<bool>>> eps_;
  std::map<std::vector<Op>, std::vector<Op>> occ_;
};

void check_test_shape(const ValenceSystem& sys, const TestDescription& test,
                      State q_init, State q_fin) {
  if (test.k < 0) throw InvalidArgumentError("test: k < 0");
  size_t n = test.slots();
  if (test.boundary.size() != n + 1 ||
      test.context_alphabets.size() != test.kappa() ||
      test.block_alphabets.size() != n) {
    throw InvalidArgumentError("test: component sizes do not match k");
  }
  if (test.boundary.front() != q_init || test.boundary.back() != q_fin) {
    throw InvalidArgumentError("test: boundary endpoints mismatch");
  }
  for (State q : test.boundary) {
    if (q >= sys.state_count()) {
      throw InvalidArgumentError("test: boundary state out of range");
    }
  }
  for (const auto& ctx : test.context_alphabets) {
    if (!ops_dependent(sys.graph(), ctx)) {
      throw InvalidArgumentError("test: context alphabet not dependent");
    }
  }
  for (size_t i = 0; i < n; ++i) {
    const auto& ctx = test.context_alphabets[test.group_of(i)];
    for (const Op& o : test.block_alphabets[i]) {
      if (std::find(ctx.begin(), ctx.end(), o) == ctx.end()) {
        throw InvalidArgumentError(
            "test: block alphabet not contained in its context alphabet");
      }
    }
  }
}

}  // namespace

Nfa TestDescription::slot_automaton(const ValenceSystem& sys,
                                    size_t slot) const {
  if (slot >= slots()) throw InvalidArgumentError("slot index out of range");
  return build_test_automaton(sys, boundary[slot], boundary[slot + 1],
                              context_alphabets[group_of(slot)],
                              block_alphabets[slot]);
}

bool fra_step_applicable(const StorageGraph& g, const std::vector<Nfa>& seq,
                         const FraStep& step) {
  switch (step.kind) {
    case FraStep::Kind::DropEpsilon:
      if (step.pos >= seq.size()) {
        throw InvalidArgumentError("fra step: position out of range");
      }
      return seq[step.pos].accepts_epsilon();
    case FraStep::Kind::Cancel: {
      if (step.pos + 1 >= seq.size()) {
        throw InvalidArgumentError("fra step: pair not adjacent in sequence");
      }
      const Nfa& left = seq[step.pos];
      const Nfa& right = seq[step.pos + 1];
      return product_nonempty(right, syninv_nfa(g, left));
    }
    case FraStep::Kind::Swap: {
      if (step.pos + 1 >= seq.size()) {
        throw InvalidArgumentError("fra step: pair not adjacent in sequence");
      }
      return op_sets_independent(g, seq[step.pos].alphabet(),
                                 seq[step.pos + 1].alphabet());
    }
  }
  return false;
}

std::vector<std::vector<Op>> maximal_dependent_alphabets(
    const ValenceSystem& sys) {
  const StorageGraph& g = sys.graph();
  std::vector<Op> ops = sorted_ops(sys.operations());
  std::vector<Symbol> syms = symbols_of(ops);
  std::sort(syms.begin(), syms.end());
  if (syms.empty()) return {{}};
  if (syms.size() > 20) {
    throw BudgetError("maximal_dependent_alphabets: too many symbols");
  }

  std::vector<std::vector<Symbol>> dependent_sets;
  for (uint32_t mask = 1; mask < (1u << syms.size()); ++mask) {
    std::vector<Symbol> set;
    for (size_t i = 0; i < syms.size(); ++i) {
      if (mask & (1u << i)) set.push_back(syms[i]);
    }
    if (g.is_dependent_set(set)) dependent_sets.push_back(std::move(set));
  }
  std::vector<std::vector<Op>> result;
  for (const auto& set : dependent_sets) {
    bool maximal = true;
    for (const auto& other : dependent_sets) {
      if (other.size() > set.size() &&
          std::includes(other.begin(), other.end(), set.begin(), set.end())) {
        maximal = false;
        break;
      }
    }
    if (!maximal) continue;
    std::vector<Op> alphabet;
    for (const Op& o : ops) {
      if (std::find(set.begin(), set.end(), o.symbol) != set.end()) {
        alphabet.push_back(o);
      }
    }
    result.push_back(sorted_ops(alphabet));
  }
  std::sort(result.begin(), result.end());
  result.erase(std::unique(result.begin(), result.end()), result.end());
  return result;
}

// ---------------------------------------------------------------------------
// search_fra: exhaustive free-automata-reduction search on a fixed test.
// ---------------------------------------------------------------------------

namespace {

struct IdSeqHash {
  size_t operator()(const std::vector<uint32_t>& v) const {
    size_t h = 1469598103934665603ull;
    for (uint32_t x : v) {
      h ^= x;
      h *= 1099511628211ull;
    }
    return h;
  }
};

struct FixedFraSearch {
  const StorageGraph& g;
  const std::vector<Nfa>& slots;  // by original slot id
  size_t memo_budget;
  std::unordered_set<std::vector<uint32_t>, IdSeqHash> visited;
  std::vector<FraStep> trail;

  bool run(std::vector<uint32_t> order) {
    if (order.empty()) return true;
    if (visited.size() >= memo_budget) {
      throw BudgetError("search_fra: memo budget exhausted");
    }
    if (!visited.insert(order).second) return false;

    // Cancel first, then drops, then swaps.
    for (uint32_t pos = 0; pos + 1 < order.size(); ++pos) {
      const Nfa& left = slots[order[pos]];
      const Nfa& right = slots[order[pos + 1]];
      auto wit = product_witness(right, syninv_nfa(g, left));
      if (!wit) continue;
      std::vector<uint32_t> next = order;
      next.erase(next.begin() + pos, next.begin() + pos + 2);
      trail.push_back(FraStep{FraStep::Kind::Cancel, pos, *wit});
      if (run(std::move(next))) return true;
      trail.pop_back();
    }
    for (uint32_t pos = 0; pos < order.size(); ++pos) {
      if (!slots[order[pos]].accepts_epsilon()) continue;
      std::vector<uint32_t> next = order;
      next.erase(next.begin() + pos);
      trail.push_back(FraStep{FraStep::Kind::DropEpsilon, pos, std::nullopt});
      if (run(std::move(next))) return true;
      trail.pop_back();
    }
    for (uint32_t pos = 0; pos + 1 < order.size(); ++pos) {
      if (!op_sets_independent(g, slots[order[pos]].alphabet(),
                               slots[order[pos + 1]].alphabet())) {
        continue;
      }
      std::vector<uint32_t> next = order;
      std::swap(next[pos], next[pos + 1]);
      trail.push_back(FraStep{FraStep::Kind::Swap, pos, std::nullopt});
      if (run(std::move(next))) return true;
      trail.pop_back();
    }
    return false;
  }
};

}  // namespace

std::optional<FraCertificate> search_fra(const ValenceSystem& sys,
                                         const TestDescription& test,
                                         const NpOptions& opts) {
  check_test_shape(sys, test, test.boundary.front(), test.boundary.back());
  std::vector<Nfa> slots;
  for (size_t i = 0; i < test.slots(); ++i) {
    slots.push_back(test.slot_automaton(sys, i));
  }
  FixedFraSearch search{sys.graph(), slots, opts.memo_budget, {}, {}};
  std::vector<uint32_t> order(test.slots());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (!search.run(std::move(order))) return std::nullopt;
  return FraCertificate{std::move(search.trail)};
}

// ---------------------------------------------------------------------------
// Certificate construction from a concrete witness run.
// ---------------------------------------------------------------------------

namespace {

// A context of the witness run: its word, its transition path (triples over
// the full system), and its endpoint states.
struct RunContext {
  Word word;
  std::vector<Transition> path;
  State start = 0;
  State end = 0;
};

std::vector<RunContext> split_into_contexts(const ValenceSystem& sys,
                                            State q_init,
                                            const RunWitness& run) {
  std::vector<RunContext> contexts;
  ContextTracker tracker;
  RunContext cur;
  cur.start = q_init;
  State state = q_init;
  std::vector<Transition> pending_eps;

  for (uint32_t ti : run.transitions) {
    const Transition& t = sys.transitions()[ti];
    if (!t.label) {
      pending_eps.push_back(t);
      state = t.dst;
      continue;
    }
    ContextTracker before = tracker;
    tracker.append(sys.graph(), *t.label);
    if (tracker.switches > before.switches && before.switches >= 0) {
      // A new context starts at this operation; the epsilon tail preceding
      // it belongs to the new context.
      cur.end = cur.path.empty() ? cur.start : cur.path.back().dst;
      contexts.push_back(std::move(cur));
      cur = RunContext{};
      cur.start = contexts.back().end;
    }
    cur.path.insert(cur.path.end(), pending_eps.begin(), pending_eps.end());
    pending_eps.clear();
    cur.path.push_back(t);
    cur.word.append(*t.label);
    state = t.dst;
  }
  // Trailing epsilon transitions stay with the last context.
  cur.path.insert(cur.path.end(), pending_eps.begin(), pending_eps.end());
  cur.end = cur.path.empty() ? cur.start : cur.path.back().dst;
  contexts.push_back(std::move(cur));
  (void)state;
  return contexts;
}

// The maximal dependent subset of the system's operations that contains the
// given symbols (greedy extension in vertex order).
std::vector<Op> maximal_context_alphabet(const ValenceSystem& sys,
                                         std::vector<Symbol> seed) {
  const StorageGraph& g = sys.graph();
  std::vector<Op> ops = sorted_ops(sys.operations());
  for (Symbol s : symbols_of(ops)) {
    if (std::find(seed.begin(), seed.end(), s) != seed.end()) continue;
    std::vector<Symbol> candidate = seed;
    candidate.push_back(s);
    if (g.is_dependent_set(candidate)) seed = std::move(candidate);
  }
  std::vector<Op> alphabet;
  for (const Op& o : ops) {
    if (std::find(seed.begin(), seed.end(), o.symbol) != seed.end()) {
      alphabet.push_back(o);
    }
  }
  return alphabet;
}

// Shrinks a context path to an irreducible word over the saturated
// restriction: adjacent cancellable operation pairs are replaced by the
// epsilon shortcut the saturation added for them. Dependence guarantees
// adjacent pairs suffice.
void shrink_context(const StorageGraph& g, const ValenceSystem& slot_system,
                    RunContext& ctx) {
  for (;;) {
    // Positions of operation transitions within the path.
    std::vector<size_t> op_pos;
    for (size_t i = 0; i < ctx.path.size(); ++i) {
      if (ctx.path[i].label) op_pos.push_back(i);
    }
    bool changed = false;
    for (size_t t = 0; t + 1 < op_pos.size(); ++t) {
      const Op a = *ctx.path[op_pos[t]].label;
      const Op b = *ctx.path[op_pos[t + 1]].label;
      bool cancels = a.symbol == b.symbol &&
                     ((a.positive() && b.negative()) ||
                      (a.negative() && b.positive() && g.self_looped(a.symbol)));
      if (!cancels) continue;
      State from = ctx.path[op_pos[t]].src;
      State to = ctx.path[op_pos[t + 1]].dst;
      // The saturation must contain this epsilon edge.
      Transition shortcut{from, std::nullopt, to};
      bool exists = false;
      for (const Transition& st : slot_system.transitions()) {
        if (st == shortcut) {
          exists = true;
          break;
        }
      }
      if (!exists) {
        throw Error("internal: saturation is missing a shortcut");
      }
      std::vector<Transition> next(ctx.path.begin(),
                                   ctx.path.begin() + op_pos[t]);
      next.push_back(shortcut);
      next.insert(next.end(), ctx.path.begin() + op_pos[t + 1] + 1,
                  ctx.path.end());
      ctx.path = std::move(next);
      changed = true;
      break;
    }
    if (!changed) break;
  }
  Word word;
  for (const Transition& t : ctx.path) {
    if (t.label) word.append(*t.label);
  }
  ctx.word = std::move(word);
}

struct BlockInfo {
  size_t context;          // group index
  size_t first_op;         // index into the context's op positions
  size_t last_op;          // inclusive
  Word word;
  std::vector<Transition> segment;  // path over the slot system
  State start = 0;
  State end = 0;
  size_t partner = SIZE_MAX;  // block index it cancels against
  size_t slot = SIZE_MAX;     // grid slot id
};

}  // namespace

// Builds a test plus reduction steps out of a witness run, following the
// block-decomposition construction: split into contexts, shrink each context
// to an irreducible word over its saturated restriction, pair up cancelling
// positions, cut the contexts into blocks at pairing discontinuities, and
// lay the blocks out on the kappa^2 grid padded with epsilon slots.
static Certificate certificate_from_witness(const ValenceSystem& sys,
                                            State q_init, State q_fin, int k,
                                            const RunWitness& run,
                                            AutomatonFactory& factory) {
  const StorageGraph& g = sys.graph();
  const size_t kappa = static_cast<size_t>(k) + 1;
  const size_t n = kappa * kappa;

  TestDescription test;
  test.k = k;

  if (run.storage.empty()) {
    // Epsilon run: every slot is an epsilon slot along q_init ->* q_fin.
    std::vector<Op> ctx_alpha = maximal_context_alphabet(sys, {});
    test.context_alphabets.assign(kappa, ctx_alpha);
    test.block_alphabets.assign(n, {});
    test.boundary.assign(n + 1, q_fin);
    test.boundary[0] = q_init;
    FraCertificate fra;
    for (size_t i = 0; i < n; ++i) {
      fra.steps.push_back(FraStep{FraStep::Kind::DropEpsilon, 0, std::nullopt});
    }
    return Certificate{std::move(test), std::move(fra)};
  }

  std::vector<RunContext> contexts = split_into_contexts(sys, q_init, run);
  if (contexts.size() > kappa) {
    throw Error("internal: witness run exceeds the context bound");
  }

  // Context alphabets and irreducible shrinking.
  std::vector<std::vector<Op>> ctx_alphas;
  for (RunContext& ctx : contexts) {
    std::vector<Op> alpha = maximal_context_alphabet(
        sys, symbols_of(sorted_ops([&] {
          std::vector<Op> ops;
          for (const Op& o : ctx.word.ops) ops.push_back(o);
          return ops;
        }())));
    ctx_alphas.push_back(alpha);
    shrink_context(g, factory.slot_system(alpha, alpha), ctx);
  }

  // Global pairing of the concatenated irreducible contexts.
  Word whole;
  std::vector<size_t> pos_context;   // global op position -> context index
  std::vector<size_t> pos_in_path;   // global op position -> path index
  for (size_t c = 0; c < contexts.size(); ++c) {
    for (size_t i = 0; i < contexts[c].path.size(); ++i) {
      if (contexts[c].path[i].label) {
        whole.append(*contexts[c].path[i].label);
        pos_context.push_back(c);
        pos_in_path.push_back(i);
      }
    }
  }
  auto pairing = reduction_pairing(g, whole);
  if (!pairing) {
    throw Error("internal: witness storage word does not reduce to identity");
  }

  // Blocks: maximal runs whose partners are consecutive and reversed.
  std::vector<BlockInfo> blocks;
  std::vector<size_t> block_of(whole.size(), SIZE_MAX);
  for (size_t p = 0; p < whole.size(); ++p) {
    bool start_new = p == 0 || pos_context[p] != pos_context[p - 1] ||
                     (*pairing)[p] + 1 != (*pairing)[p - 1];
    if (start_new) {
      BlockInfo b;
      b.context = pos_context[p];
      b.first_op = p;
      blocks.push_back(b);
    }
    blocks.back().last_op = p;
    block_of[p] = blocks.size() - 1;
  }
  for (BlockInfo& b : blocks) {
    b.partner = block_of[(*pairing)[b.first_op]];
    for (size_t p = b.first_op; p <= b.last_op; ++p) {
      b.word.append(whole[p]);
      if (block_of[(*pairing)[p]] != b.partner) {
        throw Error("internal: block pairing is not block-aligned");
      }
    }
  }

  // Cut each context's path into block segments. Epsilon transitions attach
  // to the following block; the trailing tail stays with the last block.
  std::vector<std::vector<size_t>> blocks_by_context(contexts.size());
  for (size_t bi = 0; bi < blocks.size(); ++bi) {
    blocks_by_context[blocks[bi].context].push_back(bi);
  }
  std::vector<size_t> context_op_base(contexts.size(), 0);
  {
    size_t global = 0;
    for (size_t c = 0; c < contexts.size(); ++c) {
      context_op_base[c] = global;
      for (const Transition& t : contexts[c].path) {
        if (t.label) ++global;
      }
    }
  }
  for (size_t c = 0; c < contexts.size(); ++c) {
    const RunContext& ctx = contexts[c];
    const auto& bids = blocks_by_context[c];
    if (bids.size() > kappa) {
      throw Error("internal: block bound exceeded within a context");
    }
    std::vector<size_t> op_path_idx;
    for (size_t i = 0; i < ctx.path.size(); ++i) {
      if (ctx.path[i].label) op_path_idx.push_back(i);
    }
    size_t path_cursor = 0;
    for (size_t idx = 0; idx < bids.size(); ++idx) {
      BlockInfo& b = blocks[bids[idx]];
      size_t hi_local = b.last_op - context_op_base[c];
      size_t end_cursor = op_path_idx.at(hi_local) + 1;
      if (idx + 1 == bids.size()) end_cursor = ctx.path.size();
      b.segment.assign(ctx.path.begin() + path_cursor,
                       ctx.path.begin() + end_cursor);
      b.start = b.segment.front().src;
      b.end = b.segment.back().dst;
      path_cursor = end_cursor;
    }
  }

  // Grid layout: context c occupies slots [c*kappa, (c+1)*kappa); its blocks
  // first, epsilon padding after.
  test.boundary.assign(n + 1, q_fin);
  test.boundary[0] = q_init;
  test.block_alphabets.assign(n, {});
  std::vector<Op> default_alpha = maximal_context_alphabet(sys, {});
  test.context_alphabets.assign(kappa, default_alpha);
  std::vector<bool> is_padding(n, true);

  for (size_t c = 0; c < contexts.size(); ++c) {
    test.context_alphabets[c] = ctx_alphas[c];
    size_t slot = c * kappa;
    State cursor = contexts[c].start;
    test.boundary[slot] = cursor;
    for (size_t bi : blocks_by_context[c]) {
      BlockInfo& b = blocks[bi];
      b.slot = slot;
      is_padding[slot] = false;
      test.block_alphabets[slot] = sorted_ops(
          std::vector<Op>(b.word.ops.begin(), b.word.ops.end()));
      cursor = b.end;
      test.boundary[slot + 1] = cursor;
      ++slot;
    }
    // Padding slots ride from the context's end state to itself, except the
    // first padding slot which absorbs a block-free context's epsilon path.
    State pad_state = blocks_by_context[c].empty() ? contexts[c].end : cursor;
    if (blocks_by_context[c].empty()) {
      test.boundary[slot] = contexts[c].start;
    }
    for (; slot < (c + 1) * kappa; ++slot) {
      test.boundary[slot + 1] = pad_state;
    }
  }
  // Groups past the last context sit at q_fin.
  for (size_t i = contexts.size() * kappa; i < n; ++i) {
    test.boundary[i + 1] = q_fin;
  }
  if (test.boundary[contexts.size() * kappa] != q_fin) {
    // The last context must end at the final state.
    throw Error("internal: last context does not end at the final state");
  }

  // Reduction steps: drop the padding, then cancel innermost pairs, swapping
  // blocks together as needed.
  FraCertificate fra;
  std::vector<uint32_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = static_cast<uint32_t>(i);
  auto position_of = [&](uint32_t id) {
    return static_cast<uint32_t>(
        std::find(order.begin(), order.end(), id) - order.begin());
  };
  for (size_t i = 0; i < n; ++i) {
    if (!is_padding[i]) continue;
    uint32_t pos = position_of(static_cast<uint32_t>(i));
    fra.steps.push_back(FraStep{FraStep::Kind::DropEpsilon, pos, std::nullopt});
    order.erase(order.begin() + pos);
  }

  std::vector<bool> alive(blocks.size(), true);
  size_t remaining = blocks.size();
  while (remaining > 0) {
    // Pick the first pair with no other live pair strictly inside it.
    size_t chosen = SIZE_MAX;
    for (size_t bi = 0; bi < blocks.size() && chosen == SIZE_MAX; ++bi) {
      if (!alive[bi] || blocks[bi].partner <= bi) continue;
      size_t lo = blocks[bi].slot;
      size_t hi = blocks[blocks[bi].partner].slot;
      bool minimal = true;
      for (size_t other = 0; other < blocks.size() && minimal; ++other) {
        if (!alive[other] || other == bi || other == blocks[bi].partner) {
          continue;
        }
        size_t os = blocks[other].slot;
        size_t ps = blocks[blocks[other].partner].slot;
        if (os > lo && os < hi && ps > lo && ps < hi) minimal = false;
      }
      if (minimal) chosen = bi;
    }
    if (chosen == SIZE_MAX) {
      throw Error("internal: no minimal nesting among remaining blocks");
    }
    BlockInfo& left = blocks[chosen];
    BlockInfo& right = blocks[left.partner];
    uint32_t lp = position_of(static_cast<uint32_t>(left.slot));
    uint32_t rp = position_of(static_cast<uint32_t>(right.slot));
    while (lp + 1 < rp) {
      fra.steps.push_back(FraStep{FraStep::Kind::Swap, lp, std::nullopt});
      std::swap(order[lp], order[lp + 1]);
      ++lp;
    }
    fra.steps.push_back(FraStep{FraStep::Kind::Cancel, lp, right.word});
    order.erase(order.begin() + lp, order.begin() + lp + 2);
    alive[chosen] = false;
    alive[left.partner] = false;
    remaining -= 2;
  }

  return Certificate{std::move(test), std::move(fra)};
}

// ---------------------------------------------------------------------------
// verify_certificate and witness extraction.
// ---------------------------------------------------------------------------

bool verify_certificate(const ValenceSystem& sys, State q_init, State q_fin,
                        int k, const Certificate& cert) {
  try {
    if (cert.test.k != k) return false;
    check_test_shape(sys, cert.test, q_init, q_fin);
    AutomatonFactory factory(sys);
    std::vector<Nfa> seq;
    for (size_t i = 0; i < cert.test.slots(); ++i) {
      seq.push_back(
          factory.slot_nfa(cert.test.context_alphabets[cert.test.group_of(i)],
                           cert.test.block_alphabets[i],
                           cert.test.boundary[i], cert.test.boundary[i + 1]));
    }
    for (const FraStep& step : cert.fra.steps) {
      if (!fra_step_applicable(sys.graph(), seq, step)) return false;
      switch (step.kind) {
        case FraStep::Kind::Cancel: {
          if (step.witness) {
            const Nfa& left = seq[step.pos];
            const Nfa& right = seq[step.pos + 1];
            if (!right.accepts(*step.witness)) return false;
            if (!syninv_nfa(sys.graph(), left).accepts(*step.witness)) {
              return false;
            }
          }
          seq.erase(seq.begin() + step.pos, seq.begin() + step.pos + 2);
          break;
        }
        case FraStep::Kind::DropEpsilon:
          seq.erase(seq.begin() + step.pos);
          break;
        case FraStep::Kind::Swap:
          std::swap(seq[step.pos], seq[step.pos + 1]);
          break;
      }
    }
    return seq.empty();
  } catch (const Error&) {
    return false;
  }
}

std::optional<RunWitness> witness_from_certificate(const ValenceSystem& sys,
                                                   State q_init, State q_fin,
                                                   int k,
                                                   const Certificate& cert) {
  try {
    check_test_shape(sys, cert.test, q_init, q_fin);
    AutomatonFactory factory(sys);
    const size_t n = cert.test.slots();

    // Replay the steps to learn each slot's accepted word and path.
    std::vector<uint32_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = static_cast<uint32_t>(i);
    std::vector<std::vector<Transition>> slot_paths(n);
    std::vector<bool> resolved(n, false);

    auto slot_nfa = [&](uint32_t id) {
      return factory.slot_nfa(
          cert.test.context_alphabets[cert.test.group_of(id)],
          cert.test.block_alphabets[id], cert.test.boundary[id],
          cert.test.boundary[id + 1]);
    };

    for (const FraStep& step : cert.fra.steps) {
      switch (step.kind) {
        case FraStep::Kind::Cancel: {
          if (step.pos + 1 >= order.size()) return std::nullopt;
          uint32_t left_id = order[step.pos];
          uint32_t right_id = order[step.pos + 1];
          auto wit = product_witness_paths(slot_nfa(right_id),
                                           syninv_nfa(sys.graph(),
                                                      slot_nfa(left_id)));
          if (!wit) return std::nullopt;
          slot_paths[right_id] = wit->path1;
          // The syntactic-inverse path maps back to the left automaton by
          // reversing the order and the transitions.
          std::vector<Transition> left_path;
          for (auto it = wit->path2.rbegin(); it != wit->path2.rend(); ++it) {
            std::optional<Op> label;
            if (it->label) label = it->label->inverse();
            left_path.push_back(Transition{it->dst, label, it->src});
          }
          slot_paths[left_id] = std::move(left_path);
          resolved[left_id] = resolved[right_id] = true;
          order.erase(order.begin() + step.pos, order.begin() + step.pos + 2);
          break;
        }
        case FraStep::Kind::DropEpsilon: {
          if (step.pos >= order.size()) return std::nullopt;
          uint32_t id = order[step.pos];
          auto path = accepting_path(slot_nfa(id), Word{});
          if (!path) return std::nullopt;
          slot_paths[id] = *path;
          resolved[id] = true;
          order.erase(order.begin() + step.pos);
          break;
        }
        case FraStep::Kind::Swap:
          if (step.pos + 1 >= order.size()) return std::nullopt;
          std::swap(order[step.pos], order[step.pos + 1]);
          break;
      }
    }
    if (!order.empty()) return std::nullopt;
    for (size_t i = 0; i < n; ++i) {
      if (!resolved[i]) return std::nullopt;
    }

    // Expand saturation shortcuts and map every transition back to the
    // system, stitching the slots in grid order.
    RunWitness witness;
    Word storage;
    for (size_t i = 0; i < n; ++i) {
      const SaturatedSystem& sat =
          factory.saturated(cert.test.context_alphabets[cert.test.group_of(i)]);
      std::vector<Transition> base = sat.expand_path(slot_paths[i]);
      for (const Transition& t : base) {
        bool found = false;
        for (uint32_t ti = 0; ti < sys.transitions().size(); ++ti) {
          if (sys.transitions()[ti] == t) {
            witness.transitions.push_back(ti);
            found = true;
            break;
          }
        }
        if (!found) return std::nullopt;
        if (t.label) storage.append(*t.label);
      }
    }
    witness.storage = std::move(storage);
    witness.cs = context_switches(sys.graph(), witness.storage);
    if (!witness.replay(sys, q_init)) return std::nullopt;
    if (!is_identity(sys.graph(), witness.storage)) return std::nullopt;
    if (witness.cs > k) return std::nullopt;
    return witness;
  } catch (const Error&) {
    return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// The fused complete search over tests and reductions (stage 2).
// ---------------------------------------------------------------------------

namespace {

// Stage-2 search: instead of exploring explicit swap sequences (whose
// permutation space explodes), slots are eliminated in place. A pair may
// cancel across a gap when every slot between the two can eventually be
// moved out, which is recorded as a deferred constraint: the in-between
// slot's final block alphabet must be independent of both of the pair's
// block alphabets. Every witness run induces a derivation of exactly this
// shape (the construction in certificate_from_witness), so searching these
// derivations is complete; the emitted certificate spells the implied swaps
// out as ordinary steps that verify_certificate re-checks.
struct FusedSearch {
  const ValenceSystem& sys;
  AutomatonFactory& factory;
  State q_init, q_fin;
  int k;
  size_t kappa, n;
  const NpOptions& opts;
  size_t& nodes;

  // Per context-assignment state.
  std::vector<std::vector<Op>> assignment;  // kappa context alphabets
  std::unordered_set<std::string> visited;

  // A deferred requirement on a slot's final alphabet: independence of the
  // recorded set (the union of a cancelled pair's alphabets).
  using Constraint = std::vector<Op>;

  // How a slot was eliminated, with everything needed to rebuild the test
  // and step list afterwards.
  struct Elimination {
    bool drop = false;
    uint32_t x = 0, y = 0;      // slot ids; y unused for drops
    Word witness;               // cancel: common word of the pair
    std::vector<Op> bx, by;     // final block alphabets of the pair
  };

  std::vector<Elimination> events;
  std::vector<std::vector<Op>> final_block;  // per slot id
  std::vector<State> final_q;

  bool alpha_satisfies(const std::vector<Op>& alpha,
                       const std::vector<Constraint>& cs) const {
    for (const Constraint& c : cs) {
      if (!op_sets_independent(sys.graph(), alpha, c)) return false;
    }
    return true;
  }

  // The largest alphabet below `occ` satisfying the constraints; since
  // independence is checked pairwise, a set satisfies the constraints
  // exactly when each of its operations does.
  std::vector<Op> max_consistent(const std::vector<Op>& occ,
                                 const std::vector<Constraint>& cs) const {
    std::vector<Op> out;
    for (const Op& o : occ) {
      if (alpha_satisfies({o}, cs)) out.push_back(o);
    }
    return out;
  }

  std::string key(const std::vector<uint32_t>& remaining,
                  const std::vector<std::vector<Constraint>>& constraints,
                  const std::vector<int>& qs) const {
    std::string out;
    for (uint32_t id : remaining) {
      out += std::to_string(id);
      out += '[';
      for (const Constraint& c : constraints[id]) {
        for (const Op& o : c) {
          out += std::to_string(o.symbol * 2 + o.negative());
          out += ' ';
        }
        out += ';';
      }
      out += ']';
    }
    out += '|';
    std::vector<bool> relevant(qs.size(), false);
    for (uint32_t id : remaining) relevant[id] = relevant[id + 1] = true;
    for (size_t i = 0; i < qs.size(); ++i) {
      out += relevant[i] ? std::to_string(qs[i]) : std::string("_");
      out += ',';
    }
    return out;
  }

  // Enumerates assignments of the listed boundary indices, invoking fn for
  // each completion; stops early when fn returns true. Assignments made for
  // a successful fn stay in place.
  bool assign(std::vector<int>& qs, const std::vector<size_t>& indices,
              size_t at, const std::function<bool()>& fn) {
    if (at == indices.size()) return fn();
    size_t idx = indices[at];
    if (qs[idx] >= 0) return assign(qs, indices, at + 1, fn);
    for (size_t q = 0; q < sys.state_count(); ++q) {
      qs[idx] = static_cast<int>(q);
      if (assign(qs, indices, at + 1, fn)) return true;
    }
    qs[idx] = -1;
    return false;
  }

  bool search(std::vector<uint32_t> remaining,
              std::vector<std::vector<Constraint>> constraints,
              std::vector<int> qs) {
    if (remaining.empty()) {
      final_q.assign(qs.size(), q_fin);
      for (size_t i = 0; i < qs.size(); ++i) {
        final_q[i] = qs[i] >= 0 ? static_cast<State>(qs[i]) : q_fin;
      }
      return true;
    }
    if (++nodes > opts.search_budget) {
      throw BudgetError("solve_np: search budget exhausted");
    }
    if (visited.size() >= opts.memo_budget) {
      throw BudgetError("solve_np: memo budget exhausted");
    }
    if (!visited.insert(key(remaining, constraints, qs)).second) return false;

    // Cancel moves: a pair plus a guessed support for its common word.
    for (size_t xi = 0; xi < remaining.size(); ++xi) {
      for (size_t yi = xi + 1; yi < remaining.size(); ++yi) {
        uint32_t x = remaining[xi];
        uint32_t y = remaining[yi];
        const auto& ctx_x = assignment[x / kappa];
        const auto& ctx_y = assignment[y / kappa];
        std::vector<Op> occ_x =
            max_consistent(factory.occurring(ctx_x), constraints[x]);
        std::vector<Op> occ_y =
            max_consistent(factory.occurring(ctx_y), constraints[y]);
        if (occ_y.size() > 16) {
          throw BudgetError("solve_np: block alphabet too large");
        }
        std::vector<size_t> need = {x, static_cast<size_t>(x) + 1, y,
                                    static_cast<size_t>(y) + 1};
        if (assign(qs, need, 0, [&] {
              // Gate: nothing can cancel if even the maximal alphabets give
              // an empty intersection.
              Nfa left_max = factory.slot_nfa(ctx_x, occ_x,
                                              static_cast<State>(qs[x]),
                                              static_cast<State>(qs[x + 1]));
              Nfa right_max = factory.slot_nfa(ctx_y, occ_y,
                                               static_cast<State>(qs[y]),
                                               static_cast<State>(qs[y + 1]));
              if (!product_nonempty(right_max,
                                    syninv_nfa(sys.graph(), left_max))) {
                return false;
              }
              // Support guess: the pair's block alphabets are S-flipped / S.
              for (uint32_t mask = 0; mask < (1u << occ_y.size()); ++mask) {
                std::vector<Op> sy;
                for (size_t i = 0; i < occ_y.size(); ++i) {
                  if (mask & (1u << i)) sy.push_back(occ_y[i]);
                }
                std::vector<Op> sx;
                for (const Op& o : sy) sx.push_back(o.inverse());
                std::sort(sx.begin(), sx.end());
                // Both sides must be available and consistent.
                bool sx_ok = std::includes(occ_x.begin(), occ_x.end(),
                                           sx.begin(), sx.end());
                if (!sx_ok || !alpha_satisfies(sy, constraints[y]) ||
                    !alpha_satisfies(sx, constraints[x])) {
                  continue;
                }
                Nfa left = factory.slot_nfa(ctx_x, sx,
                                            static_cast<State>(qs[x]),
                                            static_cast<State>(qs[x + 1]));
                Nfa right = factory.slot_nfa(ctx_y, sy,
                                             static_cast<State>(qs[y]),
                                             static_cast<State>(qs[y + 1]));
                auto wit =
                    product_witness(right, syninv_nfa(sys.graph(), left));
                if (!wit) continue;

                auto next_remaining = remaining;
                next_remaining.erase(next_remaining.begin() + yi);
                next_remaining.erase(next_remaining.begin() + xi);
                auto next_constraints = constraints;
                Constraint pair_union = sx;
                pair_union.insert(pair_union.end(), sy.begin(), sy.end());
                pair_union = sorted_ops(pair_union);
                for (size_t zi = xi + 1; zi < yi; ++zi) {
                  next_constraints[remaining[zi]].push_back(pair_union);
                }
                events.push_back(Elimination{false, x, y, *wit, sx, sy});
                final_block[x] = sx;
                final_block[y] = sy;
                if (search(next_remaining, next_constraints, qs)) return true;
                events.pop_back();
              }
              return false;
            })) {
          return true;
        }
      }
    }

    // Drop moves: the empty alphabet satisfies every constraint.
    for (size_t xi = 0; xi < remaining.size(); ++xi) {
      uint32_t x = remaining[xi];
      const auto& reach = factory.eps_reach(assignment[x / kappa]);
      std::vector<size_t> need = {x, static_cast<size_t>(x) + 1};
      if (assign(qs, need, 0, [&] {
            if (!reach[qs[x]][qs[x + 1]]) return false;
            auto next_remaining = remaining;
            next_remaining.erase(next_remaining.begin() + xi);
            events.push_back(Elimination{true, x, 0, Word{}, {}, {}});
            final_block[x] = {};
            if (search(next_remaining, constraints, qs)) return true;
            events.pop_back();
            return false;
          })) {
        return true;
      }
    }
    return false;
  }

  // Turns the recorded eliminations into an explicit step sequence: swaps
  // that walk the left partner next to the right one, the cancel itself,
  // and the drops. The walk is legal because everything in between carries
  // an independence constraint against the pair.
  FraCertificate assemble_steps() const {
    FraCertificate fra;
    std::vector<uint32_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = static_cast<uint32_t>(i);
    auto pos_of = [&](uint32_t id) {
      return static_cast<uint32_t>(
          std::find(order.begin(), order.end(), id) - order.begin());
    };
    for (const Elimination& e : events) {
      if (e.drop) {
        uint32_t pos = pos_of(e.x);
        fra.steps.push_back(
            FraStep{FraStep::Kind::DropEpsilon, pos, std::nullopt});
        order.erase(order.begin() + pos);
        continue;
      }
      uint32_t xp = pos_of(e.x);
      uint32_t yp = pos_of(e.y);
      while (xp + 1 < yp) {
        fra.steps.push_back(FraStep{FraStep::Kind::Swap, xp, std::nullopt});
        std::swap(order[xp], order[xp + 1]);
        ++xp;
      }
      fra.steps.push_back(FraStep{FraStep::Kind::Cancel, xp, e.witness});
      order.erase(order.begin() + xp, order.begin() + xp + 2);
    }
    return fra;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// solve_np.
// ---------------------------------------------------------------------------

namespace {

// Plain epsilon reachability in the unrestricted system, with a path.
std::optional<std::vector<uint32_t>> plain_eps_path(const ValenceSystem& sys,
                                                    State from, State to) {
  std::vector<int> via(sys.state_count(), -1);
  std::vector<bool> seen(sys.state_count(), false);
  std::deque<State> queue{from};
  seen[from] = true;
  while (!queue.empty()) {
    State q = queue.front();
    queue.pop_front();
    if (q == to) {
      std::vector<uint32_t> path;
      for (State cur = to; cur != from;) {
        path.push_back(static_cast<uint32_t>(via[cur]));
        cur = sys.transitions()[via[cur]].src;
      }
      std::reverse(path.begin(), path.end());
      return path;
    }
    for (uint32_t ti : sys.outgoing(q)) {
      const Transition& t = sys.transitions()[ti];
      if (!t.label && !seen[t.dst]) {
        seen[t.dst] = true;
        via[t.dst] = static_cast<int>(ti);
        queue.push_back(t.dst);
      }
    }
  }
  return std::nullopt;
}

bool control_reachable(const ValenceSystem& sys, State from, State to) {
  std::vector<bool> seen(sys.state_count(), false);
  std::deque<State> queue{from};
  seen[from] = true;
  while (!queue.empty()) {
    State q = queue.front();
    queue.pop_front();
    if (q == to) return true;
    for (uint32_t ti : sys.outgoing(q)) {
      const Transition& t = sys.transitions()[ti];
      if (!seen[t.dst]) {
        seen[t.dst] = true;
        queue.push_back(t.dst);
      }
    }
  }
  return false;
}

}  // namespace

NpResult solve_np(const ValenceSystem& sys, State q_init, State q_fin, int k,
                  const NpOptions& opts) {
  if (q_init >= sys.state_count() || q_fin >= sys.state_count()) {
    throw InvalidArgumentError("solve_np: state out of range");
  }
  if (k < 0) throw InvalidArgumentError("solve_np: k < 0");
  if (static_cast<size_t>(k) > 4096) {
    throw InvalidArgumentError("solve_np: k too large for test construction");
  }

  NpResult result;
  AutomatonFactory factory(sys);

  // Epsilon-run shortcut: cs(eps) = -1 <= k for every k >= 0.
  if (auto path = plain_eps_path(sys, q_init, q_fin)) {
    RunWitness w;
    w.transitions = *path;
    w.cs = -1;
    result.answer = Answer::Yes;
    result.witness = std::move(w);
    result.certificate =
        certificate_from_witness(sys, q_init, q_fin, k,
                                 *result.witness, factory);
    result.stage = "epsilon-run";
    return result;
  }

  if (!control_reachable(sys, q_init, q_fin)) {
    result.answer = Answer::No;
    result.stage = "control-unreachable";
    return result;
  }

  // Stage 1: closed exploration of configuration classes. Conclusive when a
  // witness is found or the class space is exhausted within budget.
  OracleOptions closed;
  closed.max_len = SIZE_MAX;
  closed.max_nodes = opts.closed_search_nodes;
  OracleResult stage1 = brute_force_bcsreach(sys, q_init, q_fin, k, closed);
  result.nodes = stage1.explored;
  if (stage1.answer == Answer::Yes) {
    result.answer = Answer::Yes;
    result.witness = stage1.witness;
    result.certificate = certificate_from_witness(sys, q_init, q_fin, k,
                                                  *stage1.witness, factory);
    result.stage = "closed-search";
    return result;
  }
  if (stage1.answer == Answer::No && stage1.closed) {
    result.answer = Answer::No;
    result.stage = "closed-search";
    return result;
  }

  // Stage 2: complete search over tests and free automata reductions.
  const size_t kappa = static_cast<size_t>(k) + 1;
  FusedSearch fused{sys,   factory, q_init, q_fin, k, kappa,
                    kappa * kappa,  opts,   result.nodes};
  std::vector<std::vector<Op>> md = maximal_dependent_alphabets(sys);

  std::vector<size_t> choice(kappa, 0);
  try {
    for (;;) {
      fused.assignment.clear();
      for (size_t j = 0; j < kappa; ++j) {
        fused.assignment.push_back(md[choice[j]]);
      }
      fused.visited.clear();
      fused.events.clear();
      fused.final_block.assign(fused.n, {});

      std::vector<uint32_t> remaining(fused.n);
      for (size_t i = 0; i < fused.n; ++i) {
        remaining[i] = static_cast<uint32_t>(i);
      }
      std::vector<std::vector<FusedSearch::Constraint>> constraints(fused.n);
      std::vector<int> qs(fused.n + 1, -1);
      qs[0] = static_cast<int>(q_init);
      qs[fused.n] = static_cast<int>(q_fin);

      if (fused.search(std::move(remaining), std::move(constraints),
                       std::move(qs))) {
        TestDescription test;
        test.k = k;
        test.boundary = fused.final_q;
        test.context_alphabets = fused.assignment;
        test.block_alphabets = fused.final_block;
        result.answer = Answer::Yes;
        result.certificate =
            Certificate{std::move(test), fused.assemble_steps()};
        result.witness = witness_from_certificate(sys, q_init, q_fin, k,
                                                  *result.certificate);
        result.stage = "test-search";
        return result;
      }

      // Next context-alphabet assignment.
      size_t j = 0;
      while (j < kappa && ++choice[j] == md.size()) {
        choice[j] = 0;
        ++j;
      }
      if (j == kappa) break;
    }
  } catch (const BudgetError&) {
    result.answer = Answer::Inconclusive;
    result.stage = "budget";
    return result;
  }

  result.answer = Answer::No;
  result.stage = "test-search";
  return result;
}

// ---------------------------------------------------------------------------
// Certificate text format.
// ---------------------------------------------------------------------------

namespace {

std::string ops_to_text(const ValenceSystem& sys, const std::vector<Op>& ops) {
  if (ops.empty()) return ".";
  std::string out;
  for (size_t i = 0; i < ops.size(); ++i) {
    if (i) out += ' ';
    out += ops[i].positive() ? '+' : '-';
    out += sys.graph().name_of(ops[i].symbol);
  }
  return out;
}

std::vector<Op> ops_from_text(const ValenceSystem& sys,
                              const std::string& text) {
  if (text == ".") return {};
  return sorted_ops(parse_word(sys.graph(), text).ops);
}

}  // namespace

std::string certificate_to_text(const ValenceSystem& sys,
                                const Certificate& cert) {
  std::ostringstream out;
  out << "certificate {\n";
  out << "  k: " << cert.test.k << "\n";
  out << "  boundary:";
  for (State q : cert.test.boundary) out << ' ' << sys.name_of(q);
  out << "\n";
  for (size_t j = 0; j < cert.test.context_alphabets.size(); ++j) {
    out << "  context " << j << ": "
        << ops_to_text(sys, cert.test.context_alphabets[j]) << "\n";
  }
  for (size_t i = 0; i < cert.test.block_alphabets.size(); ++i) {
    out << "  block " << i << ": "
        << ops_to_text(sys, cert.test.block_alphabets[i]) << "\n";
  }
  for (const FraStep& s : cert.fra.steps) {
    out << "  step: ";
    switch (s.kind) {
      case FraStep::Kind::Cancel:
        out << "fra1 " << s.pos;
        if (s.witness) {
          out << " " << format_word(sys.graph(), *s.witness);
        }
        break;
      case FraStep::Kind::Swap:
        out << "fra2 " << s.pos;
        break;
      case FraStep::Kind::DropEpsilon:
        out << "fra3 " << s.pos;
        break;
    }
    out << "\n";
  }
  out << "}\n";
  return out.str();
}

Certificate certificate_from_text(const ValenceSystem& sys,
                                  const std::string& text) {
  Certificate cert;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool in_block = false;
  bool have_k = false;
  auto fail = [&](const std::string& msg) -> ParseError {
    return ParseError("certificate: " + msg, lineno, 1);
  };
  std::map<size_t, std::vector<Op>> contexts, blocks;
  while (std::getline(in, line)) {
    ++lineno;
    std::string trimmed = line;
    size_t a = trimmed.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    size_t b = trimmed.find_last_not_of(" \t\r");
    trimmed = trimmed.substr(a, b - a + 1);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    if (!in_block) {
      if (trimmed != "certificate {") throw fail("expected 'certificate {'");
      in_block = true;
      continue;
    }
    if (trimmed == "}") {
      in_block = false;
      continue;
    }
    size_t colon = trimmed.find(':');
    if (colon == std::string::npos) throw fail("expected 'key: value'");
    std::string keyname = trimmed.substr(0, colon);
    std::string value = trimmed.substr(colon + 1);
    std::istringstream kin(keyname);
    std::string kw;
    kin >> kw;
    if (kw == "k") {
      try {
        cert.test.k = std::stoi(value);
      } catch (const std::exception&) {
        throw fail("malformed k");
      }
      have_k = true;
    } else if (kw == "boundary") {
      std::istringstream vin(value);
      std::string name;
      while (vin >> name) cert.test.boundary.push_back(sys.state(name));
    } else if (kw == "context" || kw == "block") {
      size_t idx;
      if (!(kin >> idx)) throw fail("expected an index after '" + kw + "'");
      std::string rest = value;
      size_t c = rest.find_first_not_of(" \t");
      rest = c == std::string::npos ? "." : rest.substr(c);
      (kw == "context" ? contexts : blocks)[idx] = ops_from_text(sys, rest);
    } else if (kw == "step") {
      std::istringstream vin(value);
      std::string kind;
      uint32_t pos;
      if (!(vin >> kind >> pos)) throw fail("malformed step");
      FraStep step;
      step.pos = pos;
      if (kind == "fra1") {
        step.kind = FraStep::Kind::Cancel;
        std::string restword;
        std::getline(vin, restword);
        size_t c = restword.find_first_not_of(" \t");
        if (c != std::string::npos) {
          step.witness = parse_word(sys.graph(), restword.substr(c));
        }
      } else if (kind == "fra2") {
        step.kind = FraStep::Kind::Swap;
      } else if (kind == "fra3") {
        step.kind = FraStep::Kind::DropEpsilon;
      } else {
        throw fail("unknown step kind '" + kind + "'");
      }
      cert.fra.steps.push_back(std::move(step));
    } else {
      throw fail("unknown key '" + kw + "'");
    }
  }
  if (in_block) throw fail("unterminated certificate block");
  if (!have_k || cert.test.k < 0) throw fail("missing or malformed k");
  cert.test.context_alphabets.resize(cert.test.kappa());
  for (auto& [idx, ops] : contexts) {
    if (idx >= cert.test.context_alphabets.size()) {
      throw fail("context index out of range");
    }
    cert.test.context_alphabets[idx] = std::move(ops);
  }
  cert.test.block_alphabets.resize(cert.test.slots());
  for (auto& [idx, ops] : blocks) {
    if (idx >= cert.test.block_alphabets.size()) {
      throw fail("block index out of range");
    }
    cert.test.block_alphabets[idx] = std::move(ops);
  }
  return cert;
}

}  // namespace bcs

#include "bcs/rewriting.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

#include "bcs/errors.hpp"

namespace bcs {

namespace {

// Positions x < y cancel if they carry opposite polarities of one symbol
// (negative-first needs a self-loop) and everything strictly between is
// independent of that symbol.
bool cancellable_pair(const StorageGraph& g, const Word& w, size_t x,
                      size_t y) {
  const Op& a = w[x];
  const Op& b = w[y];
  if (a.symbol != b.symbol) return false;
  Symbol o = a.symbol;
  if (a.positive() && b.negative()) {
    // ok
  } else if (a.negative() && b.positive() && g.self_looped(o)) {
    // ok
  } else {
    return false;
  }
  for (size_t z = x + 1; z < y; ++z) {
    if (!g.independent(w[z].symbol, o)) return false;
  }
  return true;
}

// One leftmost cancellation step; reports the removed positions.
bool reduce_step(const StorageGraph& g, const Word& w, size_t& out_x,
                 size_t& out_y) {
  for (size_t x = 0; x + 1 < w.size(); ++x) {
    for (size_t y = x + 1; y < w.size(); ++y) {
      if (cancellable_pair(g, w, x, y)) {
        out_x = x;
        out_y = y;
        return true;
      }
    }
  }
  return false;
}

Word erase_two(const Word& w, size_t x, size_t y) {
  Word r;
  r.ops.reserve(w.size() - 2);
  for (size_t i = 0; i < w.size(); ++i) {
    if (i != x && i != y) r.ops.push_back(w[i]);
  }
  return r;
}

}  // namespace

Word reduce_to_irreducible(const StorageGraph& g, const Word& w) {
  Word cur = w;
  size_t x, y;
  while (reduce_step(g, cur, x, y)) {
    cur = erase_two(cur, x, y);
  }
  return cur;
}

std::optional<std::vector<size_t>> reduction_pairing(const StorageGraph& g,
                                                     const Word& w) {
  Word cur = w;
  std::vector<size_t> origin(w.size());
  for (size_t i = 0; i < w.size(); ++i) origin[i] = i;
  std::vector<size_t> partner(w.size(), SIZE_MAX);

  size_t x, y;
  while (reduce_step(g, cur, x, y)) {
    partner[origin[x]] = origin[y];
    partner[origin[y]] = origin[x];
    cur = erase_two(cur, x, y);
    origin.erase(origin.begin() + y);
    origin.erase(origin.begin() + x);
  }
  if (!cur.empty()) return std::nullopt;
  return partner;
}

bool is_identity(const StorageGraph& g, const Word& w) {
  return reduce_to_irreducible(g, w).empty();
}

bool rewrite_oracle(const StorageGraph& g, const Word& w,
                    const OracleLimits& limits) {
  if (w.size() > limits.max_word_len) {
    throw BudgetError("rewrite_oracle: word length " +
                      std::to_string(w.size()) + " exceeds bound " +
                      std::to_string(limits.max_word_len));
  }
  if (w.size() % 2 != 0) return false;

  std::unordered_set<Word, WordHash> seen;
  std::deque<Word> queue;
  seen.insert(w);
  queue.push_back(w);
  while (!queue.empty()) {
    Word cur = std::move(queue.front());
    queue.pop_front();
    if (cur.empty()) return true;

    auto push = [&](Word next) {
      if (seen.size() >= limits.max_memo_entries) {
        throw BudgetError("rewrite_oracle: memo table exceeds " +
                          std::to_string(limits.max_memo_entries) +
                          " entries");
      }
      if (seen.insert(next).second) queue.push_back(std::move(next));
    };

    for (size_t i = 0; i + 1 < cur.size(); ++i) {
      const Op& a = cur[i];
      const Op& b = cur[i + 1];
      // (R1) and (R2)
      if (a.symbol == b.symbol &&
          ((a.positive() && b.negative()) ||
           (a.negative() && b.positive() && g.self_looped(a.symbol)))) {
        push(erase_two(cur, i, i + 1));
      }
      // (R3)
      if (a.symbol != b.symbol && independent(g, a, b)) {
        Word next = cur;
        std::swap(next.ops[i], next.ops[i + 1]);
        push(std::move(next));
      }
    }
  }
  return false;
}

bool is_right_invertible(const StorageGraph& g, const Word& w) {
  Word nf = reduce_to_irreducible(g, w);
  for (const Op& o : nf.ops) {
    if (o.negative() && !g.self_looped(o.symbol)) return false;
  }
  return true;
}

std::optional<Word> syntactic_inverse_word(const StorageGraph& g,
                                           const Word& w) {
  for (const Op& o : w.ops) {
    if (o.negative() && !g.self_looped(o.symbol)) return std::nullopt;
  }
  Word r;
  r.ops.reserve(w.size());
  for (auto it = w.ops.rbegin(); it != w.ops.rend(); ++it) {
    r.ops.push_back(it->inverse());
  }
  return r;
}

void ContextTracker::append(const StorageGraph& g, Op o) {
  if (switches == -1) {
    switches = 0;
    current_symbols = {o.symbol};
    return;
  }
  for (Symbol s : current_symbols) {
    if (s != o.symbol && g.independent(s, o.symbol)) {
      ++switches;
      current_symbols = {o.symbol};
      return;
    }
  }
  auto it = std::lower_bound(current_symbols.begin(), current_symbols.end(),
                             o.symbol);
  if (it == current_symbols.end() || *it != o.symbol) {
    current_symbols.insert(it, o.symbol);
  }
}

std::vector<Word> context_decomposition(const StorageGraph& g, const Word& w) {
  if (w.empty()) {
    throw InvalidArgumentError(
        "context_decomposition: the empty word has no decomposition");
  }
  std::vector<Word> contexts;
  Word cur;
  std::vector<Symbol> syms;
  auto breaks = [&](Symbol s) {
    for (Symbol t : syms) {
      if (t != s && g.independent(t, s)) return true;
    }
    return false;
  };
  for (const Op& o : w.ops) {
    if (!cur.empty() && breaks(o.symbol)) {
      contexts.push_back(std::move(cur));
      cur = Word();
      syms.clear();
    }
    cur.append(o);
    if (std::find(syms.begin(), syms.end(), o.symbol) == syms.end()) {
      syms.push_back(o.symbol);
    }
  }
  contexts.push_back(std::move(cur));
  return contexts;
}

int context_switches(const StorageGraph& g, const Word& w) {
  if (w.empty()) return -1;
  return static_cast<int>(context_decomposition(g, w).size()) - 1;
}

namespace {

struct SeqHash {
  size_t operator()(const std::vector<uint32_t>& v) const {
    size_t h = 1469598103934665603ull;
    for (uint32_t x : v) {
      h ^= x;
      h *= 1099511628211ull;
    }
    return h;
  }
};

struct FreeReductionSearch {
  const StorageGraph& g;
  const std::vector<Word>& words;  // referenced by index
  const OracleLimits& limits;
  std::unordered_set<std::vector<uint32_t>, SeqHash> visited;

  bool run(std::vector<uint32_t> seq) {
    if (seq.empty()) return true;
    if (visited.size() >= limits.max_memo_entries) {
      throw BudgetError("is_freely_reducible: memo table exceeds " +
                        std::to_string(limits.max_memo_entries) + " entries");
    }
    if (!visited.insert(seq).second) return false;
    for (size_t i = 0; i < seq.size(); ++i) {
      if (is_identity(g, words[seq[i]])) {
        std::vector<uint32_t> next = seq;
        next.erase(next.begin() + i);
        if (run(std::move(next))) return true;
      }
    }
    for (size_t i = 0; i + 1 < seq.size(); ++i) {
      const Word& u = words[seq[i]];
      const Word& v = words[seq[i + 1]];
      if (is_identity(g, u.concat(v))) {
        std::vector<uint32_t> next = seq;
        next.erase(next.begin() + i, next.begin() + i + 2);
        if (run(std::move(next))) return true;
      }
      if (words_independent(g, u, v)) {
        std::vector<uint32_t> next = seq;
        std::swap(next[i], next[i + 1]);
        if (run(std::move(next))) return true;
      }
    }
    return false;
  }
};

}  // namespace

bool is_freely_reducible(const StorageGraph& g, const std::vector<Word>& seq,
                         const OracleLimits& limits) {
  size_t total = 0;
  for (const Word& w : seq) total += w.size();
  if (total > limits.max_word_len) {
    throw BudgetError("is_freely_reducible: total length " +
                      std::to_string(total) + " exceeds bound " +
                      std::to_string(limits.max_word_len));
  }
  std::vector<uint32_t> ids(seq.size());
  for (size_t i = 0; i < seq.size(); ++i) ids[i] = static_cast<uint32_t>(i);
  FreeReductionSearch search{g, seq, limits, {}};
  return search.run(std::move(ids));
}

}  // namespace bcs

#include "bcs/word.hpp"

#include <algorithm>
#include <sstream>

#include "bcs/errors.hpp"

namespace bcs {

std::vector<Symbol> Word::symbols() const {
  std::vector<Symbol> out;
  for (const Op& o : ops) {
    if (std::find(out.begin(), out.end(), o.symbol) == out.end()) {
      out.push_back(o.symbol);
    }
  }
  return out;
}

std::string format_word(const StorageGraph& g, const Word& w) {
  if (w.empty()) return "eps";
  std::string out;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i > 0) out += ' ';
    out += w[i].positive() ? '+' : '-';
    out += g.name_of(w[i].symbol);
  }
  return out;
}

Word parse_word(const StorageGraph& g, const std::string& text) {
  Word w;
  std::istringstream in(text);
  std::string tok;
  bool saw_eps = false;
  while (in >> tok) {
    if (tok == "eps") {
      saw_eps = true;
      continue;
    }
    if (tok.size() < 2 || (tok[0] != '+' && tok[0] != '-')) {
      throw InvalidArgumentError("malformed operation token '" + tok +
                                 "': expected +sym, -sym or eps");
    }
    Symbol s = g.symbol(tok.substr(1));
    w.append(tok[0] == '+' ? pos(s) : neg(s));
  }
  if (saw_eps && !w.empty()) {
    throw InvalidArgumentError("'eps' cannot be mixed with operation tokens");
  }
  return w;
}

bool words_independent(const StorageGraph& g, const Word& u, const Word& v) {
  for (const Op& a : u.ops) {
    for (const Op& b : v.ops) {
      if (!independent(g, a, b)) return false;
    }
  }
  return true;
}

}  // namespace bcs

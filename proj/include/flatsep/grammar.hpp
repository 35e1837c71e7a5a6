// Context-free grammars: representation, text format, Chomsky normal form,
// CYK membership, bounded language enumeration, and derivation sampling.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "flatsep/error.hpp"
#include "flatsep/word.hpp"

namespace flatsep {

/// One item on the right-hand side of a production: either a terminal symbol
/// or a reference to a nonterminal.
struct RhsSymbol {
  bool is_terminal = false;
  std::string name;

  bool operator==(const RhsSymbol& o) const {
    return is_terminal == o.is_terminal && name == o.name;
  }
  bool operator<(const RhsSymbol& o) const {
    return std::tie(is_terminal, name) < std::tie(o.is_terminal, o.name);
  }
};

inline RhsSymbol terminal_sym(std::string name) { return {true, std::move(name)}; }
inline RhsSymbol nonterminal_sym(std::string name) { return {false, std::move(name)}; }

struct Production {
  std::string lhs;
  std::vector<RhsSymbol> rhs;  // empty = epsilon production

  bool operator==(const Production& o) const { return lhs == o.lhs && rhs == o.rhs; }
  bool operator<(const Production& o) const {
    return std::tie(lhs, rhs) < std::tie(o.lhs, o.rhs);
  }
};

/// A context-free grammar.  Invariants: `start` is in `nonterminals`, every
/// nonterminal referenced on a right-hand side is in `nonterminals`, and
/// `terminals` lists every terminal used (in order of first appearance).
struct Cfg {
  std::vector<std::string> nonterminals;
  std::vector<Symbol> terminals;
  std::vector<Production> productions;
  std::string start;

  bool has_nonterminal(const std::string& name) const {
    return std::find(nonterminals.begin(), nonterminals.end(), name) != nonterminals.end();
  }
};

namespace detail {

/// Strips a '#'-to-end-of-line comment, ignoring '#' inside quoted terminals.
inline std::string strip_comment_quoted(const std::string& line) {
  bool in_quote = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\'') in_quote = !in_quote;
    else if (line[i] == '#' && !in_quote) return line.substr(0, i);
  }
  return line;
}

inline std::string fresh_name(std::set<std::string>& used, const std::string& base) {
  std::string name = base;
  int n = 2;
  while (used.count(name)) name = base + "." + std::to_string(n++);
  used.insert(name);
  return name;
}

/// Recomputes the terminal list of a grammar in first-appearance order.
inline void recollect_terminals(Cfg& g) {
  g.terminals.clear();
  for (const Production& p : g.productions)
    for (const RhsSymbol& s : p.rhs)
      if (s.is_terminal &&
          std::find(g.terminals.begin(), g.terminals.end(), s.name) == g.terminals.end())
        g.terminals.push_back(s.name);
}

}  // namespace detail

/// Parses the grammar text format:
///
///   start S
///   S -> A B | 'a'
///   A -> < A > |        # two alternatives, the second is the empty word
///   B -> 'b'
///
/// Quoted tokens are terminals; bare '<' and '>' are the structural bracket
/// terminals; every other bare token is a nonterminal and must appear as a
/// left-hand side (or be the start symbol).  '#' starts a comment except
/// inside quotes.  Duplicate productions are dropped.
inline Cfg parse_grammar(const std::string& text) {
  Cfg g;
  bool saw_start = false;
  std::vector<std::pair<std::string, std::vector<std::vector<std::string>>>> raw_prods;

  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string stripped = detail::strip_comment_quoted(line);
    std::istringstream ls(stripped);
    std::vector<std::string> toks;
    std::string t;
    while (ls >> t) toks.push_back(t);
    if (toks.empty()) continue;
    if (toks[0] == "start") {
      if (saw_start) throw Error(ErrorKind::Parse, "duplicate 'start' line");
      if (toks.size() != 2) throw Error(ErrorKind::Parse, "'start' expects one nonterminal");
      saw_start = true;
      g.start = toks[1];
      continue;
    }
    if (toks.size() < 2 || toks[1] != "->")
      throw Error(ErrorKind::Parse, "production lines have the form 'Name -> ...'");
    const std::string& lhs = toks[0];
    if (lhs.find('\'') != std::string::npos || lhs == "<" || lhs == ">" || lhs == "|")
      throw Error(ErrorKind::Parse, "invalid nonterminal name '" + lhs + "'");
    std::vector<std::vector<std::string>> alts(1);
    for (std::size_t i = 2; i < toks.size(); ++i) {
      if (toks[i] == "|") alts.emplace_back();
      else alts.back().push_back(toks[i]);
    }
    raw_prods.emplace_back(lhs, std::move(alts));
  }
  if (!saw_start) throw Error(ErrorKind::Parse, "missing 'start' line");

  // Nonterminal names: the start symbol first, then left-hand sides in order.
  g.nonterminals.push_back(g.start);
  for (const auto& [lhs, alts] : raw_prods)
    if (!g.has_nonterminal(lhs)) g.nonterminals.push_back(lhs);

  std::set<Production> seen;
  for (const auto& [lhs, alts] : raw_prods) {
    for (const auto& alt : alts) {
      Production p;
      p.lhs = lhs;
      for (const std::string& tok : alt) {
        if (tok.size() >= 2 && tok.front() == '\'' && tok.back() == '\'') {
          std::string inner = tok.substr(1, tok.size() - 2);
          if (inner.empty() || inner.find('\'') != std::string::npos)
            throw Error(ErrorKind::Parse, "invalid terminal token " + tok);
          p.rhs.push_back(terminal_sym(inner));
        } else if (tok == "<" || tok == ">") {
          p.rhs.push_back(terminal_sym(tok));
        } else if (tok.find('\'') != std::string::npos) {
          throw Error(ErrorKind::Parse, "invalid token " + tok);
        } else {
          p.rhs.push_back(nonterminal_sym(tok));
        }
      }
      if (seen.insert(p).second) g.productions.push_back(std::move(p));
    }
  }

  for (const Production& p : g.productions)
    for (const RhsSymbol& s : p.rhs)
      if (!s.is_terminal && !g.has_nonterminal(s.name))
        throw Error(ErrorKind::Parse, "unknown nonterminal '" + s.name + "'");

  detail::recollect_terminals(g);
  return g;
}

/// Serializes a grammar in the format accepted by parse_grammar, grouping the
/// alternatives of each nonterminal on one line.
inline std::string print_grammar(const Cfg& g) {
  std::ostringstream out;
  out << "start " << g.start << "\n";
  for (const std::string& nt : g.nonterminals) {
    bool first = true;
    for (const Production& p : g.productions) {
      if (p.lhs != nt) continue;
      out << (first ? nt + " ->" : " |");
      first = false;
      for (const RhsSymbol& s : p.rhs) {
        if (s.is_terminal && !is_structural(s.name)) out << " '" << s.name << "'";
        else out << ' ' << s.name;
      }
    }
    if (!first) out << "\n";
  }
  return out.str();
}

/// A grammar in Chomsky normal form whose language contains no word of
/// length 0 or 1: every production is N -> 'a' or N -> A B, and there is no
/// terminal production for the start symbol.
struct CnfCfg {
  Cfg g;
};

/// Validates the CnfCfg shape.  Throws NotCnf on a malformed production and
/// ShortWordsAccepted if the start symbol has a terminal production (which
/// would put a one-letter word in the language).
inline CnfCfg as_cnf(const Cfg& g) {
  for (const Production& p : g.productions) {
    bool term_shape = p.rhs.size() == 1 && p.rhs[0].is_terminal;
    bool bin_shape = p.rhs.size() == 2 && !p.rhs[0].is_terminal && !p.rhs[1].is_terminal;
    if (!term_shape && !bin_shape)
      throw Error(ErrorKind::NotCnf, "production for '" + p.lhs + "' is not in normal form");
    if (term_shape && p.lhs == g.start)
      throw Error(ErrorKind::ShortWordsAccepted,
                  "start symbol derives the one-letter word '" + p.rhs[0].name + "'");
  }
  return CnfCfg{g};
}

/// Converts a grammar to Chomsky normal form (fresh names get a "_t." or
/// "_b" prefix, with numeric suffixes on clashes).  The steps are the
/// classical TERM, BIN, DEL, UNIT transformations followed by removal of
/// non-generating and unreachable nonterminals.  Throws ShortWordsAccepted
/// if the language contains the empty word or a one-letter word, since the
/// normal form here is required to exclude both.
inline CnfCfg to_cnf(const Cfg& input) {
  Cfg g = input;
  std::set<std::string> used(g.nonterminals.begin(), g.nonterminals.end());

  // TERM: replace terminals inside long right-hand sides by fresh wrappers.
  {
    std::map<std::string, std::string> wrapper;  // terminal -> nonterminal
    std::vector<Production> extra;
    for (Production& p : g.productions) {
      if (p.rhs.size() < 2) continue;
      for (RhsSymbol& s : p.rhs) {
        if (!s.is_terminal) continue;
        auto it = wrapper.find(s.name);
        if (it == wrapper.end()) {
          std::string fresh = detail::fresh_name(used, "_t." + s.name);
          g.nonterminals.push_back(fresh);
          extra.push_back({fresh, {terminal_sym(s.name)}});
          it = wrapper.emplace(s.name, fresh).first;
        }
        s = nonterminal_sym(it->second);
      }
    }
    g.productions.insert(g.productions.end(), extra.begin(), extra.end());
  }

  // BIN: split right-hand sides longer than two into binary chains.
  {
    std::vector<Production> out;
    std::size_t chain = 0;
    for (const Production& p : g.productions) {
      if (p.rhs.size() <= 2) {
        out.push_back(p);
        continue;
      }
      std::string prev = p.lhs;
      std::vector<RhsSymbol> rest = p.rhs;
      std::size_t pos = 1;
      while (rest.size() > 2) {
        std::string fresh =
            detail::fresh_name(used, "_b" + std::to_string(chain) + "." + std::to_string(pos++));
        g.nonterminals.push_back(fresh);
        out.push_back({prev, {rest[0], nonterminal_sym(fresh)}});
        rest.erase(rest.begin());
        prev = fresh;
      }
      out.push_back({prev, rest});
      ++chain;
    }
    g.productions = std::move(out);
  }

  // DEL: remove epsilon productions.
  {
    std::set<std::string> nullable;
    bool changed = true;
    while (changed) {
      changed = false;
      for (const Production& p : g.productions) {
        if (nullable.count(p.lhs)) continue;
        bool all = true;
        for (const RhsSymbol& s : p.rhs)
          if (s.is_terminal || !nullable.count(s.name)) { all = false; break; }
        if (all) {
          nullable.insert(p.lhs);
          changed = true;
        }
      }
    }
    if (nullable.count(g.start))
      throw Error(ErrorKind::ShortWordsAccepted, "the empty word is derivable");
    std::set<Production> out;
    for (const Production& p : g.productions) {
      // Each nullable occurrence may stay or go; right-hand sides have at
      // most two items here, so enumerate the (at most four) variants.
      std::vector<std::vector<RhsSymbol>> variants{{}};
      for (const RhsSymbol& s : p.rhs) {
        std::vector<std::vector<RhsSymbol>> next;
        for (const auto& v : variants) {
          auto with = v;
          with.push_back(s);
          next.push_back(with);
          if (!s.is_terminal && nullable.count(s.name)) next.push_back(v);
        }
        variants = std::move(next);
      }
      for (auto& v : variants)
        if (!v.empty()) out.insert({p.lhs, v});
    }
    g.productions.assign(out.begin(), out.end());
  }

  // UNIT: eliminate nonterminal-to-nonterminal chain productions.
  {
    std::map<std::string, std::set<std::string>> reach;  // A -> {B : A =>* B by units}
    for (const std::string& nt : g.nonterminals) reach[nt].insert(nt);
    bool changed = true;
    while (changed) {
      changed = false;
      for (const Production& p : g.productions) {
        if (p.rhs.size() != 1 || p.rhs[0].is_terminal) continue;
        for (auto& [a, set] : reach)
          if (set.count(p.lhs) && set.insert(p.rhs[0].name).second) changed = true;
      }
    }
    std::set<Production> out;
    for (const auto& [a, set] : reach)
      for (const std::string& b : set)
        for (const Production& p : g.productions) {
          if (p.lhs != b) continue;
          if (p.rhs.size() == 1 && !p.rhs[0].is_terminal) continue;
          out.insert({a, p.rhs});
        }
    g.productions.assign(out.begin(), out.end());
  }

  // Prune nonterminals that generate nothing or are unreachable.
  {
    std::set<std::string> generating;
    bool changed = true;
    while (changed) {
      changed = false;
      for (const Production& p : g.productions) {
        if (generating.count(p.lhs)) continue;
        bool all = true;
        for (const RhsSymbol& s : p.rhs)
          if (!s.is_terminal && !generating.count(s.name)) { all = false; break; }
        if (all) {
          generating.insert(p.lhs);
          changed = true;
        }
      }
    }
    std::set<std::string> reachable{g.start};
    changed = true;
    while (changed) {
      changed = false;
      for (const Production& p : g.productions) {
        if (!reachable.count(p.lhs) || !generating.count(p.lhs)) continue;
        bool all = true;
        for (const RhsSymbol& s : p.rhs)
          if (!s.is_terminal && !generating.count(s.name)) { all = false; break; }
        if (!all) continue;
        for (const RhsSymbol& s : p.rhs)
          if (!s.is_terminal && reachable.insert(s.name).second) changed = true;
      }
    }
    auto keep = [&](const std::string& nt) {
      return nt == g.start || (generating.count(nt) && reachable.count(nt));
    };
    std::vector<Production> prods;
    for (const Production& p : g.productions) {
      if (!keep(p.lhs)) continue;
      bool ok = generating.count(p.lhs) > 0;
      for (const RhsSymbol& s : p.rhs)
        if (!s.is_terminal && !keep(s.name)) ok = false;
      if (ok) prods.push_back(p);
    }
    g.productions = std::move(prods);
    std::vector<std::string> nts;
    for (const std::string& nt : g.nonterminals)
      if (keep(nt)) nts.push_back(nt);
    g.nonterminals = std::move(nts);
  }

  detail::recollect_terminals(g);
  return as_cnf(g);
}

/// CYK membership for a normal-form grammar.  The empty word is never a
/// member (the normal form excludes it).  Throws UnknownSymbol if the word
/// uses a symbol outside the grammar's terminal alphabet.
inline bool cyk_member(const CnfCfg& cnf, const Word& w) {
  const Cfg& g = cnf.g;
  for (const Symbol& s : w)
    if (std::find(g.terminals.begin(), g.terminals.end(), s) == g.terminals.end())
      throw Error(ErrorKind::UnknownSymbol, "symbol '" + s + "' is not a grammar terminal");
  const std::size_t n = w.size();
  if (n == 0) return false;

  std::unordered_map<std::string, std::size_t> nt_index;
  for (std::size_t i = 0; i < g.nonterminals.size(); ++i) nt_index[g.nonterminals[i]] = i;
  const std::size_t m = g.nonterminals.size();

  struct BinRule { std::size_t a, b, c; };
  std::vector<BinRule> bins;
  std::unordered_map<Symbol, std::vector<std::size_t>> terms;
  for (const Production& p : g.productions) {
    if (p.rhs.size() == 1) terms[p.rhs[0].name].push_back(nt_index[p.lhs]);
    else bins.push_back({nt_index[p.lhs], nt_index[p.rhs[0].name], nt_index[p.rhs[1].name]});
  }

  // table[i][len-1][nt]: w[i..i+len) derivable from nt.
  std::vector<std::vector<std::vector<bool>>> table(
      n, std::vector<std::vector<bool>>(n, std::vector<bool>(m, false)));
  for (std::size_t i = 0; i < n; ++i) {
    auto it = terms.find(w[i]);
    if (it == terms.end()) continue;
    for (std::size_t a : it->second) table[i][0][a] = true;
  }
  for (std::size_t len = 2; len <= n; ++len)
    for (std::size_t i = 0; i + len <= n; ++i)
      for (std::size_t split = 1; split < len; ++split)
        for (const BinRule& r : bins)
          if (!table[i][len - 1][r.a] && table[i][split - 1][r.b] &&
              table[i + split][len - split - 1][r.c])
            table[i][len - 1][r.a] = true;
  return table[0][n - 1][nt_index.at(g.start)];
}

/// Guard rails for bounded enumeration.  The length guard protects against
/// accidentally huge bounds; raise it explicitly for longer enumerations.
struct EnumerateLimits {
  std::size_t length_guard = 16;
  std::size_t word_budget = 2000000;  // total words stored across the table
};

/// Enumerates { w in L(g) : |w| <= max_len } exactly, by a fixpoint over the
/// sets of derivable words per nonterminal and length.  Works for arbitrary
/// grammars (epsilon productions and unit cycles included).  Throws
/// BudgetExceeded if max_len exceeds the guard or the table outgrows the
/// word budget.
inline std::set<Word> enumerate_words(const Cfg& g, std::size_t max_len,
                                      const EnumerateLimits& limits = {}) {
  if (max_len > limits.length_guard)
    throw Error(ErrorKind::BudgetExceeded,
                "bound " + std::to_string(max_len) + " exceeds the length guard " +
                    std::to_string(limits.length_guard) + "; raise the guard explicitly");

  std::unordered_map<std::string, std::size_t> nt_index;
  for (std::size_t i = 0; i < g.nonterminals.size(); ++i) nt_index[g.nonterminals[i]] = i;
  // memo[nt][len] = set of derivable words of that length found so far.
  std::vector<std::vector<std::set<Word>>> memo(
      g.nonterminals.size(), std::vector<std::set<Word>>(max_len + 1));
  std::size_t total = 0;

  bool changed = true;
  while (changed) {
    changed = false;
    for (const Production& p : g.productions) {
      // DP across the right-hand side: cur[len] = words of that length
      // derivable from the processed prefix of the rhs.
      std::vector<std::set<Word>> cur(max_len + 1);
      cur[0].insert(Word{});
      for (const RhsSymbol& s : p.rhs) {
        std::vector<std::set<Word>> next(max_len + 1);
        if (s.is_terminal) {
          for (std::size_t l = 0; l + 1 <= max_len; ++l)
            for (const Word& w : cur[l]) {
              Word ext = w;
              ext.push_back(s.name);
              next[l + 1].insert(std::move(ext));
            }
        } else {
          const auto& part = memo[nt_index.at(s.name)];
          for (std::size_t l = 0; l <= max_len; ++l) {
            if (cur[l].empty()) continue;
            for (std::size_t m = 0; l + m <= max_len; ++m)
              for (const Word& a : cur[l])
                for (const Word& b : part[m]) next[l + m].insert(concat(a, b));
          }
        }
        cur = std::move(next);
      }
      auto& target = memo[nt_index.at(p.lhs)];
      for (std::size_t l = 0; l <= max_len; ++l)
        for (const Word& w : cur[l])
          if (target[l].insert(w).second) {
            changed = true;
            if (++total > limits.word_budget)
              throw Error(ErrorKind::BudgetExceeded, "enumeration exceeded the word budget");
          }
    }
  }

  std::set<Word> out;
  const auto& start_sets = memo[nt_index.at(g.start)];
  for (std::size_t l = 0; l <= max_len; ++l)
    out.insert(start_sets[l].begin(), start_sets[l].end());
  return out;
}

/// A derivation tree for a normal-form grammar: leaves apply a terminal
/// production, inner nodes a binary production.
struct DerivationTree {
  std::string nonterminal;
  Symbol terminal;  // meaningful for leaves only
  std::unique_ptr<DerivationTree> left, right;

  bool is_leaf() const { return left == nullptr; }
};

using TreePtr = std::unique_ptr<DerivationTree>;

inline TreePtr leaf(std::string nt, Symbol t) {
  auto node = std::make_unique<DerivationTree>();
  node->nonterminal = std::move(nt);
  node->terminal = std::move(t);
  return node;
}

inline TreePtr node(std::string nt, TreePtr l, TreePtr r) {
  auto n = std::make_unique<DerivationTree>();
  n->nonterminal = std::move(nt);
  n->left = std::move(l);
  n->right = std::move(r);
  return n;
}

inline void yield_into(const DerivationTree& t, Word& out) {
  if (t.is_leaf()) out.push_back(t.terminal);
  else {
    yield_into(*t.left, out);
    yield_into(*t.right, out);
  }
}

inline Word yield_word(const DerivationTree& t) {
  Word w;
  yield_into(t, w);
  return w;
}

inline std::size_t leaf_count(const DerivationTree& t) {
  return t.is_leaf() ? 1 : leaf_count(*t.left) + leaf_count(*t.right);
}

/// True when the tree is a derivation of the grammar from its start symbol:
/// the root is the start and every node applies an existing production.
inline bool derivation_in(const CnfCfg& cnf, const DerivationTree& t) {
  if (t.nonterminal != cnf.g.start) return false;
  std::set<Production> prods(cnf.g.productions.begin(), cnf.g.productions.end());
  std::vector<const DerivationTree*> stack{&t};
  while (!stack.empty()) {
    const DerivationTree* n = stack.back();
    stack.pop_back();
    Production p;
    p.lhs = n->nonterminal;
    if (n->is_leaf()) {
      p.rhs = {terminal_sym(n->terminal)};
    } else {
      p.rhs = {nonterminal_sym(n->left->nonterminal), nonterminal_sym(n->right->nonterminal)};
      stack.push_back(n->left.get());
      stack.push_back(n->right.get());
    }
    if (!prods.count(p)) return false;
  }
  return true;
}

namespace detail {

inline std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  const std::uint64_t cap = UINT64_MAX;
  if (a > cap / b) return cap;
  return a * b;
}

inline std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a + b;
  return s < a ? UINT64_MAX : s;
}

}  // namespace detail

/// Samples a uniformly random derivation tree with at most max_leaves leaves
/// (uniform over derivations up to count saturation at 2^64-1; exact for
/// grammars whose derivation counts fit).  Deterministic for a fixed seed.
/// Throws NoDerivation if the grammar has no derivation that small.
inline TreePtr sample_derivation(const CnfCfg& cnf, std::size_t max_leaves, std::uint64_t seed) {
  const Cfg& g = cnf.g;
  std::unordered_map<std::string, std::size_t> nt_index;
  for (std::size_t i = 0; i < g.nonterminals.size(); ++i) nt_index[g.nonterminals[i]] = i;
  const std::size_t m = g.nonterminals.size();

  // counts[nt][k] = number of derivation trees from nt with exactly k leaves.
  std::vector<std::vector<std::uint64_t>> counts(m, std::vector<std::uint64_t>(max_leaves + 1, 0));
  std::vector<std::vector<const Production*>> term_prods(m), bin_prods(m);
  for (const Production& p : g.productions) {
    std::size_t i = nt_index.at(p.lhs);
    if (p.rhs.size() == 1) term_prods[i].push_back(&p);
    else bin_prods[i].push_back(&p);
  }
  for (std::size_t i = 0; i < m; ++i)
    if (max_leaves >= 1) counts[i][1] = term_prods[i].size();
  for (std::size_t k = 2; k <= max_leaves; ++k)
    for (std::size_t i = 0; i < m; ++i)
      for (const Production* p : bin_prods[i]) {
        std::size_t a = nt_index.at(p->rhs[0].name), b = nt_index.at(p->rhs[1].name);
        for (std::size_t j = 1; j < k; ++j)
          counts[i][k] =
              detail::sat_add(counts[i][k], detail::sat_mul(counts[a][j], counts[b][k - j]));
      }

  const std::size_t start = nt_index.at(g.start);
  std::uint64_t total = 0;
  for (std::size_t k = 1; k <= max_leaves; ++k) total = detail::sat_add(total, counts[start][k]);
  if (total == 0)
    throw Error(ErrorKind::NoDerivation,
                "no derivation with at most " + std::to_string(max_leaves) + " leaves");

  std::mt19937_64 rng(seed);
  auto pick = [&rng](std::uint64_t n) { return rng() % n; };

  // Choose a leaf count for the root weighted by the counts, then descend.
  std::uint64_t r = pick(total);
  std::size_t k_root = 1;
  for (std::size_t k = 1; k <= max_leaves; ++k) {
    if (r < counts[start][k]) { k_root = k; break; }
    r -= counts[start][k];
  }

  // Iterative construction with an explicit work list.
  struct Job { std::size_t nt; std::size_t k; TreePtr* slot; };
  TreePtr root;
  std::vector<Job> jobs{{start, k_root, &root}};
  while (!jobs.empty()) {
    Job job = jobs.back();
    jobs.pop_back();
    if (job.k == 1) {
      const auto& tps = term_prods[job.nt];
      const Production* p = tps[pick(tps.size())];
      *job.slot = leaf(p->lhs, p->rhs[0].name);
      continue;
    }
    std::uint64_t w = pick(counts[job.nt][job.k]);
    const Production* chosen = nullptr;
    std::size_t split = 1;
    for (const Production* p : bin_prods[job.nt]) {
      std::size_t a = nt_index.at(p->rhs[0].name), b = nt_index.at(p->rhs[1].name);
      for (std::size_t j = 1; j < job.k && !chosen; ++j) {
        std::uint64_t ways = detail::sat_mul(counts[a][j], counts[b][job.k - j]);
        if (w < ways) {
          chosen = p;
          split = j;
        } else {
          w -= ways;
        }
      }
      if (chosen) break;
    }
    auto n = std::make_unique<DerivationTree>();
    n->nonterminal = g.nonterminals[job.nt];
    TreePtr* lslot = &n->left;
    TreePtr* rslot = &n->right;
    *job.slot = std::move(n);
    jobs.push_back({nt_index.at(chosen->rhs[0].name), split, lslot});
    jobs.push_back({nt_index.at(chosen->rhs[1].name), job.k - split, rslot});
  }
  return root;
}

}  // namespace flatsep

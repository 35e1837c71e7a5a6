// Bracket-flattened grammars: the normal-form lift that wraps every binary
// production in brackets, plus linear-time membership for the flat shape.
#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "flatsep/error.hpp"
#include "flatsep/grammar.hpp"
#include "flatsep/word.hpp"

namespace flatsep {

/// A grammar in bracket-flattened shape: every production is one of
///   N -> 'a'        (a a base terminal, not a bracket)
///   N -> < >
///   N -> < A B >
struct Bfg {
  Cfg g;
};

/// Validates the bracket-flattened shape; throws BadShape otherwise.
inline Bfg validate_bfg(const Cfg& g) {
  for (const Production& p : g.productions) {
    const auto& r = p.rhs;
    bool terminal_shape =
        r.size() == 1 && r[0].is_terminal && !is_structural(r[0].name);
    bool empty_pair = r.size() == 2 && r[0] == terminal_sym(kOpen) && r[1] == terminal_sym(kClose);
    bool wrapped_pair = r.size() == 4 && r[0] == terminal_sym(kOpen) &&
                        !r[1].is_terminal && !r[2].is_terminal &&
                        r[3] == terminal_sym(kClose);
    if (!terminal_shape && !empty_pair && !wrapped_pair)
      throw Error(ErrorKind::BadShape,
                  "production for '" + p.lhs + "' is not in bracket-flattened shape");
  }
  return Bfg{g};
}

/// A lifted grammar: the flattened image of a normal-form grammar, together
/// with the nonterminal renaming and the designated pumping nonterminal.
struct LiftedBfg {
  Bfg bfg;
  std::map<std::string, std::string> lifted_name;  // source N -> lifted N^
  std::string pump;                                // the bracket-pumping nonterminal
};

/// Lifts a normal-form grammar G to its bracket-flattened form G^:
///   N^ -> 'a'           for every N -> 'a'
///   N^ -> < K^ L^ >     for every N -> K L
///   X^ -> < E X^ > and X^ -> < X^ E > for every nonterminal X
///   E  -> < >  and  E -> < E E >
/// where E is the fresh pumping nonterminal.  Erasing the brackets of L(G^)
/// gives back exactly L(G).  Lifted names carry a '^' suffix so the printed
/// grammar parses back (quotes are reserved for terminals).  Throws
/// AlphabetClash if the source terminals already contain a bracket.
inline LiftedBfg lift_grammar(const CnfCfg& cnf) {
  const Cfg& src = cnf.g;
  for (const Symbol& t : src.terminals)
    if (is_structural(t))
      throw Error(ErrorKind::AlphabetClash, "source terminals already contain '" + t + "'");

  LiftedBfg out;
  Cfg& g = out.bfg.g;
  std::set<std::string> used;
  for (const std::string& nt : src.nonterminals) {
    std::string lifted = nt + "^";
    out.lifted_name[nt] = lifted;
    used.insert(lifted);
  }
  out.pump = detail::fresh_name(used, "E^");

  for (const std::string& nt : src.nonterminals) g.nonterminals.push_back(out.lifted_name[nt]);
  g.nonterminals.push_back(out.pump);
  g.start = out.lifted_name.at(src.start);

  const RhsSymbol open = terminal_sym(kOpen), close = terminal_sym(kClose);
  for (const Production& p : src.productions)
    if (p.rhs.size() == 1)
      g.productions.push_back({out.lifted_name.at(p.lhs), {p.rhs[0]}});
  for (const Production& p : src.productions)
    if (p.rhs.size() == 2)
      g.productions.push_back({out.lifted_name.at(p.lhs),
                               {open, nonterminal_sym(out.lifted_name.at(p.rhs[0].name)),
                                nonterminal_sym(out.lifted_name.at(p.rhs[1].name)), close}});
  for (const std::string& nt : src.nonterminals) {
    const std::string& x = out.lifted_name.at(nt);
    g.productions.push_back({x, {open, nonterminal_sym(out.pump), nonterminal_sym(x), close}});
    g.productions.push_back({x, {open, nonterminal_sym(x), nonterminal_sym(out.pump), close}});
  }
  g.productions.push_back({out.pump, {open, close}});
  g.productions.push_back(
      {out.pump, {open, nonterminal_sym(out.pump), nonterminal_sym(out.pump), close}});

  g.terminals = src.terminals;
  g.terminals.push_back(kOpen);
  g.terminals.push_back(kClose);
  validate_bfg(g);
  return out;
}

/// Linear-time membership for a bracket-flattened grammar.  The word is
/// scanned once; each balanced bracket group and each base terminal is an
/// atom, and the derivable-nonterminal set of a group follows bottom-up from
/// the sets of its inner atoms (0 inner atoms match N -> < >, 2 inner atoms
/// match N -> < A B >, anything else matches nothing).  Equivalent to CYK on
/// the same grammar but usable on very long, deeply nested words.  Throws
/// UnknownSymbol for symbols outside the grammar's terminals.
inline bool bfg_member(const Bfg& bfg, const Word& w) {
  const Cfg& g = bfg.g;
  if (w.empty()) return false;
  std::unordered_map<std::string, std::size_t> nt_index;
  for (std::size_t i = 0; i < g.nonterminals.size(); ++i) nt_index[g.nonterminals[i]] = i;
  const std::size_t m = g.nonterminals.size();

  using Mask = std::vector<bool>;
  std::unordered_map<Symbol, Mask> term_mask;
  Mask empty_pair_mask(m, false);
  struct BinRule { std::size_t a, b, c; };
  std::vector<BinRule> bins;
  for (const Production& p : g.productions) {
    if (p.rhs.size() == 1) {
      auto [it, fresh] = term_mask.emplace(p.rhs[0].name, Mask(m, false));
      (void)fresh;
      it->second[nt_index.at(p.lhs)] = true;
    } else if (p.rhs.size() == 2) {
      empty_pair_mask[nt_index.at(p.lhs)] = true;
    } else {
      bins.push_back({nt_index.at(p.lhs), nt_index.at(p.rhs[1].name), nt_index.at(p.rhs[2].name)});
    }
  }

  // Explicit stack of atom-set lists, one list per open bracket group.
  std::vector<std::vector<Mask>> stack;
  stack.emplace_back();  // top-level atoms
  for (const Symbol& s : w) {
    if (s == kOpen) {
      stack.emplace_back();
    } else if (s == kClose) {
      if (stack.size() == 1) return false;  // unbalanced
      std::vector<Mask> inner = std::move(stack.back());
      stack.pop_back();
      Mask group(m, false);
      if (inner.empty()) {
        group = empty_pair_mask;
      } else if (inner.size() == 2) {
        for (const BinRule& r : bins)
          if (inner[0][r.b] && inner[1][r.c]) group[r.a] = true;
      }
      stack.back().push_back(std::move(group));
    } else {
      if (std::find(g.terminals.begin(), g.terminals.end(), s) == g.terminals.end())
        throw Error(ErrorKind::UnknownSymbol, "symbol '" + s + "' is not a grammar terminal");
      auto it = term_mask.find(s);
      stack.back().push_back(it == term_mask.end() ? Mask(m, false) : it->second);
    }
  }
  if (stack.size() != 1 || stack.back().size() != 1) return false;
  return stack.back()[0][nt_index.at(g.start)];
}

}  // namespace flatsep

// Deterministic single-tape machines, configuration words, the one-step
// rewrite, and the context-free encodings of the step relation used to tie
// separability to halting.
#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "flatsep/error.hpp"
#include "flatsep/grammar.hpp"
#include "flatsep/word.hpp"

namespace flatsep {

struct TmRule {
  std::string state, read;
  std::string next_state, write;
  char direction = 'R';  // 'L' or 'R'
};

/// A deterministic Turing machine.  The tape alphabet is the blank plus
/// every symbol appearing in a rule, in order of first appearance; state
/// names and tape symbols must be disjoint so that configuration words are
/// unambiguous.
struct TuringMachine {
  std::vector<std::string> states;
  std::vector<Symbol> tape;
  Symbol blank;
  std::string initial;
  std::vector<std::string> halting;
  std::vector<TmRule> rules;

  bool is_state(const std::string& tok) const {
    return std::find(states.begin(), states.end(), tok) != states.end();
  }
  bool is_tape(const Symbol& tok) const {
    return std::find(tape.begin(), tape.end(), tok) != tape.end();
  }
  bool is_halting(const std::string& state) const {
    return std::find(halting.begin(), halting.end(), state) != halting.end();
  }
  const TmRule* find_rule(const std::string& state, const Symbol& read) const {
    for (const TmRule& r : rules)
      if (r.state == state && r.read == read) return &r;
    return nullptr;
  }
};

/// Parses the machine text format:
///
///   states q0 q1
///   blank _
///   initial q0
///   halting q1
///   q0 x -> q0 x R
///   q0 _ -> q1 x R
///
/// '#' starts a comment.  Rule lines read "state read -> state write move".
inline TuringMachine parse_tm(const std::string& text) {
  TuringMachine tm;
  bool saw_states = false, saw_blank = false, saw_initial = false, saw_halting = false;

  auto add_tape = [&tm](const Symbol& s) {
    if (tm.is_state(s))
      throw Error(ErrorKind::Parse, "'" + s + "' is both a state and a tape symbol");
    if (!tm.is_tape(s)) tm.tape.push_back(s);
  };

  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string t;
    while (ls >> t) toks.push_back(t);
    if (toks.empty()) continue;
    if (toks[0] == "states") {
      if (saw_states) throw Error(ErrorKind::Parse, "duplicate 'states' line");
      if (toks.size() < 2) throw Error(ErrorKind::Parse, "'states' expects at least one name");
      saw_states = true;
      for (std::size_t i = 1; i < toks.size(); ++i) {
        if (tm.is_state(toks[i]))
          throw Error(ErrorKind::Parse, "duplicate state '" + toks[i] + "'");
        tm.states.push_back(toks[i]);
      }
    } else if (toks[0] == "blank") {
      if (saw_blank) throw Error(ErrorKind::Parse, "duplicate 'blank' line");
      if (toks.size() != 2) throw Error(ErrorKind::Parse, "'blank' expects one symbol");
      saw_blank = true;
      tm.blank = toks[1];
    } else if (toks[0] == "initial") {
      if (saw_initial) throw Error(ErrorKind::Parse, "duplicate 'initial' line");
      if (toks.size() != 2) throw Error(ErrorKind::Parse, "'initial' expects one state");
      saw_initial = true;
      tm.initial = toks[1];
    } else if (toks[0] == "halting") {
      if (saw_halting) throw Error(ErrorKind::Parse, "duplicate 'halting' line");
      saw_halting = true;
      for (std::size_t i = 1; i < toks.size(); ++i) tm.halting.push_back(toks[i]);
    } else {
      if (toks.size() != 6 || toks[2] != "->")
        throw Error(ErrorKind::Parse, "rule lines read 'state read -> state write move'");
      if (!saw_states) throw Error(ErrorKind::Parse, "rules must follow the 'states' line");
      TmRule r{toks[0], toks[1], toks[3], toks[4], toks[5][0]};
      if (toks[5] != "L" && toks[5] != "R")
        throw Error(ErrorKind::Parse, "move must be L or R, got '" + toks[5] + "'");
      if (!tm.is_state(r.state) || !tm.is_state(r.next_state))
        throw Error(ErrorKind::Parse, "rule references an undeclared state");
      if (tm.find_rule(r.state, r.read))
        throw Error(ErrorKind::Parse,
                    "duplicate rule for (" + r.state + ", " + r.read + ")");
      tm.rules.push_back(r);
    }
  }
  if (!saw_states) throw Error(ErrorKind::Parse, "missing 'states' line");
  if (!saw_blank) throw Error(ErrorKind::Parse, "missing 'blank' line");
  if (!saw_initial) throw Error(ErrorKind::Parse, "missing 'initial' line");
  if (!saw_halting) throw Error(ErrorKind::Parse, "missing 'halting' line");

  if (tm.is_state(tm.blank))
    throw Error(ErrorKind::Parse, "'" + tm.blank + "' is both a state and the blank");
  tm.tape.push_back(tm.blank);
  for (std::size_t i = 0; i < tm.rules.size(); ++i) {
    add_tape(tm.rules[i].read);
    add_tape(tm.rules[i].write);
  }
  if (!tm.is_state(tm.initial))
    throw Error(ErrorKind::Parse, "initial state '" + tm.initial + "' is undeclared");
  for (const std::string& h : tm.halting)
    if (!tm.is_state(h)) throw Error(ErrorKind::Parse, "halting state '" + h + "' is undeclared");
  return tm;
}

/// A configuration word split at its unique state marker.  The head scans
/// the first symbol to the right of the marker.
struct ConfigParts {
  Word left;
  std::string state;
  Word right;  // nonempty
};

/// Splits and checks a configuration word: exactly one state marker, the
/// marker is not last, all other tokens are tape symbols.  Throws
/// MalformedConfiguration.
inline ConfigParts validate_configuration(const TuringMachine& tm, const Word& c) {
  ConfigParts parts;
  bool seen_marker = false;
  for (const Symbol& s : c) {
    if (tm.is_state(s)) {
      if (seen_marker)
        throw Error(ErrorKind::MalformedConfiguration, "more than one state marker");
      seen_marker = true;
      parts.state = s;
    } else if (tm.is_tape(s)) {
      (seen_marker ? parts.right : parts.left).push_back(s);
    } else {
      throw Error(ErrorKind::MalformedConfiguration, "unknown symbol '" + s + "'");
    }
  }
  if (!seen_marker) throw Error(ErrorKind::MalformedConfiguration, "no state marker");
  if (parts.right.empty())
    throw Error(ErrorKind::MalformedConfiguration, "state marker must not be last");
  return parts;
}

/// Whether a configuration word additionally keeps at most one cell of blank
/// slack at each end.  Externally supplied configurations (such as a history
/// anchor) are required to be in this normalized form; step outputs may
/// exceed it when a machine writes blanks near the tape ends.
inline bool is_normalized_configuration(const TuringMachine& tm, const Word& c) {
  ConfigParts parts = validate_configuration(tm, c);
  if (parts.left.size() >= 2 && parts.left[0] == tm.blank && parts.left[1] == tm.blank)
    return false;
  const Word& r = parts.right;
  if (r.size() >= 2 && r[r.size() - 1] == tm.blank && r[r.size() - 2] == tm.blank) return false;
  return true;
}

/// Applies one machine step to a configuration word.  Returns the successor
/// configuration, extending the tape with a blank when the head moves past
/// an end, or nullopt when the configuration is halted (halting state, or no
/// rule for the scanned symbol).  Throws MalformedConfiguration on malformed
/// input.
inline std::optional<Word> step(const TuringMachine& tm, const Word& c) {
  ConfigParts parts = validate_configuration(tm, c);
  if (tm.is_halting(parts.state)) return std::nullopt;
  const TmRule* rule = tm.find_rule(parts.state, parts.right[0]);
  if (!rule) return std::nullopt;

  Word out;
  if (rule->direction == 'R') {
    out = parts.left;
    out.push_back(rule->write);
    out.push_back(rule->next_state);
    if (parts.right.size() == 1) out.push_back(tm.blank);
    else out.insert(out.end(), parts.right.begin() + 1, parts.right.end());
  } else {
    if (parts.left.empty()) {
      out.push_back(rule->next_state);
      out.push_back(tm.blank);
      out.push_back(rule->write);
    } else {
      out.insert(out.end(), parts.left.begin(), parts.left.end() - 1);
      out.push_back(rule->next_state);
      out.push_back(parts.left.back());
      out.push_back(rule->write);
    }
    out.insert(out.end(), parts.right.begin() + 1, parts.right.end());
  }
  return out;
}

enum class ReversedSide { First, Second };

namespace detail {

inline void require_separator_free(const TuringMachine& tm) {
  for (const Symbol& s : tm.tape)
    if (s == "#") throw Error(ErrorKind::AlphabetClash, "tape alphabet may not contain '#'");
  for (const std::string& s : tm.states)
    if (s == "#") throw Error(ErrorKind::AlphabetClash, "state names may not contain '#'");
}

/// Prefixes every nonterminal name, leaving terminals untouched.
inline Cfg prefix_nonterminals(const Cfg& g, const std::string& prefix) {
  Cfg out = g;
  out.start = prefix + g.start;
  for (std::string& nt : out.nonterminals) nt = prefix + nt;
  for (Production& p : out.productions) {
    p.lhs = prefix + p.lhs;
    for (RhsSymbol& s : p.rhs)
      if (!s.is_terminal) s.name = prefix + s.name;
  }
  return out;
}

}  // namespace detail

/// Builds a CFG for the one-step pair language of the machine, with the
/// chosen side written reversed:
///   Second:  { u # v^R : v = step(u) }
///   First:   { u^R # v : v = step(u) }
/// where u ranges over all configuration words to which a rule applies.
/// The grammar matches the untouched tape stretch around the head with a
/// palindromic wall over '#', so unequal configuration lengths (the head
/// extending the tape) come out right.  Steps that extend the tape pin the
/// outer stretch on the extended side to empty, so those alternatives hang
/// off the start directly, outside the wrapped family SW.  Throws
/// AlphabetClash if '#' is a tape symbol or state name.
inline Cfg step_pair_grammar(const TuringMachine& tm, ReversedSide side) {
  detail::require_separator_free(tm);
  Cfg g;
  g.start = "S";
  g.nonterminals = {"S", "SW", "W", "V"};
  auto nt = [](const std::string& n) { return nonterminal_sym(n); };
  auto t = [](const Symbol& s) { return terminal_sym(s); };
  const RhsSymbol wall = t("#"), blank = t(tm.blank);

  // The palindromic wall W = { s # s^R } and its nonempty-or-extended form V.
  for (const Symbol& x : tm.tape) g.productions.push_back({"W", {t(x), nt("W"), t(x)}});
  g.productions.push_back({"W", {wall}});
  for (const Symbol& x : tm.tape) g.productions.push_back({"V", {t(x), nt("W"), t(x)}});
  g.productions.push_back({"V", {wall, blank}});

  // The untouched outer tape stretch, applied only to the wrapped family.
  g.productions.push_back({"S", {nt("SW")}});
  for (const Symbol& x : tm.tape) g.productions.push_back({"SW", {t(x), nt("SW"), t(x)}});

  for (std::size_t i = 0; i < tm.rules.size(); ++i) {
    const TmRule& r = tm.rules[i];
    if (tm.is_halting(r.state)) continue;  // such rules never fire
    const std::string tag = std::to_string(i);
    if (side == ReversedSide::Second) {
      if (r.direction == 'R') {
        // p q a s # s^R q' b p^R  (V covers s # s^R with s nonempty, or # blank)
        const std::string ri = "R" + tag;
        g.nonterminals.push_back(ri);
        g.productions.push_back({"SW", {nt(ri)}});
        g.productions.push_back({ri, {t(r.state), t(r.read), nt("V"), t(r.next_state), t(r.write)}});
      } else {
        // p'' x q a s # s^R b x q' p''^R  and the left-end extension, whose
        // left stretch is exactly empty and so must never be wrapped
        const std::string li = "L" + tag, ki = "K" + tag, ji = "J" + tag;
        g.nonterminals.push_back(li);
        g.nonterminals.push_back(ki);
        g.nonterminals.push_back(ji);
        g.productions.push_back({"SW", {nt(li)}});
        for (const Symbol& x : tm.tape)
          g.productions.push_back({li, {t(x), nt(ki), t(x), t(r.next_state)}});
        g.productions.push_back({ki, {t(r.state), t(r.read), nt("W"), t(r.write)}});
        g.productions.push_back({"S", {nt(ji)}});
        g.productions.push_back(
            {ji, {t(r.state), t(r.read), nt("W"), t(r.write), blank, t(r.next_state)}});
      }
    } else {
      if (r.direction == 'R') {
        // s^R a q p^R # p b q' s ; s empty forces the blank extension and
        // must never be wrapped, s nonempty needs at least one outer wrap.
        const std::string ai = "A" + tag, bi = "B" + tag;
        g.nonterminals.push_back(ai);
        g.nonterminals.push_back(bi);
        g.productions.push_back({"S", {nt(ai)}});
        g.productions.push_back(
            {ai, {t(r.read), t(r.state), nt("W"), t(r.write), t(r.next_state), blank}});
        for (const Symbol& x : tm.tape) g.productions.push_back({"SW", {t(x), nt(bi), t(x)}});
        g.productions.push_back({bi, {t(r.read), t(r.state), nt("W"), t(r.write), t(r.next_state)}});
      } else {
        // s^R a q x p''^R # p'' q' x b s  and the left-end extension
        const std::string ci = "C" + tag, di = "D" + tag;
        g.nonterminals.push_back(ci);
        g.nonterminals.push_back(di);
        g.productions.push_back({"SW", {nt(ci)}});
        for (const Symbol& x : tm.tape)
          g.productions.push_back(
              {ci, {t(r.read), t(r.state), t(x), nt("W"), t(r.next_state), t(x), t(r.write)}});
        g.productions.push_back({"SW", {nt(di)}});
        g.productions.push_back(
            {di, {t(r.read), t(r.state), wall, t(r.next_state), blank, t(r.write)}});
      }
    }
  }
  detail::recollect_terminals(g);
  return g;
}

/// Builds the two computation-history languages for the machine started at
/// the normalized configuration wI.  With P2 the pair grammar u # step(u)^R
/// and P1 the pair grammar u^R # step(u):
///
///   L1 = { p1 # p2 # ... # pk # a^(2k) :  p1 the anchored pair
///          wI # step(wI)^R,  each later pi in P2 }
///   L2 = { w # q1 # ... # q(k-1) # w' # a^k :  w any configuration,
///          each qi in P1,  w' any reversed configuration }
///
/// In an L1 word the trailing 'a' run equals the number of non-tail
/// segments, in an L2 word half of it, and every non-tail segment contains a
/// state marker, so no word lies in both: L1 and L2 are disjoint by shape.
/// A computation history c1, ..., c(2k) contributes
/// c1 # c2^R # ... # c(2k)^R # a^(2k) to L1 and the same prefix with tail
/// a^k to L2, which is how a halting computation would witness overlap if
/// the counters were ignored.  Throws MalformedConfiguration if wI is not
/// normalized.
inline std::pair<Cfg, Cfg> build_history_languages(const TuringMachine& tm, const Word& wI) {
  detail::require_separator_free(tm);
  if (!is_normalized_configuration(tm, wI))
    throw Error(ErrorKind::MalformedConfiguration,
                "initial configuration must keep at most one blank of slack per end");

  auto nt = [](const std::string& n) { return nonterminal_sym(n); };
  auto t = [](const Symbol& s) { return terminal_sym(s); };
  const RhsSymbol wall = t("#"), counter = t("a");

  // L1: anchored odd-to-even pairs with a doubled counter tail.
  Cfg pair2 = detail::prefix_nonterminals(step_pair_grammar(tm, ReversedSide::Second), "P.");
  Cfg l1;
  l1.start = "S1";
  l1.nonterminals = {"S1", "ANCH", "T1"};
  l1.nonterminals.insert(l1.nonterminals.end(), pair2.nonterminals.begin(),
                         pair2.nonterminals.end());
  l1.productions.push_back({"S1", {nt("ANCH"), wall, nt("T1")}});
  if (std::optional<Word> w2 = step(tm, wI)) {
    Production anchor{"ANCH", {}};
    for (const Symbol& s : wI) anchor.rhs.push_back(t(s));
    anchor.rhs.push_back(wall);
    for (auto it = w2->rbegin(); it != w2->rend(); ++it) anchor.rhs.push_back(t(*it));
    l1.productions.push_back(std::move(anchor));
  }
  l1.productions.push_back({"T1", {nt(pair2.start), wall, nt("T1"), counter, counter}});
  l1.productions.push_back({"T1", {counter, counter}});
  l1.productions.insert(l1.productions.end(), pair2.productions.begin(), pair2.productions.end());
  detail::recollect_terminals(l1);

  // L2: free configurations at both ends, even-to-odd pairs between.
  Cfg pair1 = detail::prefix_nonterminals(step_pair_grammar(tm, ReversedSide::First), "Q.");
  Cfg l2;
  l2.start = "S2";
  l2.nonterminals = {"S2", "T2", "C", "CT", "Crev", "M"};
  l2.nonterminals.insert(l2.nonterminals.end(), pair1.nonterminals.begin(),
                         pair1.nonterminals.end());
  l2.productions.push_back({"S2", {nt("C"), wall, nt("T2")}});
  l2.productions.push_back({"T2", {nt(pair1.start), wall, nt("T2"), counter}});
  l2.productions.push_back({"T2", {nt("Crev"), wall, counter}});
  for (const Symbol& x : tm.tape) l2.productions.push_back({"C", {t(x), nt("C")}});
  for (const std::string& q : tm.states) l2.productions.push_back({"C", {t(q), nt("CT")}});
  for (const Symbol& x : tm.tape) {
    l2.productions.push_back({"CT", {t(x), nt("CT")}});
    l2.productions.push_back({"CT", {t(x)}});
    l2.productions.push_back({"Crev", {t(x), nt("Crev")}});
    l2.productions.push_back({"Crev", {t(x), nt("M")}});
  }
  for (const std::string& q : tm.states) {
    l2.productions.push_back({"M", {t(q)}});
    l2.productions.push_back({"M", {t(q), nt("CT")}});
  }
  l2.productions.insert(l2.productions.end(), pair1.productions.begin(), pair1.productions.end());
  detail::recollect_terminals(l2);

  return {l1, l2};
}

}  // namespace flatsep

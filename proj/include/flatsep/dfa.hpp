// Deterministic finite automata: representation, runs, text format, and the
// alphabet-extension constructions used by the separability reduction.
#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "flatsep/error.hpp"
#include "flatsep/word.hpp"

namespace flatsep {

using StateId = std::uint32_t;

/// A complete deterministic finite automaton.  States are 0..state_count-1,
/// and delta is stored row-major: delta[q * alphabet.size() + letter].
struct Dfa {
  std::vector<Symbol> alphabet;   // declared order, duplicate-free
  std::size_t state_count = 0;
  StateId initial = 0;
  std::vector<StateId> accepting; // sorted, duplicate-free
  std::vector<StateId> delta;

  std::size_t letter_index(const Symbol& s) const {
    for (std::size_t i = 0; i < alphabet.size(); ++i)
      if (alphabet[i] == s) return i;
    throw Error(ErrorKind::UnknownSymbol, "symbol '" + s + "' is not in the alphabet");
  }

  StateId next(StateId q, std::size_t letter) const {
    return delta[static_cast<std::size_t>(q) * alphabet.size() + letter];
  }

  bool is_accepting(StateId q) const {
    return std::binary_search(accepting.begin(), accepting.end(), q);
  }
};

/// Translates a word to letter indices (throws UnknownSymbol).  Useful for
/// running the same long word from many states without re-resolving symbols.
inline std::vector<std::size_t> letter_indices(const Dfa& dfa, const Word& w) {
  std::unordered_map<Symbol, std::size_t> pos;
  for (std::size_t i = 0; i < dfa.alphabet.size(); ++i) pos[dfa.alphabet[i]] = i;
  std::vector<std::size_t> out;
  out.reserve(w.size());
  for (const Symbol& s : w) {
    auto it = pos.find(s);
    if (it == pos.end())
      throw Error(ErrorKind::UnknownSymbol, "symbol '" + s + "' is not in the alphabet");
    out.push_back(it->second);
  }
  return out;
}

inline StateId advance(const Dfa& dfa, StateId q, const std::vector<std::size_t>& letters) {
  for (std::size_t l : letters) q = dfa.next(q, l);
  return q;
}

inline StateId advance(const Dfa& dfa, StateId q, const Word& w) {
  return advance(dfa, q, letter_indices(dfa, w));
}

/// Runs the automaton on a word from the initial state.
inline bool run(const Dfa& dfa, const Word& w) {
  return dfa.is_accepting(advance(dfa, dfa.initial, w));
}

namespace detail {

inline std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

inline std::vector<std::string> split_tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> toks;
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

}  // namespace detail

/// Parses the automaton text format:
///
///   states 3
///   alphabet a b
///   initial 0
///   accepting 0 2
///   0 a 1
///   0 b 2
///   ...
///
/// '#' starts a comment.  The transition table must be total: exactly one
/// line per (state, letter) pair.  Throws Error(Parse) on any violation.
inline Dfa parse_dfa(const std::string& text) {
  Dfa dfa;
  bool saw_states = false, saw_alphabet = false, saw_initial = false, saw_accepting = false;
  struct Pending { StateId from; Symbol letter; StateId to; };
  std::vector<Pending> transitions;

  auto parse_state = [&](const std::string& tok) -> StateId {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(tok, &used);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse, "expected a state number, got '" + tok + "'");
    }
    if (used != tok.size())
      throw Error(ErrorKind::Parse, "expected a state number, got '" + tok + "'");
    if (!saw_states || v >= dfa.state_count)
      throw Error(ErrorKind::Parse, "state " + tok + " is out of range");
    return static_cast<StateId>(v);
  };

  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto toks = detail::split_tokens(detail::strip_comment(line));
    if (toks.empty()) continue;
    if (toks[0] == "states") {
      if (saw_states) throw Error(ErrorKind::Parse, "duplicate 'states' line");
      if (toks.size() != 2) throw Error(ErrorKind::Parse, "'states' expects one number");
      saw_states = true;
      try {
        dfa.state_count = std::stoul(toks[1]);
      } catch (const std::exception&) {
        throw Error(ErrorKind::Parse, "'states' expects one number");
      }
      if (dfa.state_count == 0) throw Error(ErrorKind::Parse, "automaton needs at least one state");
    } else if (toks[0] == "alphabet") {
      if (saw_alphabet) throw Error(ErrorKind::Parse, "duplicate 'alphabet' line");
      if (toks.size() < 2) throw Error(ErrorKind::Parse, "'alphabet' expects at least one symbol");
      saw_alphabet = true;
      for (std::size_t i = 1; i < toks.size(); ++i) {
        if (std::find(dfa.alphabet.begin(), dfa.alphabet.end(), toks[i]) != dfa.alphabet.end())
          throw Error(ErrorKind::Parse, "duplicate alphabet symbol '" + toks[i] + "'");
        dfa.alphabet.push_back(toks[i]);
      }
    } else if (toks[0] == "initial") {
      if (saw_initial) throw Error(ErrorKind::Parse, "duplicate 'initial' line");
      if (toks.size() != 2) throw Error(ErrorKind::Parse, "'initial' expects one state");
      saw_initial = true;
      dfa.initial = parse_state(toks[1]);
    } else if (toks[0] == "accepting") {
      if (saw_accepting) throw Error(ErrorKind::Parse, "duplicate 'accepting' line");
      saw_accepting = true;
      for (std::size_t i = 1; i < toks.size(); ++i)
        dfa.accepting.push_back(parse_state(toks[i]));
    } else {
      if (toks.size() != 3)
        throw Error(ErrorKind::Parse, "transition lines have the form 'state symbol state'");
      if (!saw_alphabet) throw Error(ErrorKind::Parse, "transitions must follow the 'alphabet' line");
      StateId from = parse_state(toks[0]);
      if (std::find(dfa.alphabet.begin(), dfa.alphabet.end(), toks[1]) == dfa.alphabet.end())
        throw Error(ErrorKind::Parse, "transition uses unknown symbol '" + toks[1] + "'");
      StateId to = parse_state(toks[2]);
      transitions.push_back({from, toks[1], to});
    }
  }

  if (!saw_states) throw Error(ErrorKind::Parse, "missing 'states' line");
  if (!saw_alphabet) throw Error(ErrorKind::Parse, "missing 'alphabet' line");
  if (!saw_initial) throw Error(ErrorKind::Parse, "missing 'initial' line");
  if (!saw_accepting) throw Error(ErrorKind::Parse, "missing 'accepting' line");

  std::sort(dfa.accepting.begin(), dfa.accepting.end());
  dfa.accepting.erase(std::unique(dfa.accepting.begin(), dfa.accepting.end()), dfa.accepting.end());

  const std::size_t k = dfa.alphabet.size();
  dfa.delta.assign(dfa.state_count * k, 0);
  std::vector<bool> filled(dfa.state_count * k, false);
  for (const auto& t : transitions) {
    std::size_t cell = t.from * k + dfa.letter_index(t.letter);
    if (filled[cell])
      throw Error(ErrorKind::Parse, "duplicate transition for state " + std::to_string(t.from) +
                                        " on '" + t.letter + "'");
    filled[cell] = true;
    dfa.delta[cell] = t.to;
  }
  for (std::size_t cell = 0; cell < filled.size(); ++cell) {
    if (!filled[cell])
      throw Error(ErrorKind::Parse,
                  "missing transition for state " + std::to_string(cell / k) + " on '" +
                      dfa.alphabet[cell % k] + "'");
  }
  return dfa;
}

/// Serializes an automaton in the text format accepted by parse_dfa, with a
/// canonical layout (transitions sorted by state, then by alphabet order).
inline std::string print_dfa(const Dfa& dfa) {
  std::ostringstream out;
  out << "states " << dfa.state_count << "\n";
  out << "alphabet";
  for (const Symbol& s : dfa.alphabet) out << ' ' << s;
  out << "\ninitial " << dfa.initial << "\naccepting";
  for (StateId q : dfa.accepting) out << ' ' << q;
  out << "\n";
  for (StateId q = 0; q < dfa.state_count; ++q)
    for (std::size_t l = 0; l < dfa.alphabet.size(); ++l)
      out << q << ' ' << dfa.alphabet[l] << ' ' << dfa.next(q, l) << "\n";
  return out.str();
}

/// Extends the automaton to the alphabet with brackets added, treating both
/// brackets as no-ops (self-loops).  The recognized language becomes the full
/// inverse projection: exactly the words whose bracket-erasure is accepted.
/// Throws AlphabetClash if the alphabet already contains a bracket.
inline Dfa inverse_projection_dfa(const Dfa& dfa) {
  for (const Symbol& s : dfa.alphabet)
    if (is_structural(s))
      throw Error(ErrorKind::AlphabetClash, "alphabet already contains '" + s + "'");
  Dfa out;
  out.alphabet = dfa.alphabet;
  out.alphabet.push_back(kOpen);
  out.alphabet.push_back(kClose);
  out.state_count = dfa.state_count;
  out.initial = dfa.initial;
  out.accepting = dfa.accepting;
  const std::size_t k0 = dfa.alphabet.size();
  const std::size_t k = out.alphabet.size();
  out.delta.assign(dfa.state_count * k, 0);
  for (StateId q = 0; q < dfa.state_count; ++q) {
    for (std::size_t l = 0; l < k0; ++l) out.delta[q * k + l] = dfa.next(q, l);
    out.delta[q * k + k0] = q;      // '<'
    out.delta[q * k + k0 + 1] = q;  // '>'
  }
  return out;
}

/// Builds the padded automaton for a padding triple (eL, e, eR) over an
/// automaton whose alphabet contains the brackets.  The result reads base
/// symbols only and accepts a nonempty base word t1..tn exactly when the
/// input automaton accepts eL t1 e t2 e ... e tn eR.
///
/// Construction: one fresh copy of the initial state is added (the new
/// initial state); from it each base letter t moves as eL·t moves in the
/// input, from every original state q each t moves as e·t moves, and a state
/// accepts when reading eR from its representative reaches an accepting
/// input state.  Throws EmptyBaseAlphabet if no base symbols remain and
/// UnknownSymbol if the padding words leave the input alphabet.
inline Dfa pad_automaton(const Dfa& dfa, const Word& eL, const Word& e, const Word& eR) {
  // The brackets must be readable even when a padding word happens to be empty.
  (void)dfa.letter_index(kOpen);
  (void)dfa.letter_index(kClose);

  std::vector<Symbol> base;
  std::vector<std::size_t> base_letters;
  for (std::size_t l = 0; l < dfa.alphabet.size(); ++l) {
    if (!is_structural(dfa.alphabet[l])) {
      base.push_back(dfa.alphabet[l]);
      base_letters.push_back(l);
    }
  }
  if (base.empty())
    throw Error(ErrorKind::EmptyBaseAlphabet, "no base symbols besides the brackets");

  const auto eL_idx = letter_indices(dfa, eL);
  const auto e_idx = letter_indices(dfa, e);
  const auto eR_idx = letter_indices(dfa, eR);

  Dfa out;
  out.alphabet = base;
  out.state_count = dfa.state_count + 1;
  const StateId fresh = static_cast<StateId>(dfa.state_count);
  out.initial = fresh;
  const std::size_t k = base.size();
  out.delta.assign(out.state_count * k, 0);
  for (StateId q = 0; q < out.state_count; ++q) {
    const StateId rep = (q == fresh) ? dfa.initial : q;
    const auto& pad = (q == fresh) ? eL_idx : e_idx;
    const StateId mid = advance(dfa, rep, pad);
    for (std::size_t j = 0; j < k; ++j)
      out.delta[q * k + j] = dfa.next(mid, base_letters[j]);
    if (dfa.is_accepting(advance(dfa, rep, eR_idx))) out.accepting.push_back(q);
  }
  std::sort(out.accepting.begin(), out.accepting.end());
  return out;
}

}  // namespace flatsep

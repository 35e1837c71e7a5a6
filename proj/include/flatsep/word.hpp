// Symbols, words, and the structural bracket alphabet.
#pragma once

#include <algorithm>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace flatsep {

/// A symbol is a nonempty printable token without whitespace.  Alphabets may
/// mix single-character letters ("a") with multi-character tokens ("q0").
using Symbol = std::string;

/// A word is a (possibly empty) sequence of symbols.
using Word = std::vector<Symbol>;

/// The structural brackets used by bracket-flattened grammars and paddings.
inline const Symbol kOpen = "<";
inline const Symbol kClose = ">";

inline bool is_structural(const Symbol& s) { return s == kOpen || s == kClose; }

/// Builds a word from one character per symbol: word_from_chars("ab<") ==
/// {"a","b","<"}.  Convenient for single-character alphabets.
inline Word word_from_chars(std::string_view chars) {
  Word w;
  w.reserve(chars.size());
  for (char c : chars) w.emplace_back(1, c);
  return w;
}

/// Builds a word from whitespace-separated tokens: word_from_tokens("q0 _")
/// == {"q0","_"}.  Convenient for multi-character alphabets.
inline Word word_from_tokens(const std::string& text) {
  Word w;
  std::istringstream in(text);
  Symbol tok;
  while (in >> tok) w.push_back(tok);
  return w;
}

/// Renders a word for display: symbols are concatenated when all are single
/// characters, and space-separated otherwise.  The empty word renders as "".
inline std::string format_word(const Word& w) {
  bool all_single = std::all_of(w.begin(), w.end(),
                                [](const Symbol& s) { return s.size() == 1; });
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!all_single && i > 0) out += ' ';
    out += w[i];
  }
  return out;
}

inline Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

/// Appends `count` copies of `part` to `out`.
inline void append_repeated(Word& out, const Word& part, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i)
    out.insert(out.end(), part.begin(), part.end());
}

/// Erases every structural bracket, keeping base symbols in order.
inline Word project(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (const Symbol& s : w)
    if (!is_structural(s)) out.push_back(s);
  return out;
}

/// Bracket balance of a word: +1 per "<", -1 per ">", other symbols ignored.
inline long bracket_balance(const Word& w) {
  long bal = 0;
  for (const Symbol& s : w) {
    if (s == kOpen) ++bal;
    if (s == kClose) --bal;
  }
  return bal;
}

}  // namespace flatsep

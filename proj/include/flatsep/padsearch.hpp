// Bounded search for short padding triples: explore sequences of pumping
// moves on the two branches of a lift derivation, track only the induced
// transition-monoid elements, and stop at the first triple satisfying the
// absorption identities.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "flatsep/dfa.hpp"
#include "flatsep/monoid.hpp"
#include "flatsep/word.hpp"

namespace flatsep {

/// One pumping move applied at the innermost position of a branch.  A Left
/// move wraps the branch as < f [hole] > (rule X' -> < E X' > with the
/// pumping nonterminal expanded to the filler f); a Right move wraps it as
/// < [hole] f > (rule X' -> < X' E >).
struct PumpMove {
  enum class Side { Left, Right };
  Side side = Side::Left;
  Word filler;
};

/// A found triple: the move sequences for the two pumped branches (outermost
/// move first) and the words they induce.  The first branch contributes the
/// inside of eL and the left part of e; the second branch the right part of
/// e and the inside of eR.
struct CandidateTriple {
  std::vector<PumpMove> moves_k, moves_l;
  Word eL, e, eR;
};

/// Words derivable from the pumping nonterminal (E -> < > | < E E >) with at
/// most max_units innermost pairs, ordered by unit count then lexicographically.
inline std::vector<Word> pump_fillers(std::size_t max_units) {
  std::vector<std::vector<Word>> by_units(max_units + 1);
  if (max_units >= 1) by_units[1].push_back(word_from_chars("<>"));
  for (std::size_t n = 2; n <= max_units; ++n) {
    for (std::size_t i = 1; i < n; ++i)
      for (const Word& u : by_units[i])
        for (const Word& v : by_units[n - i]) {
          Word w = word_from_chars("<");
          w.insert(w.end(), u.begin(), u.end());
          w.insert(w.end(), v.begin(), v.end());
          w.push_back(kClose);
          by_units[n].push_back(std::move(w));
        }
    std::sort(by_units[n].begin(), by_units[n].end());
  }
  std::vector<Word> out;
  for (std::size_t n = 1; n <= max_units; ++n)
    out.insert(out.end(), by_units[n].begin(), by_units[n].end());
  return out;
}

/// Searches for a padding triple over the given automaton (whose alphabet
/// must contain both brackets) using at most max_moves pumping moves in
/// total across the two branches and fillers of at most max_filler_units
/// innermost pairs.  States are explored cheapest-total-word-length first
/// (ties in insertion order); two candidate states whose four context
/// actions coincide are merged, so the search runs over the transition
/// monoid rather than over words.  Returns the first triple satisfying all
/// four absorption identities, or nullopt when the bounded space (or the
/// pop budget) is exhausted.
inline std::optional<CandidateTriple> search_padding(const Dfa& dfa, std::size_t max_moves,
                                                     std::size_t max_filler_units = 1,
                                                     std::size_t pop_budget = 200000) {
  const std::vector<Word> fillers = pump_fillers(max_filler_units);

  // Intern monoid elements; ids are assigned in first-seen order.
  std::vector<MonoidElement> elems;
  std::unordered_map<MonoidElement, std::uint32_t, MonoidElementHash> elem_id;
  auto intern = [&](const MonoidElement& m) -> std::uint32_t {
    auto [it, fresh] = elem_id.emplace(m, static_cast<std::uint32_t>(elems.size()));
    if (fresh) elems.push_back(m);
    return it->second;
  };

  const std::uint32_t id_identity = intern(identity_element(dfa.state_count));
  const MonoidElement open_elem = letter_element(dfa, dfa.letter_index(kOpen));
  const MonoidElement close_elem = letter_element(dfa, dfa.letter_index(kClose));
  const std::uint32_t id_open = intern(open_elem);
  const std::uint32_t id_close = intern(close_elem);

  // Per filler: the action of "<"+f (left-context piece) and f+">" (right).
  std::vector<std::uint32_t> left_piece, right_piece;
  for (const Word& f : fillers) {
    const MonoidElement fe = eval_word(dfa, f);
    left_piece.push_back(intern(compose(open_elem, fe)));
    right_piece.push_back(intern(compose(fe, close_elem)));
  }

  auto comp = [&](std::uint32_t x, std::uint32_t y) { return intern(compose(elems[x], elems[y])); };

  struct Node {
    std::uint32_t a, b, c, d;          // actions of lcK, rcK, lcL, rcL
    std::int32_t parent;
    std::int8_t branch;                // 0 = first branch, 1 = second
    std::int8_t side;                  // 0 = Left, 1 = Right
    std::int32_t filler;
    std::uint32_t depth;
    std::uint64_t len;                 // |eL| + |e| + |eR| at this node
  };
  std::vector<Node> nodes;
  nodes.push_back({id_identity, id_identity, id_identity, id_identity, -1, 0, 0, -1, 0, 3});

  using Entry = std::pair<std::uint64_t, std::uint32_t>;  // (len, node index)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;
  queue.push({nodes[0].len, 0});

  std::map<std::array<std::uint32_t, 4>, std::uint32_t> best_depth;

  auto reconstruct = [&](const Node& found) -> CandidateTriple {
    CandidateTriple result;
    std::vector<const Node*> chain;
    for (const Node* n = &found; n->parent >= 0; n = &nodes[n->parent]) chain.push_back(n);
    std::reverse(chain.begin(), chain.end());  // outermost move first
    for (const Node* n : chain) {
      PumpMove m{n->side == 0 ? PumpMove::Side::Left : PumpMove::Side::Right, fillers[n->filler]};
      (n->branch == 0 ? result.moves_k : result.moves_l).push_back(std::move(m));
    }
    auto contexts = [](const std::vector<PumpMove>& moves) {
      Word lc, rc;
      for (const PumpMove& m : moves) {
        if (m.side == PumpMove::Side::Left) {
          lc.push_back(kOpen);
          lc.insert(lc.end(), m.filler.begin(), m.filler.end());
          rc.insert(rc.begin(), kClose);
        } else {
          lc.push_back(kOpen);
          Word tail = m.filler;
          tail.push_back(kClose);
          rc.insert(rc.begin(), tail.begin(), tail.end());
        }
      }
      return std::pair<Word, Word>(lc, rc);
    };
    auto [lcK, rcK] = contexts(result.moves_k);
    auto [lcL, rcL] = contexts(result.moves_l);
    result.eL = concat(word_from_chars("<"), lcK);
    result.e = concat(rcK, lcL);
    result.eR = concat(rcL, word_from_chars(">"));
    return result;
  };

  std::size_t pops = 0;
  while (!queue.empty() && pops < pop_budget) {
    auto [len, idx] = queue.top();
    queue.pop();
    ++pops;
    Node node = nodes[idx];

    std::array<std::uint32_t, 4> key{node.a, node.b, node.c, node.d};
    auto it = best_depth.find(key);
    if (it != best_depth.end() && it->second <= node.depth) continue;
    best_depth[key] = node.depth;

    const std::uint32_t x = comp(id_open, node.a);   // action of eL
    const std::uint32_t y = comp(node.b, node.c);    // action of e
    const std::uint32_t z = comp(node.d, id_close);  // action of eR
    bool pass = comp(x, x) == x && comp(z, z) == z && comp(y, x) == y && comp(z, y) == y;
    if (pass) return reconstruct(node);

    if (node.depth >= max_moves) continue;
    for (std::int8_t branch = 0; branch < 2; ++branch) {
      for (std::int8_t side = 0; side < 2; ++side) {
        for (std::int32_t f = 0; f < static_cast<std::int32_t>(fillers.size()); ++f) {
          Node next = node;
          next.parent = static_cast<std::int32_t>(idx);
          next.branch = branch;
          next.side = side;
          next.filler = f;
          next.depth = node.depth + 1;
          next.len = node.len + 2 + fillers[f].size();
          std::uint32_t& lc = branch == 0 ? next.a : next.c;
          std::uint32_t& rc = branch == 0 ? next.b : next.d;
          if (side == 0) {  // Left: lc <- lc . ("<" f), rc <- ">" . rc
            lc = comp(lc, left_piece[f]);
            rc = comp(id_close, rc);
          } else {  // Right: lc <- lc . "<", rc <- (f ">") . rc
            lc = comp(lc, id_open);
            rc = comp(right_piece[f], rc);
          }
          std::array<std::uint32_t, 4> nkey{next.a, next.b, next.c, next.d};
          auto dit = best_depth.find(nkey);
          if (dit != best_depth.end() && dit->second <= next.depth) continue;
          nodes.push_back(next);
          queue.push({next.len, static_cast<std::uint32_t>(nodes.size() - 1)});
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace flatsep

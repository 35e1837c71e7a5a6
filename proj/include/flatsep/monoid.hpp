// Transition monoids of deterministic automata and idempotent-power
// exponents: the least omega with m^omega = m^(2*omega) for every element.
#pragma once

#include <cstdint>
#include <numeric>
#include <queue>
#include <unordered_map>
#include <vector>

#include "flatsep/dfa.hpp"
#include "flatsep/error.hpp"
#include "flatsep/word.hpp"

namespace flatsep {

/// The action of a word on the state set: map[q] is the state reached from q.
struct MonoidElement {
  std::vector<StateId> map;

  bool operator==(const MonoidElement& other) const { return map == other.map; }
};

struct MonoidElementHash {
  std::size_t operator()(const MonoidElement& m) const {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (StateId q : m.map) {
      h ^= q;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

inline MonoidElement identity_element(std::size_t n) {
  MonoidElement m;
  m.map.resize(n);
  for (std::size_t q = 0; q < n; ++q) m.map[q] = static_cast<StateId>(q);
  return m;
}

/// Composition in word order: compose(a, b) acts as "first a, then b".
inline MonoidElement compose(const MonoidElement& a, const MonoidElement& b) {
  MonoidElement out;
  out.map.resize(a.map.size());
  for (std::size_t q = 0; q < a.map.size(); ++q) out.map[q] = b.map[a.map[q]];
  return out;
}

/// The action of a single letter (by index).
inline MonoidElement letter_element(const Dfa& dfa, std::size_t letter) {
  MonoidElement m;
  m.map.resize(dfa.state_count);
  for (StateId q = 0; q < dfa.state_count; ++q) m.map[q] = dfa.next(q, letter);
  return m;
}

/// The action of a word (throws UnknownSymbol on foreign symbols).
inline MonoidElement eval_word(const Dfa& dfa, const Word& w) {
  MonoidElement m = identity_element(dfa.state_count);
  for (std::size_t l : letter_indices(dfa, w))
    for (std::size_t q = 0; q < m.map.size(); ++q) m.map[q] = dfa.next(m.map[q], l);
  return m;
}

inline MonoidElement power(const MonoidElement& m, std::uint64_t exponent) {
  MonoidElement acc = identity_element(m.map.size());
  MonoidElement base = m;
  while (exponent > 0) {
    if (exponent & 1) acc = compose(acc, base);
    base = compose(base, base);
    exponent >>= 1;
  }
  return acc;
}

/// The full transition monoid, explored breadth-first from the identity.
/// elements[0] is the identity; generator_words[i] is a shortest word whose
/// action is elements[i] (ties broken by alphabet order, so the words come
/// out in shortlex order along the exploration).
struct TransitionMonoid {
  std::vector<MonoidElement> elements;
  std::vector<Word> generator_words;
  std::uint64_t omega = 1;

  std::size_t size() const { return elements.size(); }
};

/// Index of the first exponent at which the power sequence of m becomes
/// periodic, and the period itself.  For a function f on n points these are
/// read off the functional graph: the index is the longest distance from any
/// point to its cycle (at least 1 by convention), the period is the least
/// common multiple of the cycle lengths.
struct IndexPeriod {
  std::uint64_t index = 1;
  std::uint64_t period = 1;
};

inline IndexPeriod index_period(const MonoidElement& m) {
  const std::size_t n = m.map.size();
  // tail[q]: distance from q to the first node on a cycle; cycle nodes get 0.
  std::vector<std::int64_t> tail(n, -1);
  std::vector<std::uint64_t> cycle_lengths;
  std::vector<int> color(n, 0);  // 0 = unseen, 1 = on current path, 2 = done
  std::vector<std::size_t> order(n, 0);
  for (std::size_t start = 0; start < n; ++start) {
    if (color[start] != 0) continue;
    std::vector<std::size_t> path;
    std::size_t cur = start;
    while (color[cur] == 0) {
      color[cur] = 1;
      order[cur] = path.size();
      path.push_back(cur);
      cur = m.map[cur];
    }
    std::size_t settled;  // number of path nodes that lie on a cycle or lead to one
    if (color[cur] == 1) {
      // Found a new cycle: path[order[cur]..] is the cycle.
      std::size_t cstart = order[cur];
      cycle_lengths.push_back(path.size() - cstart);
      for (std::size_t i = cstart; i < path.size(); ++i) tail[path[i]] = 0;
      settled = cstart;
    } else {
      settled = path.size();
    }
    // Nodes before the cycle (or before a previously settled node) form a tail.
    std::int64_t base = (settled == path.size()) ? tail[cur] : 0;
    for (std::size_t i = settled; i-- > 0;) {
      tail[path[i]] = base + static_cast<std::int64_t>(settled - i);
    }
    for (std::size_t node : path) color[node] = 2;
  }
  IndexPeriod out;
  for (std::size_t q = 0; q < n; ++q)
    out.index = std::max(out.index, static_cast<std::uint64_t>(tail[q]));
  for (std::uint64_t len : cycle_lengths) out.period = std::lcm(out.period, len);
  return out;
}

/// Explores every word action reachable from the identity and computes the
/// canonical exponent (see compute_omega).
inline TransitionMonoid transition_monoid(const Dfa& dfa) {
  TransitionMonoid tm;
  std::vector<MonoidElement> letters;
  for (std::size_t l = 0; l < dfa.alphabet.size(); ++l)
    letters.push_back(letter_element(dfa, l));

  std::unordered_map<MonoidElement, std::size_t, MonoidElementHash> seen;
  tm.elements.push_back(identity_element(dfa.state_count));
  tm.generator_words.push_back({});
  seen.emplace(tm.elements[0], 0);
  for (std::size_t i = 0; i < tm.elements.size(); ++i) {
    for (std::size_t l = 0; l < letters.size(); ++l) {
      MonoidElement nxt = compose(tm.elements[i], letters[l]);
      if (seen.emplace(nxt, tm.elements.size()).second) {
        Word w = tm.generator_words[i];
        w.push_back(dfa.alphabet[l]);
        tm.elements.push_back(std::move(nxt));
        tm.generator_words.push_back(std::move(w));
      }
    }
  }

  std::uint64_t max_index = 1, lcm_period = 1;
  for (const MonoidElement& m : tm.elements) {
    IndexPeriod ip = index_period(m);
    max_index = std::max(max_index, ip.index);
    lcm_period = std::lcm(lcm_period, ip.period);
  }
  // The valid exponents are the multiples of lcm_period that are >= max_index;
  // omega is the least one.
  tm.omega = lcm_period * ((max_index + lcm_period - 1) / lcm_period);
  return tm;
}

/// The least exponent k such that m^k = m^(2k) for every element m of the
/// monoid.  Every multiple of a valid exponent is again valid.
inline std::uint64_t compute_omega(const TransitionMonoid& tm) { return tm.omega; }

/// Checks whether a given exponent k satisfies m^k = m^(2k) for every element,
/// using the per-element index and period (k works iff k >= index(m) and
/// period(m) divides k).
inline bool exponent_is_valid(const TransitionMonoid& tm, std::uint64_t k) {
  if (k == 0) return false;
  for (const MonoidElement& m : tm.elements) {
    IndexPeriod ip = index_period(m);
    if (k < ip.index || k % ip.period != 0) return false;
  }
  return true;
}

/// Certifies that |M|! is a valid exponent for a monoid of size |M| without
/// materializing the factorial: for each element, index(m) <= |M| <= |M|! and
/// period(m) <= |M| divides |M|! (checked by reducing the factorial modulo
/// the period as it is built).
inline bool factorial_exponent_certificate(const TransitionMonoid& tm) {
  const std::uint64_t size = tm.size();
  for (const MonoidElement& m : tm.elements) {
    IndexPeriod ip = index_period(m);
    std::uint64_t fact_mod = 1 % ip.period;
    for (std::uint64_t i = 2; i <= size; ++i) fact_mod = (fact_mod * i) % ip.period;
    if (fact_mod != 0) return false;
    // index(m) <= |M|! : compare against the factorial, saturating early.
    std::uint64_t fact = 1;
    bool huge = false;
    for (std::uint64_t i = 2; i <= size && !huge; ++i) {
      if (fact > (1ull << 62) / i) huge = true; else fact *= i;
    }
    if (!huge && ip.index > fact) return false;
  }
  return true;
}

/// Reduces an exponent e >= index to the least exponent with the same power:
/// m^e = m^(index + ((e - index) mod period)).
inline std::uint64_t reduce_exponent(const IndexPeriod& ip, std::uint64_t e) {
  if (e <= ip.index) return e;
  return ip.index + (e - ip.index) % ip.period;
}

/// True when the two words act identically on the automaton's states.
inline bool syntactically_equivalent(const Dfa& dfa, const Word& a, const Word& b) {
  return eval_word(dfa, a) == eval_word(dfa, b);
}

}  // namespace flatsep

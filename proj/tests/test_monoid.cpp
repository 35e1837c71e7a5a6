// Transition monoids and idempotent exponents, cross-checked against a
// brute-force oracle that finds the least k with m^k = m^(2k) by direct
// power-table comparison (no index/period theory involved).
#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "flatsep/dfa.hpp"
#include "flatsep/monoid.hpp"
#include "flatsep/word.hpp"

using namespace flatsep;

namespace {

Dfa random_dfa(std::mt19937_64& rng, std::size_t max_states, std::size_t max_letters) {
  static const std::vector<Symbol> pool = {"a", "b", "c", "d"};
  Dfa d;
  const std::size_t letters = 1 + rng() % max_letters;
  d.alphabet.assign(pool.begin(), pool.begin() + letters);
  d.state_count = 1 + static_cast<StateId>(rng() % max_states);
  d.initial = static_cast<StateId>(rng() % d.state_count);
  d.delta.resize(d.state_count * letters);
  for (auto& to : d.delta) to = static_cast<StateId>(rng() % d.state_count);
  for (StateId q = 0; q < d.state_count; ++q)
    if (rng() % 2) d.accepting.push_back(q);
  return d;
}

MonoidElement naive_power(const MonoidElement& m, std::uint64_t k) {
  MonoidElement acc = identity_element(m.map.size());
  for (std::uint64_t i = 0; i < k; ++i) acc = compose(acc, m);
  return acc;
}

bool exponent_valid_brute(const std::vector<MonoidElement>& elements, std::uint64_t k) {
  for (const MonoidElement& m : elements)
    if (!(naive_power(m, k) == naive_power(m, 2 * k))) return false;
  return true;
}

std::uint64_t omega_brute(const std::vector<MonoidElement>& elements) {
  for (std::uint64_t k = 1;; ++k)
    if (exponent_valid_brute(elements, k)) return k;
}

}  // namespace

TEST_CASE("two hand-computed monoids") {
  // (aa)*: the letter swaps the two states, so the monoid is {identity, swap}
  // and the least self-stabilizing exponent is 2.
  Dfa even;
  even.alphabet = {"a"};
  even.state_count = 2;
  even.initial = 0;
  even.accepting = {0};
  even.delta = {1, 0};
  const TransitionMonoid tm = transition_monoid(even);
  REQUIRE(tm.size() == 2);
  CHECK(tm.elements[0] == identity_element(2));
  CHECK(tm.elements[1].map == std::vector<StateId>{1, 0});
  CHECK(tm.generator_words[0] == Word{});
  CHECK(tm.generator_words[1] == word_from_chars("a"));
  CHECK(compute_omega(tm) == 2);

  // a-then-anything: both letters act idempotently (a collapses to the accept
  // sink, b to the reject sink), so every element is idempotent and omega = 1.
  Dfa prefix;
  prefix.alphabet = {"a", "b"};
  prefix.state_count = 3;
  prefix.initial = 0;
  prefix.accepting = {1};
  prefix.delta = {1, 2, 1, 1, 2, 2};
  const TransitionMonoid band = transition_monoid(prefix);
  CHECK(band.size() == 3);
  CHECK(compute_omega(band) == 1);
}

TEST_CASE("index and period of hand-built maps") {
  auto ip = index_period(identity_element(4));
  CHECK(ip.index == 1);
  CHECK(ip.period == 1);

  ip = index_period(MonoidElement{{1, 0}});  // swap
  CHECK(ip.index == 1);
  CHECK(ip.period == 2);

  ip = index_period(MonoidElement{{0, 0, 0}});  // constant
  CHECK(ip.index == 1);
  CHECK(ip.period == 1);

  ip = index_period(MonoidElement{{1, 2, 2}});  // chain of length 2 into a fixpoint
  CHECK(ip.index == 2);
  CHECK(ip.period == 1);

  ip = index_period(MonoidElement{{1, 2, 3, 1}});  // tail of 1 into a 3-cycle
  CHECK(ip.index == 1);
  CHECK(ip.period == 3);

  // Two disjoint cycles of lengths 2 and 3: period is their lcm.
  ip = index_period(MonoidElement{{1, 0, 3, 4, 2}});
  CHECK(ip.index == 1);
  CHECK(ip.period == 6);

  // Long chain: 0 -> 1 -> 2 -> 3 -> 3.
  ip = index_period(MonoidElement{{1, 2, 3, 3}});
  CHECK(ip.index == 3);
  CHECK(ip.period == 1);
}

TEST_CASE("powers match naive iteration") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    MonoidElement m;
    const std::size_t n = 1 + rng() % 6;
    m.map.resize(n);
    for (auto& v : m.map) v = static_cast<StateId>(rng() % n);
    for (std::uint64_t k = 0; k <= 9; ++k) CHECK(power(m, k) == naive_power(m, k));
  }
}

TEST_CASE("computed omega equals the brute-force least valid exponent") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 150; ++trial) {
    const Dfa d = random_dfa(rng, 5, 3);
    const TransitionMonoid tm = transition_monoid(d);
    const std::uint64_t omega = compute_omega(tm);

    CHECK(omega == omega_brute(tm.elements));
    CHECK(exponent_valid_brute(tm.elements, 2 * omega));
    if (omega > 1) CHECK_FALSE(exponent_valid_brute(tm.elements, omega - 1));
    for (std::uint64_t k = 1; k <= 10; ++k)
      CHECK(exponent_is_valid(tm, k) == exponent_valid_brute(tm.elements, k));
  }
}

TEST_CASE("monoid exploration returns witnesses in shortlex order") {
  Dfa d;
  d.alphabet = {"a", "b"};
  d.state_count = 3;
  d.initial = 0;
  d.accepting = {0};
  // a: cyclic shift, b: merge 1 into 0.
  d.delta = {1, 0, 2, 0, 0, 2};
  const TransitionMonoid tm = transition_monoid(d);

  // Every recorded word realizes its element.
  for (std::size_t i = 0; i < tm.size(); ++i)
    CHECK(eval_word(d, tm.generator_words[i]) == tm.elements[i]);

  // No strictly shorter word realizes it (exhaustive over the small alphabet).
  for (std::size_t i = 0; i < tm.size(); ++i) {
    const std::size_t len = tm.generator_words[i].size();
    std::vector<Word> frontier = {Word{}};
    for (std::size_t l = 0; l + 1 < len + 1; ++l) {
      for (const Word& w : frontier)
        CHECK_FALSE(eval_word(d, w) == tm.elements[i]);
      std::vector<Word> next;
      for (const Word& w : frontier)
        for (const Symbol& s : d.alphabet) {
          Word e = w;
          e.push_back(s);
          next.push_back(std::move(e));
        }
      frontier = std::move(next);
    }
  }
}

TEST_CASE("factorial of the monoid size is always a valid exponent") {
  std::mt19937_64 rng(555);
  for (int trial = 0; trial < 100; ++trial) {
    const Dfa d = random_dfa(rng, 5, 4);
    const TransitionMonoid tm = transition_monoid(d);
    CHECK(factorial_exponent_certificate(tm));
  }
}

TEST_CASE("exponent reduction reproduces the same power") {
  std::mt19937_64 rng(321);
  for (int trial = 0; trial < 60; ++trial) {
    MonoidElement m;
    const std::size_t n = 1 + rng() % 6;
    m.map.resize(n);
    for (auto& v : m.map) v = static_cast<StateId>(rng() % n);
    const IndexPeriod ip = index_period(m);
    for (std::uint64_t e = 1; e <= 40; ++e) {
      const std::uint64_t r = reduce_exponent(ip, e);
      CHECK(r <= e);
      CHECK(naive_power(m, r) == naive_power(m, e));
    }
  }
}

TEST_CASE("word actions compare as the monoid says") {
  Dfa even;
  even.alphabet = {"a"};
  even.state_count = 2;
  even.initial = 0;
  even.accepting = {0};
  even.delta = {1, 0};
  CHECK(syntactically_equivalent(even, word_from_chars("aa"), Word{}));
  CHECK(syntactically_equivalent(even, word_from_chars("aaa"), word_from_chars("a")));
  CHECK_FALSE(syntactically_equivalent(even, word_from_chars("a"), Word{}));
}

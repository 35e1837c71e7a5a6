// Shortest-triple search over pumped derivation contexts: found triples must
// pass the absorption identity checks; search order and results are
// deterministic; budgets are honored.
#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "flatsep/dfa.hpp"
#include "flatsep/monoid.hpp"
#include "flatsep/padsearch.hpp"
#include "flatsep/reduction.hpp"
#include "flatsep/word.hpp"
#include "samplers.hpp"

using namespace flatsep;

namespace {

Dfa band_dfa() {
  Dfa d;
  d.alphabet = {"a", "b", "<", ">"};
  d.state_count = 2;
  d.initial = 0;
  d.accepting = {0};
  d.delta = {0, 0, 0, 1, 1, 1, 0, 1};
  return d;
}

Dfa bracket_blind_dfa() {
  // Brackets are self-loops, so the zero-move triple already works.
  Dfa d;
  d.alphabet = {"a", "<", ">"};
  d.state_count = 2;
  d.initial = 0;
  d.accepting = {0};
  d.delta = {1, 0, 0, 0, 1, 1};
  return d;
}

}  // namespace

TEST_CASE("filler words enumerate pump derivations in order") {
  CHECK(pump_fillers(0).empty());

  const auto one = pump_fillers(1);
  REQUIRE(one.size() == 1);
  CHECK(format_word(one[0]) == "<>");

  const auto two = pump_fillers(2);
  REQUIRE(two.size() == 2);
  CHECK(format_word(two[0]) == "<>");
  CHECK(format_word(two[1]) == "<<><>>");

  // Three units: both association orders of three pairs, lex-sorted.
  const auto three = pump_fillers(3);
  REQUIRE(three.size() == 4);
  CHECK(format_word(three[2]) == "<<<><>><>>");
  CHECK(format_word(three[3]) == "<<><<><>>>");
}

TEST_CASE("bracket-blind automata need zero moves") {
  const auto result = search_padding(bracket_blind_dfa(), 8);
  REQUIRE(result.has_value());
  CHECK(result->moves_k.empty());
  CHECK(result->moves_l.empty());
  CHECK(format_word(result->eL) == "<");
  CHECK(result->e.empty());
  CHECK(format_word(result->eR) == ">");
}

TEST_CASE("the band automaton needs exactly one move") {
  // Hand-traced: the zero-move triple fails (e.eL collapses to state 0 while
  // e is the identity), and the first expanded node — one left-wrap on the
  // first branch with filler <> — satisfies all four identity checks because
  // every piece then acts as the collapse-to-1 map.
  const auto result = search_padding(band_dfa(), 4);
  REQUIRE(result.has_value());
  REQUIRE(result->moves_k.size() == 1);
  CHECK(result->moves_l.empty());
  CHECK(result->moves_k[0].side == PumpMove::Side::Left);
  CHECK(format_word(result->moves_k[0].filler) == "<>");
  CHECK(format_word(result->eL) == "<<<>");
  CHECK(format_word(result->e) == ">");
  CHECK(format_word(result->eR) == ">");
  CHECK(check_identities(band_dfa(), result->eL, result->e, result->eR).all_pass());

  // With no move budget the same automaton yields nothing.
  CHECK_FALSE(search_padding(band_dfa(), 0).has_value());
}

TEST_CASE("found triples always pass the identity checks") {
  std::mt19937_64 rng(20250819);
  for (int trial = 0; trial < 15; ++trial) {
    const Dfa d = testgen::random_dfa(rng, {"a", "b", "<", ">"}, 4);
    const std::uint64_t omega = padding_omega(transition_monoid(d));
    const auto result = search_padding(d, 4 * omega);
    REQUIRE(result.has_value());
    CHECK(result->moves_k.size() + result->moves_l.size() <= 4 * omega);
    CHECK(check_identities(d, result->eL, result->e, result->eR).all_pass());

    // The words are consistent with the move log: eL starts with '<', eR ends
    // with '>', and each move contributes one bracket pair plus its filler.
    REQUIRE_FALSE(result->eL.empty());
    CHECK(result->eL.front() == kOpen);
    CHECK(result->eR.back() == kClose);
    std::size_t contributed = 2;  // the root pair
    for (const auto& m : result->moves_k) contributed += 2 + m.filler.size();
    for (const auto& m : result->moves_l) contributed += 2 + m.filler.size();
    CHECK(result->eL.size() + result->e.size() + result->eR.size() == contributed);
  }
}

TEST_CASE("searches are deterministic") {
  std::mt19937_64 rng(5150);
  for (int trial = 0; trial < 10; ++trial) {
    const Dfa d = testgen::random_dfa(rng, {"a", "b", "<", ">"}, 4);
    const auto first = search_padding(d, 8);
    const auto second = search_padding(d, 8);
    REQUIRE(first.has_value() == second.has_value());
    if (first) {
      CHECK(first->eL == second->eL);
      CHECK(first->e == second->e);
      CHECK(first->eR == second->eR);
      CHECK(first->moves_k.size() == second->moves_k.size());
      CHECK(first->moves_l.size() == second->moves_l.size());
    }
  }
}

TEST_CASE("budgets cut the search off cleanly") {
  // A pop budget of 1 allows only the root; the band automaton needs more.
  CHECK_FALSE(search_padding(band_dfa(), 4, 1, 1).has_value());
  // Larger fillers are accepted and do not break anything.
  const auto wide = search_padding(band_dfa(), 4, 2);
  REQUIRE(wide.has_value());
  CHECK(check_identities(band_dfa(), wide->eL, wide->e, wide->eR).all_pass());
}

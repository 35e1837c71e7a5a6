// The separability reduction: structural padding words built from a DFA's
// idempotent exponent, the four absorption identities, derivation-replay
// witnesses, and the two directions of separator transport.
#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flatsep/dfa.hpp"
#include "flatsep/error.hpp"
#include "flatsep/flatten.hpp"
#include "flatsep/grammar.hpp"
#include "flatsep/monoid.hpp"
#include "flatsep/word.hpp"

namespace flatsep {

/// The two bracket blocks radiating from a matched pair: heart = "<<>" opens
/// a pair and immediately closes a nested one, cheart = "<>>" is its mirror.
inline const Word kHeart = word_from_chars("<<>");
inline const Word kCheart = word_from_chars("<>>");

/// A padding triple (eL, e, eR) of structural words at exponent omega,
/// together with its four building blocks.  With nu = omega - 1:
///   b1 = (<^nu H^nu)^omega <^nu        eL = < b1
///   b2 = Hb^nu (>^nu Hb^nu)^omega      e  = b2 c1
///   c1 = H^nu (H^nu <^nu)^omega        eR = c2 >
///   c2 = (Hb^nu >^nu)^omega >^nu
/// where H is the heart and Hb the mirrored heart.  The assembled words are
/// balanced: eL opens exactly what eR closes, and e is neutral, so
/// eL t1 e t2 ... e tn eR is well-bracketed around any base letters.
struct PaddingTriple {
  std::uint64_t omega = 1;
  Word b1, b2, c1, c2;
  Word eL, e, eR;
};

/// Builds the padding triple for a given exponent (omega >= 1).  At
/// omega = 1 all four blocks are empty and the triple degenerates to
/// ("<", "", ">"); the absorption identities are only guaranteed from
/// omega >= 2, see padding_omega.
inline PaddingTriple build_padding(std::uint64_t omega) {
  if (omega == 0) throw std::invalid_argument("padding exponent must be positive");
  const std::uint64_t nu = omega - 1;
  const Word open = word_from_chars("<"), close = word_from_chars(">");

  PaddingTriple t;
  t.omega = omega;
  Word open_nu, close_nu, heart_nu, cheart_nu;
  append_repeated(open_nu, open, nu);
  append_repeated(close_nu, close, nu);
  append_repeated(heart_nu, kHeart, nu);
  append_repeated(cheart_nu, kCheart, nu);

  append_repeated(t.b1, concat(open_nu, heart_nu), omega);
  t.b1 = concat(t.b1, open_nu);

  t.b2 = cheart_nu;
  Word rep;
  append_repeated(rep, concat(close_nu, cheart_nu), omega);
  t.b2 = concat(t.b2, rep);

  t.c1 = heart_nu;
  rep.clear();
  append_repeated(rep, concat(heart_nu, open_nu), omega);
  t.c1 = concat(t.c1, rep);

  append_repeated(t.c2, concat(cheart_nu, close_nu), omega);
  t.c2 = concat(t.c2, close_nu);

  t.eL = concat(open, t.b1);
  t.e = concat(t.b2, t.c1);
  t.eR = concat(t.c2, close);
  return t;
}

/// The exponent at which a DFA's padding is built: the monoid's idempotent
/// exponent, raised to 2 when it is 1.  (Any multiple of a valid exponent is
/// valid, and the absorption identities below need the building blocks to be
/// nonempty, which fails exactly at exponent 1.)
inline std::uint64_t padding_omega(const TransitionMonoid& tm) {
  return std::max<std::uint64_t>(compute_omega(tm), 2);
}

/// T(w): interleaves the padding around the letters of a nonempty word,
/// eL t1 e t2 e ... e tn eR.  Throws EmptyWord on the empty word.
inline Word apply_padding(const PaddingTriple& t, const Word& w) {
  if (w.empty()) throw Error(ErrorKind::EmptyWord, "padding applies to nonempty words only");
  Word out = t.eL;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i > 0) out.insert(out.end(), t.e.begin(), t.e.end());
    out.push_back(w[i]);
  }
  out.insert(out.end(), t.eR.begin(), t.eR.end());
  return out;
}

/// The witness word of a derivation tree: leaves contribute their terminal,
/// and every binary node K L is replayed as eL W(K) e W(L) eR.  The root
/// must be a binary node (ShortDerivation otherwise); the result projects to
/// the tree's yield and is equivalent to applying the padding to the yield.
inline Word witness_word(const DerivationTree& tree, const PaddingTriple& t) {
  if (tree.is_leaf())
    throw Error(ErrorKind::ShortDerivation, "witness needs a binary root derivation");
  Word out;
  // Post-order assembly with an explicit frame stack (trees can be deep).
  struct Frame { const DerivationTree* node; int stage; };
  std::vector<Frame> stack{{&tree, 0}};
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.node->is_leaf()) {
      out.push_back(f.node->terminal);
      stack.pop_back();
      continue;
    }
    if (f.stage == 0) {
      out.insert(out.end(), t.eL.begin(), t.eL.end());
      f.stage = 1;
      stack.push_back({f.node->left.get(), 0});
    } else if (f.stage == 1) {
      out.insert(out.end(), t.e.begin(), t.e.end());
      f.stage = 2;
      stack.push_back({f.node->right.get(), 0});
    } else {
      out.insert(out.end(), t.eR.begin(), t.eR.end());
      stack.pop_back();
    }
  }
  return out;
}

/// One absorption identity check: whether two words act identically on the
/// DFA; on failure, a state where the actions differ.
struct IdentityCheck {
  std::string name;
  bool pass = false;
  std::optional<StateId> distinguishing_state;
};

struct EquivalenceReport {
  std::vector<IdentityCheck> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

/// Checks the four absorption identities of a padding triple on a DFA:
///   eL eL == eL,  eR eR == eR,  e eL == e,  eR e == e.
/// Each check compares the transition actions of both sides.
inline EquivalenceReport check_identities(const Dfa& dfa, const Word& eL, const Word& e,
                                          const Word& eR) {
  const MonoidElement mL = eval_word(dfa, eL);
  const MonoidElement mE = eval_word(dfa, e);
  const MonoidElement mR = eval_word(dfa, eR);

  auto check = [](std::string name, const MonoidElement& lhs,
                  const MonoidElement& rhs) -> IdentityCheck {
    IdentityCheck c;
    c.name = std::move(name);
    c.pass = lhs == rhs;
    if (!c.pass)
      for (std::size_t q = 0; q < lhs.map.size(); ++q)
        if (lhs.map[q] != rhs.map[q]) {
          c.distinguishing_state = static_cast<StateId>(q);
          break;
        }
    return c;
  };

  EquivalenceReport report;
  report.checks.push_back(check("eL.eL=eL", compose(mL, mL), mL));
  report.checks.push_back(check("eR.eR=eR", compose(mR, mR), mR));
  report.checks.push_back(check("e.eL=e", compose(mE, mL), mE));
  report.checks.push_back(check("eR.e=e", compose(mR, mE), mE));
  return report;
}

inline EquivalenceReport check_identities(const Dfa& dfa, const PaddingTriple& t) {
  return check_identities(dfa, t.eL, t.e, t.eR);
}

/// Whether a derivation tree's witness word and the padded yield act
/// identically on the DFA — the replay property the witness exists for.
inline bool equivalence_of_witness(const Dfa& dfa, const PaddingTriple& t,
                                   const DerivationTree& tree) {
  const Word w = yield_word(tree);
  return eval_word(dfa, witness_word(tree, t)) == eval_word(dfa, apply_padding(t, w));
}

/// One separation check against an enumerated language fragment.
struct SeparationCheck {
  std::string name;
  bool pass = false;
  std::optional<Word> counterexample;
};

/// Checks that the automaton accepts everything in `inside` and nothing in
/// `outside`; returns one check per side with a counterexample on failure.
inline std::vector<SeparationCheck> check_separates(const Dfa& r, const std::set<Word>& inside,
                                                    const std::set<Word>& outside,
                                                    const std::string& label) {
  SeparationCheck in_check{label + ".accepts-inside", true, std::nullopt};
  for (const Word& w : inside)
    if (!run(r, w)) {
      in_check.pass = false;
      in_check.counterexample = w;
      break;
    }
  SeparationCheck out_check{label + ".rejects-outside", true, std::nullopt};
  for (const Word& w : outside)
    if (run(r, w)) {
      out_check.pass = false;
      out_check.counterexample = w;
      break;
    }
  return {in_check, out_check};
}

/// Enumeration bounds for separator transport.  Source languages are checked
/// to source_bound; lifted languages to lifted_bound.  Lifted words of
/// length <= 9 project to base words of length <= 3, so the defaults make
/// the source check strictly stronger than the lifted one.
struct SeparatorBounds {
  std::size_t source_bound = 6;
  std::size_t lifted_bound = 9;
  EnumerateLimits limits{};
};

/// The transfer direction with its verification trail.
struct TransferResult {
  Dfa lifted_separator;
  std::vector<SeparationCheck> checks;
  bool ok = true;
};

///// Transfers a separator of the source pair to the lifted pair: the inverse
/// projection of r accepts a lifted word exactly when r accepts its bracket
/// erasure, so it separates the lifted languages whenever r separates the
/// source ones.  Both claims are checked on enumerated fragments.
inline TransferResult do_transfer(const Dfa& r, const CnfCfg& g1, const CnfCfg& g2,
                                  const SeparatorBounds& bounds = {}) {
  TransferResult result;
  auto in1 = enumerate_words(g1.g, bounds.source_bound, bounds.limits);
  auto in2 = enumerate_words(g2.g, bounds.source_bound, bounds.limits);
  for (auto& c : check_separates(r, in1, in2, "source")) result.checks.push_back(std::move(c));

  result.lifted_separator = inverse_projection_dfa(r);
  auto lifted1 = enumerate_words(lift_grammar(g1).bfg.g, bounds.lifted_bound, bounds.limits);
  auto lifted2 = enumerate_words(lift_grammar(g2).bfg.g, bounds.lifted_bound, bounds.limits);
  for (auto& c :
       check_separates(result.lifted_separator, lifted1, lifted2, "lifted"))
    result.checks.push_back(std::move(c));

  for (const auto& c : result.checks)
    if (!c.pass) result.ok = false;
  return result;
}

/// Throwing wrapper around do_transfer: returns the lifted separator or
/// raises SeparationError with the first counterexample.
inline Dfa transfer_separator(const Dfa& r, const CnfCfg& g1, const CnfCfg& g2,
                              const SeparatorBounds& bounds = {}) {
  TransferResult result = do_transfer(r, g1, g2, bounds);
  if (!result.ok)
    for (const auto& c : result.checks)
      if (!c.pass)
        throw SeparationError("separation check '" + c.name + "' failed",
                              c.counterexample.value_or(Word{}));
  return result.lifted_separator;
}

/// The recovery direction with its verification trail.
struct RecoverResult {
  Dfa source_separator;
  PaddingTriple triple;
  std::uint64_t omega = 0;
  EquivalenceReport identities;
  std::vector<SeparationCheck> checks;
  bool ok = true;
};

/// Recovers a source-level separator from a lifted-level one: builds the
/// padding at the automaton's exponent, checks the absorption identities,
/// and pads the automaton so that it reads a base word w as if reading
/// eL t1 e t2 ... e tn eR.  The candidate is checked against the lifted
/// enumerations and the padded result against the source enumerations.
inline RecoverResult do_recover(const Dfa& a, const CnfCfg& g1, const CnfCfg& g2,
                                const SeparatorBounds& bounds = {},
                                std::optional<std::uint64_t> omega_override = std::nullopt) {
  RecoverResult result;
  auto lifted1 = enumerate_words(lift_grammar(g1).bfg.g, bounds.lifted_bound, bounds.limits);
  auto lifted2 = enumerate_words(lift_grammar(g2).bfg.g, bounds.lifted_bound, bounds.limits);
  for (auto& c : check_separates(a, lifted1, lifted2, "lifted")) result.checks.push_back(std::move(c));

  result.omega = omega_override ? *omega_override : padding_omega(transition_monoid(a));
  result.triple = build_padding(result.omega);
  result.identities = check_identities(a, result.triple);

  result.source_separator = pad_automaton(a, result.triple.eL, result.triple.e, result.triple.eR);
  auto in1 = enumerate_words(g1.g, bounds.source_bound, bounds.limits);
  auto in2 = enumerate_words(g2.g, bounds.source_bound, bounds.limits);
  for (auto& c : check_separates(result.source_separator, in1, in2, "source"))
    result.checks.push_back(std::move(c));

  result.ok = result.identities.all_pass();
  for (const auto& c : result.checks)
    if (!c.pass) result.ok = false;
  return result;
}

/// Throwing wrapper around do_recover: returns the padded separator or
/// raises SeparationError with the first counterexample.
inline Dfa recover_separator(const Dfa& a, const CnfCfg& g1, const CnfCfg& g2,
                             const SeparatorBounds& bounds = {}) {
  RecoverResult result = do_recover(a, g1, g2, bounds);
  if (!result.ok) {
    for (const auto& c : result.checks)
      if (!c.pass)
        throw SeparationError("separation check '" + c.name + "' failed",
                              c.counterexample.value_or(Word{}));
    throw SeparationError("padding identities failed on the candidate automaton", Word{});
  }
  return result.source_separator;
}

}  // namespace flatsep

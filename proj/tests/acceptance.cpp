// Acceptance suite: re-proves each constructive property of the library at
// desk scale, one criterion per line.  Exit status is the number of failed
// criteria, so 0 means full acceptance.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "flatsep/dfa.hpp"
#include "flatsep/error.hpp"
#include "flatsep/flatten.hpp"
#include "flatsep/grammar.hpp"
#include "flatsep/monoid.hpp"
#include "flatsep/padsearch.hpp"
#include "flatsep/reduction.hpp"
#include "flatsep/tm.hpp"
#include "flatsep/word.hpp"
#include "samplers.hpp"

using namespace flatsep;

namespace {

int failures = 0;

template <typename F>
void criterion(int num, const char* label, F body) {
  const auto start = std::chrono::steady_clock::now();
  bool pass = false;
  std::string why;
  try {
    pass = body(why);
  } catch (const std::exception& e) {
    why = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s %2d %s (%.1fs)\n", pass ? "PASS" : "FAIL", num, label, secs);
  if (!pass) {
    ++failures;
    if (!why.empty()) std::fprintf(stderr, "  criterion %d: %s\n", num, why.c_str());
  }
}

std::string fixture(const std::string& name) {
  return std::string(FLATSEP_FIXTURES_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Runs the command-line binary, capturing stdout; returns nullopt if the
/// process could not be spawned or did not exit normally.
struct CliRun {
  int exit_code = -1;
  std::string out;
};
std::optional<CliRun> run_cli(const std::string& args) {
  const std::string cmd = std::string(FLATSEP_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return std::nullopt;
  CliRun r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  if (!WIFEXITED(status)) return std::nullopt;
  r.exit_code = WEXITSTATUS(status);
  return r;
}

/// All configuration words of the machine with the given total length.
std::vector<Word> all_configs(const TuringMachine& tm, std::size_t len) {
  std::vector<Word> out;
  if (len < 2) return out;
  std::vector<Word> tapes{Word{}};
  for (std::size_t i = 1; i < len; ++i) {
    std::vector<Word> next;
    for (const Word& w : tapes)
      for (const Symbol& t : tm.tape) {
        Word e = w;
        e.push_back(t);
        next.push_back(std::move(e));
      }
    tapes = std::move(next);
  }
  for (const Word& t : tapes)
    for (const std::string& q : tm.states)
      for (std::size_t pos = 0; pos + 1 < len; ++pos) {
        Word c(t.begin(), t.begin() + pos);
        c.push_back(q);
        c.insert(c.end(), t.begin() + pos, t.end());
        out.push_back(std::move(c));
      }
  return out;
}

const std::vector<Symbol> kPaddedAlphabet = {"a", "b", "<", ">"};

}  // namespace

int main() {
  // 1. The computed idempotent exponent is valid, minimal, and the factorial
  //    exponent works as an independent certificate.
  criterion(1, "omega exponent: validity, minimality, factorial certificate (200 automata)",
            [](std::string& why) {
              std::mt19937_64 rng(101);
              const std::vector<Symbol> pool = {"a", "b", "c", "d"};
              for (int i = 0; i < 200; ++i) {
                const std::size_t letters = 1 + rng() % 4;
                const Dfa dfa = testgen::random_dfa(
                    rng, std::vector<Symbol>(pool.begin(), pool.begin() + letters), 5);
                const TransitionMonoid m = transition_monoid(dfa);
                const std::uint64_t omega = compute_omega(m);
                for (const MonoidElement& s : m.elements)
                  if (!(power(s, omega) == power(s, 2 * omega))) {
                    why = "s^omega != s^(2 omega) at automaton " + std::to_string(i);
                    return false;
                  }
                if (omega > 1) {
                  bool some_fail = false;
                  for (const MonoidElement& s : m.elements)
                    if (!(power(s, omega - 1) == power(s, 2 * (omega - 1)))) {
                      some_fail = true;
                      break;
                    }
                  if (!some_fail) {
                    why = "omega-1 also valid at automaton " + std::to_string(i);
                    return false;
                  }
                }
                if (!factorial_exponent_certificate(m)) {
                  why = "factorial certificate failed at automaton " + std::to_string(i);
                  return false;
                }
              }
              return true;
            });

  // 2. The padding built at the canonical exponent satisfies all four
  //    absorption identities on every sampled automaton.
  criterion(2, "padding identities at the canonical exponent (100 automata)",
            [](std::string& why) {
              std::mt19937_64 rng(202);
              for (int i = 0; i < 100; ++i) {
                const Dfa dfa = testgen::random_dfa(rng, kPaddedAlphabet, 5);
                const PaddingTriple t = build_padding(padding_omega(transition_monoid(dfa)));
                const EquivalenceReport rep = check_identities(dfa, t);
                if (!rep.all_pass()) {
                  for (const IdentityCheck& c : rep.checks)
                    if (!c.pass) why = "identity '" + c.name + "' failed at automaton " +
                                       std::to_string(i);
                  return false;
                }
              }
              return true;
            });

  // 3. Replaying a derivation as a witness word acts like padding the yield,
  //    and the witness belongs to the lifted language (linear matcher always,
  //    quadratic-table CYK cross-check on short witnesses).
  criterion(3, "witness replay: equivalence and lifted membership (100 triples)",
            [](std::string& why) {
              std::mt19937_64 rng(303);
              int cyk_checked = 0;
              for (int i = 0; i < 100; ++i) {
                const Dfa dfa = testgen::random_dfa(rng, kPaddedAlphabet, 5);
                const CnfCfg cnf = testgen::random_cnf(rng);
                const TreePtr tree = sample_derivation(cnf, 8, rng());
                const PaddingTriple t = build_padding(padding_omega(transition_monoid(dfa)));
                if (!equivalence_of_witness(dfa, t, *tree)) {
                  why = "witness action differs from padded yield at triple " +
                        std::to_string(i);
                  return false;
                }
                const LiftedBfg lifted = lift_grammar(cnf);
                const Word w = witness_word(*tree, t);
                if (!bfg_member(lifted.bfg, w)) {
                  why = "witness not in the lifted language at triple " + std::to_string(i);
                  return false;
                }
                if (w.size() <= 64) {
                  if (!cyk_member(to_cnf(lifted.bfg.g), w)) {
                    why = "CYK rejects the witness at triple " + std::to_string(i);
                    return false;
                  }
                  ++cyk_checked;
                }
              }
              if (cyk_checked == 0) {
                why = "no witness was short enough for the CYK cross-check";
                return false;
              }
              return true;
            });

  // 4. Erasing brackets from the lifted language gives back exactly the
  //    source language, both inclusions, on every enumerable word.
  criterion(4, "bracket projection matches the source language (3 grammars)",
            [](std::string& why) {
              for (const char* name : {"ab.cfg", "anbn.cfg", "abba.cfg"}) {
                const CnfCfg cnf = to_cnf(parse_grammar(slurp(fixture(name))));
                const LiftedBfg lifted = lift_grammar(cnf);
                std::set<Word> projected;
                for (const Word& w : enumerate_words(lifted.bfg.g, 9))
                  projected.insert(project(w));
                std::set<Word> expected;  // source words short enough to have
                                          // a lifted form within the bound
                for (const Word& w : enumerate_words(cnf.g, 6))
                  if (3 * w.size() <= 11) expected.insert(w);
                if (projected != expected) {
                  why = std::string("projection mismatch for ") + name;
                  return false;
                }
              }
              return true;
            });

  // 5. The inverse projection of a known source separator separates the two
  //    lifted languages on every enumerated word.
  criterion(5, "inverse-projection separator transfers exactly (bound 9)",
            [](std::string& why) {
              const CnfCfg g1 = to_cnf(parse_grammar(slurp(fixture("ab.cfg"))));
              const CnfCfg g2 = to_cnf(parse_grammar(slurp(fixture("ba.cfg"))));
              const Dfa r = parse_dfa(slurp(fixture("ab_prefix.dfa")));
              const Dfa lifted_sep = inverse_projection_dfa(r);
              for (const Word& w : enumerate_words(lift_grammar(g1).bfg.g, 9))
                if (!run(lifted_sep, w)) {
                  why = "lifted separator rejects a first-language word: " + format_word(w);
                  return false;
                }
              for (const Word& w : enumerate_words(lift_grammar(g2).bfg.g, 9))
                if (run(lifted_sep, w)) {
                  why = "lifted separator accepts a second-language word: " + format_word(w);
                  return false;
                }
              return true;
            });

  // 6. The padded automaton accepts a base word exactly when the original
  //    automaton accepts the padded word.
  criterion(6, "padded automaton recovers the source separator (50 automata)",
            [](std::string& why) {
              std::mt19937_64 rng(606);
              const std::vector<Word> words = testgen::all_words({"a", "b"}, 1, 6);
              for (int i = 0; i < 50; ++i) {
                const Dfa dfa = testgen::random_dfa(rng, kPaddedAlphabet, 5);
                const PaddingTriple t = build_padding(padding_omega(transition_monoid(dfa)));
                const Dfa padded = pad_automaton(dfa, t.eL, t.e, t.eR);
                const bool compose_route = t.e.size() > 2000;  // very large exponent
                const MonoidElement mL = eval_word(dfa, t.eL), me = eval_word(dfa, t.e),
                                    mR = eval_word(dfa, t.eR);
                for (const Word& w : words) {
                  bool original;
                  if (compose_route) {
                    MonoidElement acc = mL;
                    for (std::size_t k = 0; k < w.size(); ++k) {
                      if (k) acc = compose(acc, me);
                      acc = compose(acc, eval_word(dfa, {w[k]}));
                    }
                    acc = compose(acc, mR);
                    const StateId end = acc.map[dfa.initial];
                    original = std::find(dfa.accepting.begin(), dfa.accepting.end(), end) !=
                               dfa.accepting.end();
                  } else {
                    original = run(dfa, apply_padding(t, w));
                  }
                  if (run(padded, w) != original) {
                    why = "padded automaton disagrees on '" + format_word(w) +
                          "' at automaton " + std::to_string(i);
                    return false;
                  }
                }
              }
              return true;
            });

  // 7. The padding search finds a valid triple within the move budget, and
  //    the closed-form construction certifies every automaton as solvable.
  criterion(7, "padding search within budget plus closed-form certificate (20 automata)",
            [](std::string& why) {
              std::mt19937_64 rng(707);
              for (int i = 0; i < 20; ++i) {
                const Dfa dfa = testgen::random_dfa(rng, kPaddedAlphabet, 4);
                const std::uint64_t omega = padding_omega(transition_monoid(dfa));
                if (!check_identities(dfa, build_padding(omega)).all_pass()) {
                  why = "closed-form certificate failed at automaton " + std::to_string(i);
                  return false;
                }
                const auto found = search_padding(dfa, 4 * omega, 1);
                if (!found) {
                  why = "search exhausted the move budget at automaton " + std::to_string(i);
                  return false;
                }
                if (!check_identities(dfa, found->eL, found->e, found->eR).all_pass()) {
                  why = "searched triple fails the identities at automaton " +
                        std::to_string(i);
                  return false;
                }
              }
              return true;
            });

  // 8. The one-step pair grammars of the bundled machine generate exactly the
  //    simulator's pairs, and the two history languages never overlap.
  criterion(8, "machine step grammars match the simulator; histories disjoint",
            [](std::string& why) {
              const TuringMachine tm = parse_tm(slurp(fixture("two_state.tm")));
              const Word wI = word_from_tokens("q0 x _");

              // The bundled run halts within four steps.
              Word cur = wI;
              int steps = 0;
              while (auto next = step(tm, cur)) {
                cur = *next;
                if (++steps > 4) {
                  why = "bundled machine did not halt within four steps";
                  return false;
                }
              }

              const std::size_t bound = 10;
              std::set<Word> second_pairs, first_pairs;
              for (std::size_t len = 2; 2 * len + 1 <= bound; ++len)
                for (const Word& u : all_configs(tm, len)) {
                  const auto v = step(tm, u);
                  if (!v) continue;
                  Word second = u;
                  second.push_back("#");
                  second.insert(second.end(), v->rbegin(), v->rend());
                  if (second.size() <= bound) second_pairs.insert(std::move(second));
                  Word first(u.rbegin(), u.rend());
                  first.push_back("#");
                  first.insert(first.end(), v->begin(), v->end());
                  if (first.size() <= bound) first_pairs.insert(std::move(first));
                }
              if (enumerate_words(step_pair_grammar(tm, ReversedSide::Second), bound) !=
                  second_pairs) {
                why = "pair grammar (second side reversed) disagrees with the simulator";
                return false;
              }
              if (enumerate_words(step_pair_grammar(tm, ReversedSide::First), bound) !=
                  first_pairs) {
                why = "pair grammar (first side reversed) disagrees with the simulator";
                return false;
              }

              const auto [l1, l2] = build_history_languages(tm, wI);
              EnumerateLimits limits;
              limits.length_guard = 20;
              const CnfCfg l2_cnf = to_cnf(l2);
              for (const Word& w : enumerate_words(l1, 20, limits))
                if (cyk_member(l2_cnf, w)) {
                  why = "history languages overlap on: " + format_word(w);
                  return false;
                }
              return true;
            });

  // 9. Normal-form conversion preserves the language exactly on all
  //    enumerable words.
  criterion(9, "normal-form conversion preserves the language (20 grammars)",
            [](std::string& why) {
              std::mt19937_64 rng(909);
              for (int i = 0; i < 20; ++i) {
                const Cfg g = testgen::random_long_grammar(rng);
                const CnfCfg cnf = to_cnf(g);
                if (enumerate_words(g, 7) != enumerate_words(cnf.g, 7)) {
                  why = "language changed by the conversion at grammar " + std::to_string(i);
                  return false;
                }
              }
              return true;
            });

  // 10. Same-seed command-line runs produce byte-identical reports.
  criterion(10, "command-line reports are byte-identical across same-seed runs",
            [](std::string& why) {
              const std::string verify_args =
                  "verify " + fixture("brackets_even.dfa") + " " + fixture("ab.cfg");
              const std::string pipeline_args = "pipeline " + fixture("ab.cfg") + " " +
                                                fixture("ba.cfg") + " " +
                                                fixture("ab_prefix.dfa");
              for (const std::string& args : {verify_args, pipeline_args}) {
                const auto r1 = run_cli(args), r2 = run_cli(args);
                if (!r1 || !r2) {
                  why = "could not spawn the command-line binary";
                  return false;
                }
                if (r1->exit_code != 0 || r2->exit_code != 0) {
                  why = "run exited with status " + std::to_string(r1->exit_code) + "/" +
                        std::to_string(r2->exit_code) + " for: " + args;
                  return false;
                }
                if (r1->out.empty() || r1->out != r2->out) {
                  why = "reports differ between runs for: " + args;
                  return false;
                }
              }
              return true;
            });

  if (failures == 0) std::printf("acceptance: all 10 criteria passed\n");
  else std::printf("acceptance: %d criteria failed\n", failures);
  return failures;
}

// JSON report assembly for the command-line frontend: pure builders shared
// by the binary and the test suite so byte-stability is testable in-process.
#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "flatsep/dfa.hpp"
#include "flatsep/error.hpp"
#include "flatsep/flatten.hpp"
#include "flatsep/grammar.hpp"
#include "flatsep/monoid.hpp"
#include "flatsep/padsearch.hpp"
#include "flatsep/reduction.hpp"
#include "flatsep/tm.hpp"
#include "flatsep/word.hpp"

namespace flatsep::reports {

using nlohmann::json;

inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string content_hash(const std::string& bytes) {
  static const char* hex = "0123456789abcdef";
  std::uint64_t h = fnv1a64(bytes);
  std::string out = "fnv1a64:";
  for (int shift = 60; shift >= 0; shift -= 4) out += hex[(h >> shift) & 0xf];
  return out;
}

/// One named input file: its path as given and a hash of its bytes.
struct InputFile {
  std::string role;
  std::string path;
  std::string bytes;
};

inline json inputs_json(const std::vector<InputFile>& inputs) {
  json out = json::object();
  for (const InputFile& f : inputs)
    out[f.role] = {{"hash", content_hash(f.bytes)}, {"path", f.path}};
  return out;
}

inline json check_json(const std::string& name, bool pass) {
  return {{"name", name}, {"pass", pass}};
}

inline void sort_checks(json& checks) {
  std::sort(checks.begin(), checks.end(), [](const json& a, const json& b) {
    return a.at("name").get<std::string>() < b.at("name").get<std::string>();
  });
}

inline bool all_pass(const json& checks) {
  for (const json& c : checks)
    if (!c.at("pass").get<bool>()) return false;
  return true;
}

inline json identity_checks_json(const EquivalenceReport& report, const std::string& prefix) {
  json out = json::array();
  for (const IdentityCheck& c : report.checks) {
    json entry = check_json(prefix + c.name, c.pass);
    if (c.distinguishing_state)
      entry["distinguishing_state"] = static_cast<std::int64_t>(*c.distinguishing_state);
    out.push_back(std::move(entry));
  }
  return out;
}

inline json separation_checks_json(const std::vector<SeparationCheck>& checks,
                                   const std::string& prefix) {
  json out = json::array();
  for (const SeparationCheck& c : checks) {
    json entry = check_json(prefix + c.name, c.pass);
    if (c.counterexample) entry["counterexample"] = format_word(*c.counterexample);
    out.push_back(std::move(entry));
  }
  return out;
}

inline json finalize(json report) {
  sort_checks(report.at("checks"));
  report["pass"] = all_pass(report.at("checks"));
  return report;
}

/// Report for `omega`: the idempotent exponent, the monoid size, and the
/// factorial-exponent certificate.
inline json omega_report(const std::vector<InputFile>& inputs, const TransitionMonoid& tm) {
  json report;
  report["command"] = "omega";
  report["inputs"] = inputs_json(inputs);
  report["omega"] = compute_omega(tm);
  report["monoid_size"] = tm.size();
  report["checks"] = json::array({check_json("factorial-certificate",
                                             factorial_exponent_certificate(tm))});
  return finalize(std::move(report));
}

/// Report for `verify`: the four absorption identities of the padding at the
/// chosen exponent, plus sampled derivation-witness checks (action
/// equivalence with the padded yield, and membership in the lifted grammar).
inline json verify_report(const std::vector<InputFile>& inputs, const Dfa& dfa,
                          const CnfCfg& cnf, std::size_t samples, std::uint64_t seed,
                          std::optional<std::uint64_t> omega_override) {
  TransitionMonoid monoid = transition_monoid(dfa);
  const std::uint64_t canonical = padding_omega(monoid);
  const std::uint64_t used = omega_override ? *omega_override : canonical;
  const PaddingTriple triple = build_padding(used);

  json report;
  report["command"] = "verify";
  report["inputs"] = inputs_json(inputs);
  report["seed"] = seed;
  report["samples"] = samples;
  report["omega"] = used;
  report["canonical_omega"] = canonical;
  report["monoid_size"] = monoid.size();

  json checks = identity_checks_json(check_identities(dfa, triple), "identity.");

  const LiftedBfg lifted = lift_grammar(cnf);
  for (std::size_t i = 0; i < samples; ++i) {
    std::string tag = std::to_string(i);
    while (tag.size() < 4) tag.insert(tag.begin(), '0');
    json equiv = check_json("witness." + tag + ".equivalence", false);
    json member = check_json("witness." + tag + ".membership", false);
    try {
      TreePtr tree = sample_derivation(cnf, 8, seed + i);
      equiv["pass"] = equivalence_of_witness(dfa, triple, *tree);
      member["pass"] = bfg_member(lifted.bfg, witness_word(*tree, triple));
    } catch (const Error& e) {
      equiv["error"] = std::string(e.what());
      member["error"] = std::string(e.what());
    }
    checks.push_back(std::move(equiv));
    checks.push_back(std::move(member));
  }
  report["checks"] = std::move(checks);
  return finalize(std::move(report));
}

/// Report for `pipeline`: transfer the separator to the lifted pair, then
/// recover a source separator from it, with every enumeration check listed.
inline json pipeline_report(const std::vector<InputFile>& inputs, const CnfCfg& g1,
                            const CnfCfg& g2, const Dfa& r, const SeparatorBounds& bounds) {
  json report;
  report["command"] = "pipeline";
  report["inputs"] = inputs_json(inputs);
  report["bounds"] = {{"source", bounds.source_bound}, {"lifted", bounds.lifted_bound}};

  json checks = json::array();
  TransferResult transfer = do_transfer(r, g1, g2, bounds);
  for (const SeparationCheck& c : transfer.checks)
    if (!c.pass && c.name.rfind("source.", 0) == 0) {
      report["error"] = std::string("NotASeparator: failed ") + c.name + " on '" +
                        format_word(c.counterexample.value_or(Word{})) + "'";
      break;
    }
  for (json& c : separation_checks_json(transfer.checks, "transfer.")) checks.push_back(std::move(c));

  RecoverResult recover = do_recover(transfer.lifted_separator, g1, g2, bounds);
  report["omega"] = recover.omega;
  for (json& c : identity_checks_json(recover.identities, "recover.identity."))
    checks.push_back(std::move(c));
  for (json& c : separation_checks_json(recover.checks, "recover.")) checks.push_back(std::move(c));

  report["checks"] = std::move(checks);
  return finalize(std::move(report));
}

/// Report for `search-padding`: the found triple and its move log, or a
/// failing search check.
inline json search_report(const std::vector<InputFile>& inputs, const Dfa& dfa,
                          std::size_t max_moves, std::size_t max_filler,
                          const std::optional<CandidateTriple>& result) {
  json report;
  report["command"] = "search-padding";
  report["inputs"] = inputs_json(inputs);
  report["max_moves"] = max_moves;
  report["max_filler"] = max_filler;
  report["found"] = result.has_value();

  json checks = json::array({check_json("search.found", result.has_value())});
  if (result) {
    EquivalenceReport identities = check_identities(dfa, result->eL, result->e, result->eR);
    for (json& c : identity_checks_json(identities, "identity.")) checks.push_back(std::move(c));
    auto moves_json = [](const std::vector<PumpMove>& moves) {
      json out = json::array();
      for (const PumpMove& m : moves)
        out.push_back({{"side", m.side == PumpMove::Side::Left ? "left" : "right"},
                       {"filler", format_word(m.filler)}});
      return out;
    };
    report["triple"] = {{"eL", format_word(result->eL)},
                        {"e", format_word(result->e)},
                        {"eR", format_word(result->eR)}};
    report["moves"] = {{"first", moves_json(result->moves_k)},
                       {"second", moves_json(result->moves_l)}};
  }
  report["checks"] = std::move(checks);
  return finalize(std::move(report));
}

/// Report for `tm2cfg`: where the two grammars went, whether the anchored
/// configuration has a successor, and the bounded disjointness check (every
/// history word of the anchored language up to the bound is tested for
/// membership in the other language).
inline json tm2cfg_report(const std::vector<InputFile>& inputs, const TuringMachine& tm,
                          const Word& initial, const Cfg& l1, const Cfg& l2,
                          const std::string& l1_path, const std::string& l2_path,
                          std::size_t bound) {
  json report;
  report["command"] = "tm2cfg";
  report["inputs"] = inputs_json(inputs);
  report["initial_configuration"] = format_word(initial);
  report["bound"] = bound;
  report["outputs"] = {{"l1", l1_path}, {"l2", l2_path}};

  json checks = json::array();
  checks.push_back(check_json("anchor.has-successor", step(tm, initial).has_value()));

  EnumerateLimits limits;
  limits.length_guard = std::max(limits.length_guard, bound);
  std::set<Word> l1_words = enumerate_words(l1, bound, limits);
  json disjoint = check_json("history.disjoint", true);
  CnfCfg l2_cnf = to_cnf(l2);
  for (const Word& w : l1_words)
    if (cyk_member(l2_cnf, w)) {
      disjoint["pass"] = false;
      disjoint["counterexample"] = format_word(w);
      break;
    }
  checks.push_back(std::move(disjoint));

  report["checks"] = std::move(checks);
  return finalize(std::move(report));
}

}  // namespace flatsep::reports

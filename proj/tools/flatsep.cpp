// flatsep — command-line frontend for the bracket-flattening laboratory.
//
// Subcommands:
//   cnf            convert a grammar to Chomsky normal form (text out)
//   lift           lift a CNF grammar to its bracketed form (text out)
//   omega          idempotent exponent of a DFA's transition monoid (JSON)
//   verify         padding identities + sampled witness checks (JSON)
//   pipeline       separator transfer and recovery round trip (JSON)
//   search-padding shortest-triple search over pumped derivations (JSON)
//   tm2cfg         history languages of a Turing machine run (files + JSON)
//
// Exit codes: 0 all checks pass, 1 some check failed, 2 malformed input.
// JSON reports go to stdout with sorted keys; timing goes to stderr only, so
// a run with identical inputs and seed produces byte-identical stdout.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "flatsep/dfa.hpp"
#include "flatsep/error.hpp"
#include "flatsep/flatten.hpp"
#include "flatsep/grammar.hpp"
#include "flatsep/monoid.hpp"
#include "flatsep/padsearch.hpp"
#include "flatsep/reduction.hpp"
#include "flatsep/reports.hpp"
#include "flatsep/tm.hpp"
#include "flatsep/word.hpp"

namespace {

constexpr std::uint64_t kDefaultSeed = 20250819;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw flatsep::Error(flatsep::ErrorKind::Parse, "cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw flatsep::Error(flatsep::ErrorKind::Parse, "cannot write file: " + path);
  out << text;
  if (!out.flush()) throw flatsep::Error(flatsep::ErrorKind::Parse, "cannot write file: " + path);
}

/// Emits grammar text to the -o file if given, else to stdout.
void emit_text(const std::string& out_path, const std::string& text) {
  if (out_path.empty())
    std::cout << text;
  else
    write_file(out_path, text);
}

/// Prints a JSON report to stdout; returns the exit code its checks imply.
int emit_report(const nlohmann::json& report) {
  std::cout << report.dump(2) << "\n";
  return report.at("pass").get<bool>() ? 0 : 1;
}

int cmd_cnf(const std::string& grammar_path, const std::string& out_path, std::size_t bound) {
  const std::string bytes = read_file(grammar_path);
  const flatsep::Cfg g = flatsep::parse_grammar(bytes);
  const flatsep::CnfCfg cnf = flatsep::to_cnf(g);

  flatsep::EnumerateLimits limits;
  limits.length_guard = std::max(limits.length_guard, bound);
  const auto before = flatsep::enumerate_words(g, bound, limits);
  const auto after = flatsep::enumerate_words(cnf.g, bound, limits);

  emit_text(out_path, flatsep::print_grammar(cnf.g));
  if (before != after) {
    const auto& bigger = before.size() >= after.size() ? before : after;
    const auto& smaller = &bigger == &before ? after : before;
    for (const flatsep::Word& w : bigger)
      if (!smaller.count(w)) {
        std::cerr << "flatsep cnf: language changed up to length " << bound << " (witness: '"
                  << flatsep::format_word(w) << "')\n";
        break;
      }
    return 1;
  }
  std::cerr << "flatsep cnf: language preserved up to length " << bound << "\n";
  return 0;
}

int cmd_lift(const std::string& grammar_path, const std::string& out_path) {
  const std::string bytes = read_file(grammar_path);
  const flatsep::Cfg g = flatsep::parse_grammar(bytes);
  flatsep::CnfCfg cnf;
  try {
    cnf = flatsep::as_cnf(g);
  } catch (const flatsep::Error& e) {
    if (e.kind() != flatsep::ErrorKind::NotCnf) throw;
    cnf = flatsep::to_cnf(g);
  }
  const flatsep::LiftedBfg lifted = flatsep::lift_grammar(cnf);
  flatsep::validate_bfg(lifted.bfg.g);
  emit_text(out_path, flatsep::print_grammar(lifted.bfg.g));
  std::cerr << "flatsep lift: " << cnf.g.productions.size() << " productions in, "
            << lifted.bfg.g.productions.size() << " out\n";
  return 0;
}

int cmd_omega(const std::string& dfa_path) {
  const std::string bytes = read_file(dfa_path);
  const flatsep::Dfa dfa = flatsep::parse_dfa(bytes);
  const flatsep::TransitionMonoid monoid = flatsep::transition_monoid(dfa);
  return emit_report(flatsep::reports::omega_report({{"dfa", dfa_path, bytes}}, monoid));
}

int cmd_verify(const std::string& dfa_path, const std::string& grammar_path, std::size_t samples,
               std::uint64_t seed, std::optional<std::uint64_t> omega_override) {
  const std::string dfa_bytes = read_file(dfa_path);
  const std::string grammar_bytes = read_file(grammar_path);
  const flatsep::Dfa dfa = flatsep::parse_dfa(dfa_bytes);
  const flatsep::CnfCfg cnf = flatsep::to_cnf(flatsep::parse_grammar(grammar_bytes));
  if (omega_override && *omega_override == 0)
    throw flatsep::Error(flatsep::ErrorKind::Parse, "--omega must be positive");
  return emit_report(flatsep::reports::verify_report(
      {{"dfa", dfa_path, dfa_bytes}, {"grammar", grammar_path, grammar_bytes}}, dfa, cnf,
      samples, seed, omega_override));
}

int cmd_pipeline(const std::string& g1_path, const std::string& g2_path,
                 const std::string& r_path, std::size_t source_bound, std::size_t lifted_bound) {
  const std::string g1_bytes = read_file(g1_path);
  const std::string g2_bytes = read_file(g2_path);
  const std::string r_bytes = read_file(r_path);
  const flatsep::CnfCfg g1 = flatsep::to_cnf(flatsep::parse_grammar(g1_bytes));
  const flatsep::CnfCfg g2 = flatsep::to_cnf(flatsep::parse_grammar(g2_bytes));
  const flatsep::Dfa r = flatsep::parse_dfa(r_bytes);
  flatsep::SeparatorBounds bounds;
  bounds.source_bound = source_bound;
  bounds.lifted_bound = lifted_bound;
  return emit_report(flatsep::reports::pipeline_report({{"grammar1", g1_path, g1_bytes},
                                                        {"grammar2", g2_path, g2_bytes},
                                                        {"separator", r_path, r_bytes}},
                                                       g1, g2, r, bounds));
}

int cmd_search_padding(const std::string& dfa_path, std::size_t max_moves,
                       std::size_t max_filler) {
  const std::string bytes = read_file(dfa_path);
  const flatsep::Dfa dfa = flatsep::parse_dfa(bytes);
  const auto result = flatsep::search_padding(dfa, max_moves, max_filler);
  return emit_report(flatsep::reports::search_report({{"dfa", dfa_path, bytes}}, dfa, max_moves,
                                                     max_filler, result));
}

int cmd_tm2cfg(const std::string& tm_path, const std::string& initial_text,
               const std::string& out_prefix, std::size_t bound) {
  const std::string bytes = read_file(tm_path);
  const flatsep::TuringMachine tm = flatsep::parse_tm(bytes);
  const flatsep::Word initial = flatsep::word_from_tokens(initial_text);
  const auto [l1, l2] = flatsep::build_history_languages(tm, initial);

  const std::string l1_path = out_prefix + ".l1.cfg";
  const std::string l2_path = out_prefix + ".l2.cfg";
  write_file(l1_path, flatsep::print_grammar(l1));
  write_file(l2_path, flatsep::print_grammar(l2));

  return emit_report(flatsep::reports::tm2cfg_report({{"tm", tm_path, bytes}}, tm, initial, l1,
                                                     l2, l1_path, l2_path, bound));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flatsep: bracket-flattening laboratory for grammar separability"};
  app.require_subcommand(1);

  std::string grammar_path, dfa_path, g1_path, g2_path, r_path, tm_path, initial_text;
  std::string out_path;
  std::uint64_t seed = kDefaultSeed;
  std::size_t cnf_bound = 6, source_bound = 6, lifted_bound = 9, history_bound = 20;
  std::size_t samples = 5, max_moves = 12, max_filler = 1;
  std::optional<std::uint64_t> omega_override;
  std::uint64_t omega_flag = 0;

  CLI::App* cnf = app.add_subcommand("cnf", "Convert a grammar to Chomsky normal form");
  cnf->add_option("grammar", grammar_path, "grammar file")->required();
  cnf->add_option("-o,--output", out_path, "write the grammar here instead of stdout");
  cnf->add_option("--bound", cnf_bound, "length bound for the language-preservation check");

  CLI::App* lift = app.add_subcommand("lift", "Lift a CNF grammar to its bracketed form");
  lift->add_option("grammar", grammar_path, "grammar file")->required();
  lift->add_option("-o,--output", out_path, "write the grammar here instead of stdout");

  CLI::App* omega = app.add_subcommand("omega", "Idempotent exponent of a DFA's monoid");
  omega->add_option("dfa", dfa_path, "automaton file")->required();

  CLI::App* verify = app.add_subcommand("verify", "Check padding identities and witnesses");
  verify->add_option("dfa", dfa_path, "automaton file")->required();
  verify->add_option("grammar", grammar_path, "grammar file")->required();
  verify->add_option("--samples", samples, "number of sampled derivations");
  verify->add_option("--seed", seed, "random seed");
  CLI::Option* omega_opt =
      verify->add_option("--omega", omega_flag, "padding exponent override");

  CLI::App* pipeline = app.add_subcommand("pipeline", "Transfer and recover a separator");
  pipeline->add_option("grammar1", g1_path, "first grammar file")->required();
  pipeline->add_option("grammar2", g2_path, "second grammar file")->required();
  pipeline->add_option("separator", r_path, "separating automaton file")->required();
  pipeline->add_option("--bound", source_bound, "enumeration bound for source words");
  pipeline->add_option("--lifted-bound", lifted_bound, "enumeration bound for lifted words");

  CLI::App* search = app.add_subcommand("search-padding", "Search for a short padding triple");
  search->add_option("dfa", dfa_path, "automaton file")->required();
  search->add_option("--max-moves", max_moves, "total pump-move budget");
  search->add_option("--max-filler", max_filler, "largest filler size in bracket pairs");

  CLI::App* tm2cfg = app.add_subcommand("tm2cfg", "Emit the history languages of a machine run");
  tm2cfg->add_option("tm", tm_path, "machine file")->required();
  tm2cfg->add_option("initial", initial_text, "initial configuration, e.g. 'q0 x _'")->required();
  tm2cfg->add_option("-o,--output", out_path, "output prefix for the two grammar files")
      ->required();
  tm2cfg->add_option("--bound", history_bound, "length bound for the disjointness check");

  CLI11_PARSE(app, argc, argv);

  const auto started = std::chrono::steady_clock::now();
  int code = 2;
  try {
    if (app.got_subcommand(cnf))
      code = cmd_cnf(grammar_path, out_path, cnf_bound);
    else if (app.got_subcommand(lift))
      code = cmd_lift(grammar_path, out_path);
    else if (app.got_subcommand(omega))
      code = cmd_omega(dfa_path);
    else if (app.got_subcommand(verify)) {
      if (omega_opt->count() > 0) omega_override = omega_flag;
      code = cmd_verify(dfa_path, grammar_path, samples, seed, omega_override);
    } else if (app.got_subcommand(pipeline))
      code = cmd_pipeline(g1_path, g2_path, r_path, source_bound, lifted_bound);
    else if (app.got_subcommand(search))
      code = cmd_search_padding(dfa_path, max_moves, max_filler);
    else if (app.got_subcommand(tm2cfg))
      code = cmd_tm2cfg(tm_path, initial_text, out_path, history_bound);
  } catch (const flatsep::Error& e) {
    std::cerr << "flatsep: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "flatsep: internal error: " << e.what() << "\n";
    return 2;
  }

  const auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
  std::cerr << "flatsep " << app.get_subcommands().front()->get_name() << ": " << elapsed.count()
            << " ms\n";
  return code;
}

// svote: run, generate and benchmark secure score-based elections.
//
// Every flag can also be set through an SVOTE_* environment variable
// (SVOTE_MODE, SVOTE_SEED, ...); an explicit flag wins.
//
// exit codes: 0 ok, 2 bad input or configuration, 3 protocol failure

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "svote/svote.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitProtocol = 3;

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw svote::ConfigError("cannot write '" + path + "'");
  out << text;
}

struct RunArgs {
  std::string config, ballots, mode = "simulate", prime, out, transcript;
  std::optional<std::size_t> talliers;
  std::optional<std::uint64_t> seed;
};

int cmd_run(const RunArgs& a) {
  svote::ElectionConfig cfg = svote::load_config(a.config);
  if (a.talliers) {
    cfg.talliers = *a.talliers;
    cfg.threshold = svote::honest_majority_threshold(cfg.talliers);
  }
  if (!a.prime.empty()) cfg.modulus = svote::parse_prime(a.prime);
  if (a.seed) cfg.seed = *a.seed;
  cfg.validate();
  const auto ballots = svote::load_ballots(a.ballots, cfg.candidate_count());
  svote::RunOptions opt;
  opt.mode = svote::parse_mode(a.mode);
  const auto result = svote::run_election(cfg, ballots, opt);
  const std::string text = svote::format_result(cfg, result);
  std::cout << text;
  if (!a.out.empty()) write_output(a.out, text);
  if (!a.transcript.empty()) write_output(a.transcript, result.transcripts.front());
  return 0;
}

struct GenArgs {
  std::string rule = "plurality", out, config_out, prime = "p31", mode = "simulate";
  std::size_t voters = 100, candidates = 4, winners = 1, talliers = 3;
  std::uint64_t range_max = 5, seed = 0;
  double adversarial = 0.0;
};

int cmd_gen(const GenArgs& a) {
  svote::ElectionConfig cfg;
  cfg.rule = svote::parse_rule(a.rule);
  cfg.voters = a.voters;
  cfg.candidates = svote::default_candidate_names(a.candidates);
  cfg.winners = a.winners;
  cfg.range_max = cfg.rule == svote::Rule::Range ? a.range_max : 0;
  cfg.talliers = a.talliers;
  cfg.threshold = svote::honest_majority_threshold(a.talliers);
  cfg.modulus = svote::parse_prime(a.prime);
  cfg.seed = a.seed;
  cfg.validate();
  const auto ballots = svote::generate_electorate(cfg, a.adversarial, a.seed);
  write_output(a.out, svote::format_ballots(ballots));
  if (!a.config_out.empty()) write_output(a.config_out, svote::format_config(cfg));
  return 0;
}

struct BenchArgs {
  std::string suite = "compare", mode = "simulate", out;
  std::vector<std::size_t> talliers{3, 5, 7, 9};
  std::vector<std::string> primes{"p13", "p31"};
  std::size_t reps = 3, entries = 50000;
  std::uint64_t seed = 1;
};

int cmd_bench(const BenchArgs& a) {
  svote::BenchOptions opt;
  opt.suites = svote::parse_suites(a.suite);
  opt.talliers = a.talliers;
  opt.primes = a.primes;
  for (const auto& p : opt.primes) svote::parse_prime(p);
  opt.reps = a.reps;
  opt.seed = a.seed;
  opt.mode = svote::parse_mode(a.mode);
  opt.verify_entries = a.entries;
  const auto rows = svote::run_bench(opt);
  write_output(a.out, svote::format_bench_csv(rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"secure score-based voting: run, gen, bench"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "tally a ballot file");
  run_cmd->add_option("--config", run.config, "election config file")->required()->envname("SVOTE_CONFIG");
  run_cmd->add_option("--ballots", run.ballots, "ballot file, one 'tag;s1,...,sM' per line")
      ->required()
      ->envname("SVOTE_BALLOTS");
  run_cmd->add_option("--mode", run.mode, "simulate or network")->envname("SVOTE_MODE");
  run_cmd->add_option("--talliers", run.talliers, "override D")->envname("SVOTE_TALLIERS");
  run_cmd->add_option("--prime", run.prime, "override the field: p13 or p31")->envname("SVOTE_PRIME");
  run_cmd->add_option("--seed", run.seed, "override the session seed")->envname("SVOTE_SEED");
  run_cmd->add_option("--out", run.out, "also write the report here")->envname("SVOTE_OUT");
  run_cmd->add_option("--transcript", run.transcript, "write tallier 1's transcript here")
      ->envname("SVOTE_TRANSCRIPT");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic electorate");
  gen_cmd->add_option("--rule", gen.rule, "plurality, range, approval, veto or borda")->envname("SVOTE_RULE");
  gen_cmd->add_option("--voters", gen.voters, "N")->envname("SVOTE_VOTERS");
  gen_cmd->add_option("--candidates", gen.candidates, "M")->envname("SVOTE_CANDIDATES");
  gen_cmd->add_option("--winners", gen.winners, "K")->envname("SVOTE_WINNERS");
  gen_cmd->add_option("--range-max", gen.range_max, "L (range rule)")->envname("SVOTE_RANGE_MAX");
  gen_cmd->add_option("--adversarial", gen.adversarial, "fraction of illegal ballots")->envname("SVOTE_ADVERSARIAL");
  gen_cmd->add_option("--talliers", gen.talliers, "D written to --config-out")->envname("SVOTE_TALLIERS");
  gen_cmd->add_option("--prime", gen.prime, "p13 or p31")->envname("SVOTE_PRIME");
  gen_cmd->add_option("--seed", gen.seed, "generator seed")->envname("SVOTE_SEED");
  gen_cmd->add_option("--out", gen.out, "ballot file (default stdout)")->envname("SVOTE_OUT");
  gen_cmd->add_option("--config-out", gen.config_out, "write a matching config file")->envname("SVOTE_CONFIG_OUT");
  gen_cmd->add_option("--mode", gen.mode, "accepted for symmetry; unused")->envname("SVOTE_MODE");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "cost benchmarks as CSV");
  bench_cmd->add_option("--suite", bench.suite, "compare, verify, election or all")->envname("SVOTE_SUITE");
  bench_cmd->add_option("--talliers", bench.talliers, "comma-separated D list")
      ->delimiter(',')
      ->envname("SVOTE_TALLIERS");
  bench_cmd->add_option("--prime", bench.primes, "comma-separated p13/p31 list")
      ->delimiter(',')
      ->envname("SVOTE_PRIME");
  bench_cmd->add_option("--reps", bench.reps, "repetitions per cell")->envname("SVOTE_REPS");
  bench_cmd->add_option("--entries", bench.entries, "ballot entries in the verify batch")->envname("SVOTE_ENTRIES");
  bench_cmd->add_option("--seed", bench.seed, "base seed")->envname("SVOTE_SEED");
  bench_cmd->add_option("--mode", bench.mode, "simulate or network")->envname("SVOTE_MODE");
  bench_cmd->add_option("--out", bench.out, "CSV path (default stdout)")->envname("SVOTE_OUT");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*gen_cmd) return cmd_gen(gen);
    if (*bench_cmd) return cmd_bench(bench);
  } catch (const svote::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const svote::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const svote::ChoiceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const svote::Error& e) {
    std::cerr << "protocol error: " << e.what() << "\n";
    return kExitProtocol;
  }
  return 0;
}

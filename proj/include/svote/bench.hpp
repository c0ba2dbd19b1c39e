#pragma once

#include <algorithm>
#include <chrono>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "svote/cluster.hpp"
#include "svote/comparison.hpp"
#include "svote/election_io.hpp"
#include "svote/generate.hpp"
#include "svote/protocol.hpp"
#include "svote/validation.hpp"

namespace svote {

enum class BenchSuite { Compare, Verify, Election };

inline const char* suite_name(BenchSuite s) {
  switch (s) {
    case BenchSuite::Compare: return "compare";
    case BenchSuite::Verify: return "verify";
    case BenchSuite::Election: return "election";
  }
  return "?";
}

inline const char* suite_operation(BenchSuite s) {
  switch (s) {
    case BenchSuite::Compare: return "comparison";
    case BenchSuite::Verify: return "verify_batch";
    case BenchSuite::Election: return "full_election";
  }
  return "?";
}

inline std::vector<BenchSuite> parse_suites(const std::string& s) {
  if (s == "compare") return {BenchSuite::Compare};
  if (s == "verify") return {BenchSuite::Verify};
  if (s == "election") return {BenchSuite::Election};
  if (s == "all") return {BenchSuite::Compare, BenchSuite::Verify, BenchSuite::Election};
  throw ConfigError("unknown suite '" + s + "' (expected compare, verify, election or all)");
}

struct BenchRow {
  BenchSuite suite = BenchSuite::Compare;
  std::size_t talliers = 3;
  std::string prime;
  Mode mode = Mode::Simulate;
  std::uint64_t seed = 0;
  std::size_t reps = 1;
  double wall_ms = 0;  // median over repetitions
  CircuitStats cost;   // per tallier, one repetition
  std::uint64_t reference_gates = 0;  // comparison suite only
  std::string status = "ok";
};

struct BenchOptions {
  std::vector<BenchSuite> suites{BenchSuite::Compare};
  std::vector<std::size_t> talliers{3, 5, 7, 9};
  std::vector<std::string> primes{"p13", "p31"};
  std::size_t reps = 3;
  std::uint64_t seed = 1;
  Mode mode = Mode::Simulate;
  std::size_t verify_entries = 50000;  // Plurality entries per batch
  std::size_t verify_candidates = 10;
};

namespace bench_detail {

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

struct Measured {
  CircuitStats cost;
  double wall_ms;
};

// Runs `work` on every party after an untimed setup step; reports party 0's
// cost for the work alone.
template <class Setup, class Work>
Measured measure(const ClusterOptions& copt, Setup setup, Work work) {
  auto parties = run_cluster(copt, [&](PartyContext& ctx) {
    auto state = setup(ctx);
    const CircuitStats before = ctx.engine.stats();
    const auto t0 = std::chrono::steady_clock::now();
    work(ctx, state);
    const auto t1 = std::chrono::steady_clock::now();
    return Measured{ctx.engine.stats() - before, std::chrono::duration<double, std::milli>(t1 - t0).count()};
  });
  double wall = 0;
  for (const auto& p : parties) wall = std::max(wall, p.value.wall_ms);
  return {parties.front().value.cost, wall};
}

}  // namespace bench_detail

inline BenchRow bench_cell(BenchSuite suite, std::size_t d, const std::string& prime, const BenchOptions& opt) {
  BenchRow row;
  row.suite = suite;
  row.talliers = d;
  row.prime = prime;
  row.mode = opt.mode;
  row.seed = opt.seed;
  row.reps = opt.reps;
  const PrimeModulus m = parse_prime(prime);

  ClusterOptions copt;
  copt.mode = opt.mode;
  copt.parties = d;
  copt.modulus = m;
  copt.threshold = honest_majority_threshold(d);

  std::vector<double> walls;
  for (std::size_t rep = 0; rep < std::max<std::size_t>(opt.reps, 1); ++rep) {
    copt.seed = opt.seed + rep;
    bench_detail::Measured got{};
    switch (suite) {
      case BenchSuite::Compare: {
        row.reference_gates = reference_comparison_gates(m);
        got = bench_detail::measure(
            copt,
            [&](PartyContext& ctx) {
              // Party 1 inputs two values below 2^(bits-2).
              std::vector<u64> in;
              if (ctx.party == 0) {
                const u64 bound = u64{1} << (m.bits() - 2);
                in = {ctx.engine.rng().uniform_below(bound), ctx.engine.rng().uniform_below(bound)};
              }
              return ctx.engine.input(0, in, 2);
            },
            [&](PartyContext& ctx, const std::vector<SharedValue>& xy) { less_than(ctx.engine, xy[0], xy[1]); });
        break;
      }
      case BenchSuite::Verify: {
        ElectionConfig cfg;
        cfg.rule = Rule::Plurality;
        cfg.candidates = default_candidate_names(opt.verify_candidates);
        const std::size_t q = opt.verify_entries / opt.verify_candidates;
        cfg.voters = q;
        cfg.modulus = m;
        got = bench_detail::measure(
            copt,
            [&](PartyContext& ctx) {
              std::vector<u64> in;
              if (ctx.party == 0) {
                RandomSource rng = RandomSource::from_seed(copt.seed, "svote/bench/verify");
                for (std::size_t v = 0; v < q; ++v) {
                  const auto b = random_legal_ballot(cfg, "", rng);
                  in.insert(in.end(), b.scores.begin(), b.scores.end());
                }
              }
              const auto flat = ctx.engine.input(0, in, q * cfg.candidate_count());
              std::vector<std::vector<SharedValue>> ballots(q);
              for (std::size_t v = 0; v < q; ++v) {
                ballots[v].assign(flat.begin() + v * cfg.candidate_count(), flat.begin() + (v + 1) * cfg.candidate_count());
              }
              return ballots;
            },
            [&](PartyContext& ctx, const std::vector<std::vector<SharedValue>>& ballots) {
              const auto verdicts = validate_ballots(ctx.engine, cfg, ballots);
              for (const auto& v : verdicts) {
                if (!v.accepted) throw AbortError("legal ballot rejected in verify benchmark");
              }
            });
        break;
      }
      case BenchSuite::Election: {
        ElectionConfig cfg;
        cfg.rule = Rule::Borda;
        cfg.voters = 50;
        cfg.candidates = default_candidate_names(8);
        cfg.winners = 3;
        cfg.talliers = d;
        cfg.threshold = honest_majority_threshold(d);
        cfg.modulus = m;
        cfg.seed = copt.seed;
        const auto ballots = generate_electorate(cfg, 0.0, copt.seed);
        RunOptions ropt;
        ropt.mode = opt.mode;
        const auto t0 = std::chrono::steady_clock::now();
        const auto result = run_election(cfg, ballots, ropt);
        const auto t1 = std::chrono::steady_clock::now();
        got = {result.stats.front(), std::chrono::duration<double, std::milli>(t1 - t0).count()};
        break;
      }
    }
    if (rep == 0) {
      row.cost = got.cost;
    } else if (!(got.cost.rounds == row.cost.rounds && got.cost.mult_rounds == row.cost.mult_rounds) &&
               suite != BenchSuite::Compare) {
      row.status = "unstable";
    }
    walls.push_back(got.wall_ms);
  }
  row.wall_ms = bench_detail::median(walls);
  if (suite == BenchSuite::Compare) {
    const long long delta = static_cast<long long>(row.cost.mult_gates) - static_cast<long long>(row.reference_gates);
    row.status = delta == 0 ? "ok" : "gate_delta=" + std::to_string(delta);
  }
  return row;
}

inline std::vector<BenchRow> run_bench(const BenchOptions& opt) {
  std::vector<BenchRow> rows;
  for (BenchSuite s : opt.suites) {
    for (const auto& prime : opt.primes) {
      for (std::size_t d : opt.talliers) {
        try {
          rows.push_back(bench_cell(s, d, prime, opt));
        } catch (const Error& e) {
          BenchRow row;
          row.suite = s;
          row.talliers = d;
          row.prime = prime;
          row.mode = opt.mode;
          row.seed = opt.seed;
          row.reps = opt.reps;
          row.status = std::string("skipped: ") + e.what();
          rows.push_back(row);
        }
      }
    }
  }
  return rows;
}

inline std::string bench_csv_header() {
  return "suite,D,prime,operation,mode,seed,reps,wall_ms,rounds,mult_rounds,mult_gates,bytes_per_tallier,"
         "reference_gates,status";
}

inline std::string bench_environment_line() {
  std::ostringstream out;
  out << "# env: compiler=";
#if defined(__clang__)
  out << "clang-" << __clang_major__ << "." << __clang_minor__;
#elif defined(__GNUC__)
  out << "gcc-" << __GNUC__ << "." << __GNUC_MINOR__;
#else
  out << "unknown";
#endif
  out << " hardware_threads=" << std::thread::hardware_concurrency();
  return out.str();
}

// CSV with one row per cell. The status column never contains commas.
inline std::string format_bench_csv(const std::vector<BenchRow>& rows, bool with_wall = true) {
  std::ostringstream out;
  out << bench_environment_line() << "\n" << bench_csv_header() << "\n";
  for (const auto& r : rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    out << suite_name(r.suite) << ',' << r.talliers << ',' << r.prime << ',' << suite_operation(r.suite) << ','
        << mode_name(r.mode) << ',' << r.seed << ',' << r.reps << ',';
    if (with_wall) {
      out.setf(std::ios::fixed);
      out.precision(3);
      out << r.wall_ms;
    }
    out << ',' << r.cost.rounds << ',' << r.cost.mult_rounds << ',' << r.cost.mult_gates << ','
        << r.cost.bytes_sent << ',' << r.reference_gates << ',' << status << "\n";
  }
  return out.str();
}

}  // namespace svote

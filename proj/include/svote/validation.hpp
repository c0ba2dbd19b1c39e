#pragma once

#include <span>
#include <string>
#include <vector>

#include "svote/comparison.hpp"
#include "svote/engine.hpp"
#include "svote/rules.hpp"

namespace svote {

// Products of several factor lists, all evaluated together as balanced trees:
// a list of c factors costs c - 1 gates, and the batch takes as many rounds as
// the deepest tree.
inline std::vector<SharedValue> product_tree(MpcEngine& e, std::vector<std::vector<SharedValue>> groups) {
  std::vector<SharedValue> out(groups.size(), e.constant(1));
  for (;;) {
    std::vector<SharedValue> lhs, rhs;
    for (const auto& g : groups) {
      for (std::size_t i = 0; i + 1 < g.size(); i += 2) {
        lhs.push_back(g[i]);
        rhs.push_back(g[i + 1]);
      }
    }
    if (lhs.empty()) break;
    Layer layer(e);
    auto ref = layer.mul(lhs, rhs);
    layer.run();
    auto prods = layer.products(ref);
    std::size_t at = 0;
    for (auto& g : groups) {
      std::vector<SharedValue> next;
      next.reserve((g.size() + 1) / 2);
      for (std::size_t i = 0; i + 1 < g.size(); i += 2) next.push_back(prods[at++]);
      if (g.size() % 2) next.push_back(g.back());
      g = std::move(next);
    }
  }
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (!groups[i].empty()) out[i] = groups[i].front();
  }
  return out;
}

inline std::vector<SharedValue> falling_factors(const MpcEngine& e, SharedValue x, std::size_t c) {
  std::vector<SharedValue> f;
  f.reserve(c);
  for (std::size_t i = 0; i < c; ++i) f.push_back(e.add_public(x, e.modulus().neg(i % e.modulus().value())));
  return f;
}

// x(x-1)...(x-c+1) for every x, batched.
inline std::vector<SharedValue> product_chains(MpcEngine& e, std::span<const SharedValue> xs, std::size_t c) {
  if (c == 0) throw ConfigError("product chain length must be at least 1");
  std::vector<std::vector<SharedValue>> groups;
  groups.reserve(xs.size());
  for (const SharedValue& x : xs) groups.push_back(falling_factors(e, x, c));
  return product_tree(e, std::move(groups));
}

inline SharedValue product_chain(MpcEngine& e, SharedValue x, std::size_t c) {
  return product_chains(e, std::span(&x, 1), c).front();
}

// With a small field one random combination misses a nonzero value with
// probability 1/p, so the test is run twice.
inline std::size_t zero_test_repeats(const PrimeModulus& m) { return m.bits() <= 16 ? 2 : 1; }

// For each group: true iff every value is zero. Opens sum_i r_i v_i per group
// and repetition, with public coins drawn after the values are fixed. Two
// rounds (coins, then one opening) whatever the number of groups.
inline std::vector<bool> randomized_zero_tests(MpcEngine& e, const std::vector<std::vector<SharedValue>>& groups,
                                               std::size_t repeats, std::span<const std::string> labels = {}) {
  std::vector<bool> verdict(groups.size(), true);
  std::size_t coin_count = 0;
  for (const auto& g : groups) coin_count += g.size() * repeats;
  if (coin_count == 0) return verdict;
  const auto coins = e.coins(coin_count);
  std::size_t at = 0;
  Layer layer(e);
  std::vector<Layer::Ref> refs(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) continue;
    std::vector<SharedValue> combos;
    for (std::size_t rep = 0; rep < repeats; ++rep) {
      SharedValue acc = e.constant(0);
      for (const SharedValue& v : groups[g]) acc = e.add(acc, e.scale(v, coins[at++]));
      combos.push_back(acc);
    }
    refs[g] = layer.open(combos, Disclosure::ValidationVerdict, g < labels.size() ? labels[g] : std::string{});
  }
  layer.run();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (u64 v : layer.opened(refs[g])) {
      if (v != 0) verdict[g] = false;
    }
  }
  return verdict;
}

inline bool randomized_zero_test(MpcEngine& e, std::span<const SharedValue> values) {
  if (values.empty()) return true;
  std::vector<std::vector<SharedValue>> groups{{values.begin(), values.end()}};
  return randomized_zero_tests(e, groups, zero_test_repeats(e.modulus())).front();
}

struct BallotVerdict {
  bool accepted = true;
  std::string reason;
};

// Degree of the per-entry range polynomial for a rule.
inline std::size_t entry_chain_length(const ElectionConfig& cfg) {
  switch (cfg.rule) {
    case Rule::Range: return static_cast<std::size_t>(cfg.range_max) + 1;
    case Rule::Borda: return cfg.candidate_count();
    default: return 2;
  }
}

// Checks every ballot against its rule without opening any entry. ballots[v]
// holds voter v's M entries. Illegal ballots are rejected; legal ones are
// always accepted.
inline std::vector<BallotVerdict> validate_ballots(MpcEngine& e, const ElectionConfig& cfg,
                                                   const std::vector<std::vector<SharedValue>>& ballots,
                                                   std::span<const std::string> tags = {}) {
  const std::size_t q = ballots.size();
  const std::size_t m = cfg.candidate_count();
  const PrimeModulus& mod = e.modulus();
  std::vector<BallotVerdict> verdicts(q);
  if (q == 0) return verdicts;
  for (const auto& b : ballots) {
    if (b.size() != m) throw ConfigError("ballot width differs from the candidate count");
  }
  auto label = [&](std::size_t v) { return v < tags.size() ? tags[v] : "voter" + std::to_string(v); };

  // Borda distinctness needs a random nonzero multiplier per voter.
  std::vector<SharedValue> rho;
  if (cfg.rule == Rule::Borda) rho = rand_nonzero(e, q);

  // Range products for every entry, plus the distinctness products, in one batch.
  const std::size_t c = entry_chain_length(cfg);
  std::vector<std::vector<SharedValue>> groups;
  groups.reserve(q * m + (cfg.rule == Rule::Borda ? q : 0));
  for (const auto& b : ballots) {
    for (const SharedValue& x : b) groups.push_back(falling_factors(e, x, c));
  }
  if (cfg.rule == Rule::Borda) {
    for (std::size_t v = 0; v < q; ++v) {
      std::vector<SharedValue> g{rho[v]};
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) g.push_back(e.sub(ballots[v][i], ballots[v][j]));
      }
      groups.push_back(std::move(g));
    }
  }
  const auto products = product_tree(e, std::move(groups));

  std::vector<std::vector<SharedValue>> zero_groups(q);
  std::vector<std::string> labels(q);
  for (std::size_t v = 0; v < q; ++v) {
    zero_groups[v].assign(products.begin() + v * m, products.begin() + (v + 1) * m);
    labels[v] = label(v);
  }
  const auto entries_ok = randomized_zero_tests(e, zero_groups, zero_test_repeats(mod), labels);

  // Sum checks and the distinctness product share one opening round.
  std::optional<u64> expected_sum;
  switch (cfg.rule) {
    case Rule::Plurality: expected_sum = 1; break;
    case Rule::Veto: expected_sum = m - 1; break;
    case Rule::Borda: expected_sum = m * (m - 1) / 2; break;
    default: break;
  }
  std::vector<SharedValue> sums(q);
  for (std::size_t v = 0; v < q; ++v) sums[v] = e.sum(ballots[v]);

  if (expected_sum || cfg.rule == Rule::Borda) {
    Layer layer(e);
    std::vector<Layer::Ref> sum_refs(q), dist_refs(q);
    for (std::size_t v = 0; v < q; ++v) {
      if (expected_sum) sum_refs[v] = layer.open(std::span(&sums[v], 1), Disclosure::ValidationVerdict, label(v));
      if (cfg.rule == Rule::Borda) {
        dist_refs[v] = layer.open(std::span(&products[q * m + v], 1), Disclosure::ValidationVerdict, label(v));
      }
    }
    layer.run();
    for (std::size_t v = 0; v < q; ++v) {
      if (!entries_ok[v]) {
        verdicts[v] = {false, "entry outside the rule's range"};
        continue;
      }
      if (expected_sum) {
        const u64 got = layer.opened(sum_refs[v]).front();
        if (got != *expected_sum % mod.value()) {
          verdicts[v] = {false, "entries sum to " + std::to_string(got) + ", expected " + std::to_string(*expected_sum)};
          continue;
        }
      }
      if (cfg.rule == Rule::Borda && layer.opened(dist_refs[v]).front() == 0) {
        verdicts[v] = {false, "repeated Borda score"};
      }
    }
  } else {
    for (std::size_t v = 0; v < q; ++v) {
      if (!entries_ok[v]) verdicts[v] = {false, "entry outside the rule's range"};
    }
  }

  if (cfg.rule == Rule::Approval) {
    // Only ballots that passed the binary check go on; their sum is at most M.
    std::vector<std::size_t> pending;
    std::vector<SharedValue> xs, ys;
    for (std::size_t v = 0; v < q; ++v) {
      if (!verdicts[v].accepted) continue;
      pending.push_back(v);
      xs.push_back(sums[v]);
      ys.push_back(e.constant(cfg.winners + 1));
    }
    if (!pending.empty()) {
      const auto bits = less_than(e, xs, ys);
      Layer layer(e);
      std::vector<Layer::Ref> refs(pending.size());
      for (std::size_t k = 0; k < pending.size(); ++k) {
        refs[k] = layer.open(std::span(&bits[k], 1), Disclosure::ValidationVerdict, label(pending[k]));
      }
      layer.run();
      for (std::size_t k = 0; k < pending.size(); ++k) {
        if (layer.opened(refs[k]).front() != 1) {
          verdicts[pending[k]] = {false, "approves more than " + std::to_string(cfg.winners) + " candidates"};
        }
      }
    }
  }
  return verdicts;
}

}  // namespace svote

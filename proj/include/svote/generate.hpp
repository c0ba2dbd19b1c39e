#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "svote/random.hpp"
#include "svote/rules.hpp"

namespace svote {

// Candidate names C1..CM, zero-padded so lexicographic order matches numbering.
inline std::vector<std::string> default_candidate_names(std::size_t m) {
  const std::size_t width = std::to_string(m).size();
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= m; ++i) {
    std::string num = std::to_string(i);
    names.push_back("C" + std::string(width - num.size(), '0') + num);
  }
  return names;
}

inline std::string voter_tag_for(std::size_t i, std::size_t total) {
  const std::size_t width = std::max<std::size_t>(4, std::to_string(total).size());
  std::string num = std::to_string(i + 1);
  return "v" + std::string(width - std::min(width, num.size()), '0') + num;
}

// A uniformly random legal ballot for the rule.
inline Ballot random_legal_ballot(const ElectionConfig& cfg, std::string tag, RandomSource& rng) {
  const std::size_t m = cfg.candidate_count();
  switch (cfg.rule) {
    case Rule::Plurality: return make_ballot(cfg, std::move(tag), FavoriteChoice{rng.uniform_below(m)});
    case Rule::Veto: return make_ballot(cfg, std::move(tag), VetoChoice{rng.uniform_below(m)});
    case Rule::Range: {
      ScoreChoice c;
      for (std::size_t i = 0; i < m; ++i) c.scores.push_back(rng.uniform_below(cfg.range_max + 1));
      return make_ballot(cfg, std::move(tag), c);
    }
    case Rule::Approval: {
      std::vector<std::size_t> idx(m);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(rng.uniform_below(cfg.winners + 1));
      return make_ballot(cfg, std::move(tag), ApprovalChoice{idx});
    }
    case Rule::Borda: {
      std::vector<std::size_t> order(m);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::shuffle(order.begin(), order.end(), rng);
      return make_ballot(cfg, std::move(tag), PreferenceChoice{order});
    }
  }
  throw ConfigError("unknown rule");
}

// An illegal ballot of the documented shape for the rule:
//   Plurality  N * e_m (a vote worth N)      Range     one entry L + 1
//   Approval   K + 1 approvals (or a 2)      Veto      no veto (all ones)
//   Borda      a repeated score
inline Ballot adversarial_ballot(const ElectionConfig& cfg, std::string tag, RandomSource& rng) {
  const std::size_t m = cfg.candidate_count();
  Ballot b{std::move(tag), std::vector<u64>(m, 0)};
  const std::size_t pick = rng.uniform_below(m);
  switch (cfg.rule) {
    case Rule::Plurality: b.scores[pick] = std::max<u64>(cfg.voters, 2); break;
    case Rule::Range: {
      b = random_legal_ballot(cfg, b.voter_tag, rng);
      b.scores[pick] = cfg.range_max + 1;
      break;
    }
    case Rule::Approval: {
      if (cfg.winners + 1 <= m) {
        std::vector<std::size_t> idx(m);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t i = 0; i <= cfg.winners; ++i) b.scores[idx[i]] = 1;
      } else {
        b.scores[pick] = 2;
      }
      break;
    }
    case Rule::Veto: std::fill(b.scores.begin(), b.scores.end(), 1); break;
    case Rule::Borda: {
      b = random_legal_ballot(cfg, b.voter_tag, rng);
      const std::size_t other = (pick + 1 + rng.uniform_below(m - 1)) % m;
      b.scores[other] = b.scores[pick];
      break;
    }
  }
  return b;
}

// Deterministic electorate of cfg.voters ballots; round(fraction * N) of them
// are illegal, at seeded positions.
inline std::vector<Ballot> generate_electorate(const ElectionConfig& cfg, double adversarial_fraction,
                                               std::uint64_t seed) {
  if (adversarial_fraction < 0.0 || adversarial_fraction > 1.0) {
    throw ConfigError("adversarial fraction must lie in [0, 1]");
  }
  RandomSource rng = RandomSource::from_seed(seed, "svote/gen");
  const std::size_t n = cfg.voters;
  const std::size_t bad = static_cast<std::size_t>(std::llround(adversarial_fraction * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> is_bad(n, false);
  for (std::size_t i = 0; i < bad; ++i) is_bad[order[i]] = true;
  std::vector<Ballot> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string tag = voter_tag_for(i, n);
    out.push_back(is_bad[i] ? adversarial_ballot(cfg, std::move(tag), rng) : random_legal_ballot(cfg, std::move(tag), rng));
  }
  return out;
}

}  // namespace svote

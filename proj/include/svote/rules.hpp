#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "svote/errors.hpp"
#include "svote/field.hpp"
#include "svote/sharing.hpp"

namespace svote {

enum class Rule { Plurality, Range, Approval, Veto, Borda };
enum class TieBreak { LowestIndex };

inline const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Plurality: return "plurality";
    case Rule::Range: return "range";
    case Rule::Approval: return "approval";
    case Rule::Veto: return "veto";
    case Rule::Borda: return "borda";
  }
  return "?";
}

inline Rule parse_rule(const std::string& name) {
  for (Rule r : {Rule::Plurality, Rule::Range, Rule::Approval, Rule::Veto, Rule::Borda}) {
    if (name == rule_name(r)) return r;
  }
  throw ConfigError("unknown voting rule '" + name + "'");
}

// Parameters fixed before the election opens. Candidate names are kept in
// lexicographic order; that order defines candidate indices.
struct ElectionConfig {
  Rule rule = Rule::Plurality;
  std::size_t voters = 0;  // N, the electorate size bounding every tally entry
  std::vector<std::string> candidates;
  std::size_t winners = 1;  // K
  u64 range_max = 0;        // L, Range only
  std::size_t talliers = 3; // D
  PrimeModulus modulus = mersenne31();
  TieBreak tiebreak = TieBreak::LowestIndex;
  std::size_t threshold = 1;  // Shamir degree t used inside the tallying computation
  u64 seed = 0;

  std::size_t candidate_count() const { return candidates.size(); }

  // B: the largest value any aggregated score can take.
  u64 score_bound() const {
    const u64 n = voters;
    switch (rule) {
      case Rule::Plurality:
      case Rule::Approval:
      case Rule::Veto: return n;
      case Rule::Borda: return n * candidates.size();
      case Rule::Range: return n * range_max;
    }
    return n;
  }

  void sort_candidates() {
    std::sort(candidates.begin(), candidates.end());
    if (std::adjacent_find(candidates.begin(), candidates.end()) != candidates.end()) {
      throw ConfigError("duplicate candidate name");
    }
  }

  void validate() const {
    const std::size_t m = candidates.size();
    const u64 p = modulus.value();
    if (m < 2) throw ConfigError("an election needs at least 2 candidates");
    if (!std::is_sorted(candidates.begin(), candidates.end()) ||
        std::adjacent_find(candidates.begin(), candidates.end()) != candidates.end()) {
      throw ConfigError("candidate names must be distinct and in lexicographic order");
    }
    if (voters == 0) throw ConfigError("voter count N must be positive");
    if (winners == 0 || winners > m) throw ConfigError("winner count K must lie in [1, M]");
    if (talliers < 2) throw ConfigError("at least 2 talliers are required");
    if (talliers > 0xffff) throw ConfigError("tallier count exceeds the 16-bit sender field");
    if (threshold > honest_majority_threshold(talliers)) {
      throw ConfigError("threshold t must not exceed floor((D-1)/2)");
    }
    if (rule == Rule::Range && range_max == 0) throw ConfigError("Range rule needs a positive range maximum L");
    const u128 per_voter = rule == Rule::Borda ? m : rule == Rule::Range ? range_max : 1;
    const u128 bound = per_voter * voters;
    // 2B < p gives p > B and keeps comparisons free of wraparound.
    if (2 * bound >= p) {
      throw ConfigError("modulus too small for bound B (need 2B < p, B = " + std::to_string(score_bound()) +
                        ", p = " + std::to_string(p) + ")");
    }
    if (2 * static_cast<u128>(m + 1) >= p) throw ConfigError("modulus too small for candidate count M");
    if (talliers >= p) throw ConfigError("modulus too small for tallier count D");
  }
};

struct Ballot {
  std::string voter_tag;
  std::vector<u64> scores;
};

using TallyVector = std::vector<u64>;

// Voter choices, one shape per rule. Candidate indices are 0-based.
struct FavoriteChoice { std::size_t candidate; };
struct ScoreChoice { std::vector<u64> scores; };
struct ApprovalChoice { std::vector<std::size_t> approved; };
struct VetoChoice { std::size_t candidate; };
struct PreferenceChoice { std::vector<std::size_t> best_first; };
using Choice = std::variant<FavoriteChoice, ScoreChoice, ApprovalChoice, VetoChoice, PreferenceChoice>;

inline Ballot make_ballot(const ElectionConfig& cfg, std::string voter_tag, const Choice& choice) {
  const std::size_t m = cfg.candidate_count();
  Ballot b{std::move(voter_tag), std::vector<u64>(m, 0)};
  auto check_index = [&](std::size_t c) {
    if (c >= m) throw ChoiceError("candidate index " + std::to_string(c) + " out of range");
  };
  switch (cfg.rule) {
    case Rule::Plurality: {
      const auto* c = std::get_if<FavoriteChoice>(&choice);
      if (!c) throw ChoiceError("Plurality expects a favorite candidate");
      check_index(c->candidate);
      b.scores[c->candidate] = 1;
      break;
    }
    case Rule::Range: {
      const auto* c = std::get_if<ScoreChoice>(&choice);
      if (!c) throw ChoiceError("Range expects a score vector");
      if (c->scores.size() != m) throw ChoiceError("score vector length differs from M");
      for (u64 s : c->scores) {
        if (s > cfg.range_max) throw ChoiceError("score exceeds range maximum L");
      }
      b.scores = c->scores;
      break;
    }
    case Rule::Approval: {
      const auto* c = std::get_if<ApprovalChoice>(&choice);
      if (!c) throw ChoiceError("Approval expects an approval set");
      if (c->approved.size() > cfg.winners) throw ChoiceError("approval set larger than K");
      for (std::size_t idx : c->approved) {
        check_index(idx);
        if (b.scores[idx]) throw ChoiceError("candidate approved twice");
        b.scores[idx] = 1;
      }
      break;
    }
    case Rule::Veto: {
      const auto* c = std::get_if<VetoChoice>(&choice);
      if (!c) throw ChoiceError("Veto expects a vetoed candidate");
      check_index(c->candidate);
      std::fill(b.scores.begin(), b.scores.end(), 1);
      b.scores[c->candidate] = 0;
      break;
    }
    case Rule::Borda: {
      const auto* c = std::get_if<PreferenceChoice>(&choice);
      if (!c) throw ChoiceError("Borda expects a preference order");
      if (c->best_first.size() != m) throw ChoiceError("preference order must rank all M candidates");
      std::vector<bool> seen(m, false);
      for (std::size_t pos = 0; pos < m; ++pos) {
        const std::size_t idx = c->best_first[pos];
        check_index(idx);
        if (seen[idx]) throw ChoiceError("candidate ranked twice");
        seen[idx] = true;
        b.scores[idx] = m - 1 - pos;
      }
      break;
    }
  }
  return b;
}

inline bool is_legal(const ElectionConfig& cfg, const Ballot& ballot) {
  const std::size_t m = cfg.candidate_count();
  const auto& s = ballot.scores;
  if (s.size() != m) return false;
  auto binary = [&] { return std::all_of(s.begin(), s.end(), [](u64 v) { return v <= 1; }); };
  auto total = [&] {
    u128 t = 0;
    for (u64 v : s) t += v;
    return t;
  };
  switch (cfg.rule) {
    case Rule::Plurality: return binary() && total() == 1;
    case Rule::Range: return std::all_of(s.begin(), s.end(), [&](u64 v) { return v <= cfg.range_max; });
    case Rule::Approval: return binary() && total() <= cfg.winners;
    case Rule::Veto: return binary() && total() == m - 1;
    case Rule::Borda: {
      std::vector<bool> seen(m, false);
      for (u64 v : s) {
        if (v >= m || seen[v]) return false;
        seen[v] = true;
      }
      return true;
    }
  }
  return false;
}

inline TallyVector plaintext_tally(const ElectionConfig& cfg, std::span<const Ballot> ballots) {
  TallyVector w(cfg.candidate_count(), 0);
  for (const Ballot& b : ballots) {
    if (!is_legal(cfg, b)) throw IllegalBallot("illegal ballot from voter '" + b.voter_tag + "'");
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += b.scores[i];
  }
  return w;
}

// Indices of the K highest scores, best first; equal scores favour the lower index.
inline std::vector<std::size_t> plaintext_winners(const TallyVector& w, std::size_t k,
                                                  TieBreak tiebreak = TieBreak::LowestIndex) {
  (void)tiebreak;
  std::vector<std::size_t> order(w.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
  order.resize(std::min(k, order.size()));
  return order;
}

inline std::vector<FieldElement> ballot_to_field(const Ballot& b, const PrimeModulus& m) {
  std::vector<FieldElement> out;
  out.reserve(b.scores.size());
  for (u64 s : b.scores) {
    if (s >= m.value()) throw ConfigError("ballot entry exceeds the field modulus");
    out.emplace_back(s, m);
  }
  return out;
}

}  // namespace svote

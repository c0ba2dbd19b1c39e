#include <gtest/gtest.h>

#include "oracles.hpp"
#include "test_util.hpp"

using namespace svote;
using svote::testing::config;

namespace {

oracle::Kind kind_of(Rule r) {
  switch (r) {
    case Rule::Plurality: return oracle::Kind::Plurality;
    case Rule::Range: return oracle::Kind::Range;
    case Rule::Approval: return oracle::Kind::Approval;
    case Rule::Veto: return oracle::Kind::Veto;
    case Rule::Borda: return oracle::Kind::Borda;
  }
  return oracle::Kind::Plurality;
}

constexpr Rule kRules[] = {Rule::Plurality, Rule::Range, Rule::Approval, Rule::Veto, Rule::Borda};

}  // namespace

TEST(Ballots, TemplatesPerRule) {
  const PrimeModulus p = mersenne31();
  EXPECT_EQ(make_ballot(config(Rule::Plurality, 5, 4, 1, p), "v", FavoriteChoice{1}).scores,
            (std::vector<u64>{0, 1, 0, 0}));
  EXPECT_EQ(make_ballot(config(Rule::Veto, 5, 3, 1, p), "v", VetoChoice{0}).scores, (std::vector<u64>{0, 1, 1}));
  EXPECT_EQ(make_ballot(config(Rule::Borda, 5, 3, 1, p), "v", PreferenceChoice{{2, 0, 1}}).scores,
            (std::vector<u64>{1, 0, 2}));
  EXPECT_EQ(make_ballot(config(Rule::Approval, 5, 4, 2, p), "v", ApprovalChoice{{3, 0}}).scores,
            (std::vector<u64>{1, 0, 0, 1}));
  EXPECT_EQ(make_ballot(config(Rule::Approval, 5, 4, 2, p), "v", ApprovalChoice{{}}).scores,
            (std::vector<u64>{0, 0, 0, 0}));
  EXPECT_EQ(make_ballot(config(Rule::Range, 5, 3, 1, p, 5), "v", ScoreChoice{{5, 0, 3}}).scores,
            (std::vector<u64>{5, 0, 3}));
}

TEST(Ballots, ChoiceErrors) {
  const PrimeModulus p = mersenne31();
  EXPECT_THROW(make_ballot(config(Rule::Plurality, 5, 4, 1, p), "v", FavoriteChoice{4}), ChoiceError);
  EXPECT_THROW(make_ballot(config(Rule::Plurality, 5, 4, 1, p), "v", VetoChoice{0}), ChoiceError);
  EXPECT_THROW(make_ballot(config(Rule::Range, 5, 3, 1, p, 5), "v", ScoreChoice{{6, 0, 0}}), ChoiceError);
  EXPECT_THROW(make_ballot(config(Rule::Range, 5, 3, 1, p, 5), "v", ScoreChoice{{1, 0}}), ChoiceError);
  EXPECT_THROW(make_ballot(config(Rule::Approval, 5, 4, 1, p), "v", ApprovalChoice{{0, 1}}), ChoiceError);
  EXPECT_THROW(make_ballot(config(Rule::Approval, 5, 4, 2, p), "v", ApprovalChoice{{1, 1}}), ChoiceError);
  EXPECT_THROW(make_ballot(config(Rule::Borda, 5, 3, 1, p), "v", PreferenceChoice{{0, 0, 1}}), ChoiceError);
  EXPECT_THROW(make_ballot(config(Rule::Borda, 5, 3, 1, p), "v", PreferenceChoice{{0, 1}}), ChoiceError);
}

TEST(Ballots, Legality) {
  const PrimeModulus p = mersenne31();
  const auto plur = config(Rule::Plurality, 5, 3, 1, p);
  EXPECT_TRUE(is_legal(plur, {"v", {0, 0, 1}}));
  EXPECT_FALSE(is_legal(plur, {"v", {0, 5, 0}}));
  EXPECT_FALSE(is_legal(plur, {"v", {0, 0, 0}}));
  EXPECT_FALSE(is_legal(plur, {"v", {0, 1}}));
  const auto borda = config(Rule::Borda, 5, 3, 1, p);
  EXPECT_TRUE(is_legal(borda, {"v", {2, 0, 1}}));
  EXPECT_FALSE(is_legal(borda, {"v", {1, 1, 2}}));
  EXPECT_FALSE(is_legal(borda, {"v", {0, 1, 3}}));
  const auto range = config(Rule::Range, 5, 3, 1, p, 4);
  EXPECT_TRUE(is_legal(range, {"v", {4, 4, 0}}));
  EXPECT_FALSE(is_legal(range, {"v", {5, 0, 0}}));
  const auto veto = config(Rule::Veto, 5, 3, 1, p);
  EXPECT_FALSE(is_legal(veto, {"v", {1, 1, 1}}));
  const auto appr = config(Rule::Approval, 5, 4, 2, p);
  EXPECT_FALSE(is_legal(appr, {"v", {1, 1, 1, 0}}));
  EXPECT_FALSE(is_legal(appr, {"v", {2, 0, 0, 0}}));
}

// Random small vectors, legality compared with the oracle's template check.
TEST(Ballots, LegalityMatchesOracle) {
  const PrimeModulus p = mersenne31();
  RandomSource rng = RandomSource::from_seed(21);
  for (Rule r : kRules) {
    for (int i = 0; i < 1000; ++i) {
      const std::size_t m = 2 + rng.uniform_below(4);
      const std::size_t k = 1 + rng.uniform_below(m);
      const u64 l = 1 + rng.uniform_below(3);
      const auto cfg = config(r, 5, m, k, p, l);
      Ballot b{"v", {}};
      for (std::size_t j = 0; j < m; ++j) b.scores.push_back(rng.uniform_below(r == Rule::Borda ? m + 1 : 3));
      ASSERT_EQ(is_legal(cfg, b), oracle::legal(kind_of(r), b.scores, l, k)) << rule_name(r);
      const Ballot g = random_legal_ballot(cfg, "g", rng);
      ASSERT_TRUE(oracle::legal(kind_of(r), g.scores, l, k)) << rule_name(r);
      const Ballot a = adversarial_ballot(cfg, "a", rng);
      ASSERT_FALSE(oracle::legal(kind_of(r), a.scores, l, k)) << rule_name(r);
    }
  }
}

TEST(Tally, SumsLegalBallots) {
  const PrimeModulus p = mersenne31();
  const auto cfg = config(Rule::Plurality, 3, 3, 1, p);
  std::vector<Ballot> b{{"a", {1, 0, 0}}, {"b", {1, 0, 0}}, {"c", {0, 1, 0}}};
  EXPECT_EQ(plaintext_tally(cfg, b), (TallyVector{2, 1, 0}));
  b.push_back({"d", {1, 1, 0}});
  EXPECT_THROW(plaintext_tally(cfg, b), IllegalBallot);
}

TEST(Tally, BordaTotal) {
  const PrimeModulus p = mersenne31();
  RandomSource rng = RandomSource::from_seed(22);
  const auto cfg = config(Rule::Borda, 40, 6, 2, p);
  std::vector<Ballot> b;
  for (int i = 0; i < 40; ++i) b.push_back(random_legal_ballot(cfg, "v", rng));
  const auto w = plaintext_tally(cfg, b);
  EXPECT_EQ(std::accumulate(w.begin(), w.end(), u64{0}), 40u * 6 * 5 / 2);
}

TEST(Winners, TiesFavourLowerIndex) {
  EXPECT_EQ(plaintext_winners({3, 3, 1}, 1), (std::vector<std::size_t>{0}));
  EXPECT_EQ(plaintext_winners({1, 4, 4, 2}, 2), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(plaintext_winners({0, 0, 0}, 3), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Winners, MatchesBruteForce) {
  RandomSource rng = RandomSource::from_seed(23);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t m = 2 + rng.uniform_below(9);
    const std::size_t k = 1 + rng.uniform_below(m);
    TallyVector w;
    for (std::size_t j = 0; j < m; ++j) w.push_back(rng.uniform_below(5));
    ASSERT_EQ(plaintext_winners(w, k), oracle::winners(w, k));
  }
}

// Veto with K = 1 elects the candidate vetoed least often.
TEST(Winners, VetoElectsFewestVetoes) {
  const PrimeModulus p = mersenne31();
  RandomSource rng = RandomSource::from_seed(24);
  for (int e = 0; e < 500; ++e) {
    const std::size_t m = 2 + rng.uniform_below(6);
    const std::size_t n = 1 + rng.uniform_below(30);
    const auto cfg = config(Rule::Veto, n, m, 1, p);
    std::vector<u64> vetoes(m, 0);
    std::vector<Ballot> b;
    for (std::size_t v = 0; v < n; ++v) {
      const std::size_t c = rng.uniform_below(m);
      ++vetoes[c];
      b.push_back(make_ballot(cfg, "v", VetoChoice{c}));
    }
    const std::size_t argmin = std::min_element(vetoes.begin(), vetoes.end()) - vetoes.begin();
    ASSERT_EQ(plaintext_winners(plaintext_tally(cfg, b), 1).front(), argmin);
  }
}

TEST(Config, Validation) {
  const PrimeModulus p = mersenne31();
  EXPECT_NO_THROW(config(Rule::Borda, 50, 8, 3, p).validate());
  EXPECT_THROW(config(Rule::Borda, 50, 1, 1, p).validate(), ConfigError);
  EXPECT_THROW(config(Rule::Borda, 50, 8, 9, p).validate(), ConfigError);
  EXPECT_THROW(config(Rule::Borda, 50, 8, 0, p).validate(), ConfigError);
  EXPECT_THROW(config(Rule::Borda, 0, 8, 1, p).validate(), ConfigError);
  EXPECT_THROW(config(Rule::Range, 5, 3, 1, p, 0).validate(), ConfigError);
  auto bad_t = config(Rule::Plurality, 5, 3, 1, p);
  bad_t.threshold = 2;
  EXPECT_THROW(bad_t.validate(), ConfigError);
  bad_t.talliers = 5;
  EXPECT_NO_THROW(bad_t.validate());
  bad_t.talliers = 1;
  bad_t.threshold = 0;
  EXPECT_THROW(bad_t.validate(), ConfigError);
  auto unsorted = config(Rule::Plurality, 5, 3, 1, p);
  std::swap(unsorted.candidates[0], unsorted.candidates[1]);
  EXPECT_THROW(unsorted.validate(), ConfigError);
}

TEST(Config, ModulusBound) {
  const PrimeModulus small = mersenne13();
  // Borda, N * M = B; need 2B < 8191.
  EXPECT_NO_THROW(config(Rule::Borda, 511, 8, 1, small).validate());
  try {
    config(Rule::Borda, 512, 8, 1, small).validate();
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("modulus too small for bound B"), std::string::npos);
  }
  EXPECT_EQ(config(Rule::Range, 10, 3, 1, small, 7).score_bound(), 70u);
  EXPECT_EQ(config(Rule::Veto, 10, 3, 1, small).score_bound(), 10u);
}

TEST(Config, BallotToField) {
  const PrimeModulus p = mersenne13();
  const auto f = ballot_to_field({"v", {0, 8190}}, p);
  EXPECT_EQ(f[1].value(), 8190u);
  EXPECT_THROW(ballot_to_field({"v", {8191}}, p), ConfigError);
}

#include "wlab/problems.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace wlab;
namespace P = wlab::problem;

namespace {

StreamRule random_rule(std::mt19937_64& rng, Nat k, Nat max_head = 12, Nat max_period = 6) {
  Prefix h(rng() % (max_head + 1)), t(1 + rng() % max_period);
  for (auto& v : h) v = rng() % k;
  for (auto& v : t) v = rng() % k;
  return StreamRule(h, t);
}

std::set<Nat> all_below(Nat d) {
  std::set<Nat> s;
  for (Nat i = 0; i < d; ++i) s.insert(i);
  return s;
}

}  // namespace

TEST(ProblemId, ColorCountGuard) {
  EXPECT_THROW(P::IndQ(1), Error);
  EXPECT_EQ(P::RT2(3).name(), "RT2(3)");
  EXPECT_EQ(P::LPO().name(), "LPO");
}

TEST(ValidateInstance, Examples) {
  EXPECT_TRUE(validate_instance(P::IndQ(2), StreamRule::constant(0), 10).is_certified());
  auto bad = validate_instance(P::IndQ(2), StreamRule({0, 3}, {0}), 10);
  ASSERT_TRUE(bad.is_refuted());
  EXPECT_NE(bad.witness.find("position 1"), std::string::npos);
  EXPECT_TRUE(validate_instance(P::SRT2(2), StreamRule::constant(1), 10).is_certified());
}

TEST(ValidateInstance, MalformedRuleIsDistinctFromRefuted) {
  EXPECT_THROW(validate_instance(P::IndQ(2), StreamRule({0}, {}), 5), MalformedRule);
}

TEST(ValidateInstance, StableColoringsMatchBruteForce) {
  std::mt19937_64 rng(5);
  int stable = 0, unstable = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto r = random_rule(rng, 2, 10, 3);
    bool brute = true;
    for (Nat x = 0; x < 40 && brute; ++x) {
      const Nat ref = pair_color(r, x, 600);
      for (Nat z = 600; z < 900 && brute; ++z) brute = pair_color(r, x, z) == ref;
    }
    const bool got = validate_instance(P::SRT2(2), r, 50).is_certified();
    ASSERT_EQ(got, brute) << trial;
    (got ? stable : unstable)++;
  }
  EXPECT_GT(stable, 0);
  EXPECT_GT(unstable, 0);
}

TEST(ValidateSolution, IndQWholeSpace) {
  const StreamRule c = StreamRule::constant(0);
  const Nat depth = 30;
  auto elems = all_below(depth);
  auto cert = search_density(c, 0, {elems.begin(), elems.end()}, 4000);
  ASSERT_TRUE(cert);
  Certificates certs;
  certs.density = cert;
  EXPECT_TRUE(validate_solution(P::IndQ(2), c, {elems, depth}, certs, depth).is_certified());
}

TEST(ValidateSolution, IndQNeedsCertificate) {
  EXPECT_THROW(validate_solution(P::IndQ(2), StreamRule::constant(0), {{0, 1}, 5}, {}, 5), MissingCertificate);
}

TEST(ValidateSolution, IndQForeignWitnessRefuted) {
  const StreamRule c({}, {0, 1});  // zero and negatives color 0, positives color 1
  std::set<Nat> elems{1, 3};       // 1 and 2
  auto cert = search_density(c, 1, {1, 3}, 2000);
  ASSERT_TRUE(cert);
  Certificates certs;
  certs.density = cert;
  // Witnesses below depth must themselves be claimed.
  auto v = validate_solution(P::IndQ(2), c, {elems, 2000}, certs, 2000);
  EXPECT_TRUE(v.is_refuted()) << v.str();
  // The color-0 class has a largest element (zero), so no lower/upper witness set exists.
  EXPECT_FALSE(search_density(c, 0, {0}, 4000));
}

TEST(ValidateSolution, CertifiedIndQIsSoundOnAllPairs) {
  std::mt19937_64 rng(9);
  int certified = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const Nat color = rng() % 2;
    Prefix h(rng() % 6);
    for (auto& v : h) v = rng() % 2;
    const StreamRule c(h, {color});
    const Nat depth = 25;
    std::set<Nat> cls;
    for (Nat n = 0; n < depth; ++n)
      if (c(n) == color) cls.insert(n);
    auto cert = search_density(c, color, {cls.begin(), cls.end()}, 4000);
    ASSERT_TRUE(cert);
    Certificates certs;
    certs.density = cert;
    auto v = validate_solution(P::IndQ(2), c, {cls, depth}, certs, depth);
    ASSERT_TRUE(v.is_certified()) << v.str();
    ++certified;
    for (Nat a : cls)
      for (Nat b : cls) {
        if (!rat_less(a, b)) continue;
        const Nat m = cert->between.at({a, b});
        ASSERT_TRUE(rat_less(a, m) && rat_less(m, b));
        ASSERT_EQ(c(m), color);
      }
  }
  EXPECT_EQ(certified, 40);
}

TEST(ValidateSolution, RT2PairWitness) {
  // c{0,1} = rule(0) = 0, c{0,2} = rule(2) = 1
  const StreamRule r({0, 0, 1}, {0});
  ASSERT_EQ(pair_color(r, 0, 1), 0u);
  ASSERT_EQ(pair_color(r, 0, 2), 1u);
  auto v = validate_solution(P::RT2(2), r, {{0, 1, 2}, 10}, {}, 10);
  EXPECT_TRUE(v.is_refuted());
}

TEST(ValidateSolution, IndEGridConsistent) {
  const StreamRule r = StreamRule::constant(1);
  SolutionPrefix sol;
  ColumnCertificate cert;
  for (Nat x = 0; x < 5; ++x) {
    cert.columns.push_back(x);
    for (Nat y = 0; y < 5; ++y) {
      sol.elements.insert(cantor_pair(x, y));
      cert.rows[x].push_back(y);
    }
  }
  // Oracle: 25 distinct points, all of color 1.
  ASSERT_EQ(sol.elements.size(), 25u);
  for (Nat e : sol.elements) ASSERT_EQ(r(e), 1u);
  Certificates certs;
  certs.column = cert;
  sol.depth = 50;
  auto v = validate_solution(P::IndE(2), r, sol, certs, 50);
  EXPECT_EQ(v, Verdict::consistent(50));
  sol.elements.erase(cantor_pair(2, 3));
  EXPECT_TRUE(validate_solution(P::IndE(2), r, sol, certs, 50).is_refuted());
}

TEST(ValidateSolution, FirstOrderAnswers) {
  EXPECT_TRUE(validate_solution(P::LPO(), StreamRule({0, 0, 1}, {0}), {{1}, 1}, {}, 5).is_certified());
  EXPECT_TRUE(validate_solution(P::LPO(), StreamRule({0, 0, 1}, {0}), {{0}, 1}, {}, 5).is_refuted());
  // g(s) = v+1 enumerates v
  const StreamRule g({0, 1, 3}, {0});
  EXPECT_TRUE(validate_solution(P::CN(), g, {{0}, 1}, {}, 5).is_refuted());
  EXPECT_TRUE(validate_solution(P::CN(), g, {{1}, 1}, {}, 5).is_certified());
  EXPECT_TRUE(validate_solution(P::CRT1(3), StreamRule({2}, {0, 1}), {{2}, 1}, {}, 5).is_refuted());
  EXPECT_TRUE(validate_solution(P::CRT1(3), StreamRule({2}, {0, 1}), {{1}, 1}, {}, 5).is_certified());
}

TEST(ValidateSolution, RefutationPersistsWithDepth) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    auto r = random_rule(rng, 2);
    std::set<Nat> sol;
    for (Nat i = 0; i < 20; ++i)
      if (rng() % 3 == 0) sol.insert(i);
    for (Nat d = 1; d < 20; ++d) {
      auto v = validate_solution(P::RT2(2), r, {sol, d}, {}, d);
      if (!v.is_refuted()) continue;
      for (Nat d2 = d; d2 < 4 * d; ++d2)
        ASSERT_TRUE(validate_solution(P::RT2(2), r, {sol, d2}, {}, d2).is_refuted());
      break;
    }
  }
}

TEST(ValidateSolution, IShuffle) {
  // codes 1 and 2 are 1 and -1; the interval (-1,1)
  const Nat I = cantor_pair(2, 1);
  EXPECT_TRUE(validate_solution(P::IShuffle(2), StreamRule::constant(0), {{I}, 1}, {}, 100).is_certified());
  EXPECT_TRUE(validate_solution(P::IShuffle(2), StreamRule::constant(0), {{cantor_pair(1, 2)}, 1}, {}, 100).is_refuted());
  // Zero (code 0) has a color that never recurs.
  EXPECT_TRUE(validate_solution(P::IShuffle(2), StreamRule({1}, {0}), {{I}, 1}, {}, 100).is_refuted());
}

TEST(ColumnAnalysis, Examples) {
  EXPECT_EQ(stable_color(StreamRule::constant(0), 7), 0u);
  const StreamRule alt({}, {0, 1});
  EXPECT_EQ(stable_color(alt, 0), std::nullopt);
  EXPECT_EQ(colors_infinite_in_column(alt, 0), (std::set<Nat>{0, 1}));
  // cantor codes of column 3 avoid residue 1 mod 3
  const StreamRule col3({}, {1, 0, 1});
  std::set<Nat> residues;
  for (Nat y = 0; y < 60; ++y) residues.insert(cantor_pair(3, y) % 3);
  ASSERT_EQ(residues, (std::set<Nat>{0, 2}));
  EXPECT_EQ(stable_color(col3, 3), 1u);
  // head-only colors do not recur
  const StreamRule headed({5, 5, 5, 5, 5}, {0});
  EXPECT_EQ(colors_infinite_in_column(headed, 0), (std::set<Nat>{0}));
}

TEST(ColumnAnalysis, AgreesWithBruteForce) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    auto r = random_rule(rng, 3, 40, 6);
    for (Nat x = 0; x < 50; ++x) {
      std::set<Nat> seen;
      for (Nat y = 200; y < 1200; ++y) seen.insert(r(cantor_pair(x, y)));
      ASSERT_EQ(colors_infinite_in_column(r, x), seen);
      const auto sc = stable_color(r, x);
      ASSERT_EQ(sc.has_value(), seen.size() == 1);
      if (sc) {
        ASSERT_EQ(*sc, *seen.begin());
      }
    }
  }
}

TEST(Stability, CertificateMatchesBruteForce) {
  const StreamRule r({1, 0, 1, 1}, {0});
  auto cert = stability_certificate(r, 10);
  ASSERT_EQ(cert.bound.size(), 10u);
  EXPECT_TRUE(check_stability(r, cert, 200).ok());
  cert.bound[0] = 1;  // c{0,1} = 1 but c{0,z} = 0 later
  EXPECT_TRUE(check_stability(r, cert, 200).is_refuted());
}

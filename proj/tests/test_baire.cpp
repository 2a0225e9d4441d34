#include "wlab/baire.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>

using namespace wlab;

TEST(Pairing, Examples) {
  EXPECT_EQ(cantor_pair(0, 0), 0u);
  EXPECT_EQ(cantor_pair(1, 0), 1u);
  EXPECT_EQ(cantor_pair(0, 1), 2u);
  EXPECT_EQ(cantor_unpair(0), (std::pair<Nat, Nat>{0, 0}));
  EXPECT_EQ(cantor_unpair(2), (std::pair<Nat, Nat>{0, 1}));
}

TEST(Pairing, UnpairFourteenMatchesBruteForce) {
  std::optional<std::pair<Nat, Nat>> found;
  for (Nat x = 0; x <= 14; ++x)
    for (Nat y = 0; x + y <= 14; ++y)
      if (cantor_pair(x, y) == 14) found = {x, y};
  ASSERT_TRUE(found);
  EXPECT_EQ(cantor_unpair(14), *found);
  EXPECT_EQ(*found, (std::pair<Nat, Nat>{0, 4}));
}

TEST(Pairing, RoundTrip) {
  for (Nat n = 0; n < 10000; ++n) {
    auto [x, y] = cantor_unpair(n);
    ASSERT_EQ(cantor_pair(x, y), n);
  }
  auto [x, y] = cantor_unpair(cantor_pair(123456789, 987654321));
  EXPECT_EQ(x, 123456789u);
  EXPECT_EQ(y, 987654321u);
}

TEST(Rationals, FirstCodes) {
  EXPECT_EQ(rat_enum(0), (Rational{0, 1}));
  EXPECT_EQ(rat_enum(1), (Rational{1, 1}));
  EXPECT_EQ(rat_enum(2), (Rational{-1, 1}));
  // Reduced pairs in cantor order of (a-1,b-1): (1,1),(2,1),(1,2),(3,1),(1,3),...
  EXPECT_EQ(rat_enum(3), (Rational{2, 1}));
  EXPECT_EQ(rat_enum(5), (Rational{1, 2}));
  EXPECT_EQ(rat_enum(7), (Rational{3, 1}));
  EXPECT_EQ(rat_enum(9), (Rational{1, 3}));
}

TEST(Rationals, MatchesIndependentEnumeration) {
  // Oracle: sort all reduced pairs with small coordinates by their cantor code.
  std::map<Nat, std::pair<Nat, Nat>> by_code;
  for (Nat a = 1; a <= 60; ++a)
    for (Nat b = 1; b <= 60; ++b)
      if (std::gcd(a, b) == 1) by_code[cantor_pair(a - 1, b - 1)] = {a, b};
  Nat m = 1;
  for (auto [code, ab] : by_code) {
    if (code >= cantor_pair(0, 59)) break;  // complete diagonals only
    auto q = rat_enum(2 * m - 1);
    ASSERT_EQ(q, (Rational{static_cast<std::int64_t>(ab.first), ab.second})) << "m=" << m;
    ++m;
  }
}

TEST(Rationals, Compare) {
  EXPECT_EQ(rat_compare(0, 1), std::strong_ordering::less);
  EXPECT_EQ(rat_compare(5, 5), std::strong_ordering::equal);
  EXPECT_EQ(rat_compare(2, 0), std::strong_ordering::less);
}

TEST(Rationals, InjectiveAndSurjectiveOnSmallFractions) {
  std::set<std::pair<std::int64_t, Nat>> seen;
  for (Nat n = 0; n < 10000; ++n) {
    auto q = rat_enum(n);
    ASSERT_EQ(std::gcd(static_cast<Nat>(q.num < 0 ? -q.num : q.num), q.den), q.num == 0 ? q.den : 1u);
    ASSERT_TRUE(seen.emplace(q.num, q.den).second) << "duplicate at " << n;
  }
  for (std::int64_t p = -20; p <= 20; ++p)
    for (Nat q = 1; q <= 20; ++q) {
      const Nat g = std::gcd(static_cast<Nat>(p < 0 ? -p : p), q);
      if (g != 1 && !(p == 0 && q == 1)) continue;
      EXPECT_TRUE(rat_code_of({p, q}, 2000)) << p << "/" << q;
    }
}

TEST(StreamRule, EmptyTailIsMalformed) {
  EXPECT_THROW(StreamRule({1, 2}, {}), MalformedRule);
}

TEST(StreamRule, ValueAndNormalize) {
  StreamRule r({5, 0, 1}, {0, 1, 0, 1});
  EXPECT_EQ(r.take(8), (Prefix{5, 0, 1, 0, 1, 0, 1, 0}));
  auto n = r.normalized();
  EXPECT_EQ(n.head(), (Prefix{5}));
  EXPECT_EQ(n.tail(), (Prefix{0, 1}));
  EXPECT_EQ(n.take(40), r.take(40));
}

TEST(StreamRule, Join) {
  auto alt = join_streams(StreamRule::constant(0), StreamRule::constant(1));
  EXPECT_EQ(alt.take(6), (Prefix{0, 1, 0, 1, 0, 1}));
  EXPECT_EQ(join_streams(StreamRule::constant(3), StreamRule::constant(3)), StreamRule::constant(3));
  auto j = join_streams(StreamRule({7}, {0}), StreamRule::constant(0));
  EXPECT_EQ(j.head(), (Prefix{7, 0}));
  EXPECT_EQ(j.tail(), (Prefix{0}));
}

TEST(StreamRule, JoinSplitProperty) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    auto random_rule = [&] {
      Prefix h(rng() % 5), t(1 + rng() % 4);
      for (auto& v : h) v = rng() % 4;
      for (auto& v : t) v = rng() % 4;
      return StreamRule(h, t);
    };
    auto p = random_rule(), q = random_rule();
    auto j = join_streams(p, q);
    for (Nat n = 0; n < 60; ++n) {
      ASSERT_EQ(j(2 * n), p(n));
      ASSERT_EQ(j(2 * n + 1), q(n));
    }
    auto [a, b] = split_stream(j);
    ASSERT_EQ(a.take(60), p.take(60));
    ASSERT_EQ(b.take(60), q.take(60));
  }
}

TEST(StreamRule, RowAndColumnRulesAreExact) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    Prefix h(rng() % 20), t(1 + rng() % 5);
    for (auto& v : h) v = rng() % 3;
    for (auto& v : t) v = rng() % 3;
    StreamRule r(h, t);
    for (Nat i = 0; i < 12; ++i) {
      auto row = row_rule(r, i);
      auto col = column_rule(r, i);
      for (Nat j = 0; j < 300; ++j) {
        ASSERT_EQ(row(j), r(cantor_pair(i, j)));
        ASSERT_EQ(col(j), r(cantor_pair(j, i)));
      }
    }
  }
}

TEST(Functional, Examples) {
  const auto& cat = Catalog::standard();
  Prefix oracle{4, 2};
  EXPECT_EQ(eval_functional(cat.at(0), oracle, 0, 10), EvalOutcome(Converged{4, 1}));
  EXPECT_EQ(eval_functional(cat.at(0), Prefix{}, 0, 10), EvalOutcome(NotYet{}));
  const auto* succ = cat.find("succ");
  ASSERT_NE(succ, nullptr);
  EXPECT_EQ(eval_functional(*succ, Prefix{0, 5}, 1, 2), EvalOutcome(Converged{6, 2}));
  EXPECT_EQ(eval_functional(*succ, Prefix{0, 5}, 1, 0), EvalOutcome(NotYet{}));
}

TEST(Functional, MonotoneAndUseSound) {
  const auto& cat = Catalog::standard();
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto& f = cat.at(rng() % cat.size());
    Prefix tau(rng() % 12);
    for (auto& v : tau) v = rng() % 3;
    Prefix sigma(tau.begin(), tau.begin() + (tau.empty() ? 0 : rng() % (tau.size() + 1)));
    const Nat input = rng() % 6;
    const Nat b = rng() % 20, b2 = b + rng() % 20;
    auto small = eval_functional(f, sigma, input, b);
    auto big = eval_functional(f, tau, input, b2);
    if (auto* c = converged(small)) {
      ASSERT_EQ(big, small) << f.name;
      ASSERT_LE(c->use, sigma.size());
      Prefix cut(sigma.begin(), sigma.begin() + c->use);
      ASSERT_EQ(eval_functional(f, cut, input, b), small);
      if (f.has_use_bound()) {
        ASSERT_LE(c->use, f.declared_use_bound(input));
      }
    }
  }
}

TEST(Functional, JoinOracleCountsHalves) {
  Prefix p{1, 2, 3}, q{7, 8, 9};
  PrefixOracle po(p), qo(q);
  JoinOracle j(po, qo);
  const auto& id = Catalog::standard().at(0);
  EXPECT_EQ(eval_functional(id, j, 3, 5), EvalOutcome(Converged{8, 4}));
  EXPECT_EQ(j.even_reads(), 0u);
  EXPECT_EQ(j.odd_reads(), 1u);
}

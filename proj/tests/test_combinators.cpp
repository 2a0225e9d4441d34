#include "wlab/combinators.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace wlab;
namespace P = wlab::problem;

namespace {

StreamRule random_rule(std::mt19937_64& rng, Nat k) {
  Prefix h(rng() % 10), t(1 + rng() % 4);
  for (auto& v : h) v = rng() % k;
  for (auto& v : t) v = rng() % k;
  return StreamRule(h, t);
}

/// Monochromatic color-class prefix of an RT1 instance.
Solution rt1_solution(const StreamRule& c, Nat color, Nat depth) {
  std::set<Nat> s;
  for (Nat n = 0; n < depth; ++n)
    if (c(n) == color) s.insert(n);
  return Solution::of(s, depth);
}

}  // namespace

TEST(Product, MeetOfComponents) {
  const auto pid = make_product(P::RT1(2), P::RT1(3));
  auto a = StreamRule({}, {0, 1}), b = StreamRule({}, {2});
  auto inst = Instance::pair(Instance::atomic(a), Instance::atomic(b));
  EXPECT_TRUE(validate_instance(pid, inst, 20).is_certified());
  Solution good;
  good.parts = {rt1_solution(a, 1, 20), rt1_solution(b, 2, 20)};
  EXPECT_EQ(validate_solution(pid, inst, good, 20), Verdict::consistent(20));
  Instance mixed = Instance::pair(Instance::atomic(a), Instance::atomic(StreamRule({}, {1, 2})));
  auto v = validate_solution(pid, mixed, good, 20);
  ASSERT_TRUE(v.is_refuted());
  EXPECT_EQ(v.witness.rfind("right", 0), 0u) << v.witness;
}

TEST(Product, RandomComponentsAcceptIffBoth) {
  std::mt19937_64 rng(4);
  const auto pid = make_product(P::RT1(2), P::RT1(2));
  for (int trial = 0; trial < 100; ++trial) {
    auto a = random_rule(rng, 2), b = random_rule(rng, 2);
    auto inst = Instance::pair(Instance::atomic(a), Instance::atomic(b));
    Solution s;
    s.parts = {Solution::of({rng() % 10, rng() % 10}, 10), Solution::of({rng() % 10, rng() % 10}, 10)};
    const bool left = validate_solution(P::RT1(2), a, s.parts[0].set, {}, 10).ok();
    const bool right = validate_solution(P::RT1(2), b, s.parts[1].set, {}, 10).ok();
    ASSERT_EQ(validate_solution(pid, inst, s, 10).ok(), left && right);
  }
}

TEST(Star, CountEchoAndComponents) {
  const auto pid = make_star(P::CRT1(2));
  Instance empty;
  empty.tag = 0;
  Solution none;
  EXPECT_TRUE(validate_solution(pid, empty, none, 5).is_certified());

  Instance three;
  three.tag = 3;
  for (int i = 0; i < 3; ++i) three.parts.push_back(Instance::atomic(StreamRule::constant(i == 2 ? 1 : 0)));
  Solution s;
  s.tag = 3;
  s.parts = {Solution::of({0}, 1), Solution::of({0}, 1), Solution::of({0}, 1)};
  auto v = validate_solution(pid, three, s, 5);
  ASSERT_TRUE(v.is_refuted());
  EXPECT_EQ(v.witness.rfind("index 2", 0), 0u);
  s.tag = 2;
  EXPECT_TRUE(validate_solution(pid, three, s, 5).is_refuted());
}

TEST(Star, SingletonMatchesUnderlying) {
  std::mt19937_64 rng(8);
  const auto pid = make_star(P::CRT1(3));
  for (int trial = 0; trial < 100; ++trial) {
    auto c = random_rule(rng, 3);
    Instance one;
    one.tag = 1;
    one.parts = {Instance::atomic(c)};
    Solution s;
    s.tag = 1;
    s.parts = {Solution::of({rng() % 3}, 1)};
    ASSERT_EQ(validate_solution(pid, one, s, 10).tag, validate_solution(P::CRT1(3), c, s.parts[0].set, {}, 10).tag);
  }
}

TEST(Hat, RowsAndRefutation) {
  const auto pid = make_hat(P::LPO());
  const Instance zeros = Instance::atomic(StreamRule::constant(0));
  Solution s;
  for (Nat i = 0; i < 30; ++i) s.rows[i] = Solution::of({0}, 1);
  for (Nat d : {1, 5, 20}) EXPECT_EQ(validate_solution(pid, zeros, s, d), Verdict::consistent(d));
  // Row 5 gets a 1 at stage 0: code cantor_pair(5, 0) = 15.
  Prefix head(16, 0);
  head[15] = 1;
  const Instance one_in_5 = Instance::atomic(StreamRule(head, {0}));
  EXPECT_TRUE(validate_solution(pid, one_in_5, s, 5).ok());
  auto v = validate_solution(pid, one_in_5, s, 6);
  ASSERT_TRUE(v.is_refuted());
  EXPECT_EQ(v.witness.rfind("row 5", 0), 0u);
}

TEST(Hat, LpoAgreesWithBruteForce) {
  std::mt19937_64 rng(12);
  const auto pid = make_hat(P::LPO());
  for (int trial = 0; trial < 5; ++trial) {
    Prefix h(rng() % 300), t(1 + rng() % 5);
    for (auto& v : h) v = rng() % 7 == 0;
    for (auto& v : t) v = rng() % 9 == 0;
    const StreamRule r(h, t);
    Solution s;
    for (Nat i = 0; i < 200; ++i) {
      bool one = false;
      for (Nat j = 0; j < 2000 && !one; ++j) one = r(cantor_pair(i, j)) == 1;
      s.rows[i] = Solution::of({one ? 1u : 0u}, 1);
    }
    ASSERT_TRUE(validate_solution(pid, Instance::atomic(r), s, 200).ok());
    s.rows[rng() % 200].set.elements = {2};
    ASSERT_TRUE(validate_solution(pid, Instance::atomic(r), s, 200).is_refuted());
  }
}

TEST(Coproduct, Dispatch) {
  std::mt19937_64 rng(2);
  const auto pid = make_coproduct(P::CRT1(2), P::CN());
  for (int trial = 0; trial < 100; ++trial) {
    auto c = random_rule(rng, 2);
    Instance inst;
    inst.tag = 0;
    inst.parts = {Instance::atomic(c)};
    Solution s;
    s.tag = 0;
    s.parts = {Solution::of({rng() % 2}, 1)};
    ASSERT_EQ(validate_solution(pid, inst, s, 10), validate_solution(P::CRT1(2), c, s.parts[0].set, {}, 10));
    ASSERT_EQ(validate_instance(pid, inst, 10), validate_instance(P::CRT1(2), c, 10));
  }
  Instance right;
  right.tag = 1;
  right.parts = {Instance::atomic(StreamRule({1}, {0}))};  // enumerates 0
  Solution s;
  s.tag = 1;
  s.parts = {Solution::of({0}, 1)};
  EXPECT_TRUE(validate_solution(pid, right, s, 10).is_refuted());
  s.parts = {Solution::of({1}, 1)};
  EXPECT_TRUE(validate_solution(pid, right, s, 10).is_certified());
  right.tag = 2;
  EXPECT_TRUE(validate_instance(pid, right, 10).is_refuted());
}

TEST(Coproduct, IndexedFamilyNesting) {
  // IndQ_2 ⊔ (IndQ_3 ⊔ ...) with the color count selecting the side
  const auto pid = make_coproduct(P::CRT1(2), make_coproduct(P::CRT1(3), P::CRT1(4)));
  Instance inner;
  inner.tag = 0;
  inner.parts = {Instance::atomic(StreamRule({}, {2}))};
  Instance outer;
  outer.tag = 1;
  outer.parts = {inner};
  EXPECT_TRUE(validate_instance(pid, outer, 10).is_certified());
  Solution s;
  s.tag = 1;
  Solution si;
  si.tag = 0;
  si.parts = {Solution::of({2}, 1)};
  s.parts = {si};
  EXPECT_TRUE(validate_solution(pid, outer, s, 10).is_certified());
}

TEST(Jump, LimitsAndBounds) {
  const auto pid = make_jump(P::LPO());
  Instance inst = Instance::atomic(StreamRule::constant(0));
  for (Nat i = 0; i < 20; ++i) inst.stabilization_bound[i] = 0;
  EXPECT_EQ(jump_limit(inst.rule()), StreamRule::constant(0));
  EXPECT_TRUE(validate_instance(pid, inst, 20).ok());

  // Coordinate 0 reads 1 at stage 0, then 0: code cantor_pair(0,0) = 0.
  Instance once = Instance::atomic(StreamRule({1}, {0}));
  once.stabilization_bound = inst.stabilization_bound;
  once.stabilization_bound[0] = 1;
  EXPECT_TRUE(validate_instance(pid, once, 20).ok());
  EXPECT_TRUE(validate_solution(pid, once, Solution::of({0}, 1), 20).is_certified());
  once.stabilization_bound[0] = 0;
  EXPECT_TRUE(validate_instance(pid, once, 20).is_refuted());

  // Every coordinate turns to 1 once its codes pass the zero head.
  Instance late = Instance::atomic(StreamRule(Prefix(10, 0), {1}));
  for (Nat i = 0; i < 20; ++i) late.stabilization_bound[i] = row_rule(late.rule(), i).head_size();
  EXPECT_EQ(late.stabilization_bound[0], 4u);  // codes 0,2,5,9 then 14
  EXPECT_EQ(jump_limit(late.rule()), StreamRule::constant(1));
  EXPECT_TRUE(validate_instance(pid, late, 20).ok());
  EXPECT_TRUE(validate_solution(pid, late, Solution::of({1}, 1), 20).is_certified());
  EXPECT_TRUE(validate_solution(pid, late, Solution::of({0}, 1), 20).is_refuted());
}

TEST(Jump, LimitOfPeriodicRows) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    auto r = random_rule(rng, 2);
    bool converges = true;
    for (Nat x = 0; x < column_sample_bound(r) && converges; ++x) converges = stable_color(r, x).has_value();
    if (!converges) {
      EXPECT_THROW(jump_limit(r), Error);
      continue;
    }
    const StreamRule lim = jump_limit(r);
    for (Nat i = 0; i < 60; ++i) ASSERT_EQ(lim(i), r(cantor_pair(i, 500)));
  }
}

TEST(WeakPar, RowsAndCertificate) {
  const auto pid = make_weak_parallelization(P::RT1(2));
  const Instance inst = Instance::atomic(StreamRule::constant(1));
  Solution s;
  ColumnCertificate cert;
  for (Nat n = 0; n < 20; n += 2) {
    s.rows[n] = Solution::of({0, 1, 2, 3}, 4);
    cert.columns.push_back(n);
  }
  s.certs.column = cert;
  EXPECT_EQ(validate_solution(pid, inst, s, 20), Verdict::consistent(20));
  // Rows of different colors are allowed in the weak version.
  const Instance alt = Instance::atomic(StreamRule({}, {0, 1}));
  Solution t;
  t.certs.column = ColumnCertificate{{0, 1}, {}, {}};
  for (Nat n : {0, 1}) {
    auto row = row_rule(alt.rule(), n);
    std::set<Nat> cls;
    for (Nat j = 0; j < 8; ++j)
      if (row(j) == row(0)) cls.insert(j);
    t.rows[n] = Solution::of(cls, 8);
  }
  ASSERT_NE(row_rule(alt.rule(), 0)(0), row_rule(alt.rule(), 1)(0));
  EXPECT_TRUE(validate_solution(pid, alt, t, 8).ok());
  s.rows[4] = Solution::of({0}, 1);
  s.rows[4].set.elements = {0, 1};
  Prefix head(51, 1);
  head[50] = 0;
  const Instance mixed = Instance::atomic(StreamRule(head, {1}));
  s.rows[4].set.elements = {0, 5};  // codes cantor_pair(4,0)=10 and cantor_pair(4,5)=50
  auto v = validate_solution(pid, mixed, s, 20);
  ASSERT_TRUE(v.is_refuted());
  EXPECT_EQ(v.witness.rfind("row 4", 0), 0u) << v.witness;
  Solution no_cert = s;
  no_cert.certs.column.reset();
  EXPECT_THROW(validate_solution(pid, inst, no_cert, 20), MissingCertificate);
}

TEST(Compose, BoundFromCN) {
  const auto pid = make_compose(P::IndQN(), P::CN());
  const StreamRule c = StreamRule::constant(0);
  const StreamRule g({}, {0});
  Instance inst = Instance::pair(Instance::atomic(c), Instance::atomic(g));
  Solution s;
  std::set<Nat> all;
  for (Nat n = 0; n < 10; ++n) all.insert(n);
  Certificates certs;
  certs.density = search_density(c, 0, {all.begin(), all.end()}, 2000);
  s.parts = {Solution::of(all, 10, certs), Solution::of({0}, 1)};
  EXPECT_TRUE(validate_solution(pid, inst, s, 10).is_certified());
  inst.parts[1] = Instance::atomic(StreamRule({1}, {0}));  // enumerates 0
  EXPECT_TRUE(validate_solution(pid, inst, s, 10).is_refuted());
}

TEST(CompProduct, IdentityEchoesInput) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    auto y = random_rule(rng, 9);
    const Nat len = 1 + rng() % 30;
    auto t = comp_product_eval(0, 0, 0, y, 100, len);
    ASSERT_TRUE(t.complete);
    ASSERT_EQ(t.output, y.take(len));
    ASSERT_EQ(t.stages.size(), 3u);
  }
}

TEST(CompProduct, SmallBudgetStalls) {
  auto t = comp_product_eval(0, 0, 0, StreamRule::constant(3), 0, 5);
  EXPECT_FALSE(t.complete);
  EXPECT_EQ(t.stalled_at, "g");
  EXPECT_TRUE(t.output.empty());
}

TEST(CompProduct, SuccessorOnSecondHalf) {
  const auto& cat = Catalog::standard();
  const Nat succ = cat.find("succ")->id;
  auto t = comp_product_eval(succ, 0, 0, StreamRule({}, {4}), 50, 6);
  ASSERT_TRUE(t.complete);
  EXPECT_EQ(t.output, (Prefix{4, 5, 4, 5, 4, 5}));
}

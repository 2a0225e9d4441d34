#include "wlab/adversaries.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace wlab;

namespace {

DuelSpec spec(std::string engine, std::string delta, std::string psi, Nat horizon, Nat k = 2) {
  DuelSpec s;
  s.engine = std::move(engine);
  s.delta = std::move(delta);
  s.psi = std::move(psi);
  s.horizon = horizon;
  s.seed = 5;
  s.k = k;
  return s;
}

/// Replaces the data of the first record with the given action.
Transcript tamper(Transcript t, const std::string& action, const std::function<void(std::vector<Nat>&)>& f) {
  for (auto& r : t.records)
    if (r.action == action) {
      f(r.data);
      break;
    }
  return t;
}

bool endpoints_from(const std::vector<Nat>& set, const CodeInterval& iv) {
  return std::count(set.begin(), set.end(), iv.lo) && std::count(set.begin(), set.end(), iv.hi);
}

}  // namespace

// ---------------------------------------------------------------------------
// Lemmas

TEST(EBound, Values) {
  const std::vector<Nat> expected{3, 8, 34, 206, 1650, 16502};
  for (Nat n = 1; n <= 6; ++n) EXPECT_EQ(e_bound(n), expected[n - 1]);
  EXPECT_THROW(e_bound(0), Error);
}

TEST(DisjointIntervals, SingleSetTakesTheLeftmostPair) {
  // Codes 0, 1, 2 are 0, 1, −1.
  const auto ivs = select_disjoint_intervals({{0, 1, 2}});
  ASSERT_EQ(ivs.size(), 1u);
  EXPECT_EQ(ivs[0], (CodeInterval{2, 0}));
}

TEST(DisjointIntervals, DeficientSetIsNamed) {
  try {
    select_disjoint_intervals({std::vector<Nat>(8), {1, 2, 3}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("set 0"), std::string::npos);
  }
  std::vector<Nat> eight{0, 1, 2, 3, 4, 5, 6, 7};
  try {
    select_disjoint_intervals({eight, {1, 2, 3}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("set 1"), std::string::npos);
  }
}

TEST(DisjointIntervals, InterleavedPairAgreesWithBruteForce) {
  std::vector<Nat> a, b;
  for (Nat i = 0; i < 16; ++i) (i % 2 ? b : a).push_back(i);
  const auto ivs = select_disjoint_intervals({a, b});
  EXPECT_TRUE(disjoint(ivs[0], ivs[1]));
  EXPECT_TRUE(endpoints_from(a, ivs[0]));
  EXPECT_TRUE(endpoints_from(b, ivs[1]));
  EXPECT_TRUE(disjoint_selection_exists({a, b}));
}

class RandomIntervals : public ::testing::TestWithParam<Nat> {};

TEST_P(RandomIntervals, DisjointWithProvenance) {
  const Nat k = GetParam();
  std::mt19937_64 rng(1000 + k);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::vector<Nat>> sets(k);
    std::set<Nat> used;
    const Nat universe = 4 * k * e_bound(k) + 50;
    for (auto& s : sets)
      while (s.size() < e_bound(k)) {
        const Nat v = rng() % universe;
        if (used.insert(v).second) s.push_back(v);
      }
    const auto ivs = select_disjoint_intervals(sets);
    ASSERT_EQ(ivs.size(), k);
    for (Nat i = 0; i < k; ++i) {
      ASSERT_TRUE(rat_less(ivs[i].lo, ivs[i].hi));
      ASSERT_TRUE(endpoints_from(sets[i], ivs[i])) << "set " << i;
    }
    // Oracle: direct open-interval overlap test on rational values.
    for (Nat i = 0; i < k; ++i)
      for (Nat j = i + 1; j < k; ++j) {
        const auto [a, b] = std::pair{rat_enum(ivs[i].lo), rat_enum(ivs[i].hi)};
        const auto [c, d] = std::pair{rat_enum(ivs[j].lo), rat_enum(ivs[j].hi)};
        ASSERT_TRUE(b <= c || d <= a) << "intervals " << i << " and " << j;
      }
  }
}

INSTANTIATE_TEST_SUITE_P(K, RandomIntervals, ::testing::Values(1, 2, 3, 4));

TEST(DisjointIntervals, SmallerFamiliesCanFail) {
  // Two sets of size e(2)−1 with no disjoint selection: one set nested inside consecutive gaps of the other.
  EXPECT_FALSE(disjoint_selection_exists({{2, 0}, {4, 1}}));
  EXPECT_TRUE(disjoint_selection_exists({{2, 0}, {1, 3}}));
}

// ---------------------------------------------------------------------------
// Traces

TEST(Traces, CrtTrace) {
  const auto t = crt_trace(3);
  EXPECT_EQ(t.enumerate({0, 0, 0}, 1), (std::set<Nat>{0}));
  EXPECT_EQ(t.enumerate({0, 0, 0}, 5), (std::set<Nat>{0}));
  EXPECT_EQ(t.enumerate({0, 2, 0}, 1), (std::set<Nat>{0}));
  EXPECT_EQ(t.enumerate({0, 2, 0}, 2), (std::set<Nat>{0, 2}));
  EXPECT_TRUE(t.enumerate({}, 4).empty());
  EXPECT_THROW(crt_trace(0), Error);
}

TEST(Traces, Product) {
  const auto p = trace_product(constant_trace({0}), constant_trace({1}));
  EXPECT_EQ(p.enumerate({5, 5}, 1), (std::set<Nat>{2}));
  EXPECT_TRUE(trace_product(constant_trace({}), constant_trace({1})).enumerate({}, 1).empty());
  EXPECT_EQ(trace_product(constant_trace({0, 1}), constant_trace({0})).enumerate({}, 1), (std::set<Nat>{0, 1}));
  // Split halves: crt on even positions, crt on odd positions.
  const auto q = trace_product(crt_trace(2), crt_trace(2));
  EXPECT_EQ(q.enumerate({0, 1, 0, 1}, 4), (std::set<Nat>{cantor_pair(0, 1)}));
  EXPECT_TRUE(converged(eval_functional(q.gamma, Prefix{0, 1}, 0, 100)));
}

// ---------------------------------------------------------------------------
// pcet engine

class PcetDefeats : public ::testing::TestWithParam<std::pair<std::string, std::string>> {};

TEST_P(PcetDefeats, DefeatedAndAudited) {
  const auto [delta, psi] = GetParam();
  const auto rep = run_duel(spec("pcet", delta, psi, 1500));
  ASSERT_TRUE(rep.defeated()) << rep.outcome();
  EXPECT_EQ(defeat_audit_failure(rep.transcript), std::nullopt);
  EXPECT_EQ(pcet_discipline_violation(rep.transcript), std::nullopt);
}

INSTANTIATE_TEST_SUITE_P(Catalog, PcetDefeats,
                         ::testing::Values(std::pair{"trace0", "copycat0"}, std::pair{"crt2", "copycat"},
                                           std::pair{"trace01", "copycat0"}, std::pair{"trace0", "skip_copycat"},
                                           std::pair{"trace0", "positive_copycat"},
                                           std::pair{"trace0", "first_color_copycat"},
                                           std::pair{"trace0", "late_copycat"}));

TEST(Pcet, SilentFamilyExhaustsWithEmptyA) {
  const auto rep = run_duel(spec("pcet", "trace0", "silent", 300));
  EXPECT_TRUE(rep.exhausted());
  EXPECT_TRUE(rep.transcript.find("grow").empty());
  EXPECT_FALSE(check_defeat(rep));
}

TEST(Pcet, TwinCopycatsGetTwoDisjointFollowers) {
  const auto rep = run_duel(spec("pcet", "trace01", "copycat0", 1500));
  const auto cert = parse_pcet_certificate(rep.transcript);
  ASSERT_TRUE(cert);
  ASSERT_EQ(cert->followers.size(), 2u);
  EXPECT_TRUE(disjoint(cert->followers[0].interval(), cert->followers[1].interval()));
  EXPECT_TRUE(check_defeat(rep));
}

TEST(Pcet, CrtCancelsWhenTheTraceGrows) {
  const auto rep = run_duel(spec("pcet", "crt2", "copycat", 1500));
  EXPECT_GE(rep.transcript.find("grow").size(), 2u);
  EXPECT_FALSE(rep.transcript.find("cancel").empty());
  // Followers lock their interval to the opposite color from their stage on.
  const auto cert = parse_pcet_certificate(rep.transcript);
  for (const auto& f : cert->followers) {
    for (Nat p = f.stage; p < rep.coloring.size(); ++p)
      if (f.interval().contains(p)) {
        ASSERT_EQ(rep.coloring[p], f.color);
      }
  }
}

TEST(Pcet, DroppedCancellationIsCaught) {
  auto s = spec("pcet", "crt2", "copycat", 1500);
  s.faults.drop_cancellation = true;
  const auto rep = run_duel(s);
  ASSERT_TRUE(rep.defeated());
  EXPECT_TRUE(pcet_discipline_violation(rep.transcript));
  EXPECT_FALSE(check_defeat(rep));
}

TEST(Pcet, TamperedEndpointIsCaught) {
  const auto rep = run_duel(spec("pcet", "trace0", "copycat0", 1500));
  const auto bad = tamper(rep.transcript, "cert_follower", [](auto& d) { d[1] += 1; });
  EXPECT_FALSE(check_defeat(bad));
}

// ---------------------------------------------------------------------------
// lim engine

class LimDefeats : public ::testing::TestWithParam<std::pair<std::string, std::string>> {};

TEST_P(LimDefeats, DefeatedAndAudited) {
  const auto [delta, psi] = GetParam();
  const auto rep = run_duel(spec("lim", delta, psi, 5000));
  ASSERT_TRUE(rep.defeated()) << rep.outcome();
  EXPECT_EQ(defeat_audit_failure(rep.transcript), std::nullopt);
}

INSTANTIATE_TEST_SUITE_P(Catalog, LimDefeats,
                         ::testing::Values(std::pair{"smalluse", "echo2"}, std::pair{"delayed", "first_two_c0"},
                                           std::pair{"alternating", "first_two_codes"},
                                           std::pair{"smalluse", "first_two_c0"}));

TEST(Lim, FinalRuleMakesTheCommittedColorFinite) {
  const auto rep = run_duel(spec("lim", "smalluse", "echo2", 5000));
  const auto cert = parse_lim_certificate(rep.transcript);
  ASSERT_TRUE(cert);
  EXPECT_EQ(cert->kind, 0u);
  const Nat color = cert->sigma[cert->p];
  EXPECT_EQ(cert->sigma[cert->q], color);
  // Oracle: scan two full periods past the head.
  const auto rule = cert->final_rule();
  for (Nat n = rule.head_size(); n < rule.head_size() + 2 * rule.period(); ++n) EXPECT_NE(rule(n), color);
}

TEST(Lim, MismatchIsImmediate) {
  const auto rep = run_duel(spec("lim", "alternating", "first_two_codes", 100));
  const auto cert = parse_lim_certificate(rep.transcript);
  ASSERT_TRUE(cert);
  EXPECT_EQ(cert->kind, 1u);
}

TEST(Lim, HugeUseAndSilenceExhaust) {
  EXPECT_TRUE(run_duel(spec("lim", "hugeuse", "echo2", 5000)).exhausted());
  EXPECT_TRUE(run_duel(spec("lim", "smalluse", "silent", 200)).exhausted());
}

TEST(Lim, RefusesUndeclaredBounds) {
  Functional f{0, "unbounded", [](Tape& t, Nat n) { return t.read(n); }, {}};
  EXPECT_THROW(run_lim_adversary(f, f, 10), Error);
}

TEST(Lim, TamperedCertificatesAreCaught) {
  const auto rep = run_duel(spec("lim", "smalluse", "echo2", 5000));
  ASSERT_TRUE(check_defeat(rep));
  const auto tail = tamper(rep.transcript, "cert_tail", [](auto& d) { d[0] = 1 - d[0]; });
  EXPECT_FALSE(check_defeat(tail));
  const auto point = tamper(rep.transcript, "cert_points", [](auto& d) { d[1] += 5; });
  EXPECT_FALSE(check_defeat(point));
}

// ---------------------------------------------------------------------------
// cn engine

class CnDefeats : public ::testing::TestWithParam<std::pair<std::string, std::string>> {};

TEST_P(CnDefeats, DefeatedAtTwoColors) {
  const auto [delta, psi] = GetParam();
  const auto rep = run_duel(spec("cn", delta, psi, 200, 2));
  ASSERT_TRUE(rep.defeated()) << rep.outcome();
  EXPECT_EQ(defeat_audit_failure(rep.transcript), std::nullopt);
}

INSTANTIATE_TEST_SUITE_P(Catalog, CnDefeats,
                         ::testing::Values(std::pair{"copy", "const0"}, std::pair{"constant", "first_point"},
                                           std::pair{"count", "first_point"}));

TEST(Cn, CopyWithConstantAnswerFallsAtLevelZero) {
  const auto rep = run_duel(spec("cn", "copy", "const0", 200, 2));
  ASSERT_TRUE(rep.defeated());
  EXPECT_EQ(rep.transcript.first("defeated")->data, (std::vector<Nat>{0}));
}

TEST(Cn, SilenceExhaustsAtLevelZero) {
  const auto a = run_duel(spec("cn", "silent", "const0", 100, 2));
  ASSERT_TRUE(a.exhausted());
  EXPECT_EQ(a.transcript.first("exhausted")->data, (std::vector<Nat>{0}));
  const auto b = run_duel(spec("cn", "copy", "silent", 100, 2));
  ASSERT_TRUE(b.exhausted());
  EXPECT_EQ(b.transcript.first("exhausted")->data, (std::vector<Nat>{0}));
}

TEST(Cn, ThreeColorTreeIsWellFormed) {
  const auto rep = run_duel(spec("cn", "count", "first_point", 200, 3));
  const auto tree = parse_game_tree(rep.transcript);
  ASSERT_TRUE(tree);
  EXPECT_EQ(tree->sigma.size(), 3u);
  EXPECT_EQ(game_tree_violation(*tree), std::nullopt);
  // Each level's nodes refine their parents: one child per parent interval.
  for (const auto& n : tree->nodes)
    if (n.level() + 1 < tree->sigma.size()) {
      Nat children = 0;
      for (const auto& m : tree->nodes)
        if (m.level() == n.level() + 1 && std::equal(n.path.begin(), n.path.end(), m.path.begin())) ++children;
      EXPECT_EQ(children, n.interval_count());
    }
  ASSERT_TRUE(rep.defeated());
  EXPECT_TRUE(check_defeat(rep));
}

TEST(Cn, TreeInvariantsCatchBrokenInheritance) {
  const auto rep = run_duel(spec("cn", "count", "first_point", 200, 3));
  auto tree = *parse_game_tree(rep.transcript);
  for (auto& n : tree.nodes)
    if (n.level() == 1) {
      n.points.front() = Endpoint::neg_inf();
      n.points.back() = Endpoint::pos_inf();
      break;
    }
  EXPECT_TRUE(game_tree_violation(tree));
}

TEST(Cn, TamperedCertificatesAreCaught) {
  const auto rep = run_duel(spec("cn", "count", "first_point", 200, 2));
  ASSERT_TRUE(check_defeat(rep));
  const auto answer = tamper(rep.transcript, "cert_answer", [](auto& d) { d[0] += 1; });
  EXPECT_FALSE(check_defeat(answer));
  const auto inst = tamper(rep.transcript, "cert_instance", [](auto& d) {
    for (auto& v : d) v = 0;
  });
  EXPECT_FALSE(check_defeat(inst));
}

// ---------------------------------------------------------------------------
// lock engine

class SrtDefeats : public ::testing::TestWithParam<std::pair<std::string, std::string>> {};

TEST_P(SrtDefeats, DefeatedAndAudited) {
  const auto [delta, psi] = GetParam();
  const auto rep = run_duel(spec("srt", delta, psi, 60));
  ASSERT_TRUE(rep.defeated()) << rep.outcome();
  EXPECT_EQ(defeat_audit_failure(rep.transcript), std::nullopt);
}

INSTANTIATE_TEST_SUITE_P(Catalog, SrtDefeats,
                         ::testing::Values(std::pair{"first_point", "column_match"},
                                           std::pair{"first_point", "all_h"}, std::pair{"constant", "all_h"},
                                           std::pair{"xor", "column_match"}));

TEST(Srt, OneColorDeltaLocksAtFirstConvergence) {
  const auto rep = run_duel(spec("srt", "constant", "all_h", 60));
  ASSERT_TRUE(rep.defeated());
  EXPECT_EQ(rep.transcript.find("watch").size(), 1u);
  EXPECT_EQ(rep.transcript.first("defeated")->data, (std::vector<Nat>{0}));
}

TEST(Srt, SilentPsiExhaustsWithEmptyD) {
  const auto rep = run_duel(spec("srt", "first_point", "silent", 20));
  ASSERT_TRUE(rep.exhausted());
  EXPECT_TRUE(rep.transcript.first("cert_D")->data.empty());
}

TEST(Srt, LockedColumnsKeepTheirLock) {
  const auto rep = run_duel(spec("srt", "first_point", "column_match", 60));
  const auto cert = parse_srt_certificate(rep.transcript);
  ASSERT_TRUE(cert);
  for (const auto& [x, c] : cert->coloring.locks)
    for (Nat y = 0; y < 200; ++y) {
      const Nat p = cantor_pair(x, y);
      if (p >= cert->coloring.base.size()) {
        ASSERT_EQ(cert->coloring(p), c);
      }
    }
}

TEST(Srt, WrongLockColorIsCaught) {
  auto s = spec("srt", "first_point", "column_match", 60);
  s.faults.wrong_lock_color = true;
  const auto rep = run_duel(s);
  ASSERT_TRUE(rep.defeated());
  EXPECT_FALSE(check_defeat(rep));
}

// ---------------------------------------------------------------------------
// Determinism and transcripts

TEST(Reports, DeterministicAndRoundTrip) {
  for (const auto& s : {spec("pcet", "crt2", "copycat", 800), spec("lim", "smalluse", "echo2", 500),
                        spec("cn", "count", "first_point", 200, 3), spec("srt", "xor", "column_match", 40)}) {
    const auto a = run_duel(s), b = run_duel(s);
    const std::string text = print_transcript(a.transcript);
    EXPECT_EQ(text, print_transcript(b.transcript)) << s.engine;
    const auto parsed = parse_transcript(text);
    EXPECT_EQ(parsed, a.transcript) << s.engine;
    EXPECT_EQ(print_transcript(run_duel(duel_spec_of(parsed)).transcript), text) << s.engine;
  }
}

TEST(Reports, TruncationIsPositioned) {
  const auto rep = run_duel(spec("lim", "smalluse", "echo2", 500));
  std::string text = print_transcript(rep.transcript);
  text.resize(text.rfind("stage"));
  EXPECT_THROW(parse_transcript(text), PositionedError);
  EXPECT_THROW(parse_transcript("stage 0 | action x | data 1\n"), PositionedError);
  try {
    parse_transcript("# wlab transcript\n# records 1\nstage 0 | action x | data 1 z\n");
    FAIL();
  } catch (const PositionedError& e) {
    EXPECT_EQ(e.line, 3u);
    EXPECT_EQ(e.column, 29u);
  }
}

TEST(Reports, UnknownCandidatesAreErrors) {
  EXPECT_THROW(run_duel(spec("pcet", "trace0", "nope", 10)), Error);
  EXPECT_THROW(run_duel(spec("nope", "a", "b", 10)), Error);
}

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "scriptdiar/metrics.hpp"

using namespace scriptdiar;

namespace {

SpeakerTimeline tl(std::initializer_list<Turn> turns) { return SpeakerTimeline{turns}; }

SpeakerTimeline shifted(const SpeakerTimeline& x, double by) {
  SpeakerTimeline out = x;
  for (auto& t : out.turns) {
    t.interval.start += by;
    t.interval.end += by;
  }
  return out;
}

}  // namespace

TEST(Assignment, SmallMatrices) {
  EXPECT_EQ(solve_assignment({{4, 1, 3}, {2, 0, 5}, {3, 2, 2}}), (std::vector<int>{1, 0, 2}));
  EXPECT_EQ(solve_assignment({{1, 2, 3}}), (std::vector<int>{0}));
  const auto tall = solve_assignment({{5}, {1}, {3}});
  EXPECT_EQ(tall, (std::vector<int>{-1, 0, -1}));
  EXPECT_TRUE(solve_assignment({}).empty());
}

TEST(HungarianMap, RenamedReference) {
  const auto ref = tl({{{0, 2}, "A"}, {{2, 5}, "B"}, {{5, 6}, "C"}});
  const auto hyp = tl({{{0, 2}, "x"}, {{2, 5}, "y"}, {{5, 6}, "z"}});
  const auto m = hungarian_map(ref, hyp);
  EXPECT_EQ(m.at("x"), "A");
  EXPECT_EQ(m.at("y"), "B");
  EXPECT_EQ(m.at("z"), "C");
}

TEST(HungarianMap, ClusterWithoutOverlapIsUnmapped) {
  const auto ref = tl({{{0, 4}, "A"}, {{4, 8}, "B"}});
  const auto hyp = tl({{{0, 4}, "1"}, {{4, 8}, "2"}, {{9, 10}, "3"}});
  const auto m = hungarian_map(ref, hyp);
  EXPECT_EQ(m.at("1"), "A");
  EXPECT_EQ(m.at("2"), "B");
  EXPECT_FALSE(m.at("3").has_value());
}

TEST(HungarianMap, DiagonalDominant) {
  // overlap matrix [[5,1],[1,5]]
  const auto ref = tl({{{0, 6}, "A"}, {{6, 12}, "B"}});
  const auto hyp = tl({{{0, 5}, "p"}, {{5, 6}, "q"}, {{6, 7}, "p"}, {{7, 12}, "q"}});
  const auto ov = overlap_matrix(ref, hyp);
  EXPECT_DOUBLE_EQ(ov[0][0], 5.0);
  EXPECT_DOUBLE_EQ(ov[0][1], 1.0);
  EXPECT_DOUBLE_EQ(ov[1][0], 1.0);
  EXPECT_DOUBLE_EQ(ov[1][1], 5.0);
  const auto m = hungarian_map(ref, hyp);
  EXPECT_EQ(m.at("p"), "A");
  EXPECT_EQ(m.at("q"), "B");
}

TEST(HungarianMap, BeatsEveryOtherMapping) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    const auto ref = oracle::random_reference(rng, 1 + trial % 6, 12, 30.0, trial % 2 == 0);
    const auto hyp = oracle::random_hypothesis(rng, 1 + (trial / 2) % 6, 14, 30.0);
    if (hyp.empty()) continue;
    const auto rs = ref.speakers();
    const auto hs = hyp.speakers();
    const auto ov = overlap_matrix(ref, hyp);
    const auto m = hungarian_map(ref, hyp);
    auto ri = [&](const std::string& s) { return std::find(rs.begin(), rs.end(), s) - rs.begin(); };
    double got = 0.0;
    for (std::size_t h = 0; h < hs.size(); ++h) {
      if (m.at(hs[h])) got += ov[static_cast<std::size_t>(ri(*m.at(hs[h])))][h];
    }
    // Brute force over injective maps.
    double best = 0.0;
    std::vector<bool> used(rs.size(), false);
    std::function<void(std::size_t, double)> rec = [&](std::size_t h, double acc) {
      if (h == hs.size()) {
        best = std::max(best, acc);
        return;
      }
      rec(h + 1, acc);
      for (std::size_t r = 0; r < rs.size(); ++r) {
        if (used[r]) continue;
        used[r] = true;
        rec(h + 1, acc + ov[r][h]);
        used[r] = false;
      }
    };
    rec(0, 0.0);
    EXPECT_NEAR(got, best, 1e-9);
  }
}

TEST(Der, Examples) {
  const auto ref = tl({{{0, 10}, "A"}});
  EXPECT_DOUBLE_EQ(der(ref, ref).der, 0.0);
  const auto empty = der(ref, SpeakerTimeline{});
  EXPECT_DOUBLE_EQ(empty.der, 1.0);
  EXPECT_DOUBLE_EQ(empty.missed, 10.0);
  const auto split = der(ref, tl({{{0, 5}, "A"}, {{5, 10}, "B"}}));
  EXPECT_DOUBLE_EQ(split.speaker_error, 5.0);
  EXPECT_DOUBLE_EQ(split.der, 0.5);
  EXPECT_THROW(der(SpeakerTimeline{}, ref), InputError);
}

TEST(Der, FalseAlarmAndOverlap) {
  const auto ref = tl({{{0, 4}, "A"}, {{2, 4}, "B"}});
  const auto hyp = tl({{{0, 6}, "x"}});
  const auto d = der(ref, hyp);
  EXPECT_DOUBLE_EQ(d.total_reference, 6.0);
  EXPECT_DOUBLE_EQ(d.false_alarm, 2.0);
  EXPECT_DOUBLE_EQ(d.missed, 2.0);
  EXPECT_DOUBLE_EQ(d.speaker_error, 0.0);
  EXPECT_DOUBLE_EQ(d.der, (d.false_alarm + d.missed + d.speaker_error) / d.total_reference);
}

TEST(Der, ExplicitMapping) {
  const auto ref = tl({{{0, 5}, "A"}, {{5, 10}, "B"}});
  const auto hyp = tl({{{0, 5}, "x"}, {{5, 10}, "y"}});
  SpeakerMapping swapped{{"x", "B"}, {"y", "A"}};
  EXPECT_DOUBLE_EQ(der(ref, hyp, 0.0, swapped).der, 1.0);
}

TEST(Der, MatchesBruteForceMapping) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 80; ++trial) {
    const auto ref = oracle::random_reference(rng, 1 + trial % 6, 4 + trial % 16, 40.0, trial % 3 != 0);
    const auto hyp = oracle::random_hypothesis(rng, 1 + (trial * 7) % 6, 3 + trial % 17, 40.0);
    const double collar = (trial % 4 == 0) ? 0.25 : 0.0;
    const double got = der(ref, hyp, collar).der;
    const double want = oracle::brute_force_der(ref, hyp, collar);
    EXPECT_NEAR(got, want, 1e-9 * std::max(1.0, want)) << "trial " << trial;
  }
}

TEST(Der, Properties) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const auto ref = oracle::random_reference(rng, 4, 10, 30.0, true);
    const auto hyp = oracle::random_hypothesis(rng, 4, 12, 30.0);
    EXPECT_NEAR(der(ref, ref).der, 0.0, 1e-12);
    const auto base = der(ref, hyp);
    const auto moved = der(shifted(ref, 17.5), shifted(hyp, 17.5));
    EXPECT_NEAR(base.false_alarm, moved.false_alarm, 1e-9);
    EXPECT_NEAR(base.missed, moved.missed, 1e-9);
    EXPECT_NEAR(base.speaker_error, moved.speaker_error, 1e-9);
    double scored = base.total_reference;
    for (double c : {0.05, 0.1, 0.25, 0.5, 1.0}) {
      const auto d = der(ref, hyp, c);
      EXPECT_LE(d.total_reference, scored + 1e-9);
      scored = d.total_reference;
    }
  }
}

TEST(ChangePoints, OnlyInsideContinuousSpeech) {
  const auto x = tl({{{0, 2}, "A"}, {{2, 4}, "B"}, {{5, 6}, "A"}, {{6, 7}, "A"}});
  EXPECT_EQ(change_points(x), std::vector<double>{2.0});
}

TEST(Scd, Examples) {
  const auto ref = tl({{{0, 5}, "A"}, {{5, 10}, "B"}});
  EXPECT_DOUBLE_EQ(scd_f1(ref, ref).f1, 1.0);
  const auto near = tl({{{0, 5.05}, "x"}, {{5.05, 10}, "y"}});
  EXPECT_DOUBLE_EQ(scd_f1(ref, near, 0.1).f1, 1.0);
  const auto extra = tl({{{0, 5}, "x"}, {{5, 7}, "y"}, {{7, 10}, "x"}});
  const auto s = scd_f1(ref, extra, 0.1);
  EXPECT_DOUBLE_EQ(*s.precision, 0.5);
  EXPECT_DOUBLE_EQ(*s.recall, 1.0);
  EXPECT_NEAR(s.f1, 2.0 / 3.0, 1e-15);
}

TEST(Scd, DegenerateCounts) {
  const auto one = tl({{{0, 5}, "A"}});
  const auto two = tl({{{0, 5}, "A"}, {{5, 10}, "B"}});
  EXPECT_DOUBLE_EQ(scd_f1(one, one).f1, 1.0);
  const auto no_hyp = scd_f1(two, one);
  EXPECT_FALSE(no_hyp.precision.has_value());
  EXPECT_DOUBLE_EQ(*no_hyp.recall, 0.0);
  EXPECT_DOUBLE_EQ(no_hyp.f1, 0.0);
}

TEST(Scd, OptimalMatchingAndSymmetry) {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = oracle::random_hypothesis(rng, 3, 15, 20.0);
    const auto b = oracle::random_hypothesis(rng, 3, 15, 20.0);
    const double tol = 0.05 * (trial % 8);
    const auto ab = scd_f1(a, b, tol);
    const auto ba = scd_f1(b, a, tol);
    EXPECT_EQ(ab.matched, oracle::max_boundary_matching(change_points(a), change_points(b), tol));
    EXPECT_EQ(ab.precision, ba.recall);
    EXPECT_EQ(ab.recall, ba.precision);
    EXPECT_DOUBLE_EQ(ab.f1, ba.f1);
  }
}

TEST(Significance, Examples) {
  const std::vector<double> same{0.3, 0.4, 0.5, 0.35};
  EXPECT_DOUBLE_EQ(corpus_significance(same, same), 1.0);
  std::mt19937_64 rng(25);
  std::normal_distribution<double> lo(0.0, 0.1), hi(10.0, 0.1);
  std::vector<double> a(30), b(30);
  for (auto& v : a) v = lo(rng);
  for (auto& v : b) v = hi(rng);
  EXPECT_LT(corpus_significance(a, b), 1e-6);
  EXPECT_THROW(corpus_significance({1.0}, {2.0}), InputError);
}

TEST(Significance, MatchesKnownTValue) {
  // Pooled t = -3.6742..., df = 4; reference value from scipy.stats.ttest_ind.
  const double p = corpus_significance({1, 2, 3}, {4, 5, 6});
  EXPECT_NEAR(p, 0.021311641128756727, 1e-12);
}

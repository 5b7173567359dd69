#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "polytrain/analysis.hpp"
#include "polytrain/error.hpp"
#include "polytrain/stats.hpp"

using namespace polytrain;

namespace {

Groups normal_groups(std::uint64_t seed, const std::vector<double>& means, std::size_t n, double sd) {
  std::mt19937_64 rng(seed);
  Groups g;
  for (double m : means) {
    std::normal_distribution<double> d(m, sd);
    std::vector<double> xs(n);
    for (auto& x : xs) x = d(rng);
    g.push_back(xs);
  }
  return g;
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(b), 1e-300); }

SessionLog mode_log(const std::vector<std::pair<TrainingMode, int>>& runs, double total = 50) {
  SessionLog log;
  int i = 0;
  for (const auto& [mode, frames] : runs) {
    for (int k = 0; k < frames; ++k, ++i) {
      Frame f;
      f.t = i / 100.0;
      f.mode = mode;
      f.scores.total = total + (i % 5);
      log.frames.push_back(f);
    }
  }
  return log;
}

}  // namespace

TEST_CASE("incomplete beta known values") {
  CHECK(stats::incomplete_beta(1, 1, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(stats::incomplete_beta(2, 3, 0.4) == doctest::Approx(0.5248).epsilon(1e-13));
  CHECK(stats::incomplete_beta(2, 3, 0) == 0);
  CHECK(stats::incomplete_beta(2, 3, 1) == 1);
  CHECK(stats::incomplete_beta(0.5, 0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("F survival agrees with Boost and with quadrature") {
  const std::vector<std::array<double, 3>> cases = {
      {0.5, 1, 1}, {2.0, 2, 10}, {9.26, 2, 15}, {1.0, 7, 3486}, {3.5, 10, 5000}, {0.2, 10, 5000}, {1.3, 5, 40}};
  for (const auto& [f, d1, d2] : cases) {
    const double p = stats::f_survival(f, d1, d2);
    const boost::math::fisher_f_distribution<double> dist(d1, d2);
    CHECK(p == doctest::Approx(boost::math::cdf(boost::math::complement(dist, f))).epsilon(1e-12));
    CHECK(std::abs(p - oracle::f_tail_by_quadrature(f, d1, d2)) < 1e-8);
  }
  CHECK(stats::f_survival(0, 3, 10) == 1);
}

TEST_CASE("Student t two-sided") {
  CHECK(stats::t_two_sided(0, 5) == doctest::Approx(1));
  CHECK(stats::t_two_sided(2.570581835636, 5) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(stats::t_two_sided(-2.570581835636, 5) == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("ANOVA on the textbook fixture") {
  const Groups g = {{6, 8, 4, 5, 3, 4}, {8, 12, 9, 11, 6, 8}, {13, 9, 11, 8, 7, 12}};
  const auto r = anova_oneway(g);
  // SSB = 84, SSW = 68 by hand.
  CHECK(r.f == doctest::Approx((84.0 / 2) / (68.0 / 15)).epsilon(1e-13));
  CHECK(r.df1 == 2);
  CHECK(r.df2 == 15);
  const auto o = oracle::naive_anova(g);
  CHECK(rel_close(r.f, o.f, 1e-10));
  CHECK(rel_close(r.p, o.p, 1e-10));
}

TEST_CASE("ANOVA matches the naive implementation on generated fixtures") {
  const std::vector<Groups> fixtures = {
      normal_groups(1, {70, 72, 75, 71, 80, 82, 85, 90}, 437, 6),
      normal_groups(2, {50, 50.5}, 30, 10),
      normal_groups(3, {1e6, 1e6 + 1, 1e6 + 3}, 50, 2),
      {{1.5, 2.5, 3.5, 4.5}, {2, 3}, {10, 11, 9, 10.5, 10.25}},
      normal_groups(4, {0, 0.1, 0.2, 0.3, 0.4}, 12, 1),
      normal_groups(5, {20, 30, 25, 40, 35, 33}, 100, 15),
  };
  for (const auto& g : fixtures) {
    const auto r = anova_oneway(g);
    const auto o = oracle::naive_anova(g);
    INFO("F " << r.f << " vs " << o.f << ", p " << r.p << " vs " << o.p);
    CHECK(rel_close(r.f, o.f, 1e-10));
    CHECK(rel_close(r.p, o.p, 1e-10));
    CHECK(r.df1 == static_cast<int>(o.df1));
    CHECK(r.df2 == static_cast<int>(o.df2));
  }
}

TEST_CASE("ANOVA degrees of freedom for eight 437-frame sessions") {
  const auto r = anova_oneway(normal_groups(9, {1, 2, 3, 4, 5, 6, 7, 8}, 437, 1));
  CHECK(r.df1 == 7);
  CHECK(r.df2 == 3488);
  Groups g = normal_groups(9, {1, 2, 3, 4, 5, 6, 7, 8}, 437, 1);
  for (int k = 0; k < 2; ++k) g[k].pop_back();
  const auto r2 = anova_oneway(g);
  CHECK(r2.df1 == 7);
  CHECK(r2.df2 == 3486);
}

TEST_CASE("ANOVA edge cases") {
  const auto same = anova_oneway({{1, 2, 3}, {1, 2, 3}});
  CHECK(same.f == 0);
  CHECK(same.p == 1);
  const auto sep = anova_oneway({{0, 0, 0, 0}, {10, 10, 10, 10}});
  CHECK(sep.f_infinite());
  CHECK(sep.p == 0);
  CHECK_THROWS_AS(anova_oneway({{4, 4}, {4, 4}}), Error);
  CHECK_THROWS_AS(anova_oneway({{1, 2, 3}}), Error);
  CHECK_THROWS_AS(anova_oneway({{1, 2, 3}, {4}}), Error);
}

TEST_CASE("ANOVA is shift and scale invariant") {
  const Groups g = normal_groups(6, {3, 4, 6}, 25, 2);
  const auto base = anova_oneway(g);
  Groups shifted = g, scaled = g;
  for (auto& grp : shifted) for (auto& x : grp) x += 123.0;
  for (auto& grp : scaled) for (auto& x : grp) x *= 7.5;
  CHECK(anova_oneway(shifted).f == doctest::Approx(base.f).epsilon(1e-9));
  CHECK(anova_oneway(scaled).f == doctest::Approx(base.f).epsilon(1e-9));
}

TEST_CASE("post-hoc table") {
  SUBCASE("identical groups") {
    const auto t = posthoc_pairwise({{1, 2, 3, 4}, {1, 2, 3, 4}});
    CHECK(t.at(0, 1) == 1);
  }
  SUBCASE("groups 3 and 4 share a mean") {
    const auto g = normal_groups(7, {10, 20, 30, 40, 40, 50}, 200, 2);
    const auto t = posthoc_pairwise(g);
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = i + 1; j < 6; ++j) {
        if (i == 3 && j == 4) {
          CHECK(t.at(i, j) > 0.05);
        } else {
          CHECK(t.at(i, j) < 1e-3);
        }
      }
    }
  }
  SUBCASE("eight separated groups") {
    const auto t = posthoc_pairwise(normal_groups(8, {10, 20, 30, 40, 50, 60, 70, 80}, 437, 3));
    for (std::size_t i = 0; i < 8; ++i) {
      for (std::size_t j = i + 1; j < 8; ++j) CHECK(t.at(i, j) < 1e-3);
    }
  }
  SUBCASE("symmetric and permutation-equivariant") {
    const auto g = normal_groups(10, {5, 5.2, 5.5, 6}, 40, 1);
    const auto t = posthoc_pairwise(g);
    const std::vector<std::size_t> perm = {2, 0, 3, 1};
    Groups pg;
    for (auto k : perm) pg.push_back(g[k]);
    const auto pt = posthoc_pairwise(pg);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(t.at(i, i) == 1);
      for (std::size_t j = 0; j < 4; ++j) {
        CHECK(t.at(i, j) == t.at(j, i));
        CHECK(pt.at(i, j) == doctest::Approx(t.at(perm[i], perm[j])).epsilon(1e-12));
        CHECK(t.at(i, j) >= 0);
        CHECK(t.at(i, j) <= 1);
      }
    }
  }
}

TEST_CASE("Welch t-test against a reference value") {
  // Reference p from scipy.stats.ttest_ind(equal_var=False).
  const std::vector<double> a = {27.5, 21.0, 19.0, 23.6, 17.0, 17.9, 16.9, 20.1, 21.9, 22.6, 23.1, 19.6, 19.0, 21.7, 21.4};
  const std::vector<double> b = {27.1, 22.0, 20.8, 23.4, 23.4, 23.5, 25.8, 22.0, 24.8, 20.2, 21.9, 22.1, 22.9, 20.5, 24.4};
  CHECK(welch_t_test(a, b) == doctest::Approx(0.021378001462866985).epsilon(1e-9));
}

TEST_CASE("Pearson correlation") {
  CHECK(pearson(std::vector<double>{1, 2, 3, 4}, std::vector<double>{2, 4, 6, 8}) == doctest::Approx(1));
  CHECK(pearson(std::vector<double>{1, 5, 2, 4}, std::vector<double>{-1, -5, -2, -4}) == doctest::Approx(-1));
  CHECK_THROWS_AS(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), Error);
  CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), Error);

  std::mt19937_64 rng(12);
  std::normal_distribution<double> d(50, 10);
  std::vector<double> a(300), b(300);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = d(rng);
    b[i] = 0.3 * a[i] + d(rng);
  }
  const double r = pearson(a, b);
  CHECK(r == doctest::Approx(oracle::naive_pearson(a, b)).epsilon(1e-12));
  std::vector<double> at = a, bt = b;
  for (auto& x : at) x = 3.0 * x - 17.0;
  for (auto& x : bt) x = 0.01 * x + 1e4;
  CHECK(pearson(at, bt) == doctest::Approx(r).epsilon(1e-10));
  CHECK(pearson(b, a) == doctest::Approx(r).epsilon(1e-14));
}

TEST_CASE("resampling") {
  const std::vector<double> s = {0, 10, 20};
  const auto r = resample_linear(s, 5);
  REQUIRE(r.size() == 5);
  CHECK(r[1] == doctest::Approx(5));
  CHECK(r[4] == doctest::Approx(20));
  CHECK(resample_linear(s, 3) == s);
  const std::vector<double> a = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  const std::vector<double> b = {2, 4, 6};
  CHECK(pearson_resampled(a, b) == doctest::Approx(1));
}

TEST_CASE("percent change") {
  auto pc = percent_change(std::vector<double>{50, 75});
  REQUIRE(pc.size() == 1);
  CHECK(*pc[0] == doctest::Approx(50));
  pc = percent_change(std::vector<double>{80, 80, 80});
  CHECK(*pc[0] == 0);
  CHECK(*pc[1] == 0);
  pc = percent_change(std::vector<double>{40, 50, 45});
  CHECK(*pc[0] == doctest::Approx(25));
  CHECK(*pc[1] == doctest::Approx(-10));
  pc = percent_change(std::vector<double>{0, 50, 45});
  CHECK_FALSE(pc[0].has_value());
  CHECK(pc[1].has_value());
  CHECK(percent_change(std::vector<double>{5}).empty());
}

TEST_CASE("testing segments") {
  using M = TrainingMode;
  const auto log = mode_log({{M::kAdaptive, 1000}, {M::kTest, 2000}, {M::kAdaptive, 1000}, {M::kTest, 4000}});
  const auto segs = segment_tests(log);
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].duration() == doctest::Approx(20));
  CHECK(segs[1].duration() == doctest::Approx(40));
  CHECK(segs[0].start == doctest::Approx(10));
  CHECK(segs[1].start == doctest::Approx(40));
  CHECK(segs[1].frames() == 4000);

  CHECK(segment_tests(mode_log({{M::kAdaptive, 500}})).empty());

  std::vector<std::pair<M, int>> runs;
  for (int k = 0; k < 8; ++k) {
    runs.push_back({M::kAdaptive, 1000});
    runs.push_back({M::kTest, 2000 * (1 + k % 3)});
  }
  const auto eight = segment_tests(mode_log(runs));
  REQUIRE(eight.size() == 8);
  double t = 0;
  for (int k = 0; k < 8; ++k) {
    t += 10;
    CHECK(eight[k].index == k);
    CHECK(eight[k].start == doctest::Approx(t));
    t += 20 * (1 + k % 3);
    CHECK(eight[k].end == doctest::Approx(t));
  }

  auto bad = mode_log({{M::kTest, 10}});
  bad.frames[5].t = bad.frames[4].t;
  CHECK_THROWS_AS(segment_tests(bad), LogError);
}

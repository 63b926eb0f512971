#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "rsftune/split_rules.hpp"

using namespace rsftune;
using rsftest::oracle::Group;

namespace {

GroupSample view(const Group& g) { return {g.times, g.events}; }

Group random_group(std::mt19937_64& gen, std::size_t n, double censor_rate) {
  const auto s = rsftest::random_sample(gen, n, 8, censor_rate);
  return {s.times, s.events};
}

bool has_event(const Group& a, const Group& b) {
  for (int e : a.events) if (e == 1) return true;
  for (int e : b.events) if (e == 1) return true;
  return false;
}

}  // namespace

TEST_CASE("identical groups score zero") {
  const Group g{{1, 3, 4, 7}, {1, 0, 1, 1}};
  CHECK(logrank_statistic(view(g), view(g)) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(logrankscore_statistic(view(g), view(g)) == doctest::Approx(0.0).epsilon(1e-14));
  const auto grid = rsftest::oracle::deciles(g, g);
  CHECK(std::fabs(bs_gradient_statistic(view(g), view(g), grid)) < 1e-14);
}

TEST_CASE("logrank: early versus late failures") {
  const Group left{{1, 1, 1, 1}, {1, 1, 1, 1}};
  const Group right{{10, 10, 10, 10}, {1, 1, 1, 1}};
  const double expected = rsftest::oracle::logrank(left, right);
  // By hand: at t=1, Y=8, d=4, Y_L=4: O-E = 4-2 = 2, V = 4*.5*.5*4/7 = 4/7;
  // at t=10 every subject is right, contributing nothing.
  CHECK(expected == doctest::Approx(2.0 / std::sqrt(4.0 / 7.0)).epsilon(1e-14));
  CHECK(logrank_statistic(view(left), view(right)) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("logrank: a single pooled event") {
  const Group left{{2, 5}, {1, 0}};
  const Group right{{3, 4, 6}, {0, 0, 0}};
  // One event at t=2 with Y=5, Y_L=2: O-E = 1-0.4, V = 0.4*0.6*(4/4).
  const double hand = 0.6 / std::sqrt(0.24);
  CHECK(rsftest::oracle::logrank(left, right) == doctest::Approx(hand).epsilon(1e-14));
  CHECK(logrank_statistic(view(left), view(right)) == doctest::Approx(hand).epsilon(1e-12));
}

TEST_CASE("logrank: zero variance is defined as zero") {
  // Only one subject at risk at the single event time.
  const Group left{{9}, {1}};
  const Group right{{1}, {0}};
  CHECK(logrank_statistic(view(left), view(right)) == 0.0);
}

TEST_CASE("logrankscore: four-observation case and all-censored node") {
  const Group left{{1, 4}, {1, 0}};
  const Group right{{2, 3}, {1, 1}};
  // Scores by hand: H(1)=1/4, H(2)=1/4+1/3, H(3)=1/4+1/3+1/2, H(4)=H(3).
  const double h1 = 0.25, h2 = h1 + 1.0 / 3.0, h3 = h2 + 0.5;
  const double a[4] = {1 - h1, 1 - h2, 1 - h3, 0 - h3};  // times 1, 2, 3, 4
  const double mean = (a[0] + a[1] + a[2] + a[3]) / 4.0;
  double ss = 0.0;
  for (double x : a) ss += (x - mean) * (x - mean);
  const double hand = std::fabs(a[0] + a[3] - 2 * mean) / std::sqrt(2 * (1 - 0.5) * ss / 3.0);
  CHECK(rsftest::oracle::logrank_score(left, right) == doctest::Approx(hand).epsilon(1e-13));
  CHECK(logrankscore_statistic(view(left), view(right)) == doctest::Approx(hand).epsilon(1e-12));

  const Group cl{{1, 2}, {0, 0}};
  const Group cr{{3, 4}, {0, 0}};
  CHECK(logrankscore_statistic(view(cl), view(cr)) == 0.0);
}

TEST_CASE("bs.gradient: separating split is positive, six-observation case matches the oracle") {
  const Group early{{1, 2, 3}, {1, 1, 1}};
  const Group late{{8, 9, 10}, {1, 1, 1}};
  const auto grid = event_time_deciles(std::vector<double>{1, 2, 3, 8, 9, 10}, std::vector<int>{1, 1, 1, 1, 1, 1});
  CHECK(grid == rsftest::oracle::deciles(early, late));
  CHECK(bs_gradient_statistic(view(early), view(late), grid) > 0.0);

  const Group l{{2, 5, 7}, {1, 0, 1}};
  const Group r{{3, 3, 9}, {1, 0, 1}};
  const auto g2 = rsftest::oracle::deciles(l, r);
  CHECK(bs_gradient_statistic(view(l), view(r), g2) ==
        doctest::Approx(rsftest::oracle::bs_gradient(l, r, g2)).epsilon(1e-12));
  CHECK(bs_gradient_statistic(view(l), view(r), std::vector<double>{}) == 0.0);
}

TEST_CASE("deciles follow the type-1 definition") {
  CHECK(event_time_deciles(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, std::vector<int>(10, 1)) ==
        std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9});
  CHECK(event_time_deciles(std::vector<double>{4, 5}, std::vector<int>{0, 0}).empty());
  CHECK(event_time_deciles(std::vector<double>{4, 5, 6}, std::vector<int>{0, 1, 0}) == std::vector<double>{5});
}

TEST_CASE("split statistics agree with direct formulas on random nodes") {
  std::mt19937_64 gen(2024);
  int checked = 0;
  while (checked < 200) {
    const std::size_t n = 2 + gen() % 19;  // 2..20
    const std::size_t nl = 1 + gen() % (n - 1);
    const double censor = 0.6 * rsftest::uniform01(gen);
    const Group left = random_group(gen, nl, censor);
    const Group right = random_group(gen, n - nl, censor);
    if (!has_event(left, right)) continue;
    ++checked;
    CHECK(logrank_statistic(view(left), view(right)) ==
          doctest::Approx(rsftest::oracle::logrank(left, right)).epsilon(1e-10));
    CHECK(logrankscore_statistic(view(left), view(right)) ==
          doctest::Approx(rsftest::oracle::logrank_score(left, right)).epsilon(1e-10));
    const auto grid = rsftest::oracle::deciles(left, right);
    std::vector<double> pooled_t = left.times;
    pooled_t.insert(pooled_t.end(), right.times.begin(), right.times.end());
    std::vector<int> pooled_e = left.events;
    pooled_e.insert(pooled_e.end(), right.events.begin(), right.events.end());
    CHECK(event_time_deciles(pooled_t, pooled_e) == grid);
    CHECK(std::fabs(bs_gradient_statistic(view(left), view(right), grid) -
                    rsftest::oracle::bs_gradient(left, right, grid)) < 1e-10);
  }
}

TEST_CASE("node scorer agrees with the two-group functions") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = rsftest::random_sample(gen, 4 + gen() % 17, 9, 0.3);
    std::vector<std::size_t> order(s.times.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return s.times[a] < s.times[b]; });
    std::vector<double> t;
    std::vector<int> e;
    for (auto i : order) {
      t.push_back(s.times[i]);
      e.push_back(s.events[i]);
    }
    std::vector<std::uint8_t> mask(t.size());
    Group l, r;
    for (std::size_t i = 0; i < t.size(); ++i) {
      mask[i] = static_cast<std::uint8_t>(gen() % 2);
      (mask[i] ? l : r).times.push_back(t[i]);
      (mask[i] ? l : r).events.push_back(e[i]);
    }
    if (l.times.empty() || r.times.empty()) continue;
    const NodeSplitScorer lr(SplitRule::LogRank, t, e);
    const NodeSplitScorer sc(SplitRule::LogRankScore, t, e);
    const NodeSplitScorer bs(SplitRule::BsGradient, t, e);
    CHECK(lr.score(mask) == doctest::Approx(logrank_statistic(view(l), view(r))).epsilon(1e-12));
    CHECK(sc.score(mask) == doctest::Approx(logrankscore_statistic(view(l), view(r))).epsilon(1e-12));
    CHECK(std::fabs(bs.score(mask) - bs_gradient_statistic(view(l), view(r), event_time_deciles(t, e))) < 1e-12);
  }
}

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "rsftune/metrics.hpp"

using namespace rsftune;

namespace {

SurvivalDataset as_dataset(const rsftest::Sample& s) {
  SurvivalDataset ds;
  ds.id = "m";
  ds.feature_names = {"x"};
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    ds.records.push_back({static_cast<int>(i + 1), {0.0}, s.times[i], s.events[i]});
  }
  return ds;
}

}  // namespace

TEST_CASE("C-index: perfect, tied and undefined cases") {
  const std::vector<double> t = {1, 2, 3, 4};
  const std::vector<int> e = {1, 1, 1, 1};
  CHECK(concordance_index(std::vector<double>{4, 3, 2, 1}, t, e) == 1.0);
  CHECK(concordance_index(std::vector<double>{1, 2, 3, 4}, t, e) == 0.0);
  CHECK(concordance_index(std::vector<double>{7, 7, 7, 7}, t, e) == 0.5);
  // Equal times are never comparable; censored-first pairs are not either.
  CHECK_THROWS_AS(concordance_index(std::vector<double>{1, 2}, std::vector<double>{3, 3}, std::vector<int>{1, 1}),
                  std::domain_error);
  CHECK_THROWS_AS(concordance_index(std::vector<double>{1, 2}, std::vector<double>{1, 3}, std::vector<int>{0, 1}),
                  std::domain_error);
  CHECK_THROWS(concordance_index(std::vector<double>{1}, std::vector<double>{1}, std::vector<int>{1}));
}

TEST_CASE("C-index equals brute-force pair enumeration exactly") {
  std::mt19937_64 gen(31);
  int done = 0;
  while (done < 300) {
    const std::size_t n = 2 + gen() % 49;
    const auto s = rsftest::random_sample(gen, n, 20, 0.4);
    std::vector<double> risks(n);
    for (auto& r : risks) r = static_cast<double>(gen() % 6);  // many ties
    const auto oracle = rsftest::oracle::cindex(risks, s.times, s.events);
    if (oracle.pairs == 0) continue;
    ++done;
    CHECK(concordance_index(risks, s.times, s.events) == oracle.value());
  }
}

TEST_CASE("C-index properties") {
  std::mt19937_64 gen(37);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 5 + gen() % 40;
    auto s = rsftest::random_sample(gen, n, 1000000, 0.3);
    std::vector<double> risks(n);
    for (auto& r : risks) r = rsftest::uniform01(gen);
    if (rsftest::oracle::cindex(risks, s.times, s.events).pairs == 0) continue;
    std::vector<double> neg(n);
    std::vector<double> cubed(n);
    for (std::size_t i = 0; i < n; ++i) {
      neg[i] = -risks[i];
      cubed[i] = std::exp(3.0 * risks[i]) + 5.0;
    }
    const double c = concordance_index(risks, s.times, s.events);
    CHECK(c + concordance_index(neg, s.times, s.events) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(concordance_index(cubed, s.times, s.events) == c);
  }
}

TEST_CASE("Brier at t: uncensored reductions") {
  const std::vector<double> t = {1, 2, 3, 4};
  const std::vector<int> e = {1, 1, 1, 1};
  const auto g = km_censoring(t, e);
  const double at = 2.5;
  std::vector<double> perfect;
  for (double ti : t) perfect.push_back(ti > at ? 1.0 : 0.0);
  CHECK(brier_at(perfect, t, e, at, g) == 0.0);
  CHECK(brier_at(std::vector<double>(4, 0.5), t, e, at, g) == 0.25);

  std::mt19937_64 gen(41);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = rsftest::random_sample(gen, 3 + gen() % 30, 20, 0.0);
    std::vector<double> p(s.times.size());
    for (auto& v : p) v = rsftest::uniform01(gen);
    const double u = 0.5 + static_cast<double>(gen() % 20);
    double mse = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double y = s.times[i] > u ? 1.0 : 0.0;
      mse += (y - p[i]) * (y - p[i]);
    }
    mse /= static_cast<double>(p.size());
    CHECK(brier_at(p, s.times, s.events, u, km_censoring(s.times, s.events)) == doctest::Approx(mse).epsilon(1e-14));
  }
  CHECK_THROWS(brier_at(perfect, t, e, 0.0, g));
}

TEST_CASE("Brier at t: six-record censored case matches the direct IPCW sum") {
  const std::vector<double> t = {2, 3, 3, 5, 6, 8};
  const std::vector<int> e = {1, 0, 1, 0, 1, 0};
  const std::vector<double> s = {0.9, 0.8, 0.7, 0.6, 0.5, 0.4};
  const auto g = km_censoring(t, e);
  for (double at : {1.0, 2.0, 3.0, 4.5, 6.0, 7.9}) {
    CHECK(brier_at(s, t, e, at, g) == doctest::Approx(rsftest::oracle::brier(s, t, e, at, t, e)).epsilon(1e-13));
  }
  // Hand check at 4.5: G = 1 before 3, G(3) = 1 - 1/4 (failure at 3 leaves first).
  // Terms: i0 event, weight G(2-) = 1: .81 ; i1 censored before: 0 ; i2 event, G(3-) = 1: .49 ;
  // i3..i5 alive past 4.5, weight 1/G(4.5) = 4/3: (.16 + .25 + .36) * 4/3.
  const double hand = (0.81 + 0.49 + (0.16 + 0.25 + 0.36) * 4.0 / 3.0) / 6.0;
  CHECK(brier_at(s, t, e, 4.5, g) == doctest::Approx(hand).epsilon(1e-14));
}

TEST_CASE("Brier at t matches the direct IPCW sum on random instances") {
  std::mt19937_64 gen(43);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = rsftest::random_sample(gen, 2 + gen() % 40, 15, 0.4);
    std::vector<double> p(s.times.size());
    for (auto& v : p) v = rsftest::uniform01(gen);
    const auto g = km_censoring(s.times, s.events);
    const double at = 0.5 + 0.5 * static_cast<double>(gen() % 30);
    double mine = 0.0;
    try {
      mine = brier_at(p, s.times, s.events, at, g);
    } catch (const std::domain_error&) {
      continue;
    }
    CHECK(std::fabs(mine - rsftest::oracle::brier(p, s.times, s.events, at, s.times, s.events)) <= 1e-12);
  }
}

TEST_CASE("integrated Brier: constant, single trapezoid and fine-grid quadrature") {
  const std::vector<double> t = {1, 2, 3, 4, 5, 6};
  const std::vector<int> e = {1, 1, 1, 1, 1, 1};
  const auto ds = as_dataset({t, e});
  const auto g = km_censoring(t, e);
  const auto half = [](std::size_t, double) { return 0.5; };
  CHECK(integrated_brier(half, ds, g, std::vector<double>{1.5, 2.5, 5.5}) == doctest::Approx(0.25).epsilon(1e-15));

  const auto decay = [&](std::size_t i, double u) { return std::exp(-u / (1.0 + static_cast<double>(i))); };
  const auto bs = [&](double u) {
    std::vector<double> p;
    for (std::size_t i = 0; i < t.size(); ++i) p.push_back(decay(i, u));
    return brier_at(p, t, e, u, g);
  };
  CHECK(integrated_brier(decay, ds, g, std::vector<double>{1.5, 4.0}) ==
        doctest::Approx(0.5 * (bs(1.5) + bs(4.0))).epsilon(1e-14));

  std::mt19937_64 gen(47);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = rsftest::random_sample(gen, 10 + gen() % 30, 40, 0.3);
    const auto rds = as_dataset(s);
    const auto rg = km_censoring(s.times, s.events);
    std::vector<double> scale(s.times.size());
    for (auto& v : scale) v = 5.0 + 30.0 * rsftest::uniform01(gen);
    const auto pred = [&](std::size_t i, double u) { return std::exp(-u / scale[i]); };
    const double lo = 1.0;
    const double hi = *std::max_element(s.times.begin(), s.times.end());
    if (!(hi > lo)) continue;
    const int steps = 400;
    std::vector<double> grid;
    for (int k = 0; k <= steps; ++k) grid.push_back(lo + (hi - lo) * k / steps);
    grid.back() = hi;
    const double oracle = rsftest::oracle::average_trapezoid(
        [&](double u) {
          std::vector<double> p;
          for (std::size_t i = 0; i < s.times.size(); ++i) p.push_back(pred(i, u));
          return rsftest::oracle::brier(p, s.times, s.events, u, s.times, s.events);
        },
        lo, hi, steps);
    const double mine = integrated_brier(pred, rds, rg, grid);
    CHECK(std::fabs(mine - oracle) < 1e-6);

    double mn = 1e9;
    double mx = -1e9;
    for (double u : grid) {
      std::vector<double> p;
      for (std::size_t i = 0; i < s.times.size(); ++i) p.push_back(pred(i, u));
      const double v = brier_at(p, s.times, s.events, u, rg);
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    CHECK(mine >= mn - 1e-15);
    CHECK(mine <= mx + 1e-15);
  }
}

TEST_CASE("integrated Brier rejects degenerate grids") {
  const std::vector<double> t = {1, 2, 3};
  const std::vector<int> e = {1, 1, 1};
  const auto ds = as_dataset({t, e});
  const auto g = km_censoring(t, e);
  const auto half = [](std::size_t, double) { return 0.5; };
  CHECK_THROWS(integrated_brier(half, ds, g, std::vector<double>{1.0}));
  CHECK_THROWS(integrated_brier(half, ds, g, std::vector<double>{2.0, 1.0}));
  CHECK_THROWS(integrated_brier(half, ds, g, std::vector<double>{1.0, 9.0}));
  CHECK_THROWS(integrated_brier(half, ds, g, std::vector<double>{0.0, 1.0}));
}

TEST_CASE("default Brier grid spans the 5th to 95th percentile") {
  std::vector<double> t;
  for (int i = 1; i <= 101; ++i) t.push_back(i);
  const auto grid = default_brier_grid(t);
  REQUIRE(grid.size() == 100);
  CHECK(grid.front() == doctest::Approx(6.0));
  CHECK(grid.back() == doctest::Approx(96.0));
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
  CHECK_THROWS(default_brier_grid(std::vector<double>{3, 3, 3}));
  CHECK(quantile_linear({1, 2, 3, 4}, 0.5) == 2.5);
}

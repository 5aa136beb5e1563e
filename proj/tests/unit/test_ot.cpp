#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "support/brute_ot.hpp"
#include "tropot/measure.hpp"
#include "tropot/random.hpp"
#include "tropot/transport_simplex.hpp"

using namespace tropot;
using Catch::Matchers::WithinAbs;

namespace {

Point<double> dp(std::vector<double> v) { return Point<double>::canonical(std::move(v)); }

}  // namespace

TEST_CASE("measures merge equal atoms") {
  const DiscreteMeasure m({dp({0, 1}), dp({3, 4}), dp({0, 2})}, {0.25, 0.25, 0.5});
  REQUIRE(m.size() == 2);
  CHECK(m.weights()[0] == 0.5);
  CHECK(m.find(dp({1, 2 + 1e-12})) == 0);
  CHECK_THROWS_AS(DiscreteMeasure({dp({0, 1})}, {0.9}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteMeasure({dp({0, 1}), dp({0, 2})}, {1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteMeasure({dp({0, 1}), dp({0, 2, 3})}, {0.5, 0.5}), DimensionMismatch);
  CHECK_THROWS_AS(DiscreteMeasure({}, {}), std::invalid_argument);
}

TEST_CASE("transport simplex on a textbook instance") {
  // Unbalanced-looking integer data with equal totals (75).
  const std::vector<Rational> a{20, 30, 25}, b{10, 25, 40};
  const std::vector<Rational> c{8, 6, 10, 9, 12, 13, 14, 9, 16};
  const auto plan = solve_transport<Rational>(a, b, c);
  const auto brute = oracle::BruteTransport(a, b, c).solve();
  CHECK(plan.cost == brute);
  Rational total(0);
  for (const auto& f : plan.flow) total += f;
  CHECK(total == 75);
}

TEST_CASE("wasserstein on small examples") {
  const auto x = dp({0, 2, 3}), y = dp({0, 1, -1});
  CHECK_THAT(wasserstein(DiscreteMeasure::dirac(x), DiscreteMeasure::dirac(y), 1).value,
             WithinAbs(4, 1e-12));
  CHECK_THAT(wasserstein(DiscreteMeasure::dirac(x), DiscreteMeasure::dirac(y), 2).value,
             WithinAbs(4, 1e-12));

  Rng rng(31);
  const auto mu = random_measure(rng, 4, 5);
  CHECK_THAT(wasserstein(mu, mu, 2).value, WithinAbs(0, 1e-12));

  // Straight pairing costs 1 + 1, crossed 5 + 3; each pair carries mass 1/2.
  const auto a = DiscreteMeasure::uniform({dp({0, 0, 0}), dp({0, 4, 0})});
  const auto b = DiscreteMeasure::uniform({dp({0, 1, 0}), dp({0, 5, 0})});
  const auto r = wasserstein(a, b, 1);
  CHECK_THAT(r.value, WithinAbs((1.0 + 1.0) / 2, 1e-12));
  CHECK_THAT(r.coupling.at(0, 0), WithinAbs(0.5, 1e-12));
  CHECK_THAT(r.coupling.at(1, 1), WithinAbs(0.5, 1e-12));
  CHECK(r.coupling.is_coupling_of(a, b));

  CHECK_THROWS_AS(wasserstein(a, b, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(wasserstein(a, DiscreteMeasure::dirac(dp({0, 1})), 1), DimensionMismatch);
}

TEST_CASE("brute oracle on permutations and Diracs") {
  const auto a = DiscreteMeasure::uniform({dp({0, 0, 0}), dp({0, 4, 0}), dp({0, -2, 3})});
  const auto b = DiscreteMeasure::uniform({dp({0, 1, 0}), dp({0, 5, 0}), dp({0, 0, 1})});
  CHECK(oracle::brute_transport_cost(a, b, 1) == transport_cost_exact(a, b, 1));
  const auto x = dp({0, 2, 3}), y = dp({0, 1, -1});
  CHECK(oracle::brute_wasserstein(DiscreteMeasure::dirac(x), DiscreteMeasure::dirac(y), 2) == 4);
}

TEST_CASE("simplex agrees with brute-force enumeration") {
  Rng rng(32);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 2 + t % 4;
    const bool uniform = t % 3 == 0;
    const std::size_t ka = 1 + t % 6, kb = uniform ? ka : 1 + (t / 6) % 6;
    const auto mu = random_measure(rng, n, ka, uniform);
    const auto nu = random_measure(rng, n, kb, uniform);
    for (unsigned p : {1u, 2u}) {
      const auto r = wasserstein(mu, nu, p);
      REQUIRE(r.coupling.is_coupling_of(mu, nu));
      REQUIRE_THAT(r.value, WithinAbs(oracle::brute_wasserstein(mu, nu, p), 1e-9));
      REQUIRE_THAT(coupling_cost(r.coupling, mu, nu, p), WithinAbs(r.cost, 1e-9));
      REQUIRE(transport_cost_exact(mu, nu, p) == oracle::brute_transport_cost(mu, nu, p));
    }
  }
}

TEST_CASE("wasserstein is symmetric and satisfies the triangle inequality") {
  Rng rng(33);
  for (int t = 0; t < 200; ++t) {
    const auto a = random_measure(rng, 3, 1 + t % 5);
    const auto b = random_measure(rng, 3, 1 + (t + 2) % 5);
    const auto c = random_measure(rng, 3, 1 + (t + 4) % 5);
    for (double p : {1.0, 2.0, 1.5}) {
      const double ab = wasserstein(a, b, p).value;
      REQUIRE_THAT(ab, WithinAbs(wasserstein(b, a, p).value, 1e-9));
      REQUIRE(wasserstein(a, c, p).value <= ab + wasserstein(b, c, p).value + 1e-9);
    }
  }
}

TEST_CASE("pushforward") {
  using Col = std::optional<SimpleProjection<double>::Entry>;
  const SimpleProjection<double> p(2, {Col{{0, 0.0}}, Col{{1, 0.0}}, std::nullopt});
  const auto x = dp({0, 3, 7});
  const auto d = pushforward(p, DiscreteMeasure::dirac(x));
  REQUIRE(d.measure.size() == 1);
  CHECK(same_point(d.measure.support()[0], dp({0, 3})));

  // Same image, different free coordinate.
  const auto two = DiscreteMeasure::uniform({dp({0, 3, 7}), dp({0, 3, -2})});
  const auto merged = pushforward(p, two);
  REQUIRE(merged.measure.size() == 1);
  CHECK_THAT(merged.measure.weights()[0], WithinAbs(1.0, 1e-15));
  CHECK(merged.atom_map == std::vector<std::size_t>{0, 0});
  CHECK(std::isfinite(wasserstein(merged.measure, merged.measure, 2).cost));

  const auto dense = p.to_matrix();
  CHECK(same_measure(pushforward(dense, two).measure, merged.measure));
  CHECK_THROWS_AS(pushforward(p, DiscreteMeasure::dirac(dp({0, 1}))), DimensionMismatch);

  const auto near = DiscreteMeasure::uniform({dp({0, 3, 7}), dp({0, 3 + 1e-10, -2})});
  CHECK(pushforward(p, near).measure.size() == 1);
  const auto apart = pushforward(p, near, 1e-12);
  REQUIRE(apart.measure.size() == 2);
  CHECK(apart.atom_map == std::vector<std::size_t>{0, 1});
  CHECK(pushforward(p, two, 1e-12).measure.size() == 1);
}

TEST_CASE("pushforwards do not expand the distance") {
  Rng rng(34);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 3 + t % 4, m = 2 + t % (n - 2);
    const auto p = random_simple_projection<double>(rng, m, n);
    const auto mu = random_measure(rng, n, 1 + t % 7);
    const auto nu = random_measure(rng, n, 1 + (t / 7) % 7);
    for (double q : {1.0, 2.0}) {
      const auto full = wasserstein(mu, nu, q);
      const auto pm = pushforward(p, mu), pn = pushforward(p, nu);
      REQUIRE(wasserstein(pm.measure, pn.measure, q).value <= full.value + 1e-9);

      const auto induced = pushforward_coupling(pm, pn, full.coupling);
      REQUIRE(induced.is_coupling_of(pm.measure, pn.measure));
      REQUIRE(coupling_cost(induced, pm.measure, pn.measure, q) <= full.cost + 1e-9);
    }
  }
}

TEST_CASE("the two oracles agree where both run") {
  Rng rng(35);
  for (int t = 0; t < 200; ++t) {
    const auto mu = random_measure(rng, 3, 1 + t % 4);
    const auto nu = random_measure(rng, 3, 1 + (t / 4) % 4);
    std::vector<Rational> cost;
    for (const auto& x : mu.support()) {
      for (const auto& y : nu.support()) cost.push_back(oracle::exact_distance(x, y));
    }
    const auto a = oracle::balanced(mu.weights()), b = oracle::balanced(nu.weights());
    REQUIRE(oracle::BruteTransport(a, b, cost).solve() == oracle::min_cost_flow(a, b, cost));
  }
}

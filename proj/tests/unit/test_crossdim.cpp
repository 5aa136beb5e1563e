#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "tropot/crossdim.hpp"
#include "tropot/random.hpp"

using namespace tropot;
using Catch::Matchers::WithinAbs;

namespace {

Point<double> dp(std::vector<double> v) { return Point<double>::canonical(std::move(v)); }

using Col = std::optional<SimpleProjection<double>::Entry>;

// Inclusion-exclusion written out independently: surjections onto the m rows
// from some subset of the n columns, the rest unused.
std::uint64_t count_by_subsets(std::size_t m, std::size_t n) {
  std::vector<std::vector<std::uint64_t>> stirling(n + 1, std::vector<std::uint64_t>(m + 1, 0));
  stirling[0][0] = 1;
  for (std::size_t a = 1; a <= n; ++a) {
    for (std::size_t b = 1; b <= m; ++b) {
      stirling[a][b] = b * stirling[a - 1][b] + stirling[a - 1][b - 1];
    }
  }
  std::uint64_t factorial = 1;
  for (std::size_t k = 2; k <= m; ++k) factorial *= k;
  std::uint64_t total = 0, binom = 1;  // binom = C(n, k)
  for (std::size_t k = 0; k <= n; ++k) {
    if (k >= m) total += binom * factorial * stirling[k][m];
    binom = binom * (n - k) / (k + 1);
  }
  return total;
}

}  // namespace

TEST_CASE("structure counts and enumeration") {
  CHECK(count_structures(2, 6) == 602);
  CHECK(count_structures(3, 6) == 2100);
  CHECK(count_structures(5, 6) == 2520);
  CHECK(count_structures(2, 3) == 12);
  CHECK(count_structures(3, 3) == 0);
  CHECK(count_structures(20, 60) == std::numeric_limits<std::uint64_t>::max());
  for (std::size_t n = 3; n <= 7; ++n) {
    for (std::size_t m = 2; m < n; ++m) {
      const auto all = enumerate_structures(m, n);
      REQUIRE(all.size() == count_structures(m, n));
      REQUIRE(all.size() == count_by_subsets(m, n));
      REQUIRE(std::is_sorted(all.begin(), all.end()));
      REQUIRE(std::set<ProjectionStructure>(all.begin(), all.end()).size() == all.size());
      for (const auto& s : all) REQUIRE(s.valid());
    }
  }
}

TEST_CASE("structures and projections") {
  const ProjectionStructure s{2, {0, 1, 0, 2}};
  CHECK(s.valid());
  CHECK(s.to_string() == "{1,3}{2}");
  CHECK(s.is_unused(3));
  const auto p = s.with_offsets({1, 2, 3, 0});
  CHECK(ProjectionStructure::of(p) == s);
  CHECK(apply(p, dp({0, 0, 0, 5})) == dp({3, 2}));
  CHECK_FALSE((ProjectionStructure{2, {0, 0, 2}}).valid());
  CHECK_FALSE((ProjectionStructure{2, {0, 1}}).valid());
  CHECK_THROWS_AS(s.with_offsets({1, 2}), DimensionMismatch);
}

TEST_CASE("Dirac measures are at distance zero") {
  Rng rng(41);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 3 + t % 5, m = 2 + t % (n - 2);
    const auto x = random_point<double>(rng, n), y = random_point<double>(rng, m);
    const auto mu = DiscreteMeasure::dirac(y), nu = DiscreteMeasure::dirac(x);

    // Closed form: singleton blocks with M_i = y_i - x_i.
    std::vector<Col> cols(n);
    for (std::size_t i = 0; i < m; ++i) cols[i] = Col{{i, y[i] - x[i]}};
    REQUIRE(same_point(apply(SimpleProjection<double>(m, cols), x), y));

    const auto r = w_plus(mu, nu, 2);
    REQUIRE(r.w_minus <= 1e-9);
    REQUIRE(*r.w_plus <= 1e-9);
    REQUIRE(r.certificate->alpha.size() == 1);
    const auto fibre = split(*r.projection, x).fibre_part;
    REQUIRE(same_point(r.certificate->alpha.support()[0], unsplit(*r.projection, y, fibre)));
  }
}

TEST_CASE("optimize_offsets reaches the closed form on singletons") {
  const auto mu = DiscreteMeasure::dirac(dp({0, 3}));
  const auto nu = DiscreteMeasure::dirac(dp({0, -2, 7}));
  const auto fit = optimize_offsets(ProjectionStructure{2, {0, 1, 2}}, mu, nu, 2, {});
  CHECK(fit.value <= 1e-6);
  CHECK_FALSE(fit.budget_exhausted);
  CHECK_THROWS_AS(optimize_offsets(ProjectionStructure{2, {0, 0, 2}}, mu, nu, 2, {}),
                  std::invalid_argument);
}

TEST_CASE("deleting a very negative coordinate costs nothing") {
  const auto mu = DiscreteMeasure::uniform({dp({0, 1.5}), dp({0, -2})});
  const auto nu = DiscreteMeasure::uniform({dp({0, 1.5, -1000}), dp({0, -2, -1000})});
  for (double p : {1.0, 2.0}) {
    const auto r = w_plus(mu, nu, p);
    CHECK(r.w_minus <= 1e-9);
    CHECK(*r.w_plus <= 1e-9);
  }
  const ProjectionStructure del{2, {0, 1, 2}};
  CHECK(same_measure(pushforward(del.with_offsets({0, 0, 0}), nu).measure, mu));
}

TEST_CASE("pushforwards through a planted projection are recovered") {
  Rng rng(42);
  for (int t = 0; t < 24; ++t) {
    const std::size_t n = 3 + t % 3, m = 2 + t % (n - 2);
    const auto planted = random_simple_projection<double>(rng, m, n);
    const auto nu = random_measure(rng, n, 1 + t % 6);
    const auto mu = pushforward(planted, nu).measure;
    const auto r = w_plus(mu, nu, 1 + t % 2);
    REQUIRE(r.w_minus <= 1e-6);
    REQUIRE(*r.w_plus <= 1e-6);
    REQUIRE(same_measure(r.certificate->alpha, nu, 1e-6));
  }
}

TEST_CASE("the embedding certificate matches the projected coupling") {
  Rng rng(43);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 3 + t % 3, m = 2 + t % (n - 2);
    const auto mu = random_measure(rng, m, 1 + t % 7);
    const auto nu = random_measure(rng, n, 1 + (t + 3) % 7);
    ProjectionSearchSpec spec;
    spec.max_structures = 24;
    spec.restarts = 2;
    const auto r = w_plus(mu, nu, 1 + t % 2, spec);
    const auto& c = *r.certificate;
    REQUIRE(c.gap <= 1e-9);
    REQUIRE(c.pushforward_matches);
    REQUIRE(c.pi_n.is_coupling_of(c.alpha, nu));
    REQUIRE_THAT(*r.w_plus, WithinAbs(r.w_minus, 1e-8));
    REQUIRE_THAT(r.w_minus, WithinAbs(wasserstein(mu, *r.beta, r.p).value, 1e-12));
    REQUIRE(std::isfinite(r.w_minus));
  }
}

TEST_CASE("search is deterministic for a fixed seed") {
  Rng rng(44);
  const auto mu = random_measure(rng, 3, 5), nu = random_measure(rng, 5, 6);
  ProjectionSearchSpec spec;
  spec.seed = 7;
  spec.max_structures = 40;
  spec.restarts = 2;
  const auto a = w_minus(mu, nu, 2, spec), b = w_minus(mu, nu, 2, spec);
  CHECK_FALSE(a.exhaustive);
  CHECK(a.w_minus == b.w_minus);
  CHECK(*a.projection == *b.projection);
  CHECK(a.structures_explored == b.structures_explored);
}

TEST_CASE("threads do not change the result") {
  Rng rng(45);
  const auto mu = random_measure(rng, 2, 4), nu = random_measure(rng, 4, 5);
  ProjectionSearchSpec spec;
  spec.mode = StructureMode::exhaustive;
  spec.restarts = 2;
  const auto one = w_minus(mu, nu, 2, spec);
  spec.threads = 3;
  const auto three = w_minus(mu, nu, 2, spec);
  CHECK(one.exhaustive);
  CHECK(one.w_minus == three.w_minus);
  CHECK(*one.projection == *three.projection);
}

TEST_CASE("more structures never give a larger value") {
  Rng rng(46);
  ProjectionSearchSpec spec;
  spec.restarts = 2;
  for (int t = 0; t < 6; ++t) {
    const auto mu = random_measure(rng, 2, 3), nu = random_measure(rng, 4, 4);
    const auto all = enumerate_structures(2, 4);
    std::vector<ProjectionStructure> small(all.begin(), all.begin() + 5);
    std::vector<ProjectionStructure> large(all.begin(), all.begin() + 15);
    const double a = w_minus_structures(mu, nu, 2, small, spec).w_minus;
    const double b = w_minus_structures(mu, nu, 2, large, spec).w_minus;
    REQUIRE(b <= a + 1e-12);
  }
}

TEST_CASE("fixed families are 1-Lipschitz") {
  Rng rng(47);
  std::vector<SimpleProjection<double>> family;
  for (int k = 0; k < 5; ++k) family.push_back(random_simple_projection<double>(rng, 2, 4));
  for (int t = 0; t < 100; ++t) {
    const auto mu1 = random_measure(rng, 2, 1 + t % 5), mu2 = random_measure(rng, 2, 1 + t % 4);
    const auto nu1 = random_measure(rng, 4, 1 + t % 6), nu2 = random_measure(rng, 4, 1 + t % 3);
    for (double p : {1.0, 2.0}) {
      const double bound = wasserstein(mu1, mu2, p).value + wasserstein(nu1, nu2, p).value + 1e-8;
      const auto a = w_plus_family(mu1, nu1, p, family), b = w_plus_family(mu2, nu2, p, family);
      REQUIRE(std::abs(a.w_minus - b.w_minus) <= bound);
      REQUIRE(std::abs(*a.w_plus - *b.w_plus) <= bound);
      REQUIRE(a.certificate->gap <= 1e-9);
    }
  }
  CHECK_THROWS_AS(w_minus_family(random_measure(rng, 2, 2), random_measure(rng, 4, 2), 2, {}),
                  std::invalid_argument);
}

TEST_CASE("estimates from samples") {
  Rng rng(48);
  CHECK(estimate_from_samples({dp({0, 4})}, {dp({0, 1, -3})}, 2).w_minus <= 1e-9);
  const ProjectionStructure s{2, {1, 2, 0}};
  const auto p = s.with_offsets({0.5, 0, -1});
  std::vector<Point<double>> y, x;
  for (int k = 0; k < 6; ++k) {
    y.push_back(random_point<double>(rng, 3));
    x.push_back(apply(p, y.back()));
  }
  CHECK(estimate_from_samples(x, y, 2).w_minus <= 1e-6);
  CHECK_THROWS_AS(estimate_from_samples({}, y, 2), std::invalid_argument);
}

TEST_CASE("invalid inputs") {
  const auto a = DiscreteMeasure::dirac(dp({0, 1, 2}));
  CHECK_THROWS_AS(w_minus(a, a, 2), std::invalid_argument);
  CHECK_THROWS_AS(w_minus(a, DiscreteMeasure::dirac(dp({0, 1})), 2), std::invalid_argument);
  CHECK_THROWS_AS(w_minus(DiscreteMeasure::dirac(dp({0, 1})), a, 0.5), std::invalid_argument);
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "tropot/point.hpp"
#include "tropot/random.hpp"

using namespace tropot;
using Q = Rational;

namespace {

Point<Q> qp(std::vector<int> v) {
  std::vector<Q> c(v.begin(), v.end());
  return Point<Q>::canonical(std::move(c));
}

}  // namespace

TEST_CASE("canonical subtracts the first coordinate") {
  CHECK(qp({3, 5, 4}) == qp({0, 2, 1}));
  CHECK(qp({3, 5, 4}).coords() == std::vector<Q>{0, 2, 1});
  CHECK(qp({0, 2, 1}).coords() == std::vector<Q>{0, 2, 1});
  CHECK(qp({-1, -1, -1}) == Point<Q>::origin(3));
  const auto once = qp({7, -2, 5});
  CHECK(Point<Q>::canonical(once.coords()) == once);
}

TEST_CASE("canonical rejects short and non-finite input") {
  CHECK_THROWS_AS(Point<double>::canonical({1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Point<double>::canonical({0.0, std::nan("")}), std::invalid_argument);
  CHECK_THROWS_AS(
      Point<double>::canonical({0.0, std::numeric_limits<double>::infinity()}),
      std::invalid_argument);
}

TEST_CASE("trop_metric on small examples") {
  CHECK(trop_metric(qp({0, 0, 0}), qp({0, 0, 0})) == 0);
  CHECK(trop_metric(qp({0, 2, 3}), qp({0, 1, -1})) == 4);
  const std::vector<Q> x{0, 2, 3}, y{0, 1, -1};
  CHECK(trop_metric_pairwise<Q>(x, y) == 4);
  const std::vector<Q> a{0, 5, 5}, b{3, 8, 8};
  CHECK(trop_metric<Q>(a, b) == 0);
  CHECK_THROWS_AS(trop_metric(qp({0, 1}), qp({0, 1, 2})), DimensionMismatch);
}

TEST_CASE("metric axioms on random triples") {
  Rng rng(11);
  for (int t = 0; t < 10000; ++t) {
    const std::size_t n = 2 + t % 6;
    const auto x = random_point<Q>(rng, n), y = random_point<Q>(rng, n), z = random_point<Q>(rng, n);
    const Q dxy = trop_metric(x, y);
    REQUIRE(dxy >= 0);
    REQUIRE(dxy == trop_metric(y, x));
    REQUIRE((dxy == 0) == (x == y));
    REQUIRE(trop_metric(x, z) <= dxy + trop_metric(y, z));
    REQUIRE(dxy == trop_metric_pairwise<Q>(x.coords(), y.coords()));
  }
}

TEST_CASE("metric is invariant under tropical scaling") {
  Rng rng(12);
  for (int t = 0; t < 1000; ++t) {
    const auto x = random_point<Q>(rng, 4), y = random_point<Q>(rng, 4);
    const Q c = random_scalar<Q>(rng, 50, 3);
    const auto cx = tropical_scale<Q>(c, x.coords());
    REQUIRE(trop_metric<Q>(cx, y.coords()) == trop_metric(x, y));
    REQUIRE(Point<Q>::canonical(cx) == x);
  }
}

TEST_CASE("trop_combination") {
  const std::vector<Point<Q>> cols{qp({2, -2, 1}), qp({0, 2, 3}), qp({0, 1, -1})};
  const std::vector<Q> zeros{0, 0, 0};
  CHECK(trop_combination<Q>(cols, zeros) == qp({0, 2, 3}));
  // Raw columns (2,-2,1), (0,2,3), (0,1,-1) are the canonical ones shifted by (2,0,0).
  const std::vector<Q> raw_shift{2, 0, 0};
  CHECK(trop_combination<Q>(cols, raw_shift) == qp({0, 0, 1}));

  const std::vector<Point<Q>> one{qp({0, 4, -2})};
  const std::vector<Q> zero{0};
  CHECK(trop_combination<Q>(one, zero) == one.front());

  const std::vector<Point<Q>> ab{cols[0], cols[1]};
  const std::vector<Q> far{-1000000, 0};
  CHECK(trop_combination<Q>(ab, far) == cols[1]);

  const std::vector<Point<Q>> none;
  CHECK_THROWS_AS(trop_combination<Q>(none, std::vector<Q>{}), std::invalid_argument);
  CHECK_THROWS_AS(trop_combination<Q>(ab, zero), std::invalid_argument);
}

TEST_CASE("trop_combination ignores a joint shift of the coefficients") {
  Rng rng(13);
  for (int t = 0; t < 500; ++t) {
    std::vector<Point<Q>> pts;
    std::vector<Q> alpha, shifted;
    const Q c = random_scalar<Q>(rng, 20);
    for (int k = 0; k < 4; ++k) {
      pts.push_back(random_point<Q>(rng, 5));
      alpha.push_back(random_scalar<Q>(rng, 10));
      shifted.push_back(alpha.back() + c);
    }
    REQUIRE(trop_combination<Q>(pts, alpha) == trop_combination<Q>(pts, shifted));
  }
}

TEST_CASE("hull generators are deduplicated") {
  HullGenerators<Q> h;
  CHECK(h.add(qp({0, 1, 2})));
  CHECK_FALSE(h.add(qp({5, 6, 7})));
  CHECK(h.add(qp({0, 0, 0})));
  CHECK(h.size() == 2);
}

TEST_CASE("max-plus scalars") {
  using E = Extended<Q>;
  const E ninf = E::neg_inf();
  const E three(Q(3));
  CHECK(oplus(ninf, three) == three);
  CHECK(oplus(three, ninf) == three);
  CHECK(otimes(ninf, three).is_neg_inf());
  CHECK(otimes(E(Q(0)), three) == three);
  CHECK(oplus(E(Q(2)), three) == three);
  CHECK(otimes(E(Q(2)), three) == E(Q(5)));
  CHECK(ninf < three);
  CHECK_THROWS(ninf.value());
  CHECK_THROWS_AS(Extended<double>(std::nan("")), std::invalid_argument);
}

TEST_CASE("rational parsing and decimal output") {
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("-0.075") == Rational(-3, 40));
  CHECK(parse_rational("007") == Rational(7));
  CHECK(parse_rational("0") == Rational(0));
  CHECK(parse_rational("000.000") == Rational(0));
  CHECK(parse_rational("12/08") == Rational(3, 2));
  CHECK(parse_rational("2.5e-1") == Rational(1, 4));
  CHECK(parse_rational(" 1e3 ") == Rational(1000));
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("."), std::invalid_argument);
  CHECK(to_decimal(Rational(3, 40)) == "0.075");
  CHECK(to_decimal(Rational(-5, 2)) == "-2.5");
  CHECK(to_decimal(Rational(7)) == "7");
  CHECK_FALSE(to_decimal(Rational(1, 3)).has_value());
  for (int num = -40; num <= 40; ++num) {
    for (int den : {1, 2, 4, 5, 8, 16, 20, 25, 125}) {
      const Rational r(num, den);
      REQUIRE(parse_rational(*to_decimal(r)) == r);
      REQUIRE(parse_rational(to_string(r)) == r);
    }
  }
}

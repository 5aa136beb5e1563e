#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "tropot/fibre.hpp"
#include "tropot/random.hpp"

using namespace tropot;
using Q = Rational;
using E = Extended<Q>;

namespace {

const E NI = E::neg_inf();

Point<Q> qp(std::vector<Q> v) { return Point<Q>::canonical(std::move(v)); }

Matrix<Q> example31() { return Matrix<Q>::from_rows({{2, 0, 0}, {-2, 2, 1}, {1, 3, -1}}); }
Matrix<Q> fig2() { return Matrix<Q>::from_rows({{0, 2, 1}, {0, -5, -1}}); }
Matrix<Q> simple23() { return Matrix<Q>(2, 3, {E(Q(0)), NI, NI, NI, E(Q(0)), NI}); }

TypeLabel label(std::vector<std::vector<std::size_t>> one_based) {
  for (auto& s : one_based) {
    for (auto& i : s) --i;
  }
  return TypeLabel(std::move(one_based));
}

// Independent evaluation of (Mx)_i = max_j(M_ij + x_j) on a raw vector.
std::vector<Q> eval(const Matrix<Q>& m, const std::vector<Q>& x) {
  std::vector<Q> out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::optional<Q> best;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (!m(i, j).is_finite()) continue;
      const Q v = m(i, j).value() + x[j];
      if (!best || *best < v) best = v;
    }
    out.push_back(*best);
  }
  return out;
}

}  // namespace

TEST_CASE("apply") {
  CHECK(apply(example31(), Point<Q>::origin(3)) == qp({0, 0, 1}));
  CHECK(apply_raw<Q>(example31(), std::vector<Q>{0, 0, 0}) == std::vector<Q>{2, 2, 3});
  const auto id = Matrix<Q>::identity(4);
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    const auto x = random_point<Q>(rng, 4);
    REQUIRE(apply(id, x) == x);
    const auto m = random_matrix<Q>(rng, 3, 4, 0.3);
    const Q c = random_scalar<Q>(rng, 30);
    const auto shifted = tropical_scale<Q>(c, x.coords());
    const auto raw = apply_raw<Q>(m, shifted);
    const auto base = apply_raw<Q>(m, x.coords());
    for (std::size_t i = 0; i < 3; ++i) REQUIRE(raw[i] == base[i] + c);
    REQUIRE(apply(m, x) == qp(eval(m, x.coords())));
  }
  CHECK_THROWS_AS(apply(example31(), Point<Q>::origin(4)), DimensionMismatch);
}

TEST_CASE("matrix rows need a real entry") {
  CHECK_THROWS_AS(Matrix<Q>(2, 2, {E(Q(0)), NI, NI, NI}), std::invalid_argument);
  CHECK_THROWS_AS(Matrix<Q>(2, 2, {E(Q(0))}), std::invalid_argument);
}

TEST_CASE("image vertices of the 3x3 example") {
  const auto gens = image_vertices(example31()).generators();
  REQUIRE(gens.size() == 3);
  std::set<std::vector<Q>> got;
  for (const auto& g : gens) got.insert(g.quotient_coords());
  CHECK(got == std::set<std::vector<Q>>{{-4, -1}, {2, 3}, {1, -1}});

  const auto dup = Matrix<Q>::from_rows({{0, 1, 0}, {1, 2, 3}});
  CHECK(image_vertices(dup).size() == 2);
  CHECK_THROWS_AS(image_vertices(simple23()), std::invalid_argument);
}

TEST_CASE("image membership by residuation") {
  Rng rng(2);
  for (int t = 0; t < 300; ++t) {
    const auto m = random_matrix<Q>(rng, 1 + t % 4, 1 + (t / 4) % 5, 0.3);
    const auto x = m.cols() >= 2 ? random_point<Q>(rng, m.cols()) : Point<Q>::origin(2);
    if (m.cols() < 2 || m.rows() < 2) continue;
    const auto y = apply(m, x);
    const auto r = image_contains(m, y);
    REQUIRE(r.member);
    REQUIRE(apply(m, r.witness) == y);
  }
  const auto far = qp({0, 10, 10});
  const auto r = image_contains(example31(), far);
  CHECK_FALSE(r.member);
  CHECK(r.deficient_row.has_value());
  CHECK(apply_raw<Q>(example31(), r.witness.coords()) != far.coords());

  const auto y = qp({0, -3, 5, 2});
  const auto idr = image_contains(Matrix<Q>::identity(4), y);
  CHECK(idr.member);
  CHECK(idr.witness == y);
}

TEST_CASE("surjectivity") {
  CHECK(is_surjective(simple23()));
  CHECK_FALSE(is_surjective(example31()));
  CHECK_FALSE(is_surjective(Matrix<Q>(2, 2, {E(Q(0)), E(Q(0)), NI, E(Q(0))})));

  const auto x = surjectivity_witness(simple23(), qp({0, 7}));
  CHECK(x[0] == 0);
  CHECK(x[1] == 7);
  CHECK(x[2] < 0);
  CHECK(apply(simple23(), x) == qp({0, 7}));
  CHECK(apply(simple23(), surjectivity_witness(simple23(), qp({0, 0}))) == qp({0, 0}));
  CHECK_THROWS_AS(surjectivity_witness(example31(), qp({0, 0, 0})), std::invalid_argument);

  // Filler columns that are real in several rows.
  const auto shared = Matrix<Q>(2, 3, {E(Q(0)), NI, E(Q(0)), NI, E(Q(0)), E(Q(0))});
  CHECK(apply(shared, surjectivity_witness(shared, qp({0, -100}))) == qp({0, -100}));
}

TEST_CASE("surjectivity trichotomy on random patterns") {
  Rng rng(3);
  int surjective = 0, refuted = 0;
  for (int t = 0; t < 300; ++t) {
    const std::size_t m = 2 + t % 3, n = 2 + (t / 3) % 5;
    const auto mat = random_matrix<Q>(rng, m, n, 0.6);
    if (is_surjective(mat)) {
      ++surjective;
      for (int k = 0; k < 5; ++k) {
        const auto y = random_point<Q>(rng, m);
        REQUIRE(qp(eval(mat, surjectivity_witness(mat, y).coords())) == y);
      }
    } else {
      const auto owned = private_columns(mat);
      for (std::size_t i = 0; i < m; ++i) {
        if (!owned[i].empty()) continue;
        REQUIRE_FALSE(image_contains(mat, spike_target(mat, i)).member);
        ++refuted;
      }
    }
  }
  CHECK(surjective > 20);
  CHECK(refuted > 20);
}

TEST_CASE("type_of") {
  const auto left = qp({100, 0, 0});
  CHECK(type_of(fig2(), left) == label({{1, 2}, {}, {}}));
  const auto lower_middle = qp({0, 0, -10});
  CHECK(type_of(fig2(), lower_middle) == label({{2}, {1}, {}}));
  CHECK(type_of(Matrix<Q>::identity(3), qp({0, 1, 2})) == label({{1}, {2}, {3}}));
  // A tie is reported in exact mode and rejected in float mode.
  CHECK(type_of(fig2(), qp({0, -2, -1})) == label({{1, 2}, {1}, {1}}));
  CHECK_THROWS_AS(type_of(fig2().convert<double>(), Point<double>::canonical({0, -2, -1})),
                  DegeneratePoint);
  Rng rng(4);
  for (int t = 0; t < 500; ++t) {
    const auto m = random_matrix<Q>(rng, 3, 4, 0.3);
    REQUIRE(type_of(m, random_point<Q>(rng, 4)).covers(3));
  }
}

TEST_CASE("type cells") {
  // a..f = 0,2,1,0,-5,-1; left region: a+x1 >= b+x2, a+x1 >= c+x3, d+x1 >= e+x2, d+x1 >= f+x3.
  const auto cell = type_cell(fig2(), label({{1, 2}, {}, {}}));
  REQUIRE_FALSE(cell.empty);
  Rng rng(5);
  for (int t = 0; t < 500; ++t) {
    const auto x = random_point<Q>(rng, 3);
    const bool expected = x[0] >= 2 + x[1] && x[0] >= 1 + x[2] && x[0] >= -5 + x[1] &&
                          x[0] >= -1 + x[2];
    REQUIRE(contains(cell, x) == expected);
  }
  CHECK(cell_dim(cell) == 2);

  // A column taking every row: Mx is constant along the cell.
  const auto all = type_cell(fig2(), label({{}, {1, 2}, {}}));
  for (const auto& x : sample_points(all, 20, rng)) {
    REQUIRE(apply(fig2(), x) == fig2().column(1));
  }

  CHECK(type_cell(simple23(), label({{1, 2}, {}, {}})).empty);
}

TEST_CASE("type cells intersect like their labels") {
  Rng rng(6);
  for (int t = 0; t < 100; ++t) {
    const auto m = random_matrix<Q>(rng, 2, 3, 0.2);
    const auto cells = partition_type_cells(m);
    for (const auto& a : cells) {
      for (const auto& b : cells) {
        const auto both = type_cell(m, a.label.united(b.label));
        const auto meet = intersect(a, b);
        REQUIRE(both.empty == meet.empty);
        if (both.empty) continue;
        REQUIRE(same_polyhedron(both, meet));
        for (const auto& x : sample_points(meet, 4, rng)) {
          REQUIRE(contains(both, x));
          REQUIRE(type_of(m, x).covers(2));
        }
        for (int k = 0; k < 10; ++k) {
          const auto x = random_point<Q>(rng, 3);
          REQUIRE(contains(both, x) == (contains(a, x) && contains(b, x)));
        }
      }
    }
  }
}

TEST_CASE("maximal cells of the generic 2x3 matrix") {
  std::set<TypeLabel> full;
  for (const auto& c : partition_type_cells(fig2())) {
    REQUIRE(c.label.is_partition(2));
    if (cell_dim(c) == 2) full.insert(c.label);
  }
  const std::set<TypeLabel> expected{label({{1, 2}, {}, {}}), label({{2}, {}, {1}}),
                                     label({{}, {}, {1, 2}}), label({{}, {1}, {2}}),
                                     label({{}, {1, 2}, {}}), label({{2}, {1}, {}})};
  CHECK(full == expected);
}

TEST_CASE("the all-zero 2x3 matrix is degenerate") {
  const auto zero = Matrix<Q>::from_rows({{0, 0, 0}, {0, 0, 0}});
  std::size_t full = 0, lower = 0;
  for (const auto& c : partition_type_cells(zero)) {
    (cell_dim(c) == 2 ? full : lower) += 1;
  }
  CHECK(full == 3);
  CHECK(lower == 6);
}

TEST_CASE("fibres") {
  const auto f = fibre_at(simple23(), qp({0, 0}));
  REQUIRE(f.cells.size() == 1);
  CHECK(cell_dim(f.cells.front()) == 1);

  const auto zero = Matrix<Q>::from_rows({{0, 0, 0}, {0, 0, 0}});
  const auto fz = fibre_at(zero, qp({0, 0}));
  CHECK_FALSE(fz.cells.empty());
  Rng rng(7);
  for (const auto& c : fz.cells) {
    for (const auto& x : sample_points(c, 30, rng)) REQUIRE(apply(zero, x) == qp({0, 0}));
  }

  CHECK(fibre_at(example31(), qp({0, 10, 10})).cells.empty());
  CHECK_THROWS_AS(fibre_at(example31(), qp({0, 1})), DimensionMismatch);
}

TEST_CASE("fibre cells agree with apply and residuation") {
  Rng rng(8);
  for (int t = 0; t < 150; ++t) {
    const std::size_t m = 2 + t % 2, n = 2 + t % 3;
    const auto mat = random_matrix<Q>(rng, m, n, 0.25);
    const auto y = t % 3 == 0 ? random_point<Q>(rng, m) : apply(mat, random_point<Q>(rng, n));
    const auto fibre = fibre_at(mat, y);
    const auto membership = image_contains(mat, y);
    REQUIRE(fibre.cells.empty() == !membership.member);
    for (const auto& c : fibre.cells) {
      REQUIRE(c.label.is_partition(m));
      REQUIRE(apply(mat, interior_point(c)) == y);
      for (const auto& x : sample_points(c, 5, rng)) REQUIRE(qp(eval(mat, x.coords())) == y);
      for (std::size_t r = 1; r < m; ++r) {
        REQUIRE(same_polyhedron(c, fibre_cell(mat, c.label, y, r)));
      }
    }
    if (membership.member) {
      bool found = false;
      for (const auto& c : fibre.cells) found = found || contains(c, membership.witness);
      REQUIRE(found);
    }
  }
}

TEST_CASE("cell dimensions") {
  Rng rng(9);
  const auto id = Matrix<Q>::identity(3);
  const auto point_fibre = fibre_at(id, qp({0, 1, 2}));
  REQUIRE(point_fibre.cells.size() == 1);
  CHECK(cell_dim(point_fibre.cells.front()) == 0);
  PolyCell empty;
  empty.ambient = 3;
  empty.empty = true;
  CHECK_THROWS_AS(cell_dim(empty), EmptyCell);
}

#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "tropot/tree.hpp"

using namespace tropot;

namespace {

Rational q(long n, long d = 1) { return Rational(n, d); }

// Independent path-length oracle: Floyd-Warshall over the edge list.
std::map<std::pair<std::string, std::string>, Rational> all_pairs(const PhyloTree& t) {
  const std::size_t n = t.nodes.size();
  std::vector<std::vector<std::optional<Rational>>> d(n, std::vector<std::optional<Rational>>(n));
  for (std::size_t v = 0; v < n; ++v) {
    d[v][v] = Rational(0);
    if (t.nodes[v].parent != PhyloTree::npos) {
      const auto w = t.nodes[v].length.value_or(Rational(0));
      d[v][t.nodes[v].parent] = w;
      d[t.nodes[v].parent][v] = w;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (d[i][k] && d[k][j] && (!d[i][j] || *d[i][k] + *d[k][j] < *d[i][j])) {
          d[i][j] = *d[i][k] + *d[k][j];
        }
      }
    }
  }
  std::map<std::pair<std::string, std::string>, Rational> out;
  for (auto a : t.leaves()) {
    for (auto b : t.leaves()) out[{t.nodes[a].label, t.nodes[b].label}] = *d[a][b];
  }
  return out;
}

}  // namespace

TEST_CASE("a small rooted tree") {
  const auto t = parse_newick("((A:1,B:1):1,C:2);");
  CHECK(t.rooted);
  CHECK(t.leaves().size() == 3);
  CHECK(t.leaf_labels() == std::vector<std::string>{"A", "B", "C"});
  const auto c = cophenetic_vector(t);
  CHECK(c.distances == std::vector<Rational>{q(2), q(4), q(4)});
  CHECK(c.pairs == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {0, 2}, {1, 2}});
  CHECK(c.point() == Point<Rational>::canonical({q(0), q(2), q(2)}));
  CHECK(is_ultrametric(t));
  CHECK_FALSE(is_ultrametric(parse_newick("((A:1,B:2):1,C:2);")));
  CHECK(to_newick(t) == "((A:1,B:1):1,C:2);");
}

TEST_CASE("syntax errors report a position") {
  try {
    parse_newick("((A:1,B:1");
    FAIL("expected a NewickError");
  } catch (const NewickError& e) {
    CHECK(e.position() == 8);
  }
  try {
    parse_newick("((A:1,B:1));x");
    FAIL("expected a NewickError");
  } catch (const NewickError& e) {
    CHECK(e.position() == 12);
  }
  CHECK_THROWS_AS(parse_newick("(A:1,B:-1,C:1);"), NewickError);
  CHECK_THROWS_AS(parse_newick("(A:1,B:x,C:1);"), NewickError);
  CHECK_THROWS_AS(parse_newick("(A:1,B:1,C:1)"), NewickError);
  CHECK_THROWS_AS(parse_newick(""), NewickError);
}

TEST_CASE("missing branch lengths") {
  const auto t = parse_newick("((A,B:1):2,C:3);");
  CHECK(cophenetic_vector(t).distances == std::vector<Rational>{q(1), q(5), q(6)});
  try {
    parse_newick("((A,B:1):2,C:3);", {MissingLength::reject});
    FAIL("expected a NewickError");
  } catch (const NewickError& e) {
    CHECK(e.position() == 3);
  }
  CHECK_NOTHROW(parse_newick("((A:1,B:1):2,C:3);", {MissingLength::reject}));
}

TEST_CASE("labels, comments and rooting") {
  const auto t = parse_newick("[&U] ( 'it''s':0.5 , B:1.25 , [note] C:1/3 ) ;");
  CHECK_FALSE(t.rooted);
  CHECK(t.leaf_labels() == std::vector<std::string>{"B", "C", "it's"});
  CHECK(cophenetic_vector(t).at(0, 2) == q(7, 4));
  const auto again = parse_newick(to_newick(t));
  CHECK(isomorphic(t, again));
  CHECK(to_newick(t) == "('it''s':0.5,B:1.25,C:1/3);");
  CHECK_FALSE(parse_newick("(A:1,B:1,C:1);").rooted);
  CHECK(parse_newick("[&R](A:1,B:1,C:1);").rooted);
  CHECK(to_newick(parse_newick("[&R](A:1,B:1,C:1);")) == "[&R] (A:1,B:1,C:1);");
}

TEST_CASE("star trees map to the origin") {
  const auto t = parse_newick("(A:1.5,B:1.5,C:1.5,D:1.5);");
  const auto c = cophenetic_vector(t);
  CHECK(c.distances.size() == 6);
  for (const auto& d : c.distances) CHECK(d == q(3));
  CHECK(c.point() == Point<Rational>::origin(6));
}

TEST_CASE("relabelling permutes coordinates by pair order") {
  Rng rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const auto labels = leaf_names(5);
    auto t = random_tree(rng, labels, trial % 2 == 0);
    const auto before = cophenetic_vector(t);
    std::vector<std::string> perm = labels;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::map<std::string, std::string> rename;
    for (std::size_t k = 0; k < labels.size(); ++k) rename[labels[k]] = perm[k];
    for (auto v : t.leaves()) t.nodes[v].label = rename[t.nodes[v].label];
    const auto after = cophenetic_vector(t);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      for (std::size_t j = i + 1; j < labels.size(); ++j) {
        const auto a = std::find(labels.begin(), labels.end(), rename[labels[i]]) - labels.begin();
        const auto b = std::find(labels.begin(), labels.end(), rename[labels[j]]) - labels.begin();
        REQUIRE(after.at(a, b) == before.at(i, j));
      }
    }
  }
}

TEST_CASE("cophenetic distances match all-pairs shortest paths") {
  Rng rng(52);
  for (int trial = 0; trial < 30; ++trial) {
    const auto t = random_tree(rng, leaf_names(3 + trial % 6), trial % 3 != 0);
    const auto c = cophenetic_vector(t);
    const auto oracle = all_pairs(t);
    for (std::size_t k = 0; k < c.pairs.size(); ++k) {
      const auto [i, j] = c.pairs[k];
      REQUIRE(c.distances[k] == oracle.at({c.labels[i], c.labels[j]}));
    }
  }
}

TEST_CASE("round trips preserve trees and cophenetic vectors") {
  Rng rng(53);
  for (int trial = 0; trial < 100; ++trial) {
    const auto t = random_tree(rng, leaf_names(3 + trial % 8), trial % 2 == 0);
    const auto back = parse_newick(to_newick(t));
    INFO(to_newick(t) << " vs " << to_newick(back));
    REQUIRE(isomorphic(t, back));
    REQUIRE(cophenetic_vector(back).distances == cophenetic_vector(t).distances);
    REQUIRE(to_newick(back) == to_newick(t));
  }
}

TEST_CASE("tree metrics satisfy the point conditions") {
  Rng rng(54);
  for (int trial = 0; trial < 50; ++trial) {
    const auto u = random_ultrametric_tree(rng, leaf_names(3 + trial % 7));
    REQUIRE(is_ultrametric(u));
    REQUIRE(three_point_condition(cophenetic_vector(u)));
    const auto t = random_tree(rng, leaf_names(4 + trial % 6), trial % 2 == 0);
    REQUIRE(four_point_condition(cophenetic_vector(t)));
  }
  // A non-tree metric on four points: all three pair sums differ.
  CopheneticVector d;
  d.labels = leaf_names(4);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) d.pairs.emplace_back(i, j);
  }
  d.distances = {q(1), q(2), q(3), q(4), q(5), q(9)};
  CHECK_FALSE(four_point_condition(d));
  CHECK(four_point_condition(d, q(3)));
}

TEST_CASE("precondition failures") {
  CHECK_THROWS_AS(is_ultrametric(parse_newick("(A:1,B:1,C:1);")), std::invalid_argument);
  CHECK_THROWS_AS(is_ultrametric(parse_newick("A;")), std::invalid_argument);
  CHECK_THROWS_AS(cophenetic_vector(parse_newick("(A:1,B:1);")), std::invalid_argument);
  CHECK_THROWS_AS(cophenetic_vector(parse_newick("((A:1,A:1):1,C:2);")), std::invalid_argument);
  CHECK_THROWS_AS(cophenetic_vector(parse_newick("((A:1,:1):1,C:2);")), std::invalid_argument);
  CHECK_THROWS_AS(cohort_measure({parse_newick("((A:1,B:1):1,C:2);"),
                                  parse_newick("((A:1,B:1):1,D:2);")}),
                  std::invalid_argument);
}

TEST_CASE("batches of trees") {
  const auto trees = parse_newick_lines("((A:1,B:1):1,C:2);\n\n(A:1,B:1,C:1);\n");
  REQUIRE(trees.size() == 2);
  const auto mu = cohort_measure(trees);
  CHECK(mu.size() == 2);
  CHECK(mu.dim() == 3);
  CHECK(leaf_names(28).back() == "L28");
}

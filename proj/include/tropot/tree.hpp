#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tropot/measure.hpp"
#include "tropot/point.hpp"
#include "tropot/random.hpp"
#include "tropot/rational.hpp"

namespace tropot {

/// A weighted tree; nodes[0] is the node the Newick string was rooted at.
struct PhyloTree {
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  struct Node {
    std::string label;
    std::optional<Rational> length;  // edge to the parent
    std::vector<std::size_t> children;
    std::size_t parent = npos;
  };

  std::vector<Node> nodes;
  bool rooted = true;

  bool is_leaf(std::size_t v) const { return nodes[v].children.empty(); }
  std::vector<std::size_t> leaves() const;
  /// Leaf labels in lexicographic order.
  std::vector<std::string> leaf_labels() const;
};

class NewickError : public std::runtime_error {
 public:
  NewickError(const std::string& message, std::size_t position);
  /// 0-based offset of the offending character; the last character when the
  /// input ends early.
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

enum class MissingLength { zero, reject };

struct NewickOptions {
  MissingLength missing_length = MissingLength::zero;
};

/// Parses one tree. A leading [&R] or [&U] comment fixes the rooted flag;
/// otherwise the tree is rooted iff its top node has exactly two children.
PhyloTree parse_newick(std::string_view text, const NewickOptions& options = {});

/// One tree per non-blank line.
std::vector<PhyloTree> parse_newick_lines(std::string_view text,
                                          const NewickOptions& options = {});

/// Newick text that parses back to the same tree. Lengths are written as exact
/// decimals, or as p/q when the decimal does not terminate.
std::string to_newick(const PhyloTree& tree);

/// Newick text with children sorted, equal for isomorphic labelled trees.
std::string canonical_newick(const PhyloTree& tree);

inline bool isomorphic(const PhyloTree& a, const PhyloTree& b) {
  return a.rooted == b.rooted && canonical_newick(a) == canonical_newick(b);
}

/// Pairwise leaf distances, pairs (i, j) with i < j over lexicographically
/// sorted labels.
struct CopheneticVector {
  std::vector<std::string> labels;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<Rational> distances;

  const Rational& at(std::size_t i, std::size_t j) const;
  Point<Rational> point() const { return Point<Rational>::canonical(distances); }
  Point<double> point_double() const { return point().convert<double>(); }
};

/// Requires at least three leaves with distinct nonempty labels.
CopheneticVector cophenetic_vector(const PhyloTree& tree);

/// In every triple of leaves the largest distance is attained at least twice.
bool three_point_condition(const CopheneticVector& d, const Rational& tol = Rational(0));

/// In every quadruple the largest of the three pair sums is attained at least twice.
bool four_point_condition(const CopheneticVector& d, const Rational& tol = Rational(0));

/// Path lengths from nodes[0] to each leaf, in leaves() order.
std::vector<Rational> root_to_leaf_depths(const PhyloTree& tree);

/// Equal root-to-leaf depths (within tol) and the three-point condition.
/// Throws std::invalid_argument on unrooted trees or fewer than two leaves.
bool is_ultrametric(const PhyloTree& tree, const Rational& tol = Rational(0));

/// "A", "B", ..., "Z", then "L27", "L28", ...
std::vector<std::string> leaf_names(std::size_t n);

/// Random binary topology with branch lengths k/4, k in 1..8. Unrooted trees
/// end in a three-way split at the top node.
PhyloTree random_tree(Rng& rng, const std::vector<std::string>& labels, bool rooted = true);

/// Random coalescent-style tree: every merge happens above all earlier ones.
PhyloTree random_ultrametric_tree(Rng& rng, const std::vector<std::string>& labels);

/// Uniform measure on the cophenetic points of trees sharing one leaf set.
DiscreteMeasure cohort_measure(const std::vector<PhyloTree>& trees);

}  // namespace tropot

#include "tropot/tree.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace tropot {

NewickError::NewickError(const std::string& message, std::size_t position)
    : std::runtime_error(message + " at position " + std::to_string(position)),
      position_(position) {}

std::vector<std::size_t> PhyloTree::leaves() const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    if (is_leaf(v)) out.push_back(v);
  }
  return out;
}

std::vector<std::string> PhyloTree::leaf_labels() const {
  std::vector<std::string> out;
  for (auto v : leaves()) out.push_back(nodes[v].label);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

bool is_label_char(char c) {
  return !std::isspace(static_cast<unsigned char>(c)) &&
         std::string_view("()[]':;,").find(c) == std::string_view::npos;
}

class NewickParser {
 public:
  NewickParser(std::string_view text, const NewickOptions& options)
      : text_(text), options_(options) {}

  PhyloTree parse() {
    std::optional<bool> rooted;
    skip(&rooted);
    tree_.nodes.emplace_back();
    subtree(0);
    skip();
    if (peek() == ':') {
      ++pos_;
      tree_.nodes[0].length = length();
      skip();
    }
    expect(';', "expected ';'");
    skip();
    if (pos_ < text_.size()) fail("unexpected text after ';'");
    tree_.rooted = rooted.value_or(tree_.nodes[0].children.size() == 2);
    return std::move(tree_);
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    const std::size_t at = text_.empty() ? 0 : std::min(pos_, text_.size() - 1);
    throw NewickError(message, at);
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void expect(char c, const std::string& message) {
    if (peek() != c) fail(pos_ < text_.size() ? message : "unexpected end of input");
    ++pos_;
  }

  // Skips whitespace and [comments]; a rooting comment is reported if asked.
  void skip(std::optional<bool>* rooted = nullptr) {
    for (;;) {
      while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (peek() != '[') return;
      const std::size_t close = text_.find(']', pos_);
      if (close == std::string_view::npos) fail("unterminated comment");
      const std::string_view body = text_.substr(pos_ + 1, close - pos_ - 1);
      if (rooted && (body == "&R" || body == "&r")) *rooted = true;
      if (rooted && (body == "&U" || body == "&u")) *rooted = false;
      pos_ = close + 1;
    }
  }

  void subtree(std::size_t v) {
    skip();
    if (peek() == '(') {
      ++pos_;
      for (;;) {
        const std::size_t child = tree_.nodes.size();
        tree_.nodes.emplace_back();
        tree_.nodes[child].parent = v;
        tree_.nodes[v].children.push_back(child);
        subtree(child);
        skip();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        expect(')', "expected ',' or ')'");
        break;
      }
      skip();
      tree_.nodes[v].label = label();
    } else {
      tree_.nodes[v].label = label();
      if (tree_.nodes[v].label.empty() && pos_ >= text_.size()) fail("unexpected end of input");
    }
    if (v == 0) return;
    skip();
    if (peek() == ':') {
      ++pos_;
      tree_.nodes[v].length = length();
    } else if (options_.missing_length == MissingLength::reject) {
      fail("missing branch length");
    } else {
      tree_.nodes[v].length = Rational(0);
    }
  }

  std::string label() {
    if (peek() == '\'') {
      std::string out;
      ++pos_;
      for (;;) {
        if (pos_ >= text_.size()) fail("unterminated quoted label");
        if (text_[pos_] == '\'') {
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '\'') {
            out += '\'';
            pos_ += 2;
            continue;
          }
          ++pos_;
          return out;
        }
        out += text_[pos_++];
      }
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_label_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  Rational length() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_label_char(text_[pos_])) ++pos_;
    if (start == pos_) fail(pos_ < text_.size() ? "expected a branch length" : "unexpected end of input");
    Rational value;
    try {
      value = parse_rational(text_.substr(start, pos_ - start));
    } catch (const std::invalid_argument&) {
      pos_ = start;
      fail("malformed branch length");
    }
    if (value < 0) {
      pos_ = start;
      fail("negative branch length");
    }
    return value;
  }

  std::string_view text_;
  NewickOptions options_;
  std::size_t pos_ = 0;
  PhyloTree tree_;
};

std::string quote_label(const std::string& label) {
  if (!label.empty() && std::all_of(label.begin(), label.end(), is_label_char)) return label;
  if (label.empty()) return label;
  std::string out = "'";
  for (char c : label) {
    out += c;
    if (c == '\'') out += '\'';
  }
  return out + "'";
}

std::string length_text(const Rational& r) {
  if (auto d = to_decimal(r)) return *d;
  return to_string(r);
}

std::string write(const PhyloTree& t, std::size_t v, bool sorted) {
  std::string out;
  const auto& node = t.nodes[v];
  if (!node.children.empty()) {
    std::vector<std::string> parts;
    for (auto c : node.children) parts.push_back(write(t, c, sorted));
    if (sorted) std::sort(parts.begin(), parts.end());
    out += '(';
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (k > 0) out += ',';
      out += parts[k];
    }
    out += ')';
  }
  out += quote_label(node.label);
  if (node.length) out += ":" + length_text(*node.length);
  return out;
}

std::string write_tree(const PhyloTree& t, bool sorted) {
  if (t.nodes.empty()) throw std::invalid_argument("empty tree");
  const bool binary_top = t.nodes[0].children.size() == 2;
  std::string prefix;
  if (t.rooted != binary_top) prefix = t.rooted ? "[&R] " : "[&U] ";
  return prefix + write(t, 0, sorted) + ";";
}

std::vector<Rational> node_depths(const PhyloTree& t) {
  // Parents precede children in parse order, but do not rely on it.
  std::vector<Rational> depth(t.nodes.size(), Rational(0));
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (auto c : t.nodes[v].children) {
      depth[c] = depth[v] + t.nodes[c].length.value_or(Rational(0));
      stack.push_back(c);
    }
  }
  return depth;
}

}  // namespace

PhyloTree parse_newick(std::string_view text, const NewickOptions& options) {
  return NewickParser(text, options).parse();
}

std::vector<PhyloTree> parse_newick_lines(std::string_view text, const NewickOptions& options) {
  std::vector<PhyloTree> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    if (std::any_of(line.begin(), line.end(),
                    [](char c) { return !std::isspace(static_cast<unsigned char>(c)); })) {
      out.push_back(parse_newick(line, options));
    }
    start = end + 1;
  }
  return out;
}

std::string to_newick(const PhyloTree& tree) { return write_tree(tree, false); }

std::string canonical_newick(const PhyloTree& tree) { return write_tree(tree, true); }

const Rational& CopheneticVector::at(std::size_t i, std::size_t j) const {
  if (i == j || i >= labels.size() || j >= labels.size()) {
    throw std::out_of_range("CopheneticVector::at: bad leaf pair");
  }
  if (i > j) std::swap(i, j);
  const std::size_t n = labels.size();
  // Row-major index of (i, j) among pairs with i < j.
  return distances[i * n - i * (i + 1) / 2 + (j - i - 1)];
}

CopheneticVector cophenetic_vector(const PhyloTree& tree) {
  const auto leaves = tree.leaves();
  if (leaves.size() < 3) {
    throw std::invalid_argument("cophenetic vector needs at least 3 leaves (got " +
                                std::to_string(leaves.size()) + ")");
  }
  std::map<std::string, std::size_t> by_label;
  for (auto v : leaves) {
    const auto& label = tree.nodes[v].label;
    if (label.empty()) throw std::invalid_argument("leaf without a label");
    if (!by_label.emplace(label, v).second) {
      throw std::invalid_argument("duplicate leaf label '" + label + "'");
    }
  }
  const auto depth = node_depths(tree);
  auto ancestors = [&](std::size_t v) {
    std::set<std::size_t> out;
    for (; v != PhyloTree::npos; v = tree.nodes[v].parent) out.insert(v);
    return out;
  };

  CopheneticVector out;
  std::vector<std::size_t> node_of;
  for (const auto& [label, v] : by_label) {
    out.labels.push_back(label);
    node_of.push_back(v);
  }
  const std::size_t n = out.labels.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto up = ancestors(node_of[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      std::size_t lca = node_of[j];
      while (!up.count(lca)) lca = tree.nodes[lca].parent;
      out.pairs.emplace_back(i, j);
      out.distances.push_back(depth[node_of[i]] + depth[node_of[j]] - 2 * depth[lca]);
    }
  }
  return out;
}

bool three_point_condition(const CopheneticVector& d, const Rational& tol) {
  const std::size_t n = d.labels.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        std::vector<Rational> v{d.at(i, j), d.at(i, k), d.at(j, k)};
        std::sort(v.begin(), v.end());
        if (v[2] - v[1] > tol) return false;
      }
    }
  }
  return true;
}

bool four_point_condition(const CopheneticVector& d, const Rational& tol) {
  const std::size_t n = d.labels.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        for (std::size_t l = k + 1; l < n; ++l) {
          std::vector<Rational> v{d.at(i, j) + d.at(k, l), d.at(i, k) + d.at(j, l),
                                  d.at(i, l) + d.at(j, k)};
          std::sort(v.begin(), v.end());
          if (v[2] - v[1] > tol) return false;
        }
      }
    }
  }
  return true;
}

std::vector<Rational> root_to_leaf_depths(const PhyloTree& tree) {
  const auto depth = node_depths(tree);
  std::vector<Rational> out;
  for (auto v : tree.leaves()) out.push_back(depth[v]);
  return out;
}

bool is_ultrametric(const PhyloTree& tree, const Rational& tol) {
  if (!tree.rooted) throw std::invalid_argument("is_ultrametric: tree is unrooted");
  const auto depths = root_to_leaf_depths(tree);
  if (depths.size() < 2) throw std::invalid_argument("is_ultrametric: fewer than two leaves");
  const auto [lo, hi] = std::minmax_element(depths.begin(), depths.end());
  if (*hi - *lo > tol) return false;
  return depths.size() < 3 || three_point_condition(cophenetic_vector(tree), tol);
}

std::vector<std::string> leaf_names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < n; ++k) {
    out.push_back(k < 26 ? std::string(1, static_cast<char>('A' + k)) : "L" + std::to_string(k + 1));
  }
  return out;
}

namespace {

std::size_t add_node(PhyloTree& t, std::string label) {
  t.nodes.emplace_back();
  t.nodes.back().label = std::move(label);
  return t.nodes.size() - 1;
}

// Moves the node at `top` to index 0 so it is the root.
PhyloTree reindex_from(const PhyloTree& t, std::size_t top) {
  PhyloTree out;
  out.rooted = t.rooted;
  std::vector<std::size_t> order{top}, index(t.nodes.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    for (auto c : t.nodes[order[k]].children) order.push_back(c);
  }
  for (std::size_t k = 0; k < order.size(); ++k) index[order[k]] = k;
  for (auto v : order) {
    auto node = t.nodes[v];
    node.parent = v == top ? PhyloTree::npos : index[node.parent];
    for (auto& c : node.children) c = index[c];
    if (v == top) node.length.reset();
    out.nodes.push_back(std::move(node));
  }
  return out;
}

}  // namespace

PhyloTree random_tree(Rng& rng, const std::vector<std::string>& labels, bool rooted) {
  if (labels.size() < (rooted ? 2u : 3u)) throw std::invalid_argument("random_tree: too few leaves");
  PhyloTree t;
  t.rooted = rooted;
  std::vector<std::size_t> active;
  for (const auto& l : labels) active.push_back(add_node(t, l));
  std::uniform_int_distribution<int> quarter(1, 8);
  const std::size_t stop = rooted ? 1 : 3;
  while (active.size() > stop) {
    std::shuffle(active.begin(), active.end(), rng);
    const std::size_t v = add_node(t, "");
    for (int k = 0; k < 2; ++k) {
      const std::size_t c = active.back();
      active.pop_back();
      t.nodes[c].parent = v;
      t.nodes[c].length = Rational(quarter(rng), 4);
      t.nodes[v].children.push_back(c);
    }
    active.push_back(v);
  }
  if (!rooted) {
    const std::size_t v = add_node(t, "");
    for (auto c : active) {
      t.nodes[c].parent = v;
      t.nodes[c].length = Rational(quarter(rng), 4);
      t.nodes[v].children.push_back(c);
    }
    active.assign(1, v);
  }
  return reindex_from(t, active.front());
}

PhyloTree random_ultrametric_tree(Rng& rng, const std::vector<std::string>& labels) {
  if (labels.size() < 2) throw std::invalid_argument("random_ultrametric_tree: too few leaves");
  PhyloTree t;
  std::vector<std::size_t> active;
  std::vector<Rational> height;
  for (const auto& l : labels) {
    active.push_back(add_node(t, l));
    height.emplace_back(0);
  }
  std::uniform_int_distribution<int> quarter(1, 4);
  Rational now(0);
  while (active.size() > 1) {
    std::shuffle(active.begin(), active.end(), rng);
    now += Rational(quarter(rng), 4);
    const std::size_t v = add_node(t, "");
    height.push_back(now);
    for (int k = 0; k < 2; ++k) {
      const std::size_t c = active.back();
      active.pop_back();
      t.nodes[c].parent = v;
      t.nodes[c].length = now - height[c];
      t.nodes[v].children.push_back(c);
    }
    active.push_back(v);
  }
  return reindex_from(t, active.front());
}

DiscreteMeasure cohort_measure(const std::vector<PhyloTree>& trees) {
  if (trees.empty()) throw std::invalid_argument("cohort_measure: no trees");
  const auto labels = trees.front().leaf_labels();
  std::vector<Point<double>> points;
  for (const auto& t : trees) {
    if (t.leaf_labels() != labels) {
      throw std::invalid_argument("cohort_measure: trees have different leaf sets");
    }
    points.push_back(cophenetic_vector(t).point_double());
  }
  return DiscreteMeasure::uniform(points);
}

}  // namespace tropot

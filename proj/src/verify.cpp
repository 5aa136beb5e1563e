#include "tropot/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "tropot/crossdim.hpp"
#include "tropot/fibre.hpp"
#include "tropot/random.hpp"

namespace tropot {

namespace {

using Q = Rational;

/// One trial: an empty string on success, otherwise what went wrong.
using Trial = std::function<std::string(Rng&, std::size_t)>;

struct Suite {
  const char* name;
  const char* property;
  Trial trial;
};

std::uint64_t name_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string show(const Point<Q>& x) {
  std::string out = "(";
  for (std::size_t i = 0; i < x.dim(); ++i) out += (i ? "," : "") + to_string(x[i]);
  return out + ")";
}

std::string metric_axioms(Rng& rng, std::size_t t) {
  const std::size_t n = 2 + t % 7;
  const auto x = random_point<Q>(rng, n), y = random_point<Q>(rng, n), z = random_point<Q>(rng, n);
  const Q dxy = trop_metric(x, y);
  if (dxy < 0) return "negative distance at " + show(x);
  if (dxy != trop_metric(y, x)) return "asymmetric at " + show(x) + ", " + show(y);
  if ((dxy == 0) != (x == y)) return "zero distance between distinct points " + show(x);
  if (trop_metric(x, z) > dxy + trop_metric(y, z)) return "triangle inequality fails at " + show(x);
  return {};
}

std::string non_expansive(Rng& rng, std::size_t t) {
  const std::size_t m = 1 + t % 8, n = 1 + (t / 8) % 8;
  const auto mat = random_matrix<Q>(rng, m + 1, n + 1, 0.3);
  const auto x = random_point<Q>(rng, n + 1), y = random_point<Q>(rng, n + 1);
  if (trop_metric(apply(mat, x), apply(mat, y)) > trop_metric(x, y)) {
    return "d(Mx, My) > d(x, y) at x = " + show(x) + ", y = " + show(y);
  }
  return {};
}

std::string surjectivity(Rng& rng, std::size_t t) {
  const std::size_t m = 2 + t % 3, n = 2 + (t / 3) % 5;
  const auto mat = random_matrix<Q>(rng, m, n, 0.6);
  if (is_surjective(mat)) {
    const auto y = random_point<Q>(rng, m);
    if (apply(mat, surjectivity_witness(mat, y)) != y) return "witness misses " + show(y);
    return {};
  }
  const auto owned = private_columns(mat);
  for (std::size_t i = 0; i < m; ++i) {
    if (owned[i].empty() && image_contains(mat, spike_target(mat, i)).member) {
      return "spike target of row " + std::to_string(i + 1) + " lies in the image";
    }
  }
  return {};
}

std::string fibre_dimension(Rng& rng, std::size_t t) {
  const std::size_t n = 3 + t % 4, m = 2 + (t / 4) % (n - 2);
  if (t % 2 == 0) {
    const auto p = random_simple_projection<Q>(rng, m, n);
    const auto fibre = fibre_at(p.to_matrix(), random_point<Q>(rng, m));
    if (fibre.cells.empty()) return "empty fibre";
    for (const auto& c : fibre.cells) {
      if (cell_dim(c) != n - m) return "fibre cell " + c.label.to_string() + " has the wrong dimension";
    }
    return {};
  }
  // A column with two real entries: some maximal fibre cell has another dimension.
  auto mat = random_matrix<Q>(rng, m, n, 0.3);
  while (!shared_column(mat)) mat = random_matrix<Q>(rng, m, n, 0.3);
  const auto x = random_point_dominated_by(mat, *shared_column(mat), rng);
  for (const auto& c : fibre_at(mat, apply(mat, x)).cells) {
    if (cell_dim(c) != n - m) return {};
  }
  return "non-simple matrix with all fibre cells of dimension n - m";
}

std::string split_roundtrip(Rng& rng, std::size_t t) {
  const std::size_t n = 3 + t % 6, m = 2 + (t / 6) % (n - 2);
  const auto p = random_simple_projection<Q>(rng, m, n);
  const auto x = random_point<Q>(rng, n);
  const auto s = split(p, x);
  if (!in_base_fibre(p, s.fibre_part)) return "fibre part of " + show(x) + " is off the base fibre";
  if (unsplit(p, s.base, s.fibre_part) != x) return "unsplit(split(x)) != x at " + show(x);
  const auto y = random_point<Q>(rng, m);
  const auto u = split(p, random_point<Q>(rng, n)).fibre_part;
  const auto back = split(p, unsplit(p, y, u));
  if (back.base != y || back.fibre_part != u) return "split(unsplit(y, u)) != (y, u)";
  return {};
}

std::string split_metric(Rng& rng, std::size_t t) {
  const std::size_t n = 3 + t % 6, m = 2 + (t / 6) % (n - 2);
  const auto p = random_simple_projection<Q>(rng, m, n);
  const auto x1 = random_point<Q>(rng, n), x2 = random_point<Q>(rng, n);
  const auto b = metric_split_bounds(p, x1, x2);
  if (!b.lower_ok) return "lower bound fails at " + show(x1) + ", " + show(x2);
  if (!b.upper_ok) return "upper bound fails at " + show(x1) + ", " + show(x2);
  if (!z_metric_identity(p, x1, x2)) return "z-vector distance differs from the image distance";
  return {};
}

std::string pushforward_contraction(Rng& rng, std::size_t t) {
  const std::size_t n = 3 + t % 4, m = 2 + t % (n - 2);
  const auto p = random_simple_projection<double>(rng, m, n);
  const auto mu = random_measure(rng, n, 1 + t % 6), nu = random_measure(rng, n, 1 + (t / 6) % 6);
  const double q = 1 + t % 2;
  const auto full = wasserstein(mu, nu, q);
  const auto pm = pushforward(p, mu), pn = pushforward(p, nu);
  const auto induced = pushforward_coupling(pm, pn, full.coupling);
  if (!induced.is_coupling_of(pm.measure, pn.measure)) return "induced plan is not a coupling";
  if (coupling_cost(induced, pm.measure, pn.measure, q) > full.cost + 1e-9) {
    return "induced plan costs more than the original";
  }
  if (wasserstein(pm.measure, pn.measure, q).value > full.value + 1e-9) {
    return "pushforward increased the distance";
  }
  return {};
}

std::string embedding_certificate_check(Rng& rng, std::size_t t) {
  const std::size_t n = 3 + t % 3, m = 2 + t % (n - 2);
  const auto mu = random_measure(rng, m, 1 + t % 5), nu = random_measure(rng, n, 1 + (t / 5) % 5);
  ProjectionSearchSpec spec;
  spec.max_structures = 24;
  spec.restarts = 2;
  spec.seed = rng();
  const auto r = w_plus(mu, nu, 1 + t % 2, spec);
  const auto& c = *r.certificate;
  if (c.gap > 1e-9) return "cost gap " + std::to_string(c.gap);
  if (!c.pushforward_matches) return "projected alpha differs from mu";
  if (!c.pi_n.is_coupling_of(c.alpha, nu)) return "pi_n is not a coupling of alpha and nu";
  if (std::abs(*r.w_plus - r.w_minus) > 1e-8) return "w_plus and w_minus differ";
  return {};
}

std::string family_lipschitz(Rng& rng, std::size_t t) {
  const std::size_t n = 3 + t % 3, m = 2 + t % (n - 2);
  std::vector<SimpleProjection<double>> family;
  for (int k = 0; k < 4; ++k) family.push_back(random_simple_projection<double>(rng, m, n));
  const auto mu1 = random_measure(rng, m, 1 + t % 5), mu2 = random_measure(rng, m, 1 + (t / 5) % 5);
  const auto nu1 = random_measure(rng, n, 1 + t % 4), nu2 = random_measure(rng, n, 1 + (t / 4) % 4);
  const double q = 1 + t % 2;
  const double bound = wasserstein(mu1, mu2, q).value + wasserstein(nu1, nu2, q).value + 1e-8;
  const auto a = w_plus_family(mu1, nu1, q, family), b = w_plus_family(mu2, nu2, q, family);
  if (std::abs(a.w_minus - b.w_minus) > bound) return "w_minus moved more than the perturbation";
  if (std::abs(*a.w_plus - *b.w_plus) > bound) return "w_plus moved more than the perturbation";
  return {};
}

std::string transport_exactness(Rng& rng, std::size_t t) {
  const std::size_t n = 2 + t % 4;
  const auto mu = random_measure(rng, n, 1 + t % 6), nu = random_measure(rng, n, 1 + (t / 6) % 6);
  for (unsigned q : {1u, 2u}) {
    const auto r = wasserstein(mu, nu, q);
    if (!r.coupling.is_coupling_of(mu, nu)) return "simplex plan is not a coupling";
    const double exact = to_double(transport_cost_exact(mu, nu, q));
    if (std::abs(r.cost - exact) > 1e-9) return "simplex cost differs from the exact optimum";
  }
  return {};
}

const std::vector<Suite>& suites() {
  static const std::vector<Suite> all{
      {"metric_axioms", "the tropical metric is a metric on the torus", metric_axioms},
      {"surjectivity", "witnesses reach every target; otherwise a spike target is unreachable",
       surjectivity},
      {"non_expansive_maps", "tropical matrix maps are 1-Lipschitz", non_expansive},
      {"fibre_dimension", "simple projections have fibres of dimension n - m, other matrices do not",
       fibre_dimension},
      {"split_roundtrip", "split and unsplit are mutually inverse", split_roundtrip},
      {"split_metric_bounds", "the split is bi-Lipschitz with the stated constants", split_metric},
      {"pushforward_contraction", "pushforwards do not increase Wasserstein distance",
       pushforward_contraction},
      {"embedding_certificate", "the glued coupling has the projected cost and W+ = W-",
       embedding_certificate_check},
      {"family_lipschitz", "fixed-family distances are 1-Lipschitz in both measures",
       family_lipschitz},
      {"transport_exactness", "the simplex optimum matches exact rational transport",
       transport_exactness},
  };
  return all;
}

}  // namespace

bool VerifyReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.ok(); });
}

std::vector<std::string> verify_check_names() {
  std::vector<std::string> out;
  for (const auto& s : suites()) out.emplace_back(s.name);
  return out;
}

VerifyReport run_verify(std::size_t trials, std::uint64_t seed) {
  VerifyReport report;
  report.seed = seed;
  report.trials = trials;
  for (const auto& s : suites()) {
    CheckResult c{s.name, s.property, trials, 0, {}};
    Rng rng(seed ^ name_hash(s.name));
    for (std::size_t t = 0; t < trials; ++t) {
      std::string failure;
      try {
        failure = s.trial(rng, t);
      } catch (const std::exception& e) {
        failure = std::string("exception: ") + e.what();
      }
      if (failure.empty()) {
        ++c.passed;
      } else if (c.first_failure.empty()) {
        c.first_failure = "trial " + std::to_string(t) + ": " + failure;
      }
    }
    report.checks.push_back(std::move(c));
  }
  return report;
}

}  // namespace tropot

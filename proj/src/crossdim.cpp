#include "tropot/crossdim.hpp"
#include "tropot/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>
#include <thread>

#include <boost/multiprecision/gmp.hpp>

namespace tropot {

namespace {

using boost::multiprecision::mpz_int;

/// The reported beta keeps images apart unless they agree to rounding level,
/// so the glued coupling reproduces the cost of pi_m.
constexpr double kImageTolerance = 1e-12;

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
  for (int k = 0; k < 8; ++k) {
    h ^= (v >> (8 * k)) & 0xffu;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t structure_seed(std::uint64_t seed, const ProjectionStructure& s) {
  std::uint64_t h = fnv1a(0xcbf29ce484222325ULL, seed);
  h = fnv1a(h, s.rows);
  for (auto a : s.assignment) h = fnv1a(h, a);
  return h;
}

double data_scale(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  double s = 0;
  for (const auto* m : {&mu, &nu}) {
    for (const auto& x : m->support()) {
      for (double v : x.coords()) s = std::max(s, std::abs(v));
    }
  }
  return s + 1.0;
}

double to_value(double cost, double p) {
  return p == 1.0 ? cost : std::pow(std::max(cost, 0.0), 1.0 / p);
}

/// The inner problem for one structure: offsets -> E[d^p] of the optimal plan.
class OffsetProblem {
 public:
  OffsetProblem(const ProjectionStructure& s, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                double p)
      : s_(s), mu_(mu), nu_(nu), p_(p), blocks_(s.rows) {
    for (std::size_t j = 0; j < s.cols(); ++j) {
      if (!s.is_unused(j)) {
        blocks_[s.assignment[j]].push_back(j);
        used_.push_back(j);
      }
    }
  }

  struct Evaluation {
    double cost;
    Pushforward beta;
    Coupling pi;
  };

  Evaluation evaluate(const std::vector<double>& offsets) {
    ++evaluations_;
    auto beta = pushforward(s_.with_offsets(offsets), nu_);
    auto r = wasserstein(mu_, beta.measure, p_, warm_);
    return {r.cost, std::move(beta), std::move(r.coupling)};
  }

  double cost(const std::vector<double>& offsets) { return evaluate(offsets).cost; }

  /// M_j = y_{a,i(j)} - x_{b,j}: sends atom b of nu exactly onto atom a of mu.
  std::vector<double> anchor(std::size_t a, std::size_t b) const {
    std::vector<double> off(s_.cols(), 0.0);
    for (auto j : used_) off[j] = mu_.support()[a][s_.assignment[j]] - nu_.support()[b][j];
    return off;
  }

  /// For each nu-atom, the mu-atom receiving most of its beta-atom's mass.
  std::vector<std::size_t> correspondence(const Evaluation& e) const {
    std::vector<std::size_t> out(nu_.size());
    for (std::size_t b = 0; b < nu_.size(); ++b) {
      const std::size_t c = e.beta.atom_map[b];
      std::size_t best = 0;
      for (std::size_t a = 1; a < mu_.size(); ++a) {
        if (e.pi.at(a, c) > e.pi.at(best, c)) best = a;
      }
      out[b] = best;
    }
    return out;
  }

  /// For each nu-atom, the mu-atom nearest to its image.
  std::vector<std::size_t> nearest(const Evaluation& e) const {
    std::vector<std::size_t> out(nu_.size());
    for (std::size_t b = 0; b < nu_.size(); ++b) {
      const auto& img = e.beta.measure.support()[e.beta.atom_map[b]];
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < mu_.size(); ++a) {
        const double d = trop_metric(mu_.support()[a], img);
        if (d < best_d) {
          best_d = d;
          best = a;
        }
      }
      out[b] = best;
    }
    return out;
  }

  /// Alternating max-plus residuation for the two-sided system
  ///   max_{j in J_i}(M_j + x_{b,j}) = y_{a(b),i} + lambda_b   for all b, i,
  /// started from the given offsets. Returns the last iterate.
  std::vector<double> residuate(std::vector<double> off, const std::vector<std::size_t>& corr,
                                double scale) const {
    const std::size_t nb = nu_.size();
    std::vector<double> lambda(nb);
    auto update_lambda = [&](const std::vector<double>& o) {
      for (std::size_t b = 0; b < nb; ++b) {
        const auto& x = nu_.support()[b];
        const auto& y = mu_.support()[corr[b]];
        double low = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < s_.rows; ++i) {
          double row = -std::numeric_limits<double>::infinity();
          for (auto j : blocks_[i]) row = std::max(row, o[j] + x[j]);
          low = std::min(low, row - y[i]);
        }
        lambda[b] = low;
      }
    };
    update_lambda(off);
    for (int iter = 0; iter < 200; ++iter) {
      std::vector<double> next(off.size(), 0.0);
      double change = 0;
      for (auto j : used_) {
        const std::size_t i = s_.assignment[j];
        double v = std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < nb; ++b) {
          v = std::min(v, mu_.support()[corr[b]][i] + lambda[b] - nu_.support()[b][j]);
        }
        next[j] = v;
        change = std::max(change, std::abs(v - off[j]));
      }
      off = std::move(next);
      update_lambda(off);
      if (change <= 1e-13 * scale) break;
    }
    normalize(off);
    return off;
  }

  /// Shifts all offsets together so the largest is 0; the projection is unchanged.
  void normalize(std::vector<double>& off) const {
    if (used_.empty()) return;
    double top = -std::numeric_limits<double>::infinity();
    for (auto j : used_) top = std::max(top, off[j]);
    for (auto j : used_) off[j] -= top;
  }

  /// Search directions: each used column, each block of two or more columns,
  /// and opposite moves of two columns in the same block.
  std::vector<std::vector<double>> directions() const {
    std::vector<std::vector<double>> out;
    const std::size_t n = s_.cols();
    for (auto j : used_) {
      out.emplace_back(n, 0.0);
      out.back()[j] = 1;
    }
    for (const auto& blk : blocks_) {
      if (blk.size() < 2) continue;
      out.emplace_back(n, 0.0);
      for (auto j : blk) out.back()[j] = 1;
      for (std::size_t a = 0; a < blk.size(); ++a) {
        for (std::size_t b = a + 1; b < blk.size(); ++b) {
          out.emplace_back(n, 0.0);
          out.back()[blk[a]] = 1;
          out.back()[blk[b]] = -1;
        }
      }
    }
    return out;
  }

  std::size_t evaluations() const { return evaluations_; }
  const std::vector<std::size_t>& used() const { return used_; }

 private:
  const ProjectionStructure& s_;
  const DiscreteMeasure& mu_;
  const DiscreteMeasure& nu_;
  double p_;
  std::vector<std::vector<std::size_t>> blocks_;
  std::vector<std::size_t> used_;
  std::size_t evaluations_ = 0;
  WarmStart warm_;
};

struct Candidate {
  std::vector<double> offsets;
  double cost = std::numeric_limits<double>::infinity();
};

class OffsetSearch {
 public:
  OffsetSearch(const ProjectionStructure& s, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
               double p, const ProjectionSearchSpec& spec)
      : problem_(s, mu, nu, p),
        mu_(mu),
        nu_(nu),
        p_(p),
        spec_(spec),
        scale_(data_scale(mu, nu)),
        rng_(structure_seed(spec.seed, s)) {}

  OffsetFit run() {
    std::vector<Candidate> seeds = anchor_seeds();
    for (std::size_t k = 0; k < seeds.size() && !done(); ++k) {
      refine(seeds[k]);
      if (k == 0) {
        descend(seeds[k]);
        refine(seeds[k]);
      }
    }
    // Cheap probes: random offsets with residuation only.
    constexpr std::size_t kProbes = 4;
    for (std::size_t r = 0; r < kProbes && !done(); ++r) {
      Candidate c = random_start();
      refine(c);
    }
    for (std::size_t r = 0; r < spec_.restarts && !done(); ++r) {
      Candidate c = random_start();
      refine(c);
      descend(c);
      refine(c);
    }
    OffsetFit out;
    out.offsets = best_.offsets;
    out.cost = best_.cost;
    out.value = to_value(best_.cost, p_);
    out.budget_exhausted = exhausted_;
    out.evaluations = problem_.evaluations();
    return out;
  }

 private:
  Candidate random_start() {
    std::uniform_real_distribution<double> u(-scale_, scale_);
    Candidate c;
    c.offsets.assign(nu_.dim(), 0.0);
    for (auto j : problem_.used()) c.offsets[j] = u(rng_);
    c.cost = problem_.cost(c.offsets);
    consider(c);
    return c;
  }

  bool done() const { return to_value(best_.cost, p_) <= spec_.tolerance; }

  void consider(const Candidate& c) {
    if (c.cost < best_.cost) best_ = c;
  }

  std::vector<Candidate> anchor_seeds() {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < mu_.size(); ++a) {
      for (std::size_t b = 0; b < nu_.size(); ++b) pairs.emplace_back(a, b);
    }
    constexpr std::size_t kMaxPairs = 64;
    if (pairs.size() > kMaxPairs) {
      std::shuffle(pairs.begin(), pairs.end(), rng_);
      pairs.resize(kMaxPairs);
    }
    std::vector<Candidate> all;
    for (const auto& [a, b] : pairs) {
      Candidate c{problem_.anchor(a, b), 0};
      c.cost = problem_.cost(c.offsets);
      consider(c);
      all.push_back(std::move(c));
      if (done()) break;
    }
    std::stable_sort(all.begin(), all.end(),
                     [](const Candidate& x, const Candidate& y) { return x.cost < y.cost; });
    if (all.size() > 3) all.resize(3);
    return all;
  }

  /// Alternate between the optimal plan's correspondence and residuation.
  void refine(Candidate& c) {
    for (int round = 0; round < 10 && !done(); ++round) {
      const auto e = problem_.evaluate(c.offsets);
      Candidate next;
      for (const auto& corr : {problem_.correspondence(e), problem_.nearest(e)}) {
        Candidate t{problem_.residuate(c.offsets, corr, scale_), 0};
        t.cost = problem_.cost(t.offsets);
        if (t.cost < next.cost) next = std::move(t);
      }
      if (!(next.cost < c.cost - 1e-15 * (1 + c.cost))) break;
      c = std::move(next);
      consider(c);
    }
  }

  /// Coordinate descent over columns and blocks with step halving.
  void descend(Candidate& c) {
    const auto dirs = problem_.directions();
    double step = scale_ / 4;
    const double min_step = 1e-11 * scale_;
    std::size_t sweep = 0;
    for (; sweep < spec_.iterations && step >= min_step && !done(); ++sweep) {
      bool improved = false;
      for (const auto& d : dirs) {
        for (double sign : {1.0, -1.0}) {
          bool moved = false;
          for (int extend = 0; extend < 30; ++extend) {
            Candidate t = c;
            for (std::size_t j = 0; j < d.size(); ++j) t.offsets[j] += sign * step * d[j];
            t.cost = problem_.cost(t.offsets);
            if (!(t.cost < c.cost - 1e-15 * (1 + c.cost))) break;
            c = std::move(t);
            moved = true;
          }
          if (moved) {
            improved = true;
            consider(c);
            break;
          }
        }
      }
      if (!improved) step /= 2;
    }
    if (sweep == spec_.iterations && step >= min_step && !done()) exhausted_ = true;
  }

  OffsetProblem problem_;
  const DiscreteMeasure& mu_;
  const DiscreteMeasure& nu_;
  double p_;
  const ProjectionSearchSpec& spec_;
  double scale_;
  Rng rng_;
  Candidate best_;
  bool exhausted_ = false;
};

void check_dims(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.dim() >= nu.dim()) {
    throw std::invalid_argument(
        "cross-dimensional distance needs dim(mu) < dim(nu) (got " + std::to_string(mu.dim()) +
        " and " + std::to_string(nu.dim()) + "); equal dimensions are not supported");
  }
}

struct Evaluated {
  ProjectionStructure structure;
  OffsetFit fit;
};

std::vector<OffsetFit> evaluate_all(const std::vector<ProjectionStructure>& batch,
                                    const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                    double p, const ProjectionSearchSpec& spec) {
  std::vector<OffsetFit> out(batch.size());
  const std::size_t workers = std::max<std::size_t>(1, std::min(spec.threads, batch.size()));
  if (workers == 1) {
    for (std::size_t k = 0; k < batch.size(); ++k) {
      out[k] = optimize_offsets(batch[k], mu, nu, p, spec);
    }
    return out;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < batch.size(); k += workers) {
        out[k] = optimize_offsets(batch[k], mu, nu, p, spec);
      }
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

/// Screening fit: anchors, residuation and a short descent, no restarts.
ProjectionSearchSpec screening(const ProjectionSearchSpec& spec) {
  ProjectionSearchSpec out = spec;
  out.restarts = 0;
  out.iterations = std::min<std::size_t>(spec.iterations, 25);
  return out;
}

/// Screened structures in evaluation order, stopping after the first one at
/// or below the tolerance.
struct SearchState {
  std::vector<Evaluated> records;
  bool budget_exhausted = false;
  bool zero_found = false;

  std::size_t explored() const { return records.size(); }

  void take(const ProjectionStructure& s, OffsetFit fit, double tolerance) {
    if (zero_found) return;
    zero_found = fit.value <= tolerance;
    records.push_back(Evaluated{s, std::move(fit)});
  }

  /// Re-optimises the best screened structures with the full budget.
  void polish(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
              const ProjectionSearchSpec& spec) {
    if (zero_found) return;
    constexpr std::size_t kPolished = 8;
    std::vector<std::size_t> order(records.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return records[a].fit.value < records[b].fit.value;
    });
    order.resize(std::min(order.size(), kPolished));
    std::vector<ProjectionStructure> batch;
    for (auto k : order) batch.push_back(records[k].structure);
    auto fits = evaluate_all(batch, mu, nu, p, spec);
    for (std::size_t k = 0; k < order.size(); ++k) {
      auto& rec = records[order[k]];
      budget_exhausted = budget_exhausted || fits[k].budget_exhausted;
      if (fits[k].value < rec.fit.value) rec.fit = std::move(fits[k]);
      if (rec.fit.value <= spec.tolerance) break;
    }
  }

  /// Smallest value (values within tolerance count as zero), ties to the
  /// lexicographically smaller structure.
  const Evaluated& best(double tolerance) const {
    const Evaluated* out = &records.front();
    auto key = [&](const Evaluated& e) { return e.fit.value <= tolerance ? 0.0 : e.fit.value; };
    for (const auto& e : records) {
      if (key(e) < key(*out) || (key(e) == key(*out) && e.structure < out->structure)) out = &e;
    }
    return *out;
  }
};

void run_ordered(const std::vector<ProjectionStructure>& structures, const DiscreteMeasure& mu,
                 const DiscreteMeasure& nu, double p, const ProjectionSearchSpec& spec,
                 const ProjectionSearchSpec& fit_spec, SearchState& state) {
  const std::size_t chunk = std::max<std::size_t>(1, spec.threads);
  for (std::size_t start = 0; start < structures.size() && !state.zero_found; start += chunk) {
    const std::size_t end = std::min(structures.size(), start + chunk);
    std::vector<ProjectionStructure> batch(structures.begin() + start, structures.begin() + end);
    auto fits = evaluate_all(batch, mu, nu, p, fit_spec);
    for (std::size_t k = 0; k < batch.size() && !state.zero_found; ++k) {
      state.take(batch[k], std::move(fits[k]), spec.tolerance);
    }
  }
}

ProjectionStructure random_structure(std::size_t m, std::size_t n, Rng& rng) {
  ProjectionStructure s{m, std::vector<std::size_t>(n, m)};
  std::vector<std::size_t> order(n);
  for (std::size_t j = 0; j < n; ++j) order[j] = j;
  std::shuffle(order.begin(), order.end(), rng);
  std::uniform_int_distribution<std::size_t> row(0, m);
  for (std::size_t k = 0; k < n; ++k) s.assignment[order[k]] = k < m ? k : row(rng);
  return s;
}

std::vector<ProjectionStructure> neighbours(const ProjectionStructure& s) {
  std::vector<ProjectionStructure> out;
  for (std::size_t j = 0; j < s.cols(); ++j) {
    for (std::size_t r = 0; r <= s.rows; ++r) {
      if (r == s.assignment[j]) continue;
      ProjectionStructure t = s;
      t.assignment[j] = r;
      if (t.valid()) out.push_back(std::move(t));
    }
  }
  for (std::size_t j = 0; j < s.cols(); ++j) {
    for (std::size_t k = j + 1; k < s.cols(); ++k) {
      if (s.assignment[j] == s.assignment[k]) continue;
      ProjectionStructure t = s;
      std::swap(t.assignment[j], t.assignment[k]);
      out.push_back(std::move(t));
    }
  }
  return out;
}

/// W2 distance between two weighted samples on the line after centring both.
double centred_w2(std::vector<std::pair<double, double>> a, std::vector<std::pair<double, double>> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double ma = 0, mb = 0;
  for (const auto& [v, w] : a) ma += v * w;
  for (const auto& [v, w] : b) mb += v * w;
  double total = 0;
  std::size_t i = 0, j = 0;
  double ra = a[0].second, rb = b[0].second;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(ra, rb);
    const double d = (a[i].first - ma) - (b[j].first - mb);
    total += t * d * d;
    ra -= t;
    rb -= t;
    if (ra <= 1e-15 && ++i < a.size()) ra = a[i].second;
    if (rb <= 1e-15 && ++j < b.size()) rb = b[j].second;
  }
  return std::sqrt(std::max(total, 0.0));
}

/// Candidate structures ranked by how well their singleton rows fit: for two
/// rows fed by single columns j and k, the law of y_i - y_i' under mu should
/// match a translate of the law of x_j - x_k under nu. Structures with fewer
/// than two singleton rows are not ranked.
std::vector<ProjectionStructure> ranked_structures(const DiscreteMeasure& mu,
                                                   const DiscreteMeasure& nu, std::size_t limit) {
  const std::size_t m = mu.dim(), n = nu.dim();
  std::vector<ProjectionStructure> pool;
  if (count_structures(m, n) <= 20000) {
    pool = enumerate_structures(m, n);
  } else {
    double injections = 1;
    for (std::size_t k = 0; k < m; ++k) injections *= static_cast<double>(n - k);
    if (injections > 2e5) return {};
    ProjectionStructure s{m, std::vector<std::size_t>(n, m)};
    std::vector<bool> taken(n, false);
    auto rec = [&](auto&& self, std::size_t i) -> void {
      if (i == m) {
        pool.push_back(s);
        return;
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (taken[j]) continue;
        taken[j] = true;
        s.assignment[j] = i;
        self(self, i + 1);
        s.assignment[j] = m;
        taken[j] = false;
      }
    };
    rec(rec, 0);
  }

  using Law = std::vector<std::pair<double, double>>;
  auto law = [](const DiscreteMeasure& d, std::size_t a, std::size_t b) {
    Law out;
    for (std::size_t k = 0; k < d.size(); ++k) {
      out.emplace_back(d.support()[k][a] - d.support()[k][b], d.weights()[k]);
    }
    return out;
  };
  // table[((i * m + i2) * n + j) * n + j2] for i < i2 and j != j2.
  std::vector<double> table(m * m * n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t j2 = 0; j2 < n; ++j2) {
      if (j == j2) continue;
      const Law cols = law(nu, j, j2);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t i2 = i + 1; i2 < m; ++i2) {
          table[((i * m + i2) * n + j) * n + j2] = centred_w2(law(mu, i, i2), cols);
        }
      }
    }
  }

  std::vector<std::pair<double, std::size_t>> ranked;
  std::vector<std::size_t> single(m);
  std::vector<std::size_t> size(m);
  for (std::size_t k = 0; k < pool.size(); ++k) {
    const auto& s = pool[k];
    std::fill(size.begin(), size.end(), 0);
    for (std::size_t j = 0; j < n; ++j) {
      if (s.is_unused(j)) continue;
      ++size[s.assignment[j]];
      single[s.assignment[j]] = j;
    }
    double total = 0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (size[i] != 1) continue;
      for (std::size_t i2 = i + 1; i2 < m; ++i2) {
        if (size[i2] != 1) continue;
        total += table[((i * m + i2) * n + single[i]) * n + single[i2]];
        ++pairs;
      }
    }
    if (pairs > 0) ranked.emplace_back(total / static_cast<double>(pairs), k);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<ProjectionStructure> out;
  for (std::size_t k = 0; k < ranked.size() && out.size() < limit; ++k) {
    out.push_back(pool[ranked[k].second]);
  }
  return out;
}

void run_local_search(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                      const ProjectionSearchSpec& spec, SearchState& state) {
  const std::size_t m = mu.dim(), n = nu.dim();
  const std::size_t budget = std::max<std::size_t>(1, spec.max_structures);
  Rng rng(fnv1a(0x84222325cbf29ce4ULL, spec.seed));
  const auto screen = screening(spec);
  std::set<ProjectionStructure> seen;
  auto visit = [&](const ProjectionStructure& s) -> std::optional<double> {
    if (seen.count(s) || state.explored() >= budget || state.zero_found) return std::nullopt;
    seen.insert(s);
    auto fit = optimize_offsets(s, mu, nu, p, screen);
    const double v = fit.value;
    state.take(s, std::move(fit), spec.tolerance);
    return v;
  };

  // Starts: ranked coordinate selections, then column i feeding row i with the
  // rest on the last row, then random structures.
  std::vector<ProjectionStructure> starts = ranked_structures(mu, nu, 8);
  ProjectionStructure first{m, std::vector<std::size_t>(n, m - 1)};
  for (std::size_t i = 0; i < m; ++i) first.assignment[i] = i;
  starts.push_back(first);
  const std::uint64_t count = count_structures(m, n);

  std::optional<ProjectionStructure> current;
  std::optional<double> current_value;
  for (const auto& s : starts) {
    const auto v = visit(s);
    if (v && (!current_value || *v < *current_value)) {
      current = s;
      current_value = v;
    }
  }
  while (state.explored() < budget && !state.zero_found && seen.size() < count) {
    if (!current || !current_value) {
      ProjectionStructure s = random_structure(m, n, rng);
      current_value = visit(s);
      if (current_value) current = s;
      continue;
    }
    auto next = neighbours(*current);
    std::shuffle(next.begin(), next.end(), rng);
    bool moved = false;
    for (const auto& t : next) {
      const auto v = visit(t);
      if (v && *v < *current_value - 1e-12) {
        current = t;
        current_value = v;
        moved = true;
        break;
      }
      if (state.explored() >= budget || state.zero_found) break;
    }
    if (!moved) current.reset();
  }
}

CrossDimResult finish(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                      const SimpleProjection<double>& proj) {
  CrossDimResult out;
  out.p = p;
  auto beta = pushforward(proj, nu, kImageTolerance);
  auto r = wasserstein(mu, beta.measure, p);
  out.w_minus = r.value;
  out.pi_m = std::move(r.coupling);
  out.projection = proj;
  out.beta = beta.measure;
  return out;
}

CrossDimResult report(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                      const ProjectionSearchSpec& spec, SearchState& state, std::uint64_t count,
                      bool exhaustive, bool polish) {
  if (polish) state.polish(mu, nu, p, spec);
  const auto& best = state.best(spec.tolerance);
  auto out = finish(mu, nu, p, best.structure.with_offsets(best.fit.offsets));
  out.seed = spec.seed;
  out.structure_count = count;
  out.structures_explored = state.explored();
  out.exhaustive = exhaustive;
  out.budget_exhausted = state.budget_exhausted;
  out.epsilon = spec.tolerance;
  return out;
}

void attach_certificate(CrossDimResult& res, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const auto beta = pushforward(*res.projection, nu, kImageTolerance);
  auto cert = embedding_certificate(*res.projection, mu, nu, beta, res.pi_m, res.p);
  res.w_plus = cert.w_plus;
  res.certificate = std::move(cert);
}

}  // namespace

bool ProjectionStructure::valid() const {
  if (rows == 0 || assignment.size() <= rows) return false;
  std::vector<bool> hit(rows, false);
  for (auto a : assignment) {
    if (a > rows) return false;
    if (a < rows) hit[a] = true;
  }
  return std::all_of(hit.begin(), hit.end(), [](bool h) { return h; });
}

std::string ProjectionStructure::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < rows; ++i) {
    out += '{';
    bool first = true;
    for (std::size_t j = 0; j < assignment.size(); ++j) {
      if (assignment[j] != i) continue;
      if (!first) out += ',';
      out += std::to_string(j + 1);
      first = false;
    }
    out += '}';
  }
  return out;
}

SimpleProjection<double> ProjectionStructure::with_offsets(
    const std::vector<double>& offsets) const {
  if (offsets.size() != assignment.size()) {
    throw DimensionMismatch(assignment.size(), offsets.size(), "ProjectionStructure::with_offsets");
  }
  std::vector<std::optional<SimpleProjection<double>::Entry>> cols(assignment.size());
  for (std::size_t j = 0; j < assignment.size(); ++j) {
    if (!is_unused(j)) cols[j] = SimpleProjection<double>::Entry{assignment[j], offsets[j]};
  }
  return SimpleProjection<double>(rows, std::move(cols));
}

ProjectionStructure ProjectionStructure::of(const SimpleProjection<double>& p) {
  ProjectionStructure s{p.rows(), std::vector<std::size_t>(p.cols(), p.rows())};
  for (std::size_t j = 0; j < p.cols(); ++j) {
    if (p.columns()[j]) s.assignment[j] = p.columns()[j]->row;
  }
  return s;
}

std::uint64_t count_structures(std::size_t m, std::size_t n) {
  if (m == 0 || n <= m) return 0;
  // Maps [n] -> [m] ∪ {unused} hitting every row, by inclusion-exclusion.
  mpz_int total(0), binom(1);
  for (std::size_t k = 0; k <= m; ++k) {
    mpz_int term = binom * boost::multiprecision::pow(mpz_int(m + 1 - k), static_cast<unsigned>(n));
    total += (k % 2 == 0) ? term : mpz_int(-term);
    binom = binom * (m - k) / (k + 1);
  }
  if (total > mpz_int(std::numeric_limits<std::uint64_t>::max())) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return total.convert_to<std::uint64_t>();
}

std::vector<ProjectionStructure> enumerate_structures(std::size_t m, std::size_t n) {
  std::vector<ProjectionStructure> out;
  if (m == 0 || n <= m) return out;
  ProjectionStructure s{m, std::vector<std::size_t>(n, 0)};
  std::vector<std::size_t> hits(m, 0);
  std::size_t missing = m;
  auto rec = [&](auto&& self, std::size_t j) -> void {
    if (missing > n - j) return;
    if (j == n) {
      out.push_back(s);
      return;
    }
    for (std::size_t r = 0; r <= m; ++r) {
      s.assignment[j] = r;
      if (r < m && hits[r]++ == 0) --missing;
      self(self, j + 1);
      if (r < m && --hits[r] == 0) ++missing;
    }
  };
  rec(rec, 0);
  return out;
}

OffsetFit optimize_offsets(const ProjectionStructure& s, const DiscreteMeasure& mu,
                           const DiscreteMeasure& nu, double p, const ProjectionSearchSpec& spec) {
  if (!s.valid() || s.rows != mu.dim() || s.cols() != nu.dim()) {
    throw std::invalid_argument("optimize_offsets: structure does not fit the measures");
  }
  return OffsetSearch(s, mu, nu, p, spec).run();
}

EmbeddingCertificate embedding_certificate(const SimpleProjection<double>& p,
                                           const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                           const Pushforward& beta, const Coupling& pi_m,
                                           double exponent) {
  if (pi_m.rows != mu.size() || pi_m.cols != beta.measure.size()) {
    throw std::invalid_argument("embedding_certificate: coupling does not match mu and beta");
  }
  std::vector<Point<double>> fibre_parts;
  fibre_parts.reserve(nu.size());
  for (const auto& x : nu.support()) fibre_parts.push_back(split(p, x).fibre_part);

  std::vector<Point<double>> points;
  std::vector<double> masses;
  std::vector<std::size_t> partner;
  for (std::size_t a = 0; a < mu.size(); ++a) {
    for (std::size_t b = 0; b < nu.size(); ++b) {
      const std::size_t c = beta.atom_map[b];
      const double mass = pi_m.at(a, c) * nu.weights()[b] / beta.measure.weights()[c];
      if (!(mass > 0)) continue;
      points.push_back(unsplit(p, mu.support()[a], fibre_parts[b]));
      masses.push_back(mass);
      partner.push_back(b);
    }
  }
  auto alpha = MergedMeasure::build(points, masses);

  EmbeddingCertificate cert{alpha.measure, Coupling{}, 0, 0, 0, false, 0};
  cert.pi_n = Coupling{alpha.measure.size(), nu.size(), {}};
  cert.pi_n.mass.assign(cert.pi_n.rows * cert.pi_n.cols, 0.0);
  for (std::size_t k = 0; k < points.size(); ++k) {
    cert.pi_n.mass[alpha.atom_map[k] * nu.size() + partner[k]] += masses[k];
  }
  cert.cost_pi_n = coupling_cost(cert.pi_n, cert.alpha, nu, exponent);
  cert.cost_pi_m = coupling_cost(pi_m, mu, beta.measure, exponent);
  cert.gap = std::abs(cert.cost_pi_n - cert.cost_pi_m);
  cert.w_plus = wasserstein(cert.alpha, nu, exponent).value;
  cert.pushforward_matches = same_measure(pushforward(p, cert.alpha).measure, mu);
  return cert;
}

CrossDimResult w_minus(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                       const ProjectionSearchSpec& spec) {
  check_dims(mu, nu);
  if (!(p >= 1.0)) throw std::invalid_argument("Wasserstein exponent p must be >= 1");
  const std::size_t m = mu.dim(), n = nu.dim();
  const std::uint64_t count = count_structures(m, n);
  const bool exhaustive =
      spec.mode == StructureMode::exhaustive ||
      (spec.mode == StructureMode::automatic && count < spec.max_structures);

  SearchState state;
  if (exhaustive) {
    run_ordered(enumerate_structures(m, n), mu, nu, p, spec, screening(spec), state);
  } else {
    run_local_search(mu, nu, p, spec, state);
  }
  if (state.records.empty()) throw std::logic_error("w_minus: empty search space");
  return report(mu, nu, p, spec, state, count, exhaustive, true);
}

CrossDimResult w_minus_structures(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                                  const std::vector<ProjectionStructure>& structures,
                                  const ProjectionSearchSpec& spec) {
  check_dims(mu, nu);
  if (structures.empty()) throw std::invalid_argument("w_minus_structures: empty structure list");
  SearchState state;
  // Every structure gets the full budget, so a larger set never reports more.
  run_ordered(structures, mu, nu, p, spec, spec, state);
  return report(mu, nu, p, spec, state, structures.size(), true, false);
}

CrossDimResult w_plus(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                      const ProjectionSearchSpec& spec) {
  auto out = w_minus(mu, nu, p, spec);
  attach_certificate(out, mu, nu);
  return out;
}

CrossDimResult w_minus_family(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                              const std::vector<SimpleProjection<double>>& family) {
  check_dims(mu, nu);
  if (family.empty()) throw std::invalid_argument("w_minus_family: empty family");
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < family.size(); ++k) {
    if (family[k].rows() != mu.dim() || family[k].cols() != nu.dim()) {
      throw std::invalid_argument("w_minus_family: projection shape does not fit the measures");
    }
    const double v = wasserstein(mu, pushforward(family[k], nu).measure, p).value;
    if (v < best_value) {
      best_value = v;
      best = k;
    }
  }
  auto out = finish(mu, nu, p, family[best]);
  out.structure_count = family.size();
  out.structures_explored = family.size();
  out.exhaustive = true;
  return out;
}

CrossDimResult w_plus_family(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                             const std::vector<SimpleProjection<double>>& family) {
  auto out = w_minus_family(mu, nu, p, family);
  attach_certificate(out, mu, nu);
  return out;
}

CrossDimResult estimate_from_samples(const std::vector<Point<double>>& x,
                                     const std::vector<Point<double>>& y, double p,
                                     const ProjectionSearchSpec& spec) {
  if (x.empty() || y.empty()) throw std::invalid_argument("estimate_from_samples: empty sample");
  return w_plus(DiscreteMeasure::uniform(x), DiscreteMeasure::uniform(y), p, spec);
}

}  // namespace tropot

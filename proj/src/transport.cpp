#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tropot/measure.hpp"
#include "tropot/transport_simplex.hpp"

namespace tropot {

namespace {

void check_weights(const std::vector<double>& weights) {
  if (weights.empty()) throw std::invalid_argument("measure: empty support");
  double total = 0;
  for (double w : weights) {
    if (!std::isfinite(w) || w <= 0) {
      throw std::invalid_argument("measure: weights must be positive and finite");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > kWeightTolerance) {
    throw std::invalid_argument("measure: weights sum to " + std::to_string(total) + ", not 1");
  }
}

void check_same_dim(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const char* where) {
  if (mu.dim() != nu.dim()) throw DimensionMismatch(mu.dim(), nu.dim(), where);
}

void check_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw std::invalid_argument("Wasserstein exponent p must be a finite number >= 1");
  }
}

// Rationalized weights, with the last one replaced so the total is 1.
std::vector<Rational> exact_weights(const std::vector<double>& w) {
  std::vector<Rational> out;
  out.reserve(w.size());
  Rational total(0);
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    out.push_back(rationalize(w[i]));
    total += out.back();
  }
  out.push_back(Rational(1) - total);
  if (out.back() < 0) throw std::invalid_argument("measure: weights exceed 1 in exact arithmetic");
  return out;
}

Rational power(const Rational& x, unsigned p) {
  Rational out(1);
  for (unsigned k = 0; k < p; ++k) out *= x;
  return out;
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(std::vector<Point<double>> support, std::vector<double> weights) {
  if (support.size() != weights.size()) {
    throw std::invalid_argument("measure: support and weights differ in length");
  }
  check_weights(weights);
  *this = MergedMeasure::build(support, weights).measure;
}

DiscreteMeasure DiscreteMeasure::uniform(std::vector<Point<double>> support) {
  if (support.empty()) throw std::invalid_argument("measure: empty support");
  std::vector<double> w(support.size(), 1.0 / static_cast<double>(support.size()));
  return DiscreteMeasure(std::move(support), std::move(w));
}

DiscreteMeasure DiscreteMeasure::dirac(Point<double> x) {
  return DiscreteMeasure({std::move(x)}, {1.0});
}

std::size_t DiscreteMeasure::find(const Point<double>& x, double tol) const {
  for (std::size_t k = 0; k < support_.size(); ++k) {
    if (same_point(support_[k], x, tol)) return k;
  }
  return support_.size();
}

MergedMeasure MergedMeasure::build(const std::vector<Point<double>>& points,
                                   const std::vector<double>& weights, double tol) {
  if (points.empty()) throw std::invalid_argument("measure: empty support");
  if (points.size() != weights.size()) {
    throw std::invalid_argument("measure: support and weights differ in length");
  }
  MergedMeasure out;
  out.measure.dim_ = points.front().dim();
  out.atom_map.reserve(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (points[k].dim() != out.measure.dim_) {
      throw DimensionMismatch(out.measure.dim_, points[k].dim(), "measure support");
    }
    const std::size_t at = out.measure.find(points[k], tol);
    if (at == out.measure.size()) {
      out.measure.support_.push_back(points[k]);
      out.measure.weights_.push_back(weights[k]);
    } else {
      out.measure.weights_[at] += weights[k];
    }
    out.atom_map.push_back(at);
  }
  return out;
}

bool same_measure(const DiscreteMeasure& a, const DiscreteMeasure& b, double tol) {
  if (a.dim() != b.dim() || a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const std::size_t at = b.find(a.support()[k]);
    if (at == b.size() || std::abs(a.weights()[k] - b.weights()[at]) > tol) return false;
  }
  return true;
}

bool Coupling::is_coupling_of(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                              double tol) const {
  if (rows != mu.size() || cols != nu.size() || mass.size() != rows * cols) return false;
  for (double v : mass) {
    if (v < -tol) return false;
  }
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0;
    for (std::size_t j = 0; j < cols; ++j) s += at(i, j);
    if (std::abs(s - mu.weights()[i]) > tol) return false;
  }
  for (std::size_t j = 0; j < cols; ++j) {
    double s = 0;
    for (std::size_t i = 0; i < rows; ++i) s += at(i, j);
    if (std::abs(s - nu.weights()[j]) > tol) return false;
  }
  return true;
}

std::vector<double> cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  check_same_dim(mu, nu, "cost_matrix");
  std::vector<double> c(mu.size() * nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = 0; j < nu.size(); ++j) {
      const double d = trop_metric(mu.support()[i], nu.support()[j]);
      c[i * nu.size() + j] = p == 1.0 ? d : (p == 2.0 ? d * d : std::pow(d, p));
    }
  }
  return c;
}

double coupling_cost(const Coupling& pi, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                     double p) {
  if (pi.rows != mu.size() || pi.cols != nu.size()) {
    throw std::invalid_argument("coupling_cost: coupling shape does not match the marginals");
  }
  const auto c = cost_matrix(mu, nu, p);
  double total = 0;
  for (std::size_t k = 0; k < c.size(); ++k) total += pi.mass[k] * c[k];
  return total;
}

TransportResult wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                            WarmStart& warm) {
  check_same_dim(mu, nu, "wasserstein");
  check_p(p);
  const auto c = cost_matrix(mu, nu, p);
  std::vector<double> demand = nu.weights();
  const double supply_total = std::accumulate(mu.weights().begin(), mu.weights().end(), 0.0);
  const double demand_total = std::accumulate(demand.begin(), demand.end(), 0.0);
  for (auto& d : demand) d *= supply_total / demand_total;

  const bool reuse = warm.supply == mu.weights() && warm.demand == demand;
  auto plan = reuse ? solve_transport<double>(mu.weights(), demand, c, warm.basis, warm.flow)
                    : solve_transport<double>(mu.weights(), demand, c);
  TransportResult out;
  out.cost = std::max(0.0, plan.cost);
  out.value = p == 1.0 ? out.cost : std::pow(out.cost, 1.0 / p);
  warm.supply = mu.weights();
  warm.demand = std::move(demand);
  warm.basis = std::move(plan.basis);
  warm.flow = plan.flow;
  out.coupling = Coupling{mu.size(), nu.size(), std::move(plan.flow)};
  return out;
}

TransportResult wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  WarmStart cold;
  return wasserstein(mu, nu, p, cold);
}

Rational transport_cost_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu, unsigned p) {
  check_same_dim(mu, nu, "transport_cost_exact");
  if (p < 1) throw std::invalid_argument("transport_cost_exact: p must be >= 1");
  std::vector<Rational> c;
  c.reserve(mu.size() * nu.size());
  for (const auto& x : mu.support()) {
    for (const auto& y : nu.support()) {
      std::vector<Rational> a, b;
      for (double v : x.coords()) a.push_back(rationalize(v));
      for (double v : y.coords()) b.push_back(rationalize(v));
      c.push_back(power(trop_metric<Rational>(a, b), p));
    }
  }
  const auto supply = exact_weights(mu.weights());
  const auto demand = exact_weights(nu.weights());
  return solve_transport<Rational>(supply, demand, c).cost;
}

Pushforward pushforward(const SimpleProjection<double>& p, const DiscreteMeasure& nu, double tol) {
  if (nu.dim() != p.cols()) throw DimensionMismatch(p.cols(), nu.dim(), "pushforward");
  std::vector<Point<double>> image;
  image.reserve(nu.size());
  for (const auto& x : nu.support()) image.push_back(apply(p, x));
  return MergedMeasure::build(image, nu.weights(), tol);
}

Pushforward pushforward(const Matrix<double>& m, const DiscreteMeasure& nu, double tol) {
  if (nu.dim() != m.cols()) throw DimensionMismatch(m.cols(), nu.dim(), "pushforward");
  std::vector<Point<double>> image;
  image.reserve(nu.size());
  for (const auto& x : nu.support()) image.push_back(apply(m, x));
  return MergedMeasure::build(image, nu.weights(), tol);
}

Coupling pushforward_coupling(const Pushforward& first, const Pushforward& second,
                              const Coupling& pi) {
  if (pi.rows != first.atom_map.size() || pi.cols != second.atom_map.size()) {
    throw std::invalid_argument("pushforward_coupling: coupling shape does not match the measures");
  }
  Coupling out{first.measure.size(), second.measure.size(), {}};
  out.mass.assign(out.rows * out.cols, 0.0);
  for (std::size_t a = 0; a < pi.rows; ++a) {
    for (std::size_t b = 0; b < pi.cols; ++b) {
      out.mass[first.atom_map[a] * out.cols + second.atom_map[b]] += pi.at(a, b);
    }
  }
  return out;
}

}  // namespace tropot

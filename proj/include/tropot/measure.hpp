#pragma once

#include <cstddef>
#include <vector>

#include "tropot/matrix.hpp"
#include "tropot/point.hpp"
#include "tropot/simple_projection.hpp"

namespace tropot {

/// Atoms closer than this (max-abs on canonical coordinates) are merged.
inline constexpr double kMergeTolerance = 1e-9;
inline constexpr double kWeightTolerance = 1e-12;

/// A finitely supported probability measure on TPT^n. Support points are
/// pairwise non-equivalent; duplicates are merged at construction.
class DiscreteMeasure {
 public:
  /// Weights must be positive and sum to 1 within kWeightTolerance.
  DiscreteMeasure(std::vector<Point<double>> support, std::vector<double> weights);

  static DiscreteMeasure uniform(std::vector<Point<double>> support);
  static DiscreteMeasure dirac(Point<double> x);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return support_.size(); }
  const std::vector<Point<double>>& support() const { return support_; }
  const std::vector<double>& weights() const { return weights_; }

  /// Index of the atom equal to x (within `tol`), or size().
  std::size_t find(const Point<double>& x, double tol = kMergeTolerance) const;

 private:
  friend struct MergedMeasure;
  DiscreteMeasure() = default;
  std::size_t dim_ = 0;
  std::vector<Point<double>> support_;
  std::vector<double> weights_;
};

/// A measure together with the map from input atoms to merged atoms.
struct MergedMeasure {
  DiscreteMeasure measure;
  std::vector<std::size_t> atom_map;

  /// Merges equal points (first occurrence order) and sums their weights.
  static MergedMeasure build(const std::vector<Point<double>>& points,
                             const std::vector<double>& weights, double tol = kMergeTolerance);
};

/// Same atoms (within kMergeTolerance) with the same weights (within `tol`),
/// irrespective of atom order.
bool same_measure(const DiscreteMeasure& a, const DiscreteMeasure& b, double tol = 1e-9);

/// A joint distribution with prescribed marginals, row-major.
struct Coupling {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> mass;

  double at(std::size_t i, std::size_t j) const { return mass[i * cols + j]; }
  /// Nonnegative, with row sums mu.weights and column sums nu.weights within tol.
  bool is_coupling_of(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                      double tol = 1e-10) const;
};

struct TransportResult {
  double value = 0;  // optimum^(1/p)
  double cost = 0;   // optimum of E[d^p]
  Coupling coupling;
};

/// Costs d_tr(x_i, y_j)^p, row-major.
std::vector<double> cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

double coupling_cost(const Coupling& pi, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                     double p);

/// p-Wasserstein distance with the tropical ground metric, solved exactly by
/// the transportation simplex. Requires p ≥ 1 and equal dimensions.
TransportResult wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

/// Optimal basis kept between solves; reused when the marginals repeat.
struct WarmStart {
  std::vector<double> supply;
  std::vector<double> demand;
  std::vector<std::size_t> basis;
  std::vector<double> flow;
};

TransportResult wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                            WarmStart& warm);

/// The optimal value of E[d^p] in exact rational arithmetic, for integer p.
/// Weights and coordinates are rationalized (denominators up to 10^6); the
/// last weight on each side is adjusted so both sides sum to exactly 1.
Rational transport_cost_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu, unsigned p);

/// φ_#ν with the map from ν-atoms to atoms of the image measure.
using Pushforward = MergedMeasure;

/// Images closer than `tol` share an atom.
Pushforward pushforward(const SimpleProjection<double>& p, const DiscreteMeasure& nu,
                        double tol = kMergeTolerance);
Pushforward pushforward(const Matrix<double>& m, const DiscreteMeasure& nu,
                        double tol = kMergeTolerance);

/// (φ×φ)_#π: the coupling of φ_#α and φ_#ν induced by a coupling π of α and ν.
Coupling pushforward_coupling(const Pushforward& first, const Pushforward& second,
                              const Coupling& pi);

}  // namespace tropot

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tropot/measure.hpp"
#include "tropot/simple_projection.hpp"

namespace tropot {

/// Which columns feed which row: assignment[j] is a row index, or `rows`
/// for an unused column. Every row must receive at least one column.
struct ProjectionStructure {
  std::size_t rows = 0;
  std::vector<std::size_t> assignment;

  std::size_t cols() const { return assignment.size(); }
  bool is_unused(std::size_t j) const { return assignment[j] == rows; }
  bool valid() const;
  /// Blocks J_i in 1-based notation, e.g. "{1,3}{2}".
  std::string to_string() const;
  SimpleProjection<double> with_offsets(const std::vector<double>& offsets) const;
  static ProjectionStructure of(const SimpleProjection<double>& p);

  friend auto operator<=>(const ProjectionStructure&, const ProjectionStructure&) = default;
};

/// Number of valid structures for an m-row, n-column projection (saturates
/// at UINT64_MAX).
std::uint64_t count_structures(std::size_t m, std::size_t n);

/// All valid structures in lexicographic order of their assignment vectors.
std::vector<ProjectionStructure> enumerate_structures(std::size_t m, std::size_t n);

enum class StructureMode { automatic, exhaustive, local_search };

struct ProjectionSearchSpec {
  /// automatic: exhaustive when the structure count is below max_structures.
  StructureMode mode = StructureMode::automatic;
  std::size_t max_structures = 256;
  /// Coordinate-descent sweeps per start.
  std::size_t iterations = 200;
  std::size_t restarts = 10;
  std::uint64_t seed = 0;
  /// Values at or below this count as zero and stop the search.
  double tolerance = 1e-9;
  std::size_t threads = 1;
};

struct OffsetFit {
  std::vector<double> offsets;  // per column; unused columns hold 0
  double value = 0;             // W_p(mu, P_# nu)
  double cost = 0;              // value^p
  bool budget_exhausted = false;
  std::size_t evaluations = 0;
};

/// Minimises offsets ↦ W_p(mu, P_# nu) for a fixed structure. Deterministic
/// for a fixed spec.seed and structure.
OffsetFit optimize_offsets(const ProjectionStructure& s, const DiscreteMeasure& mu,
                           const DiscreteMeasure& nu, double p, const ProjectionSearchSpec& spec);

/// The glued measure alpha on the larger torus and its coupling with nu.
struct EmbeddingCertificate {
  DiscreteMeasure alpha;
  Coupling pi_n;             // alpha x nu
  double cost_pi_n = 0;      // E_{pi_n}[d^p]
  double cost_pi_m = 0;      // E_{pi_m}[d^p]
  double w_plus = 0;         // W_p(alpha, nu)
  bool pushforward_matches = false;  // P_# alpha == mu after merging
  double gap = 0;            // |cost_pi_n - cost_pi_m|
};

/// Builds alpha from an optimal coupling pi_m of mu and beta = P_# nu by
/// conditioning on beta-atoms and re-assembling points with unsplit.
EmbeddingCertificate embedding_certificate(const SimpleProjection<double>& p,
                                           const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                           const Pushforward& beta, const Coupling& pi_m,
                                           double exponent);

struct CrossDimResult {
  double w_minus = 0;
  std::optional<double> w_plus;
  std::optional<SimpleProjection<double>> projection;
  std::optional<DiscreteMeasure> beta;
  Coupling pi_m;
  std::optional<EmbeddingCertificate> certificate;
  double p = 2;
  std::uint64_t seed = 0;
  std::uint64_t structure_count = 0;
  std::size_t structures_explored = 0;
  bool exhaustive = false;
  bool budget_exhausted = false;
  /// The optimiser tolerance (the epsilon of the embedding construction).
  double epsilon = 0;
};

/// Smallest W_p(mu, P_# nu) found over simple projections P. Requires
/// mu.dim() < nu.dim().
CrossDimResult w_minus(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                       const ProjectionSearchSpec& spec = {});

/// w_minus followed by the embedding certificate; w_plus = W_p(alpha, nu).
CrossDimResult w_plus(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                      const ProjectionSearchSpec& spec = {});

/// Exact minimum over a fixed finite family of projections (offsets frozen).
CrossDimResult w_minus_family(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                              const std::vector<SimpleProjection<double>>& family);
CrossDimResult w_plus_family(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                             const std::vector<SimpleProjection<double>>& family);

/// Minimum over the given structures only, each optimised with optimize_offsets.
CrossDimResult w_minus_structures(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                                  const std::vector<ProjectionStructure>& structures,
                                  const ProjectionSearchSpec& spec = {});

/// Uniform empirical measures of the samples, then w_plus.
CrossDimResult estimate_from_samples(const std::vector<Point<double>>& x,
                                     const std::vector<Point<double>>& y, double p,
                                     const ProjectionSearchSpec& spec = {});

}  // namespace tropot

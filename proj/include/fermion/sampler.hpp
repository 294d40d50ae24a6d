#pragma once

#include <cstdint>
#include <vector>

#include "fermion/operators.hpp"
#include "fermion/random.hpp"

namespace fermion::sampler {

struct SeedRecord {
  std::uint64_t root = 0;
  std::uint64_t stream = 0;
};

/// Finite configuration, points sorted in descending order.
struct PointConfiguration {
  std::vector<double> points;
  operators::Region region;
  SeedRecord seed;

  std::size_t size() const { return points.size(); }
  void sort_descending();
  /// Sorted and inside the region.
  bool valid() const;
};

/// Truncated point of the Thoma simplex. `residual` is the mass 1 - sum(alpha) - sum(beta)
/// left unassigned by the truncation.
struct ThomaPoint {
  std::vector<double> alpha;
  std::vector<double> beta;
  std::size_t truncation = 0;
  double residual = 0.0;
  SeedRecord seed;

  PointConfiguration alpha_configuration() const;
};

/// One exact sample of the determinantal process with kernel op, at quadrature resolution:
/// eigenvectors are kept with probability equal to their eigenvalue, nodes are drawn from the
/// projection process by sequential conditioning, and each point is placed inside its node's
/// cell by inverting the piecewise-linear interpolant of the conditional density.
/// Throws NumericalError when the spectrum is outside [0, 1].
PointConfiguration sample_dpp(const operators::DiscretizedOperator& op, random::RandomStream& rng);

/// Configuration i uses stream first_stream + i; output is independent of the thread count.
std::vector<PointConfiguration> sample_dpp_many(const operators::DiscretizedOperator& op, std::uint64_t root,
                                                std::size_t count, int threads = 0, std::uint64_t first_stream = 0);

struct PoissonDirichletOptions {
  int cutoff = 200;
  double residual_tol = 1e-12;
};

/// Stick-breaking (GEM(t)) sticks, sorted; stops at `cutoff` sticks or once the remaining mass
/// drops below residual_tol, whichever comes first.
ThomaPoint sample_poisson_dirichlet(double t, random::RandomStream& rng, const PoissonDirichletOptions& opts = {});

std::vector<ThomaPoint> sample_poisson_dirichlet_many(double t, std::uint64_t root, std::size_t count,
                                                      const PoissonDirichletOptions& opts = {}, int threads = 0);

/// Homogeneous Poisson process of the given rate on a bounded region.
PointConfiguration sample_poisson(double rate, const operators::Region& region, random::RandomStream& rng);

/// Multiplies every point by one Gamma(t) draw.
PointConfiguration lift(const PointConfiguration& config, double t, random::RandomStream& rng);

/// E[sum_i (s x_i)^m] over s ~ Gamma(t), by generalized Gauss-Laguerre (exact for integer m).
double lifted_moment(const PointConfiguration& config, double t, int m, int order = 32);

struct EmpiricalStatistics {
  std::vector<double> edges;
  std::vector<double> rho1, rho1_se;
  /// rho2[a][b]: density of ordered pairs of distinct points in bins a x b.
  std::vector<std::vector<double>> rho2, rho2_se;
  double count_mean = 0.0, count_mean_se = 0.0;
  double count_variance = 0.0, count_variance_se = 0.0;
  std::size_t samples = 0;
};

/// Histogram estimators over bins given by increasing edges. Throws DomainError for an
/// empty sample set or fewer than two edges.
EmpiricalStatistics empirical_statistics(const std::vector<PointConfiguration>& configs, const std::vector<double>& edges);

struct DispersionResult {
  double mean = 0.0;
  double variance = 0.0;
  double index = 0.0;  // variance / mean
  double index_se = 0.0;  // sqrt((2 + 1/mean) / N), exact for Poisson counts
};

/// Dispersion of the counts in [a, b) across configurations.
DispersionResult dispersion_index(const std::vector<PointConfiguration>& configs, double a, double b);

}  // namespace fermion::sampler

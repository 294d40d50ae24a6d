#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "fermion/kernels.hpp"

namespace fermion::operators {

struct Interval {
  double a = 0.0;
  double b = 0.0;
};

/// Finite union of bounded intervals. A semi-infinite set (tau, inf) is represented after
/// truncation at `truncation`, with `tail_bound` bounding the neglected trace.
struct Region {
  std::vector<Interval> intervals;
  double truncation = 0.0;  // 0 when the region was bounded to begin with
  double tail_bound = 0.0;

  static Region interval(double a, double b);
  static Region from_intervals(std::vector<Interval> intervals);
  static Region empty() { return {}; }

  bool contains(double x) const;
  double measure() const;
  bool is_empty() const { return intervals.empty(); }
  /// Sorted, nonempty, pairwise disjoint (touching endpoints allowed). Throws DomainError.
  void validate() const;
};

/// Symmetrized Nystrom discretization M_ij = sqrt(w_i) K(x_i, x_j) sqrt(w_j). Immutable.
class DiscretizedOperator {
 public:
  DiscretizedOperator(kernels::KernelSpec spec, Region region, std::vector<double> nodes, std::vector<double> weights);

  const kernels::KernelSpec& spec() const { return *spec_; }
  const kernels::KernelEvaluator& evaluator() const { return *evaluator_; }
  const Region& region() const { return region_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return nodes_.size(); }

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  /// Raw eigenvalues (ascending) and orthonormal eigenvectors of M.
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }
  /// Eigenvalues clipped to [0, 1]; meaningful only when spectrum_in_unit_interval().
  const Eigen::VectorXd& clipped_eigenvalues() const { return clipped_; }
  bool spectrum_in_unit_interval() const { return spectrum_ok_; }
  /// Eigenvalues in (1 - eps, 1 + eps] are treated as 1.
  bool has_unit_eigenvalue() const { return unit_eigenvalue_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  double trace() const { return matrix_.trace(); }

  static constexpr double kSpectrumEps = 1e-8;

 private:
  std::shared_ptr<const kernels::KernelSpec> spec_;
  std::shared_ptr<const kernels::KernelEvaluator> evaluator_;
  Region region_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  Eigen::MatrixXd matrix_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  Eigen::VectorXd clipped_;
  bool spectrum_ok_ = true;
  bool unit_eigenvalue_ = false;
  std::vector<std::string> warnings_;
};

constexpr int kDefaultOrder = 64;

/// Gauss-Legendre of the given order on every interval of the region.
DiscretizedOperator nystrom(const kernels::KernelSpec& spec, const Region& region, int order = kDefaultOrder);

/// det(I - lambda M).
double fredholm_det(const DiscretizedOperator& op, double lambda = 1.0);

/// Probability that the region holds no points, Det(1 - K_A).
double gap_probability(const DiscretizedOperator& op);

struct AdaptiveResult {
  double value = 1.0;
  int order = 0;
  double change = 0.0;  // |value(order) - value(order/2)|
  bool converged = false;
};

/// Doubles the per-interval order from `order` until successive values differ by < tol or
/// `max_order` is reached (converged = false in that case).
AdaptiveResult gap_probability_adaptive(const kernels::KernelSpec& spec, const Region& region, int order = kDefaultOrder,
                                        double tol = 1e-8, int max_order = 1024);

/// L_A = K_A (1 - K_A)^{-1} in the node basis, with Nystrom interpolation off the nodes:
///   L(x, y) = K(x, y) + k_x^T (I - M)^{-1} k_y,  k_x[i] = sqrt(w_i) K(x, s_i).
class Resolvent {
 public:
  /// Throws NumericalError when the largest eigenvalue exceeds 1 - 1e-8.
  explicit Resolvent(const DiscretizedOperator& op);

  /// Symmetrized matrix M (I - M)^{-1}.
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  double operator()(double x, double y) const;
  /// L(points[a], points[b]).
  Eigen::MatrixXd at(const std::vector<double>& points) const;

 private:
  const DiscretizedOperator* op_;
  Eigen::MatrixXd inverse_;  // (I - M)^{-1}
  Eigen::MatrixXd matrix_;
};

Resolvent resolvent_kernel(const DiscretizedOperator& op);

/// rho_n(x_1..x_n) = det[K(x_a, x_b)].
double correlation(const kernels::KernelSpec& spec, const std::vector<double>& points);

/// pi_n(x_1..x_n) = Det(1 - K_A) det[L_A(x_a, x_b)]: density of "exactly these n points in A".
double fdd_pi(const DiscretizedOperator& op, const std::vector<double>& points);

struct Alpha1Options {
  int order = 16;             // Gauss-Legendre order per panel
  double tail_tol = 1e-10;    // required bound on int_T^inf K(x,x) dx
  double max_truncation = 400.0;
};

struct Alpha1Result {
  double value = 1.0;
  double truncation = 0.0;
  double tail_bound = 0.0;
  std::size_t nodes = 0;
  std::vector<std::string> warnings;
};

/// Trace of the Whittaker kernel beyond T, by Gauss-Laguerre in the shifted variable.
double whittaker_tail_trace(const kernels::SpectralParams& params, double T);

/// Region (tau, T) with T chosen so the neglected tail trace is below opts.tail_tol.
/// Panels grow geometrically from tau. Throws TruncationError past opts.max_truncation.
Region alpha1_region(const kernels::SpectralParams& params, double tau, const Alpha1Options& opts = {});

/// Prob{largest point < tau} = Det(1 - K_(tau, inf)).
Alpha1Result alpha1_cdf(const kernels::SpectralParams& params, double tau, const Alpha1Options& opts = {});

}  // namespace fermion::operators

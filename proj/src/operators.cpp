#include "fermion/operators.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "fermion/error.hpp"

namespace fermion::operators {

using kernels::KernelEvaluator;
using kernels::KernelSpec;

Region Region::interval(double a, double b) {
  Region r;
  r.intervals.push_back({a, b});
  r.validate();
  return r;
}

Region Region::from_intervals(std::vector<Interval> intervals) {
  Region r;
  r.intervals = std::move(intervals);
  std::sort(r.intervals.begin(), r.intervals.end(), [](const Interval& l, const Interval& h) { return l.a < h.a; });
  r.validate();
  return r;
}

bool Region::contains(double x) const {
  return std::any_of(intervals.begin(), intervals.end(), [x](const Interval& i) { return x >= i.a && x <= i.b; });
}

double Region::measure() const {
  double m = 0.0;
  for (const auto& i : intervals) m += i.b - i.a;
  return m;
}

void Region::validate() const {
  for (std::size_t k = 0; k < intervals.size(); ++k) {
    const auto& i = intervals[k];
    if (!std::isfinite(i.a) || !std::isfinite(i.b)) throw DomainError("region: intervals must be finite");
    if (!(i.a < i.b)) throw DomainError("region: interval must satisfy a < b");
    if (k > 0 && i.a < intervals[k - 1].b) throw DomainError("region: intervals must be sorted and disjoint");
  }
}

DiscretizedOperator::DiscretizedOperator(KernelSpec spec, Region region, std::vector<double> nodes,
                                         std::vector<double> weights)
    : spec_(std::make_shared<const KernelSpec>(std::move(spec))),
      region_(std::move(region)),
      nodes_(std::move(nodes)),
      weights_(std::move(weights)) {
  evaluator_ = std::make_shared<const KernelEvaluator>(*spec_);
  const auto n = static_cast<Eigen::Index>(nodes_.size());
  matrix_ = Eigen::MatrixXd::Zero(n, n);
  if (n > 0) {
    const auto k = evaluator_->matrix(nodes_);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) matrix_(i, j) = std::sqrt(weights_[i]) * k[i][j] * std::sqrt(weights_[j]);
    matrix_ = 0.5 * (matrix_ + matrix_.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix_);
    if (solver.info() != Eigen::Success) throw NumericalError("nystrom: eigen decomposition failed");
    eigenvalues_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors();
  } else {
    eigenvalues_.resize(0);
    eigenvectors_.resize(0, 0);
  }
  clipped_ = eigenvalues_;
  for (Eigen::Index i = 0; i < eigenvalues_.size(); ++i) {
    const double e = eigenvalues_[i];
    if (e < -kSpectrumEps || e > 1.0 + kSpectrumEps) spectrum_ok_ = false;
    if (e > 1.0 - kSpectrumEps && e <= 1.0 + kSpectrumEps) unit_eigenvalue_ = true;
    clipped_[i] = std::clamp(e, 0.0, 1.0);
  }
  if (!spectrum_ok_) warnings_.push_back("spectrum outside [0, 1]: kernel not admissible or under-resolved");
  if (unit_eigenvalue_) warnings_.push_back("eigenvalue within 1e-8 of 1: norm condition on the region fails");
}

DiscretizedOperator nystrom(const KernelSpec& spec, const Region& region, int order) {
  if (order < 2) throw DomainError("nystrom: order must be >= 2");
  region.validate();
  const auto rule = specfun::gauss_legendre(order);
  std::vector<double> nodes, weights;
  nodes.reserve(region.intervals.size() * order);
  weights.reserve(region.intervals.size() * order);
  for (const auto& i : region.intervals) {
    const auto mapped = specfun::map_to_interval(rule, i.a, i.b);
    nodes.insert(nodes.end(), mapped.nodes.begin(), mapped.nodes.end());
    weights.insert(weights.end(), mapped.weights.begin(), mapped.weights.end());
  }
  return DiscretizedOperator(spec, region, std::move(nodes), std::move(weights));
}

double fredholm_det(const DiscretizedOperator& op, double lambda) {
  double det = 1.0;
  const auto& e = op.eigenvalues();
  for (Eigen::Index i = 0; i < e.size(); ++i) det *= 1.0 - lambda * e[i];
  return det;
}

double gap_probability(const DiscretizedOperator& op) { return fredholm_det(op, 1.0); }

AdaptiveResult gap_probability_adaptive(const KernelSpec& spec, const Region& region, int order, double tol,
                                        int max_order) {
  AdaptiveResult result;
  if (region.is_empty()) {
    result.value = 1.0;
    result.converged = true;
    return result;
  }
  double previous = gap_probability(nystrom(spec, region, order));
  for (int next = 2 * order; next <= max_order; next *= 2) {
    const double value = gap_probability(nystrom(spec, region, next));
    result.value = value;
    result.order = next;
    result.change = std::abs(value - previous);
    if (result.change < tol) {
      result.converged = true;
      return result;
    }
    previous = value;
  }
  if (result.order == 0) {
    result.value = previous;
    result.order = order;
  }
  return result;
}

Resolvent::Resolvent(const DiscretizedOperator& op) : op_(&op) {
  const auto& e = op.eigenvalues();
  const auto& v = op.eigenvectors();
  if (e.size() > 0 && e.maxCoeff() > 1.0 - DiscretizedOperator::kSpectrumEps) {
    throw NumericalError("resolvent: an eigenvalue is within 1e-8 of 1 (1 - K is near-singular)");
  }
  const auto n = e.size();
  Eigen::VectorXd inv(n), ratio(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    inv[i] = 1.0 / (1.0 - e[i]);
    ratio[i] = e[i] * inv[i];
  }
  inverse_ = v * inv.asDiagonal() * v.transpose();
  matrix_ = v * ratio.asDiagonal() * v.transpose();
}

Eigen::MatrixXd Resolvent::at(const std::vector<double>& points) const {
  const auto n = static_cast<Eigen::Index>(points.size());
  const auto& nodes = op_->nodes();
  const auto& w = op_->weights();
  const auto direct = op_->evaluator().matrix(points);
  const auto cross = op_->evaluator().matrix(points, nodes);
  Eigen::MatrixXd kx(n, static_cast<Eigen::Index>(nodes.size()));
  for (Eigen::Index a = 0; a < n; ++a)
    for (std::size_t i = 0; i < nodes.size(); ++i) kx(a, static_cast<Eigen::Index>(i)) = std::sqrt(w[i]) * cross[a][i];
  Eigen::MatrixXd out = kx * inverse_ * kx.transpose();
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) out(a, b) += direct[a][b];
  return out;
}

double Resolvent::operator()(double x, double y) const {
  if (x == y) return at({x})(0, 0);
  return at({x, y})(0, 1);
}

Resolvent resolvent_kernel(const DiscretizedOperator& op) { return Resolvent(op); }

double correlation(const KernelSpec& spec, const std::vector<double>& points) {
  if (points.empty()) return 1.0;
  const KernelEvaluator k(spec);
  const auto m = k.matrix(points);
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd mat(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) mat(i, j) = m[i][j];
  return mat.partialPivLu().determinant();
}

double fdd_pi(const DiscretizedOperator& op, const std::vector<double>& points) {
  for (double x : points)
    if (!op.region().contains(x)) throw DomainError("fdd_pi: point outside the region");
  const Resolvent resolvent(op);
  const double det = gap_probability(op);
  if (points.empty()) return det;
  return det * resolvent.at(points).partialPivLu().determinant();
}

double whittaker_tail_trace(const kernels::SpectralParams& params, double T) {
  static const auto rule = specfun::gauss_laguerre(32);
  const kernels::WhittakerKernel k(params);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double s = rule.nodes[i];
    sum += rule.weights[i] * std::exp(s) * k.diagonal(T + s);
  }
  return sum;
}

Region alpha1_region(const kernels::SpectralParams& params, double tau, const Alpha1Options& opts) {
  if (!(tau > 0.0)) throw DomainError("alpha1_cdf: tau must be positive");
  double T = std::max(2.0 * tau, tau + 8.0);
  double bound = whittaker_tail_trace(params, T);
  while (!(bound < opts.tail_tol)) {
    T += std::max(4.0, 0.25 * T);
    if (T > opts.max_truncation) {
      throw TruncationError("alpha1_cdf: tail trace bound not reached below the truncation cap");
    }
    bound = whittaker_tail_trace(params, T);
  }
  // Panels double in length from tau, capped at width 4.
  std::vector<Interval> panels;
  double a = tau;
  while (a < T) {
    const double b = std::min(T, std::min(2.0 * a, a + 4.0));
    panels.push_back({a, b});
    a = b;
  }
  Region region = Region::from_intervals(std::move(panels));
  region.truncation = T;
  region.tail_bound = bound;
  return region;
}

Alpha1Result alpha1_cdf(const kernels::SpectralParams& params, double tau, const Alpha1Options& opts) {
  if (!(tau > 0.0)) throw DomainError("alpha1_cdf: tau must be positive");
  Alpha1Result result;
  const double whole = whittaker_tail_trace(params, tau);
  if (whole < opts.tail_tol) {
    // 1 - trace <= Det(1 - K) <= 1 for 0 <= K <= 1.
    result.value = 1.0;
    result.truncation = tau;
    result.tail_bound = whole;
    return result;
  }
  const Region region = alpha1_region(params, tau, opts);
  const auto op = nystrom(KernelSpec::whittaker(params), region, opts.order);
  result.value = gap_probability(op);
  result.truncation = region.truncation;
  result.tail_bound = region.tail_bound;
  result.nodes = op.size();
  result.warnings = op.warnings();
  return result;
}

}  // namespace fermion::operators

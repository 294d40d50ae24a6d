#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "fermion/error.hpp"
#include "fermion/specfun.hpp"

namespace fermion::specfun {

namespace {

// P_n(x) and P_{n-1}(x) by the three-term recurrence.
std::pair<double, double> legendre_pair(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, p0};
}

}  // namespace

QuadratureRule gauss_legendre(int order) {
  if (order < 1) throw DomainError("gauss_legendre: order must be >= 1");
  QuadratureRule rule;
  rule.kind = QuadratureKind::GaussLegendre;
  rule.order = order;
  rule.nodes.assign(order, 0.0);
  rule.weights.assign(order, 0.0);
  if (order == 1) {
    rule.weights[0] = 2.0;
    return rule;
  }

  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [pn, pn1] = legendre_pair(order, x);
      const double dx = pn / (order * (x * pn - pn1) / (x * x - 1.0));
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [pn, pn1] = legendre_pair(order, x);
    const double derivative = order * (x * pn - pn1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

namespace {

// Orthonormal Laguerre recurrence: q_{k+1} = ((2k+1+alpha-x) q_k - sqrt(k(k+alpha)) q_{k-1}) / sqrt((k+1)(k+1+alpha)).
// Returns sum_{k<n} q_k^2 in log form together with q_n and q_n' (common scale factor).
struct LaguerreEval {
  double log_sum_sq;
  double qn;
  double dqn;
};

LaguerreEval orthonormal_laguerre(int n, double alpha, double x) {
  double q_prev = 0.0;
  double dq_prev = 0.0;
  double q = 1.0 / std::sqrt(std::tgamma(alpha + 1.0));
  double dq = 0.0;
  double log_scale = 0.0;
  double sum_sq = 0.0;
  for (int k = 0; k < n; ++k) {
    sum_sq += q * q;
    const double b_k = std::sqrt(k * (k + alpha));
    const double b_next = std::sqrt((k + 1.0) * (k + 1.0 + alpha));
    const double a_k = 2.0 * k + 1.0 + alpha;
    const double q_next = ((a_k - x) * q - b_k * q_prev) / b_next;
    const double dq_next = ((a_k - x) * dq - q - b_k * dq_prev) / b_next;
    q_prev = q;
    dq_prev = dq;
    q = q_next;
    dq = dq_next;
    const double mag = std::max(std::abs(q), std::abs(q_prev));
    if (mag > 1e100) {
      q /= 1e100;
      q_prev /= 1e100;
      dq /= 1e100;
      dq_prev /= 1e100;
      sum_sq /= 1e200;
      log_scale += std::log(1e100);
    }
  }
  return {std::log(sum_sq) + 2.0 * log_scale, q, dq};
}

}  // namespace

QuadratureRule gauss_laguerre(int order, double alpha) {
  if (order < 1) throw DomainError("gauss_laguerre: order must be >= 1");
  if (!(alpha > -1.0)) throw DomainError("gauss_laguerre: alpha must exceed -1");
  QuadratureRule rule;
  rule.kind = QuadratureKind::GaussLaguerre;
  rule.alpha = alpha;
  rule.order = order;

  // Golub-Welsch for starting values, then Newton polish on the orthonormal polynomial.
  Eigen::VectorXd diag(order);
  Eigen::VectorXd sub(std::max(order - 1, 1));
  for (int k = 0; k < order; ++k) diag[k] = 2.0 * k + 1.0 + alpha;
  for (int k = 1; k < order; ++k) sub[k - 1] = std::sqrt(k * (k + alpha));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub.head(std::max(order - 1, 0)), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("gauss_laguerre: eigenvalue solver failed");

  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    double x = solver.eigenvalues()[i];
    for (int iter = 0; iter < 4; ++iter) {
      const auto eval = orthonormal_laguerre(order, alpha, x);
      if (eval.dqn == 0.0) break;
      const double dx = eval.qn / eval.dqn;
      if (!std::isfinite(dx) || std::abs(dx) > 1e-6 * std::max(1.0, x)) break;
      x -= dx;
      if (std::abs(dx) < 1e-16 * std::max(1.0, x)) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = std::exp(-orthonormal_laguerre(order, alpha, x).log_sum_sq);
  }
  return rule;
}

QuadratureRule make_quadrature(QuadratureKind kind, int order, double alpha) {
  switch (kind) {
    case QuadratureKind::GaussLegendre:
      return gauss_legendre(order);
    case QuadratureKind::GaussLaguerre:
      return gauss_laguerre(order, alpha);
  }
  throw DomainError("make_quadrature: unsupported kind");
}

MappedRule map_to_interval(const QuadratureRule& rule, double a, double b) {
  MappedRule mapped;
  mapped.nodes.resize(rule.nodes.size());
  mapped.weights.resize(rule.nodes.size());
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    mapped.nodes[i] = mid + half * rule.nodes[i];
    mapped.weights[i] = half * rule.weights[i];
  }
  return mapped;
}

}  // namespace fermion::specfun

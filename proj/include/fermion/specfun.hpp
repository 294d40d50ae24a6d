#pragma once

#include <complex>
#include <span>
#include <vector>

namespace fermion::specfun {

using cplx = std::complex<double>;

/// Principal branch of log Gamma, continuous off the negative real axis.
/// Throws DomainError at nonpositive integers.
cplx log_gamma(cplx z);

/// psi(z) = Gamma'(z)/Gamma(z). Throws DomainError at nonpositive integers.
cplx digamma(cplx z);

/// Rising factorial (t)_m = t (t+1) ... (t+m-1).
double pochhammer(double t, int m);

/// Whittaker function W_{kappa,mu}(x) for x > 0.
///
/// Evaluated from the Laplace-type integral
///   W = e^{-x/2} x^kappa / Gamma(a) * int_0^inf e^{-t} t^{a-1} (1 + t/x)^{mu+kappa-1/2} dt,
///   a = 1/2 - kappa + mu,
/// after the substitution t = e^u, with the trapezoidal rule on the real line (the integrand is
/// analytic in a strip, so the rule converges geometrically in the step). The sign of mu is
/// chosen so that Re mu >= 0; when Re a < 1 the integral is taken at kappa - n, kappa - n - 1
/// and carried back up with the three-term recurrence in kappa, which is the stable direction
/// for W.
cplx whittaker_w(cplx kappa, cplx mu, double x);

/// W_{kappa - j, mu}(x) for j = 0 .. depth-1, sharing one evaluation of the integral.
std::vector<cplx> whittaker_ladder(cplx kappa, cplx mu, double x, int depth);

/// dW_{kappa,mu}/dx from the recurrence
///   W' = (-1/2 + kappa/x) W_{kappa,mu} + ((1/2-kappa+mu)(1/2-kappa-mu)/x) W_{kappa-1,mu}.
cplx whittaker_w_prime(cplx kappa, cplx mu, double x);

/// True when (x, |kappa|, |mu|) lies in the box where whittaker_w is validated
/// against arbitrary-precision references.
bool whittaker_in_validated_box(cplx kappa, cplx mu, double x);

/// Generalized Laguerre polynomial L_n^alpha(x), L_1^alpha = alpha + 1 - x.
double laguerre(int n, double alpha, double x);

/// All of L_0^alpha(x) .. L_{n}^alpha(x).
std::vector<double> laguerre_sequence(int n, double alpha, double x);

/// Squared norm int_0^inf (L_n^alpha)^2 x^alpha e^{-x} dx = Gamma(n + alpha + 1) / n!.
double laguerre_norm_squared(int n, double alpha);

enum class QuadratureKind { GaussLegendre, GaussLaguerre };

struct QuadratureRule {
  QuadratureKind kind = QuadratureKind::GaussLegendre;
  double alpha = 0.0;  // Laguerre weight exponent: x^alpha e^{-x}
  int order = 0;
  std::vector<double> nodes;    // strictly increasing
  std::vector<double> weights;  // strictly positive

  /// Applies the rule to f (with the weight function implicit for Gauss-Laguerre).
  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

/// Gauss-Legendre on [-1, 1].
QuadratureRule gauss_legendre(int order);

/// Gauss-Laguerre for the weight x^alpha e^{-x} on (0, inf), alpha > -1.
QuadratureRule gauss_laguerre(int order, double alpha = 0.0);

/// Dispatches on kind. Throws DomainError for order < 1.
QuadratureRule make_quadrature(QuadratureKind kind, int order, double alpha = 0.0);

/// Gauss-Legendre nodes and weights mapped affinely to [a, b].
struct MappedRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
MappedRule map_to_interval(const QuadratureRule& rule, double a, double b);

/// Composite Gauss-Legendre integral of f over [a, b] using `panels` equal panels.
template <class F>
double integrate_composite(F&& f, double a, double b, int panels, const QuadratureRule& rule) {
  double sum = 0.0;
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double half = 0.5 * width;
    const double mid = lo + half;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += half * rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return sum;
}

inline constexpr int kDefaultLegendreOrder = 64;
inline constexpr int kDefaultLaguerreOrder = 128;

}  // namespace fermion::specfun

#include "fermion/sturm.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fermion/error.hpp"

namespace fermion::sturm {

using kernels::StationaryVariant;
using std::numbers::pi;

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

void check_tau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("sturm: tau must be positive");
}

}  // namespace

SLCoefficients sl_params_sine(double tau) {
  check_tau(tau);
  SLCoefficients sl;
  sl.p = [tau](double x) { return x * x - tau * tau; };
  sl.dp = [](double x) { return 2.0 * x; };
  sl.q = [](double x) { return pi * pi * x * x; };
  sl.lo = -tau;
  sl.hi = tau;
  sl.tag = "sine(tau=" + fmt(tau) + ")";
  return sl;
}

SLCoefficients sl_params_stationary(const kernels::TailConstants& c, double tau) {
  check_tau(tau);
  const double A = c.A, B = c.B;
  const double sign = c.variant == StationaryVariant::ShSh ? -1.0 : 1.0;
  SLCoefficients sl;
  if (B == 0.0) {
    sl.p = [tau](double x) { return x * x - tau * tau; };
    sl.dp = [](double x) { return 2.0 * x; };
    sl.q = [A, sign](double x) { return sign * A * A * x * x; };
  } else {
    // sh^2(Bx) - sh^2(B tau) = sh(B(x - tau)) sh(B(x + tau)), exact zero at the endpoints.
    sl.p = [B, tau](double x) { return std::sinh(B * (x - tau)) * std::sinh(B * (x + tau)) / (B * B); };
    sl.dp = [B](double x) { return std::sinh(2.0 * B * x) / B; };
    sl.q = [A, B, sign](double x) {
      const double s = std::sinh(B * x);
      return (B * B + sign * A * A) * s * s / (B * B);
    };
  }
  sl.lo = -tau;
  sl.hi = tau;
  sl.tag = "stationary(" + kernels::to_string(c.variant) + ",A=" + fmt(A) + ",B=" + fmt(B) + ",tau=" + fmt(tau) + ")";
  return sl;
}

SLCoefficients sl_params_whittaker(const kernels::SpectralParams& params, double tau) {
  check_tau(tau);
  const double a = params.a.real(), t = params.t_real();
  SLCoefficients sl;
  sl.p = [tau](double x) { return x * (x - tau); };
  sl.dp = [tau](double x) { return 2.0 * x - tau; };
  sl.q = [a, t, tau](double x) {
    const double m = a - 0.5 * x;
    return -(m * m - t) * (x - tau) / x;
  };
  sl.lo = tau;
  sl.hi = std::numeric_limits<double>::infinity();
  std::ostringstream tag;
  tag << "whittaker(z=" << params.z << ",z'=" << params.z_prime << ",tau=" << tau << ")";
  sl.tag = tag.str();
  return sl;
}

SLCoefficients perturb_q(const SLCoefficients& sl, std::function<double(double)> delta, std::string tag_suffix) {
  SLCoefficients out = sl;
  out.q = [q = sl.q, delta = std::move(delta)](double x) { return q(x) + delta(x); };
  out.tag += tag_suffix;
  return out;
}

namespace {

struct Derivs {
  double f0, f1, f2;
};

// Fourth-order central differences of g at 0 with step h.
template <class G>
Derivs central(const G& g, double h) {
  const double m2 = g(-2.0 * h), m1 = g(-h), c = g(0.0), p1 = g(h), p2 = g(2.0 * h);
  return {c, (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h), (-p2 + 16.0 * p1 - 30.0 * c + 16.0 * m1 - m2) / (12.0 * h * h)};
}

template <class G>
double apply_d(const SLCoefficients& sl, double x, const G& g, const FdOptions& opts) {
  const double h = opts.step_factor * std::max(1.0, std::abs(x));
  const auto op = [&](double step) {
    const Derivs d = central(g, step);
    return sl.p(x) * d.f2 + sl.dp(x) * d.f1 + sl.q(x) * d.f0;
  };
  if (!opts.richardson) return op(h);
  return (16.0 * op(0.5 * h) - op(h)) / 15.0;
}

}  // namespace

CommutationResult commutation_residual(const kernels::KernelSpec& spec, const SLCoefficients& sl, const std::vector<double>& xs,
                                       const std::vector<double>& ys, const FdOptions& opts) {
  if (!(opts.step_factor > 0.0)) throw DomainError("commutation_residual: step_factor must be positive");
  const kernels::KernelEvaluator K(spec);
  const auto check = [&](double x) {
    const double reach = 2.0 * opts.step_factor * std::max(1.0, std::abs(x));
    if (!sl.interior(x - reach) || !sl.interior(x + reach) || !spec.domain.contains(x - reach) ||
        !spec.domain.contains(x + reach))
      throw DomainError("commutation_residual: stencil at " + fmt(x) + " leaves the open domain");
  };
  for (double x : xs) check(x);
  for (double y : ys) check(y);

  CommutationResult result;
  for (double x : xs) {
    for (double y : ys) {
      if (std::abs(x - y) < opts.diagonal_band) continue;
      const double dx = apply_d(sl, x, [&](double s) { return K(x + s, y); }, opts);
      const double dy = apply_d(sl, y, [&](double s) { return K(x, y + s); }, opts);
      const double r = std::abs(dx - dy) / (1.0 + std::abs(dx));
      ++result.evaluated;
      if (r > result.residual) {
        result.residual = r;
        result.at_x = x;
        result.at_y = y;
      }
    }
  }
  return result;
}

std::vector<double> interior_grid(double lo, double hi, int n, double margin) {
  if (n < 1 || !(hi - lo > 2.0 * margin)) throw DomainError("interior_grid: empty range");
  std::vector<double> out(n);
  const double a = lo + margin, b = hi - margin;
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? 0.5 * (a + b) : a + (b - a) * i / (n - 1);
  return out;
}

}  // namespace fermion::sturm

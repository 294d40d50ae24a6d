#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fermion/kernels.hpp"

namespace fermion::sturm {

/// D f = (p f')' + q f on (lo, hi), with p' supplied in closed form.
struct SLCoefficients {
  std::function<double(double)> p;
  std::function<double(double)> dp;
  std::function<double(double)> q;
  double lo = 0.0;
  double hi = 0.0;
  std::string tag;  // "sine(tau=..)", "stationary(..)", "whittaker(..)"

  bool interior(double x) const { return x > lo && x < hi; }
};

/// p = x^2 - tau^2, q = pi^2 x^2 on [-tau, tau].
SLCoefficients sl_params_sine(double tau);

/// p = (sh^2(Bx) - sh^2(B tau)) / B^2, q = (B^2 +- A^2) sh^2(Bx) / B^2 on [-tau, tau]; plus for the
/// sin-type variants, minus for sh/sh. B = 0 is the continuous limit p = x^2 - tau^2, q = A^2 x^2.
SLCoefficients sl_params_stationary(const kernels::TailConstants& c, double tau);

/// p = x (x - tau), q = -((a - x/2)^2 - t)(x - tau) / x on (tau, inf).
SLCoefficients sl_params_whittaker(const kernels::SpectralParams& params, double tau);

/// Copy of `sl` with q replaced by q + delta.
SLCoefficients perturb_q(const SLCoefficients& sl, std::function<double(double)> delta, std::string tag_suffix = "+dq");

struct FdOptions {
  double step_factor = 1e-4;  // h = step_factor * max(1, |x|)
  bool richardson = true;     // (16 D(h/2) - D(h)) / 15
  double diagonal_band = 1e-2;
};

struct CommutationResult {
  double residual = 0.0;  // max |DxK - DyK| / (1 + |DxK|)
  double at_x = 0.0, at_y = 0.0;
  std::size_t evaluated = 0;  // grid pairs outside the diagonal band
};

/// Evaluates on all pairs (x, y) from xs x ys with |x - y| >= diagonal_band. Throws DomainError when a
/// stencil leaves the open interval of `sl` or the kernel domain.
CommutationResult commutation_residual(const kernels::KernelSpec& spec, const SLCoefficients& sl, const std::vector<double>& xs,
                                       const std::vector<double>& ys, const FdOptions& opts = {});

/// n equally spaced points strictly inside (lo, hi), avoiding the endpoints by `margin`.
std::vector<double> interior_grid(double lo, double hi, int n, double margin);

}  // namespace fermion::sturm

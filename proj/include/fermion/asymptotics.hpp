#pragma once

#include <functional>
#include <vector>

#include "fermion/kernels.hpp"
#include "fermion/sampler.hpp"

namespace fermion::asymptotics {

/// E(sum alpha_i) in closed form. At z = z' the formula is 0/0 and the value is obtained by
/// Richardson extrapolation of symmetric offsets z' = z +- delta.
double expected_alpha_sum(const kernels::SpectralParams& params);
/// E(sum beta_i); equals expected_alpha_sum at (-z, -z').
double expected_beta_sum(const kernels::SpectralParams& params);

/// (1/t) int_0^inf x K(x,x) dx for the Whittaker kernel, by the trapezoid rule in log x.
double alpha_sum_from_kernel(const kernels::SpectralParams& params, double step = 0.05);

enum class TailMode { Logarithmic, Exact };

/// Maps x in (0, 1] to xi - tau, where xi = -C log x (logarithmic) or xi = int_x^1 rho1 (exact).
struct TailTransform {
  TailMode mode = TailMode::Logarithmic;
  double C = 1.0;
  double tau = 0.0;
  std::function<double(double)> rho1;  // exact mode only

  double operator()(double x) const;
};

/// Mapped points sorted ascending, region [-tau, inf). Throws DomainError for points outside (0, 1].
sampler::PointConfiguration tail_transform_apply(const TailTransform& tt, const sampler::PointConfiguration& config);

/// t (1 - x)^{t-1} / x.
std::function<double(double)> poisson_dirichlet_rho1(double t);

struct TailDeviation {
  double scale = 0.0;
  double deviation = 0.0;  // sup over the grid
};

/// For each scale r, compares (x1 x2 / C^2) rho2(x1, x2) at x = r e^{-u/C} with 1 - k(u - v)^2 over
/// u, v in `grid` (default 1, 1.25, ..., 3).
std::vector<TailDeviation> tail_convergence_check(const kernels::SpectralParams& params, const std::vector<double>& scales,
                                                  std::vector<double> grid = {});

struct LlnRow {
  double tau = 0.0;
  double mean = 0.0;      // of N_tau / tau
  double variance = 0.0;  // of N_tau / tau across configurations
  double stderr_ = 0.0;
};

/// N_tau counts points in [0, tau].
std::vector<LlnRow> counting_lln(const std::vector<sampler::PointConfiguration>& configs, const std::vector<double>& taus);

/// Stationary constants of k(zeta) = sh((z - z') zeta / 2) / ((z - z') sh(zeta / 2)).
kernels::TailConstants lln_kernel(const kernels::SpectralParams& params);

/// int int_{[0,tau]^2} k(xi - eta)^2 = 2 int_0^tau (tau - zeta) k(zeta)^2 d zeta.
double k_squared_integral(const kernels::TailConstants& c, double tau);

struct DecayRow {
  int j = 0;
  double mean = 0.0;      // mean of x_j^{1/j}
  double stderr_ = 0.0;
  double log_rate = 0.0;  // exp(mean(log x_j) / j)
};

/// x_j is the j-th largest point. Throws DomainError when a configuration has fewer than j_max points.
std::vector<DecayRow> decay_rate_estimate(const std::vector<sampler::PointConfiguration>& configs, int j_max);

}  // namespace fermion::asymptotics

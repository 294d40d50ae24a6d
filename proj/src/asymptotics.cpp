#include "fermion/asymptotics.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "fermion/error.hpp"

namespace fermion::asymptotics {

using kernels::SpectralParams;
using kernels::TailConstants;
using specfun::cplx;
using std::numbers::pi;

namespace {

cplx closed_form(cplx z, cplx zp) {
  const cplx d = z - zp;
  const cplx bracket = d * (z + zp - 1.0) / (2.0 * z * zp) + specfun::digamma(-zp) - specfun::digamma(-z);
  return std::sin(pi * z) * std::sin(pi * zp) / (pi * std::sin(pi * d)) * bracket;
}

constexpr double kIntersectionDelta = 1e-3;

double symmetric_average(cplx z, double delta) {
  return 0.5 * (closed_form(z, z + delta).real() + closed_form(z, z - delta).real());
}

double expectation(cplx z, cplx zp, kernels::Series series) {
  if (series == kernels::Series::Intersection) {
    const double h = kIntersectionDelta;
    return (4.0 * symmetric_average(z, 0.5 * h) - symmetric_average(z, h)) / 3.0;
  }
  return closed_form(z, zp).real();
}

}  // namespace

double expected_alpha_sum(const SpectralParams& params) {
  return expectation(params.z, params.z_prime, params.series);
}

double expected_beta_sum(const SpectralParams& params) {
  return expectation(-params.z, -params.z_prime, params.series);
}

double alpha_sum_from_kernel(const SpectralParams& params, double step) {
  // x^2 K(x,x) -> C x as x -> 0 and decays like e^{-x}; [-40, log 60] in u = log x is enough.
  const kernels::WhittakerKernel K(params);
  const double u_lo = -40.0, u_hi = std::log(60.0);
  const int n = static_cast<int>(std::ceil((u_hi - u_lo) / step));
  const double h = (u_hi - u_lo) / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = std::exp(u_lo + i * h);
    const double f = x * x * K.diagonal(x);
    sum += (i == 0 || i == n) ? 0.5 * f : f;
  }
  return sum * h / params.t_real();
}

double TailTransform::operator()(double x) const {
  if (!(x > 0.0 && x <= 1.0)) throw DomainError("tail transform: point outside (0, 1]");
  if (mode == TailMode::Logarithmic) return -C * std::log(x) - tau;
  if (!rho1) throw DomainError("tail transform: exact mode needs rho1");
  if (x == 1.0) return -tau;
  // int_x^1 rho1(y) dy with y = e^s.
  boost::math::quadrature::tanh_sinh<double> integrator;
  const auto f = [&](double s) {
    const double y = std::exp(s);
    return rho1(y) * y;
  };
  return integrator.integrate(f, std::log(x), 0.0, 1e-12) - tau;
}

sampler::PointConfiguration tail_transform_apply(const TailTransform& tt, const sampler::PointConfiguration& config) {
  sampler::PointConfiguration out;
  out.seed = config.seed;
  out.points.reserve(config.points.size());
  for (double x : config.points) out.points.push_back(tt(x));
  std::sort(out.points.begin(), out.points.end());
  double hi = out.points.empty() ? -tt.tau : out.points.back();
  if (!config.region.is_empty() && config.region.intervals.front().a > 0.0)
    hi = std::max(hi, tt(std::min(1.0, config.region.intervals.front().a)));
  if (!(hi > -tt.tau)) hi = std::nextafter(-tt.tau, HUGE_VAL);
  out.region = operators::Region::interval(-tt.tau, hi);
  out.region.truncation = out.region.intervals.front().b;
  return out;
}

std::function<double(double)> poisson_dirichlet_rho1(double t) {
  if (!(t > 0.0)) throw DomainError("poisson_dirichlet_rho1: t must be positive");
  return [t](double x) { return t * std::pow(1.0 - x, t - 1.0) / x; };
}

std::vector<TailDeviation> tail_convergence_check(const SpectralParams& params, const std::vector<double>& scales,
                                                  std::vector<double> grid) {
  if (grid.empty())
    for (int i = 0; i <= 8; ++i) grid.push_back(1.0 + 0.25 * i);
  const kernels::WhittakerKernel K(params);
  const TailConstants c = kernels::tail_constants(params);
  std::vector<TailDeviation> out;
  for (double r : scales) {
    std::vector<kernels::WhittakerKernel::Point> pts;
    for (double u : grid) pts.push_back(K.point(r * std::exp(-u / c.C)));
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (std::size_t j = 0; j < grid.size(); ++j) {
        const double x1 = pts[i].x, x2 = pts[j].x;
        const double k12 = K(pts[i], pts[j]);
        const double rho2 = K.diagonal(pts[i]) * K.diagonal(pts[j]) - k12 * k12;
        const double k = kernels::stationary_kernel_of_difference(c, grid[i] - grid[j]);
        worst = std::max(worst, std::abs(x1 * x2 / (c.C * c.C) * rho2 - (1.0 - k * k)));
      }
    }
    out.push_back({r, worst});
  }
  return out;
}

std::vector<LlnRow> counting_lln(const std::vector<sampler::PointConfiguration>& configs, const std::vector<double>& taus) {
  if (configs.empty()) throw DomainError("counting_lln: no configurations");
  const double n = static_cast<double>(configs.size());
  std::vector<LlnRow> out;
  for (double tau : taus) {
    if (!(tau > 0.0)) throw DomainError("counting_lln: tau must be positive");
    double s = 0.0, s2 = 0.0;
    for (const auto& c : configs) {
      const auto count = std::count_if(c.points.begin(), c.points.end(), [&](double x) { return x >= 0.0 && x <= tau; });
      const double v = count / tau;
      s += v;
      s2 += v * v;
    }
    LlnRow row;
    row.tau = tau;
    row.mean = s / n;
    row.variance = n > 1 ? (s2 - n * row.mean * row.mean) / (n - 1) : 0.0;
    row.stderr_ = std::sqrt(std::max(row.variance, 0.0) / n);
    out.push_back(row);
  }
  return out;
}

TailConstants lln_kernel(const SpectralParams& params) {
  const cplx d = params.z - params.z_prime;
  switch (params.series) {
    case kernels::Series::Principal:
      return kernels::make_tail_constants(kernels::StationaryVariant::SinSh, 0.5 * std::abs(d.imag()), 0.5);
    case kernels::Series::Complementary:
      return kernels::make_tail_constants(kernels::StationaryVariant::ShSh, 0.5 * std::abs(d.real()), 0.5);
    case kernels::Series::Intersection:
      break;
  }
  return kernels::make_tail_constants(kernels::StationaryVariant::RatioLimit, 0.0, 0.5);
}

double k_squared_integral(const TailConstants& c, double tau) {
  if (!(tau > 0.0)) throw DomainError("k_squared_integral: tau must be positive");
  static const auto rule = specfun::gauss_legendre(20);
  const auto f = [&](double zeta) {
    const double k = kernels::stationary_kernel_of_difference(c, zeta);
    return (tau - zeta) * k * k;
  };
  return 2.0 * specfun::integrate_composite(f, 0.0, tau, static_cast<int>(std::ceil(tau)), rule);
}

std::vector<DecayRow> decay_rate_estimate(const std::vector<sampler::PointConfiguration>& configs, int j_max) {
  if (configs.empty() || j_max < 1) throw DomainError("decay_rate_estimate: need configurations and j_max >= 1");
  std::vector<std::vector<double>> top;
  top.reserve(configs.size());
  for (const auto& c : configs) {
    if (static_cast<int>(c.points.size()) < j_max) throw DomainError("decay_rate_estimate: insufficient points");
    auto& v = top.emplace_back(c.points);
    std::partial_sort(v.begin(), v.begin() + j_max, v.end(), std::greater<>());
    v.resize(j_max);
    if (!(v.back() > 0.0)) throw DomainError("decay_rate_estimate: points must be positive");
  }
  const double n = static_cast<double>(configs.size());
  std::vector<DecayRow> out;
  for (int j = 1; j <= j_max; ++j) {
    double s = 0.0, s2 = 0.0, slog = 0.0;
    for (const auto& c : top) {
      const double v = std::pow(c[j - 1], 1.0 / j);
      s += v;
      s2 += v * v;
      slog += std::log(c[j - 1]);
    }
    DecayRow row;
    row.j = j;
    row.mean = s / n;
    const double var = n > 1 ? std::max(0.0, (s2 - n * row.mean * row.mean) / (n - 1)) : 0.0;
    row.stderr_ = std::sqrt(var / n);
    row.log_rate = std::exp(slog / n / j);
    out.push_back(row);
  }
  return out;
}

}  // namespace fermion::asymptotics

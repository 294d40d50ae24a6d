#include "fermion/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "fermion/error.hpp"

namespace fermion::specfun {

namespace {

constexpr double kPi = std::numbers::pi;

// B_{2k} for k = 1..8.
constexpr std::array<double, 8> kBernoulli{1.0 / 6.0,       -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0,
                                           5.0 / 66.0,      -691.0 / 2730.0, 7.0 / 6.0, -3617.0 / 510.0};

// Recurrence shifts move the argument to Re >= this before using asymptotic series.
constexpr double kAsymptoticThreshold = 15.0;

bool is_nonpositive_integer(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::round(z.real());
}

cplx stirling_log_gamma(cplx w) {
  cplx series = 0.0;
  const cplx inv = 1.0 / w;
  const cplx inv2 = inv * inv;
  cplx power = inv;
  for (std::size_t k = 1; k <= kBernoulli.size(); ++k) {
    const double two_k = 2.0 * static_cast<double>(k);
    series += kBernoulli[k - 1] / (two_k * (two_k - 1.0)) * power;
    power *= inv2;
  }
  return (w - 0.5) * std::log(w) - w + 0.5 * std::log(2.0 * kPi) + series;
}

cplx asymptotic_digamma(cplx w) {
  cplx series = 0.0;
  const cplx inv2 = 1.0 / (w * w);
  cplx power = inv2;
  for (std::size_t k = 1; k <= kBernoulli.size(); ++k) {
    series += kBernoulli[k - 1] / (2.0 * static_cast<double>(k)) * power;
    power *= inv2;
  }
  return std::log(w) - 0.5 / w - series;
}

// Canonical sign of mu (Re mu >= 0, ties broken by Im mu >= 0); W is even in mu.
cplx canonical_mu(cplx mu) {
  if (mu.real() < 0.0 || (mu.real() == 0.0 && mu.imag() < 0.0)) return -mu;
  return mu;
}

// W_{kappa,mu}(x) from the integral representation; requires Re(1/2 - kappa + mu) >= ~1.
cplx whittaker_integral(cplx kappa, cplx mu, double x) {
  const cplx a = 0.5 - kappa + mu;
  const cplx c = mu + kappa - 0.5;
  // Trapezoid step in u = log t. The integrand is analytic for |Im u| < pi/2, so the error
  // is ~exp(-pi^2/h) up to a growth factor exp((|Im a| + |Im c|) pi/2).
  constexpr double step = 0.125;
  constexpr double negligible = 46.0;  // e^-46 ~ 1e-20 relative
  constexpr int max_steps = 40000;

  const auto exponent = [&](double u) {
    const double t = std::exp(u);
    return cplx(-t, 0.0) + a * u + c * std::log1p(t / x);
  };

  const double upper_monotone = 1.0 + std::log(2.0 + std::abs(a.real()) + std::abs(c.real()));
  const double lower_monotone = std::min(std::log(x), 0.0) - 1.0;

  std::vector<cplx> terms;
  terms.reserve(1024);
  double max_re = -std::numeric_limits<double>::infinity();

  const double start = 0.0;
  for (int k = 0; k < max_steps; ++k) {
    const double u = start + k * step;
    const cplx e = exponent(u);
    max_re = std::max(max_re, e.real());
    terms.push_back(e);
    if (u > upper_monotone && e.real() < max_re - negligible) break;
    if (k + 1 == max_steps) throw NumericalError("whittaker_w: upper tail of integral did not decay");
  }
  for (int k = 1; k < max_steps; ++k) {
    const double u = start - k * step;
    const cplx e = exponent(u);
    max_re = std::max(max_re, e.real());
    terms.push_back(e);
    if (u < lower_monotone && e.real() < max_re - negligible) break;
    if (k + 1 == max_steps) throw NumericalError("whittaker_w: lower tail of integral did not decay");
  }

  cplx sum = 0.0;
  for (const cplx& e : terms) sum += std::exp(e - max_re);
  const cplx log_prefactor = -0.5 * x + kappa * std::log(x) - log_gamma(a) + max_re;
  return std::exp(log_prefactor) * (step * sum);
}

}  // namespace

cplx log_gamma(cplx z) {
  if (is_nonpositive_integer(z)) throw DomainError("log_gamma: pole at nonpositive integer");
  if (z.imag() == 0.0 && z.real() > 0.0) return {std::lgamma(z.real()), 0.0};
  cplx shift = 0.0;
  cplx w = z;
  while (w.real() < kAsymptoticThreshold) {
    shift += std::log(w);
    w += 1.0;
  }
  return stirling_log_gamma(w) - shift;
}

cplx digamma(cplx z) {
  if (is_nonpositive_integer(z)) throw DomainError("digamma: pole at nonpositive integer");
  cplx shift = 0.0;
  cplx w = z;
  while (w.real() < kAsymptoticThreshold) {
    shift += 1.0 / w;
    w += 1.0;
  }
  return asymptotic_digamma(w) - shift;
}

double pochhammer(double t, int m) {
  double value = 1.0;
  for (int k = 0; k < m; ++k) value *= t + k;
  return value;
}

std::vector<cplx> whittaker_ladder(cplx kappa, cplx mu, double x, int depth) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("whittaker_w: x must be positive and finite");
  if (depth < 1) throw DomainError("whittaker_ladder: depth must be >= 1");
  const cplx m = canonical_mu(mu);

  // Integrals are taken at rungs kappa - n and kappa - n - 1 with Re(1/2 - (kappa - n) + m) >= 1.
  const double needed = std::ceil((kappa - m).real() + 0.5);
  const int n = std::max({0, static_cast<int>(needed), depth - 2});

  std::vector<cplx> rungs(static_cast<std::size_t>(n) + 2);  // rungs[j] = W_{kappa - j}
  rungs[n] = whittaker_integral(kappa - static_cast<double>(n), m, x);
  rungs[n + 1] = whittaker_integral(kappa - static_cast<double>(n + 1), m, x);
  for (int j = n; j >= 1; --j) {
    const cplx k = kappa - static_cast<double>(j);
    rungs[j - 1] = (x - 2.0 * k) * rungs[j] - ((k - 0.5) * (k - 0.5) - m * m) * rungs[j + 1];
  }
  rungs.resize(static_cast<std::size_t>(depth));
  return rungs;
}

cplx whittaker_w(cplx kappa, cplx mu, double x) { return whittaker_ladder(kappa, mu, x, 1)[0]; }

cplx whittaker_w_prime(cplx kappa, cplx mu, double x) {
  const auto w = whittaker_ladder(kappa, mu, x, 2);
  return (-0.5 + kappa / x) * w[0] + ((0.5 - kappa + mu) * (0.5 - kappa - mu) / x) * w[1];
}

bool whittaker_in_validated_box(cplx kappa, cplx mu, double x) {
  return x >= 1e-6 && x <= 50.0 && std::abs(kappa) <= 5.0 && std::abs(mu) <= 5.0;
}

std::vector<double> laguerre_sequence(int n, double alpha, double x) {
  if (n < 0) throw DomainError("laguerre: degree must be nonnegative");
  std::vector<double> values(static_cast<std::size_t>(n) + 1);
  values[0] = 1.0;
  if (n >= 1) values[1] = 1.0 + alpha - x;
  for (int k = 1; k < n; ++k) {
    values[k + 1] = ((2.0 * k + 1.0 + alpha - x) * values[k] - (k + alpha) * values[k - 1]) / (k + 1.0);
  }
  return values;
}

double laguerre(int n, double alpha, double x) { return laguerre_sequence(n, alpha, x).back(); }

double laguerre_norm_squared(int n, double alpha) {
  return std::exp(std::lgamma(n + alpha + 1.0) - std::lgamma(n + 1.0));
}

}  // namespace fermion::specfun

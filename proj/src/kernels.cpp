#include "fermion/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fermion/error.hpp"

namespace fermion::kernels {

namespace {

constexpr double kPi = std::numbers::pi;

// sin(x)/x, sh(x)/x, x/sh(x), tanh(x)/x, tan(x)/x with series near zero.
double sinc(double x) {
  if (std::abs(x) < 1e-3) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

double shc(double x) {
  if (std::abs(x) < 1e-3) {
    const double x2 = x * x;
    return 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sinh(x) / x;
}

double inv_shc(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-3) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + 7.0 * x2 * x2 / 360.0;
  }
  if (ax > 30.0) return 2.0 * ax * std::exp(-ax) / (1.0 - std::exp(-2.0 * ax));
  return x / std::sinh(x);
}

double thc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 3.0;
  return std::tanh(x) / x;
}

double tanc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 + x * x / 3.0;
  return std::tan(x) / x;
}

bool leq(double lhs, double rhs) { return lhs <= rhs + 1e-12 * std::abs(rhs) + 1e-15; }

bool is_integer(double v, double tol) { return std::abs(v - std::round(v)) <= tol; }

}  // namespace

std::string to_string(Series s) {
  switch (s) {
    case Series::Principal:
      return "principal";
    case Series::Complementary:
      return "complementary";
    case Series::Intersection:
      return "intersection";
  }
  return "unknown";
}

std::string to_string(StationaryVariant v) {
  switch (v) {
    case StationaryVariant::SinSh:
      return "sinsh";
    case StationaryVariant::ShSh:
      return "shsh";
    case StationaryVariant::ShLimit:
      return "shlimit";
    case StationaryVariant::RatioLimit:
      return "ratiolimit";
  }
  return "unknown";
}

SpectralParams classify_series(cplx z, cplx z_prime, double tol) {
  SpectralParams p;
  const bool z_real = std::abs(z.imag()) <= tol;
  const bool zp_real = std::abs(z_prime.imag()) <= tol;
  if (!z_real || !zp_real) {
    if (z_real || zp_real || std::abs(z_prime - std::conj(z)) > tol * std::max(1.0, std::abs(z))) {
      throw DomainError("classify_series: complex parameters must satisfy z' = conj(z)");
    }
    p.z = z;
    p.z_prime = std::conj(z);
    p.series = Series::Principal;
  } else {
    const double x = z.real();
    const double xp = z_prime.real();
    if (is_integer(x, tol) || is_integer(xp, tol)) {
      throw DomainError("classify_series: z and z' must be distinct from 0, +-1, +-2, ...");
    }
    if (std::abs(x - xp) <= tol * std::max(1.0, std::abs(x))) {
      p.z = p.z_prime = x;
      p.series = Series::Intersection;
    } else if (std::floor(x) == std::floor(xp)) {
      p.z = x;
      p.z_prime = xp;
      p.series = Series::Complementary;
    } else {
      throw DomainError("classify_series: real z != z' must lie in one interval (m, m+1)");
    }
  }
  p.t = p.z * p.z_prime;
  p.a = 0.5 * (p.z + p.z_prime);
  p.kappa = 0.5 * (p.z + p.z_prime + 1.0);
  p.mu = 0.5 * (p.z - p.z_prime);
  return p;
}

TailConstants make_tail_constants(StationaryVariant variant, double A, double B) {
  if (std::isnan(A) || std::isnan(B)) throw DomainError("tail constants: NaN");
  TailConstants c;
  c.variant = variant;
  c.A = std::abs(A);
  c.B = variant == StationaryVariant::ShLimit ? 0.0 : B;
  if (variant == StationaryVariant::RatioLimit) c.A = 0.0;
  if (variant != StationaryVariant::ShLimit && !(c.B > 0.0)) throw DomainError("tail constants: B must be positive");
  if (variant == StationaryVariant::ShLimit && !(c.A > 0.0)) throw DomainError("tail constants: A must be positive");
  c.C = c.B > 0.0 ? 1.0 / (2.0 * c.B) : 0.0;
  return c;
}

TailConstants tail_constants(const SpectralParams& params) {
  TailConstants c;
  if (params.series == Series::Intersection) {
    const double s = std::sin(kPi * params.z.real());
    c.variant = StationaryVariant::RatioLimit;
    c.A = 0.0;
    c.B = kPi * kPi / (2.0 * s * s);
    c.C = s * s / (kPi * kPi);
    return c;
  }
  const cplx d = params.z - params.z_prime;
  const cplx sines = std::sin(kPi * params.z) * std::sin(kPi * params.z_prime);
  const cplx sin_d = std::sin(kPi * d);
  c.B = (kPi * sin_d / (2.0 * d * sines)).real();
  c.C = (d * sines / (kPi * sin_d)).real();
  c.A = std::abs(d) * c.B;
  c.variant = params.series == Series::Principal ? StationaryVariant::SinSh : StationaryVariant::ShSh;
  return c;
}

double stationary_kernel_of_difference(const TailConstants& c, double d) {
  const double A = std::abs(c.A);  // even in A
  const double B = c.B;
  switch (c.variant) {
    case StationaryVariant::SinSh:
      return sinc(A * d) * inv_shc(B * d);
    case StationaryVariant::ShSh: {
      const double ad = std::abs(d);
      if (A > 0.0 && std::max(A, B) * ad > 30.0) {
        return (B / A) * std::exp((A - B) * ad) * (-std::expm1(-2.0 * A * ad)) / (-std::expm1(-2.0 * B * ad));
      }
      return shc(A * d) * inv_shc(B * d);
    }
    case StationaryVariant::ShLimit:
      return sinc(A * d);
    case StationaryVariant::RatioLimit:
      return inv_shc(B * d);
  }
  return 0.0;
}

double stationary_kernel(const TailConstants& c, double xi, double eta) {
  return stationary_kernel_of_difference(c, xi - eta);
}

double sine_kernel(double x, double y) { return sinc(kPi * (x - y)); }

double fourier_khat(const TailConstants& c, double y) {
  const double A = std::abs(c.A);  // even in A
  const double B = c.B;
  switch (c.variant) {
    case StationaryVariant::SinSh: {
      // (pi^2/B) shc(s) / (ch s + ch u), scaled by e^{-max(s,u)} when large.
      const double s = kPi * A / B;
      const double u = kPi * std::abs(y) / B;
      const double m = std::max(s, u);
      if (m < 20.0) return (kPi * kPi / B) * shc(s) / (std::cosh(s) + std::cosh(u));
      const double num = (std::exp(s - m) - std::exp(-s - m)) / (2.0 * s);
      const double den = 0.5 * (std::exp(s - m) + std::exp(-s - m) + std::exp(u - m) + std::exp(-u - m));
      return (kPi * kPi / B) * num / den;
    }
    case StationaryVariant::ShSh: {
      if (!(A < B)) throw DomainError("fourier_khat: sh/sh transform requires |A| < B");
      const double s = kPi * A / B;
      const double u = kPi * std::abs(y) / B;
      return (kPi * kPi / B) * sinc(s) / (std::cos(s) + std::cosh(u));
    }
    case StationaryVariant::ShLimit: {
      const double ay = std::abs(y);
      if (ay < A) return kPi / A;
      if (ay == A) return 0.5 * kPi / A;
      return 0.0;
    }
    case StationaryVariant::RatioLimit: {
      const double e = std::exp(-kPi * std::abs(y) / B);
      return (kPi * kPi / B) * 2.0 * e / ((1.0 + e) * (1.0 + e));
    }
  }
  return 0.0;
}

Admissibility admissible(const TailConstants& c) {
  const double A = std::abs(c.A);  // even in A
  const double B = c.B;
  switch (c.variant) {
    case StationaryVariant::SinSh: {
      if (!(B > 0.0)) return {false, "B > 0 required"};
      // th(pi A / 2B) <= A / pi, written so that A -> 0 reduces to B >= pi^2/2.
      const double lhs = (kPi * kPi / (2.0 * B)) * thc(kPi * A / (2.0 * B));
      if (leq(lhs, 1.0)) return {true, ""};
      return {false, "th(π|A|/2B) ≤ |A|/π required"};
    }
    case StationaryVariant::ShSh: {
      if (!(B > 0.0)) return {false, "B > 0 required"};
      if (!(A < B)) return {false, "|A|/B < 1 required"};
      const double lhs = (kPi * kPi / (2.0 * B)) * tanc(kPi * A / (2.0 * B));
      if (leq(lhs, 1.0)) return {true, ""};
      return {false, "tg(π|A|/2B) ≤ |A|/π required"};
    }
    case StationaryVariant::ShLimit:
      if (leq(kPi, A)) return {true, ""};
      return {false, "A ≥ π required"};
    case StationaryVariant::RatioLimit:
      if (leq(kPi * kPi / 2.0, B)) return {true, ""};
      return {false, "B ≥ π²/2 required"};
  }
  return {false, "unknown variant"};
}

double laguerre_cd_kernel(int N, double mu, double x, double y) {
  if (N < 1) throw DomainError("laguerre_cd_kernel: N must be positive");
  if (!(2.0 * mu > -1.0)) throw DomainError("laguerre_cd_kernel: 2 mu must exceed -1");
  if (x < 0.0 || y < 0.0) throw DomainError("laguerre_cd_kernel: x, y must be nonnegative");
  const double alpha = 2.0 * mu;
  const auto lx = specfun::laguerre_sequence(N - 1, alpha, x);
  const auto ly = specfun::laguerre_sequence(N - 1, alpha, y);
  double sum = 0.0;
  for (int i = 0; i < N; ++i) sum += lx[i] * ly[i] / specfun::laguerre_norm_squared(i, alpha);
  return std::pow(x * y, mu) * std::exp(-0.5 * (x + y)) * sum;
}

WhittakerKernel::WhittakerKernel(const SpectralParams& params)
    : params_(params),
      prefactor_(std::exp(-specfun::log_gamma(params.z) - specfun::log_gamma(params.z_prime))) {}

WhittakerKernel::Point WhittakerKernel::point(double x) const {
  if (!(x > 0.0)) throw DomainError("whittaker_kernel: x must be positive");
  const cplx kappa = params_.kappa;
  const cplx mu = params_.mu;
  const auto w = specfun::whittaker_ladder(kappa, mu, x, 3);
  const auto derivative = [&](cplx k, cplx wk, cplx wk1) {
    return (-0.5 + k / x) * wk + ((0.5 - k + mu) * (0.5 - k - mu) / x) * wk1;
  };
  // Whittaker equation: W'' = q W.
  const cplx c = 0.25 - mu * mu;
  const auto q = [&](cplx k) { return 0.25 - k / x - c / (x * x); };
  const auto dq = [&](cplx k) { return k / (x * x) + 2.0 * c / (x * x * x); };

  Point p;
  p.x = x;
  p.a[0] = w[0];
  p.a[1] = derivative(kappa, w[0], w[1]);
  p.a[2] = q(kappa) * p.a[0];
  p.a[3] = dq(kappa) * p.a[0] + q(kappa) * p.a[1];
  const cplx kappa1 = kappa - 1.0;
  p.b[0] = w[1];
  p.b[1] = derivative(kappa1, w[1], w[2]);
  p.b[2] = q(kappa1) * p.b[0];
  p.b[3] = dq(kappa1) * p.b[0] + q(kappa1) * p.b[1];
  return p;
}

namespace {

double checked_real(cplx value, double scale, const char* where) {
  if (std::abs(value.imag()) > WhittakerKernel::kRealnessTolerance * scale + 1e-300) {
    throw NumericalError(std::string(where) + ": kernel value has a non-negligible imaginary part");
  }
  return value.real();
}

}  // namespace

double WhittakerKernel::near_diagonal(const Point& m, double h) const {
  const cplx* A = m.a;
  const cplx* B = m.b;
  const cplx p0 = A[1] * B[0] - A[0] * B[1];
  const cplx p2 = (A[3] * B[0] - A[0] * B[3]) / 6.0 + (A[1] * B[2] - A[2] * B[1]) / 2.0;
  const double x = m.x;
  const cplx value = prefactor_ / x * (p0 + h * h * (p0 / (2.0 * x * x) + p2));
  const double scale = std::abs(prefactor_) / x * (std::abs(A[1] * B[0]) + std::abs(A[0] * B[1]));
  return checked_real(value, scale, "whittaker_kernel");
}

double WhittakerKernel::operator()(const Point& p, const Point& q) const {
  const double d = p.x - q.x;
  if (std::abs(d) < kDiagonalSwitch * 0.5 * (p.x + q.x)) {
    if (d == 0.0) return near_diagonal(p, 0.0);
    return near_diagonal(point(0.5 * (p.x + q.x)), 0.5 * d);
  }
  const cplx t1 = p.a[0] * q.b[0];
  const cplx t2 = q.a[0] * p.b[0];
  const double denom = d * std::sqrt(p.x * q.x);
  const cplx value = prefactor_ * (t1 - t2) / denom;
  const double scale = std::abs(prefactor_) * (std::abs(t1) + std::abs(t2)) / std::abs(denom);
  return checked_real(value, scale, "whittaker_kernel");
}

double WhittakerKernel::operator()(double x, double y) const {
  if (!(x > 0.0) || !(y > 0.0)) throw DomainError("whittaker_kernel: x, y must be positive");
  return (*this)(point(x), point(y));
}

double WhittakerKernel::diagonal(const Point& p) const { return near_diagonal(p, 0.0); }

double WhittakerKernel::diagonal(double x) const { return diagonal(point(x)); }

bool WhittakerKernel::in_validated_box(double x, double y) {
  return x >= 1e-5 && x <= 40.0 && y >= 1e-5 && y <= 40.0;
}

double whittaker_kernel(const SpectralParams& params, double x, double y) { return WhittakerKernel(params)(x, y); }

KernelSpec KernelSpec::whittaker(const SpectralParams& params) {
  return {WhittakerSpec{params}, Domain{0.0, std::numeric_limits<double>::infinity(), true}};
}

KernelSpec KernelSpec::stationary(const TailConstants& c) { return {StationarySpec{c}, Domain{}}; }

KernelSpec KernelSpec::sine() { return {SineSpec{}, Domain{}}; }

KernelSpec KernelSpec::laguerre_cd(int N, double mu) {
  if (N < 1 || !(2.0 * mu > -1.0)) throw DomainError("laguerre_cd: need N >= 1 and 2 mu > -1");
  return {LaguerreCDSpec{N, mu}, Domain{0.0, std::numeric_limits<double>::infinity(), false}};
}

KernelSpec KernelSpec::custom(std::function<double(double, double)> fn, std::string name, Domain domain) {
  return {CustomSpec{std::move(fn), std::move(name)}, domain};
}

std::string KernelSpec::name() const {
  struct Visitor {
    std::string operator()(const WhittakerSpec&) const { return "whittaker"; }
    std::string operator()(const StationarySpec& s) const { return to_string(s.constants.variant); }
    std::string operator()(const SineSpec&) const { return "sine"; }
    std::string operator()(const LaguerreCDSpec&) const { return "laguerre-cd"; }
    std::string operator()(const CustomSpec& c) const { return c.name; }
  };
  return std::visit(Visitor{}, kind);
}

KernelEvaluator::KernelEvaluator(const KernelSpec& spec) : spec_(spec) {
  if (const auto* w = std::get_if<WhittakerSpec>(&spec_.kind)) whittaker_.emplace(w->params);
}

void KernelEvaluator::check_domain(double x) const {
  if (!spec_.domain.contains(x)) throw DomainError("kernel: point outside the kernel domain");
}

double KernelEvaluator::operator()(double x, double y) const {
  check_domain(x);
  check_domain(y);
  if (whittaker_) return (*whittaker_)(x, y);
  struct Visitor {
    double x, y;
    double operator()(const WhittakerSpec&) const { return 0.0; }
    double operator()(const StationarySpec& s) const { return stationary_kernel(s.constants, x, y); }
    double operator()(const SineSpec&) const { return sine_kernel(x, y); }
    double operator()(const LaguerreCDSpec& l) const { return laguerre_cd_kernel(l.N, l.mu, x, y); }
    double operator()(const CustomSpec& c) const { return c.fn(x, y); }
  };
  return std::visit(Visitor{x, y}, spec_.kind);
}

double KernelEvaluator::diagonal(double x) const {
  check_domain(x);
  if (whittaker_) return whittaker_->diagonal(x);
  return (*this)(x, x);
}

std::vector<std::vector<double>> KernelEvaluator::matrix(const std::vector<double>& xs,
                                                         const std::vector<double>& ys) const {
  std::vector<std::vector<double>> out(xs.size(), std::vector<double>(ys.size()));
  if (whittaker_) {
    std::vector<WhittakerKernel::Point> px, py;
    px.reserve(xs.size());
    py.reserve(ys.size());
    for (double x : xs) {
      check_domain(x);
      px.push_back(whittaker_->point(x));
    }
    for (double y : ys) {
      check_domain(y);
      py.push_back(whittaker_->point(y));
    }
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t j = 0; j < ys.size(); ++j) out[i][j] = (*whittaker_)(px[i], py[j]);
    return out;
  }
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j) out[i][j] = (*this)(xs[i], ys[j]);
  return out;
}

std::vector<std::vector<double>> KernelEvaluator::matrix(const std::vector<double>& xs) const {
  std::vector<std::vector<double>> out(xs.size(), std::vector<double>(xs.size()));
  if (whittaker_) {
    std::vector<WhittakerKernel::Point> px;
    px.reserve(xs.size());
    for (double x : xs) {
      check_domain(x);
      px.push_back(whittaker_->point(x));
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        const double v = (*whittaker_)(px[i], px[j]);
        out[i][j] = v;
        out[j][i] = v;
      }
    }
    return out;
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = (*this)(xs[i], xs[j]);
      out[i][j] = v;
      out[j][i] = v;
    }
  }
  return out;
}

}  // namespace fermion::kernels

#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fermion/specfun.hpp"

namespace fermion::kernels {

using specfun::cplx;

enum class Series { Principal, Complementary, Intersection };

std::string to_string(Series s);

/// The pair (z, z') with derived quantities.
struct SpectralParams {
  cplx z;
  cplx z_prime;
  cplx t;      // z z'
  cplx a;      // (z + z') / 2
  cplx kappa;  // (z + z' + 1) / 2
  cplx mu;     // (z - z') / 2
  Series series = Series::Principal;

  double t_real() const { return t.real(); }
};

/// Classifies (z, z'); throws DomainError with the reason when no series matches.
/// `tol` absorbs rounding in user-supplied values (e.g. z' = conj(z) typed by hand).
SpectralParams classify_series(cplx z, cplx z_prime, double tol = 1e-12);

enum class StationaryVariant { SinSh, ShSh, ShLimit, RatioLimit };

std::string to_string(StationaryVariant v);

struct TailConstants {
  double A = 0.0;  // magnitude; the kernel is even in A
  double B = 0.0;
  double C = 0.0;
  StationaryVariant variant = StationaryVariant::SinSh;
};

/// Builds constants directly; C is set to 1/(2B) (0 for ShLimit, where B = 0).
TailConstants make_tail_constants(StationaryVariant variant, double A, double B);

TailConstants tail_constants(const SpectralParams& params);

/// Translation-invariant kernel k(xi - eta), normalized to 1 on the diagonal.
double stationary_kernel(const TailConstants& c, double xi, double eta);
double stationary_kernel_of_difference(const TailConstants& c, double d);

/// sin pi(x-y) / (pi (x-y)).
double sine_kernel(double x, double y);

/// k^(y) = int k(zeta) e^{i y zeta} d zeta in closed form.
double fourier_khat(const TailConstants& c, double y);

struct Admissibility {
  bool ok = false;
  std::string reason;
};

Admissibility admissible(const TailConstants& c);

/// Laguerre ensemble Christoffel-Darboux kernel
///   (xy)^mu e^{-(x+y)/2} sum_{i<N} L_i^{2mu}(x) L_i^{2mu}(y) / ||L_i^{2mu}||^2,  x, y >= 0.
double laguerre_cd_kernel(int N, double mu, double x, double y);

/// Whittaker kernel
///   K(x,y) = (xy)^{-1/2} / (Gamma(z) Gamma(z')) * [W_k(x) W_{k-1}(y) - W_k(y) W_{k-1}(x)] / (x - y)
/// with W_k = W_{kappa, mu}, W_{k-1} = W_{kappa-1, mu}. Per-point W values are cached in
/// `Point` so that matrices over a node set need one ladder evaluation per node.
class WhittakerKernel {
 public:
  explicit WhittakerKernel(const SpectralParams& params);

  struct Point {
    double x = 0.0;
    cplx a[4];  // W_kappa and its first three x-derivatives
    cplx b[4];  // W_{kappa-1} and its first three x-derivatives
  };

  Point point(double x) const;
  double operator()(const Point& p, const Point& q) const;
  double operator()(double x, double y) const;
  double diagonal(double x) const;
  double diagonal(const Point& p) const;

  static bool in_validated_box(double x, double y);
  /// Relative distance |x - y| / ((x + y) / 2) below which the near-diagonal expansion is used.
  static constexpr double kDiagonalSwitch = 1e-4;
  /// Imaginary residue allowed before discarding, relative to the product magnitudes.
  static constexpr double kRealnessTolerance = 1e-10;

  const SpectralParams& params() const { return params_; }

 private:
  double near_diagonal(const Point& mid, double half_gap) const;

  SpectralParams params_;
  cplx prefactor_;  // 1 / (Gamma(z) Gamma(z'))
};

/// One-off evaluation; prefer WhittakerKernel when evaluating many points.
double whittaker_kernel(const SpectralParams& params, double x, double y);

struct WhittakerSpec {
  SpectralParams params;
};
struct StationarySpec {
  TailConstants constants;
};
struct SineSpec {};
struct LaguerreCDSpec {
  int N = 1;
  double mu = 0.0;
};
/// Arbitrary symmetric kernel; used for rank-one and zero kernels in checks.
struct CustomSpec {
  std::function<double(double, double)> fn;
  std::string name = "custom";
};

struct Domain {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool open_lo = false;  // true when the endpoint itself is excluded (Whittaker at 0)
  bool contains(double x) const { return (open_lo ? x > lo : x >= lo) && x <= hi; }
};

struct KernelSpec {
  std::variant<WhittakerSpec, StationarySpec, SineSpec, LaguerreCDSpec, CustomSpec> kind;
  Domain domain;

  static KernelSpec whittaker(const SpectralParams& params);
  static KernelSpec stationary(const TailConstants& c);
  static KernelSpec sine();
  static KernelSpec laguerre_cd(int N, double mu);
  static KernelSpec custom(std::function<double(double, double)> fn, std::string name, Domain domain = {});

  std::string name() const;
};

/// Evaluates a KernelSpec; caches per-point data for the Whittaker kernel.
class KernelEvaluator {
 public:
  explicit KernelEvaluator(const KernelSpec& spec);

  double operator()(double x, double y) const;
  double diagonal(double x) const;
  /// K(xs[i], ys[j]).
  std::vector<std::vector<double>> matrix(const std::vector<double>& xs, const std::vector<double>& ys) const;
  /// Symmetric K(xs[i], xs[j]).
  std::vector<std::vector<double>> matrix(const std::vector<double>& xs) const;

  const KernelSpec& spec() const { return spec_; }

 private:
  void check_domain(double x) const;

  KernelSpec spec_;
  std::optional<WhittakerKernel> whittaker_;
};

}  // namespace fermion::kernels

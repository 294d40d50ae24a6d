#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fermion/error.hpp"
#include "fermion/sampler.hpp"
#include "fermion/serialization.hpp"

using namespace fermion;
using namespace fermion::sampler;
using kernels::KernelSpec;
using operators::Region;
using std::numbers::pi;

namespace {

// 99% quantile of chi^2 with 20 degrees of freedom.
constexpr double kChi2_20_99 = 37.566;

std::vector<double> uniform_edges(double a, double b, int bins) {
  std::vector<double> e(bins + 1);
  for (int i = 0; i <= bins; ++i) e[i] = a + (b - a) * i / bins;
  return e;
}

}  // namespace

TEST_CASE("random streams are reproducible and distinct") {
  random::RandomStream a(42, 0), b(42, 0), c(42, 1), d(43, 0);
  const double va = a.uniform();
  CHECK(va == b.uniform());
  CHECK(va != c.uniform());
  CHECK(va != d.uniform());
  random::RandomStream e(1, 2);
  for (int i = 0; i < 1000; ++i) {
    const double u = e.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("sample_dpp: zero kernel gives empty configurations") {
  const auto zero = KernelSpec::custom([](double, double) { return 0.0; }, "zero");
  const auto op = operators::nystrom(zero, Region::interval(0.0, 1.0), 16);
  for (const auto& c : sample_dpp_many(op, 5, 200)) CHECK(c.points.empty());
}

TEST_CASE("sample_dpp: refuses a spectrum outside [0, 1]") {
  const auto big = KernelSpec::custom([](double, double) { return 2.0; }, "two");
  const auto op = operators::nystrom(big, Region::interval(0.0, 1.0), 8);
  random::RandomStream rng(1, 0);
  CHECK_THROWS_AS(sample_dpp(op, rng), NumericalError);
}

TEST_CASE("sample_dpp: sine kernel moments, intensity and repulsion") {
  const auto region = Region::interval(0.0, 2.0);
  const auto op = operators::nystrom(KernelSpec::sine(), region, 48);
  const auto configs = sample_dpp_many(op, 2024, 10000);

  std::size_t max_count = 0;
  for (const auto& c : configs) {
    CHECK(c.valid());
    max_count = std::max(max_count, c.size());
  }
  long significant = 0;
  for (Eigen::Index i = 0; i < op.eigenvalues().size(); ++i) significant += op.eigenvalues()[i] >= 1e-12;
  CHECK(max_count <= static_cast<std::size_t>(significant));

  const auto stats = empirical_statistics(configs, uniform_edges(0.0, 2.0, 20));
  // E N = int K(x,x) = 2; Var N = int K(x,x) - int int K^2, by quadrature.
  const double mean = op.trace();
  double double_integral = 0.0;
  const auto& x = op.nodes();
  const auto& w = op.weights();
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) double_integral += w[i] * w[j] * std::pow(kernels::sine_kernel(x[i], x[j]), 2);
  CHECK(mean == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(stats.count_mean - 2.0) < 3.0 * stats.count_mean_se);
  CHECK(std::abs(stats.count_variance - (mean - double_integral)) < 3.0 * stats.count_variance_se);

  double chi2 = 0.0;
  for (std::size_t b = 0; b < stats.rho1.size(); ++b) chi2 += std::pow((stats.rho1[b] - 1.0) / stats.rho1_se[b], 2);
  CHECK(chi2 < kChi2_20_99);

  // rho2 on adjacent bins sits well below the Poisson level and follows det[K].
  const double mid0 = 0.05, mid1 = 0.15;
  const double predicted = 1.0 - std::pow(kernels::sine_kernel(mid0, mid1), 2);
  CHECK(stats.rho2[0][0] < 0.1);
  CHECK(std::abs(stats.rho2[0][1] - predicted) < 0.1);
  CHECK(stats.rho2[0][10] > 0.9);
}

TEST_CASE("sample_dpp: gap probability from empty fraction") {
  for (double s : {0.5, 1.0}) {
    const auto op = operators::nystrom(KernelSpec::sine(), Region::interval(0.0, s), 32);
    const auto configs = sample_dpp_many(op, 77, 10000);
    double empty = 0.0;
    for (const auto& c : configs) empty += c.points.empty();
    empty /= configs.size();
    const double p = operators::gap_probability(op);
    const double sigma = std::sqrt(p * (1.0 - p) / configs.size());
    CAPTURE(s);
    CHECK(std::abs(empty - p) < 3.0 * sigma);
  }
}

TEST_CASE("sample_dpp: determinism across thread counts") {
  const auto op = operators::nystrom(KernelSpec::sine(), Region::from_intervals({{0.0, 1.0}, {1.5, 3.0}}), 24);
  const auto one = sample_dpp_many(op, 99, 300, 1);
  const auto four = sample_dpp_many(op, 99, 300, 4);
  REQUIRE(one.size() == four.size());
  for (std::size_t i = 0; i < one.size(); ++i) CHECK(one[i].points == four[i].points);
  random::RandomStream rng(99, 7);
  CHECK(sample_dpp(op, rng).points == one[7].points);
}

TEST_CASE("sample_dpp: largest point matches alpha1_cdf") {
  const auto params = kernels::classify_series(0.5, 0.5);
  const auto region = operators::alpha1_region(params, 0.5);
  const auto op = operators::nystrom(KernelSpec::whittaker(params), region, 16);
  const auto configs = sample_dpp_many(op, 31, 4000);
  for (double tau : {1.0, 2.0}) {
    double below = 0.0;
    for (const auto& c : configs) below += c.points.empty() || c.points.front() < tau;
    below /= configs.size();
    const double p = operators::alpha1_cdf(params, tau).value;
    const double sigma = std::sqrt(p * (1.0 - p) / configs.size());
    CAPTURE(tau);
    CHECK(std::abs(below - p) < 3.0 * sigma);
  }
}

TEST_CASE("poisson_dirichlet: stick identity and Watterson intensity") {
  random::RandomStream rng(3, 0);
  const auto point = sample_poisson_dirichlet(1.0, rng);
  double sum = 0.0;
  for (double a : point.alpha) sum += a;
  CHECK(sum + point.residual == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(point.residual < 1e-12);
  CHECK(std::is_sorted(point.alpha.begin(), point.alpha.end(), std::greater<>()));

  PoissonDirichletOptions short_cut;
  short_cut.cutoff = 3;
  random::RandomStream rng2(3, 1);
  CHECK(sample_poisson_dirichlet(1.0, rng2, short_cut).alpha.size() == 3);

  for (double t : {1.0, 2.5}) {
    const auto samples = sample_poisson_dirichlet_many(t, 8, 10000);
    std::vector<PointConfiguration> configs;
    for (const auto& s : samples) configs.push_back(s.alpha_configuration());
    const auto edges = uniform_edges(0.05, 1.0, 20);
    const auto stats = empirical_statistics(configs, edges);
    double chi2 = 0.0;
    for (std::size_t b = 0; b < stats.rho1.size(); ++b) {
      // Bin average of t (1-x)^{t-1} / x.
      const double lo = edges[b], hi = edges[b + 1];
      double avg = 0.0;
      const int m = 200;
      for (int k = 0; k < m; ++k) {
        const double xk = lo + (hi - lo) * (k + 0.5) / m;
        avg += t * std::pow(1.0 - xk, t - 1.0) / xk / m;
      }
      chi2 += std::pow((stats.rho1[b] - avg) / stats.rho1_se[b], 2);
    }
    CAPTURE(t);
    CHECK(chi2 < kChi2_20_99);
  }
  CHECK_THROWS_AS(sample_poisson_dirichlet(0.0, rng), DomainError);
}

TEST_CASE("lift: moment identities") {
  PointConfiguration single;
  single.points = {0.3};
  single.region = Region::interval(0.0, 1.0);
  for (double t : {0.5, 1.0, 3.7}) {
    for (int m : {1, 2}) {
      CHECK(lifted_moment(single, t, m) == doctest::Approx(specfun::pochhammer(t, m) * std::pow(0.3, m)).epsilon(1e-12));
    }
  }

  // E sum x~ = t E sum x, Monte Carlo.
  const double t = 2.0;
  const auto pd = sample_poisson_dirichlet_many(t, 10, 20000);
  std::vector<double> lifted_sums;
  double plain = 0.0;
  for (std::size_t i = 0; i < pd.size(); ++i) {
    random::RandomStream rng(11, i);
    const auto lifted = lift(pd[i].alpha_configuration(), t, rng);
    double s = 0.0;
    for (double x : lifted.points) s += x;
    lifted_sums.push_back(s);
    for (double x : pd[i].alpha) plain += x;
  }
  plain /= pd.size();
  double mean = 0.0, var = 0.0;
  for (double s : lifted_sums) mean += s;
  mean /= lifted_sums.size();
  for (double s : lifted_sums) var += (s - mean) * (s - mean);
  var /= lifted_sums.size() - 1.0;
  CHECK(std::abs(mean - t * plain) < 3.0 * std::sqrt(var / lifted_sums.size()));
}

TEST_CASE("lift: Poisson-Dirichlet lifting is a Poisson process") {
  const double t = 1.5;
  PoissonDirichletOptions opts;
  opts.residual_tol = 1e-30;
  opts.cutoff = 400;
  const auto pd = sample_poisson_dirichlet_many(t, 12, 20000, opts);
  std::vector<PointConfiguration> lifted;
  lifted.reserve(pd.size());
  for (std::size_t i = 0; i < pd.size(); ++i) {
    random::RandomStream rng(13, i);
    lifted.push_back(lift(pd[i].alpha_configuration(), t, rng));
  }
  for (const auto& [a, b] : {std::pair{0.2, 0.5}, std::pair{0.5, 1.0}, std::pair{1.0, 3.0}}) {
    const auto d = dispersion_index(lifted, a, b);
    CAPTURE(a);
    CHECK(std::abs(d.index - 1.0) < 3.0 * d.index_se);
  }
}

TEST_CASE("empirical_statistics: deterministic and Poisson inputs") {
  PointConfiguration one;
  one.points = {1.0};
  one.region = Region::interval(0.0, 2.0);
  const auto st = empirical_statistics({one}, {0.0, 2.0});
  CHECK(st.rho1[0] * 2.0 == doctest::Approx(1.0));
  CHECK(st.count_mean == 1.0);

  std::vector<PointConfiguration> poisson;
  for (std::size_t i = 0; i < 4000; ++i) {
    random::RandomStream rng(14, i);
    poisson.push_back(sample_poisson(1.0, Region::interval(0.0, 10.0), rng));
  }
  const auto ps = empirical_statistics(poisson, uniform_edges(0.0, 10.0, 20));
  double chi2 = 0.0;
  for (std::size_t b = 0; b < ps.rho1.size(); ++b) chi2 += std::pow((ps.rho1[b] - 1.0) / ps.rho1_se[b], 2);
  CHECK(chi2 < kChi2_20_99);
  CHECK_THROWS_AS(empirical_statistics({}, {0.0, 1.0}), DomainError);
}

TEST_CASE("serialization: CSV and JSON round trip") {
  const auto op = operators::nystrom(KernelSpec::sine(), Region::interval(0.0, 3.0), 24);
  const auto configs = sample_dpp_many(op, 5, 5);
  const auto csv = serialization::configurations_to_csv(configs);
  CHECK(csv.rfind("value,config_id\n", 0) == 0);
  const auto j = serialization::configurations_to_json(configs);
  const auto back = serialization::configurations_from_json(nlohmann::json::parse(j.dump()));
  REQUIRE(back.size() == configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    CHECK(back[i].points == configs[i].points);
    CHECK(back[i].seed.root == configs[i].seed.root);
    CHECK(back[i].seed.stream == configs[i].seed.stream);
    CHECK(back[i].region.intervals.size() == 1);
  }
  CHECK_THROWS_AS(serialization::configuration_from_json(nlohmann::json::parse("{\"points\": []}")), DomainError);
}

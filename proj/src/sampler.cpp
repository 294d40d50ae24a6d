#include "fermion/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fermion/error.hpp"

namespace fermion::sampler {

using operators::DiscretizedOperator;
using operators::Region;

void PointConfiguration::sort_descending() { std::sort(points.begin(), points.end(), std::greater<>()); }

bool PointConfiguration::valid() const {
  if (!std::is_sorted(points.begin(), points.end(), std::greater<>())) return false;
  return std::all_of(points.begin(), points.end(), [&](double x) { return region.contains(x); });
}

PointConfiguration ThomaPoint::alpha_configuration() const {
  PointConfiguration c;
  c.points = alpha;
  c.sort_descending();
  c.region = Region::interval(0.0, 1.0);
  c.seed = seed;
  return c;
}

namespace {

struct Cell {
  double lo = 0.0;
  double hi = 0.0;
  long prev = -1;  // neighbour node in the same interval, or -1
  long next = -1;
};

// Precomputed eigen data and node cells shared by all samples from one operator.
class DppSampler {
 public:
  explicit DppSampler(const DiscretizedOperator& op) : op_(op) {
    if (!op.spectrum_in_unit_interval()) {
      throw NumericalError("sample_dpp: operator spectrum is outside [0, 1]");
    }
    const auto& nodes = op.nodes();
    const auto n = nodes.size();
    cells_.resize(n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return nodes[a] < nodes[b]; });
    const auto& intervals = op.region().intervals;
    std::vector<long> owner(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < intervals.size(); ++k) {
        if (nodes[i] >= intervals[k].a && nodes[i] <= intervals[k].b) {
          owner[i] = static_cast<long>(k);
          break;
        }
      }
    }
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t i = order[r];
      Cell& cell = cells_[i];
      if (owner[i] < 0) {
        cell.lo = cell.hi = nodes[i];
        continue;
      }
      const auto& iv = intervals[static_cast<std::size_t>(owner[i])];
      cell.lo = iv.a;
      cell.hi = iv.b;
      if (r > 0 && owner[order[r - 1]] == owner[i]) {
        cell.prev = static_cast<long>(order[r - 1]);
        cell.lo = 0.5 * (nodes[order[r - 1]] + nodes[i]);
      }
      if (r + 1 < n && owner[order[r + 1]] == owner[i]) {
        cell.next = static_cast<long>(order[r + 1]);
        cell.hi = 0.5 * (nodes[order[r + 1]] + nodes[i]);
      }
    }
  }

  PointConfiguration sample(random::RandomStream& rng) const {
    PointConfiguration config;
    config.region = op_.region();
    config.seed = {rng.root(), rng.stream()};
    const auto& lambda = op_.clipped_eigenvalues();
    const auto& vectors = op_.eigenvectors();
    const auto n = static_cast<Eigen::Index>(op_.size());

    std::vector<Eigen::Index> chosen;
    for (Eigen::Index j = 0; j < lambda.size(); ++j)
      if (rng.uniform() < lambda[j]) chosen.push_back(j);
    const auto k = static_cast<Eigen::Index>(chosen.size());
    if (k == 0) return config;

    Eigen::MatrixXd V(n, k);
    for (Eigen::Index c = 0; c < k; ++c) V.col(c) = vectors.col(chosen[static_cast<std::size_t>(c)]);

    // Conditional diagonal of the projection kernel V V^T, updated by one Cholesky column per point.
    Eigen::VectorXd residual = V.rowwise().squaredNorm();
    Eigen::MatrixXd columns(n, k);
    const auto& w = op_.weights();
    for (Eigen::Index step = 0; step < k; ++step) {
      for (Eigen::Index i = 0; i < n; ++i) residual[i] = std::max(residual[i], 0.0);
      const double total = residual.sum();
      if (!(total > 0.0)) break;
      double target = rng.uniform() * total;
      Eigen::Index pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= residual[i];
        if (target <= 0.0) {
          pick = i;
          break;
        }
      }
      while (residual[pick] <= 0.0 && pick > 0) --pick;
      config.points.push_back(place(static_cast<std::size_t>(pick), residual, w, rng));

      Eigen::VectorXd col = V * V.row(pick).transpose();
      for (Eigen::Index s = 0; s < step; ++s) col -= columns(pick, s) * columns.col(s);
      const double pivot = std::sqrt(std::max(residual[pick], 1e-300));
      col /= pivot;
      columns.col(step) = col;
      residual -= col.cwiseAbs2();
      residual[pick] = 0.0;
    }
    config.sort_descending();
    return config;
  }

 private:
  // Continuous position inside the cell of `node`: inverse CDF of the piecewise-linear
  // density through (lo, f_lo), (x, f_x), (hi, f_hi), where f = residual / weight.
  double place(std::size_t node, const Eigen::VectorXd& residual, const std::vector<double>& w,
               random::RandomStream& rng) const {
    const auto& nodes = op_.nodes();
    const Cell& cell = cells_[node];
    const double x = nodes[node];
    const auto density = [&](long j) { return std::max(residual[j], 0.0) / w[static_cast<std::size_t>(j)]; };
    const double fx = density(static_cast<long>(node));
    const double flo = cell.prev >= 0 ? 0.5 * (density(cell.prev) + fx) : fx;
    const double fhi = cell.next >= 0 ? 0.5 * (density(cell.next) + fx) : fx;
    const double left = x - cell.lo;
    const double right = cell.hi - x;
    const double mass_left = 0.5 * (flo + fx) * left;
    const double mass_right = 0.5 * (fx + fhi) * right;
    const double total = mass_left + mass_right;
    const double u = rng.uniform();
    if (!(total > 0.0)) return cell.lo + u * (cell.hi - cell.lo);
    double target = u * total;
    double start, length, f0, f1;
    if (target <= mass_left) {
      start = cell.lo;
      length = left;
      f0 = flo;
      f1 = fx;
    } else {
      target -= mass_left;
      start = x;
      length = right;
      f0 = fx;
      f1 = fhi;
    }
    if (!(length > 0.0)) return start;
    // Solve f0 s + (f1 - f0) s^2 / (2 length) = target.
    const double a = (f1 - f0) / (2.0 * length);
    const double disc = std::max(f0 * f0 + 4.0 * a * target, 0.0);
    const double denom = f0 + std::sqrt(disc);
    double s = denom > 0.0 ? 2.0 * target / denom : length * u;
    s = std::clamp(s, 0.0, length);
    return start + s;
  }

  const DiscretizedOperator& op_;
  std::vector<Cell> cells_;
};

}  // namespace

PointConfiguration sample_dpp(const DiscretizedOperator& op, random::RandomStream& rng) {
  return DppSampler(op).sample(rng);
}

std::vector<PointConfiguration> sample_dpp_many(const DiscretizedOperator& op, std::uint64_t root, std::size_t count,
                                                int threads, std::uint64_t first_stream) {
  const DppSampler sampler(op);
  std::vector<PointConfiguration> out(count);
  random::parallel_for(count, threads, [&](std::size_t i) {
    random::RandomStream rng(root, first_stream + i);
    out[i] = sampler.sample(rng);
  });
  return out;
}

ThomaPoint sample_poisson_dirichlet(double t, random::RandomStream& rng, const PoissonDirichletOptions& opts) {
  if (!(t > 0.0)) throw DomainError("poisson_dirichlet: t must be positive");
  if (opts.cutoff < 1) throw DomainError("poisson_dirichlet: cutoff must be positive");
  ThomaPoint point;
  point.seed = {rng.root(), rng.stream()};
  double remaining = 1.0;
  for (int k = 0; k < opts.cutoff && remaining >= opts.residual_tol; ++k) {
    const double stick = remaining * rng.beta_one(t);
    point.alpha.push_back(stick);
    remaining -= stick;
  }
  std::sort(point.alpha.begin(), point.alpha.end(), std::greater<>());
  point.truncation = point.alpha.size();
  point.residual = remaining;
  return point;
}

std::vector<ThomaPoint> sample_poisson_dirichlet_many(double t, std::uint64_t root, std::size_t count,
                                                      const PoissonDirichletOptions& opts, int threads) {
  std::vector<ThomaPoint> out(count);
  random::parallel_for(count, threads, [&](std::size_t i) {
    random::RandomStream rng(root, i);
    out[i] = sample_poisson_dirichlet(t, rng, opts);
  });
  return out;
}

PointConfiguration sample_poisson(double rate, const Region& region, random::RandomStream& rng) {
  if (!(rate >= 0.0)) throw DomainError("sample_poisson: rate must be nonnegative");
  region.validate();
  PointConfiguration config;
  config.region = region;
  config.seed = {rng.root(), rng.stream()};
  const double measure = region.measure();
  const long n = rng.poisson(rate * measure);
  for (long i = 0; i < n; ++i) {
    double target = rng.uniform() * measure;
    for (const auto& iv : region.intervals) {
      const double len = iv.b - iv.a;
      if (target <= len) {
        config.points.push_back(iv.a + target);
        break;
      }
      target -= len;
    }
  }
  config.sort_descending();
  return config;
}

PointConfiguration lift(const PointConfiguration& config, double t, random::RandomStream& rng) {
  const double s = rng.gamma(t);
  PointConfiguration out;
  out.seed = {rng.root(), rng.stream()};
  out.points.reserve(config.points.size());
  for (double x : config.points) out.points.push_back(s * x);
  double hi = 0.0;
  for (const auto& iv : config.region.intervals) hi = std::max(hi, iv.b);
  if (hi > 0.0) out.region = Region::interval(0.0, s * hi);
  out.sort_descending();
  return out;
}

double lifted_moment(const PointConfiguration& config, double t, int m, int order) {
  if (!(t > 0.0)) throw DomainError("lifted_moment: t must be positive");
  if (m < 0) throw DomainError("lifted_moment: m must be nonnegative");
  const auto rule = specfun::gauss_laguerre(order, t - 1.0);
  const double scale_moment = rule.integrate([m](double s) { return std::pow(s, m); }) / std::tgamma(t);
  double sum = 0.0;
  for (double x : config.points) sum += std::pow(x, m);
  return scale_moment * sum;
}

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  MeanSe r;
  for (double v : values) r.mean += v;
  r.mean /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return r;
}

}  // namespace

EmpiricalStatistics empirical_statistics(const std::vector<PointConfiguration>& configs,
                                         const std::vector<double>& edges) {
  if (configs.empty()) throw DomainError("empirical_statistics: no configurations");
  if (edges.size() < 2) throw DomainError("empirical_statistics: need at least two bin edges");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i] > edges[i - 1])) throw DomainError("empirical_statistics: edges must increase");
  const std::size_t nb = edges.size() - 1;
  const std::size_t ns = configs.size();

  std::vector<std::vector<double>> counts(nb, std::vector<double>(ns, 0.0));
  std::vector<double> totals(ns, 0.0);
  for (std::size_t s = 0; s < ns; ++s) {
    for (double x : configs[s].points) {
      if (x < edges.front() || x > edges.back()) continue;
      auto it = std::upper_bound(edges.begin(), edges.end(), x);
      std::size_t b = static_cast<std::size_t>(std::distance(edges.begin(), it));
      b = std::min(b == 0 ? 0 : b - 1, nb - 1);
      counts[b][s] += 1.0;
      totals[s] += 1.0;
    }
  }

  EmpiricalStatistics st;
  st.edges = edges;
  st.samples = ns;
  st.rho1.resize(nb);
  st.rho1_se.resize(nb);
  st.rho2.assign(nb, std::vector<double>(nb));
  st.rho2_se.assign(nb, std::vector<double>(nb));
  std::vector<double> buffer(ns);
  for (std::size_t a = 0; a < nb; ++a) {
    const double wa = edges[a + 1] - edges[a];
    const auto r = mean_se(counts[a]);
    st.rho1[a] = r.mean / wa;
    st.rho1_se[a] = r.se / wa;
    for (std::size_t b = 0; b < nb; ++b) {
      const double wb = edges[b + 1] - edges[b];
      for (std::size_t s = 0; s < ns; ++s) buffer[s] = counts[a][s] * counts[b][s] - (a == b ? counts[a][s] : 0.0);
      const auto p = mean_se(buffer);
      st.rho2[a][b] = p.mean / (wa * wb);
      st.rho2_se[a][b] = p.se / (wa * wb);
    }
  }
  const auto c = mean_se(totals);
  st.count_mean = c.mean;
  st.count_mean_se = c.se;
  if (ns > 1) {
    for (std::size_t s = 0; s < ns; ++s) buffer[s] = (totals[s] - c.mean) * (totals[s] - c.mean);
    const auto v = mean_se(buffer);
    st.count_variance = v.mean * static_cast<double>(ns) / static_cast<double>(ns - 1);
    st.count_variance_se = v.se * static_cast<double>(ns) / static_cast<double>(ns - 1);
  }
  return st;
}

DispersionResult dispersion_index(const std::vector<PointConfiguration>& configs, double a, double b) {
  if (configs.size() < 2) throw DomainError("dispersion_index: need at least two configurations");
  std::vector<double> counts;
  counts.reserve(configs.size());
  for (const auto& c : configs)
    counts.push_back(static_cast<double>(std::count_if(c.points.begin(), c.points.end(), [&](double x) { return x >= a && x < b; })));
  const double n = static_cast<double>(counts.size());
  DispersionResult r;
  for (double v : counts) r.mean += v;
  r.mean /= n;
  for (double v : counts) r.variance += (v - r.mean) * (v - r.mean);
  r.variance /= n - 1.0;
  if (!(r.mean > 0.0)) throw NumericalError("dispersion_index: no points in the window");
  r.index = r.variance / r.mean;
  r.index_se = std::sqrt((2.0 + 1.0 / r.mean) / n);
  return r;
}

}  // namespace fermion::sampler

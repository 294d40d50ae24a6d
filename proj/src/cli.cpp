#include "fermion/cli.hpp"

#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fermion/asymptotics.hpp"
#include "fermion/complex_parse.hpp"
#include "fermion/error.hpp"
#include "fermion/operators.hpp"
#include "fermion/sampler.hpp"
#include "fermion/serialization.hpp"
#include "fermion/sturm.hpp"

namespace fermion::cli {

namespace {

using json = nlohmann::ordered_json;
using kernels::KernelSpec;
using kernels::SpectralParams;
using kernels::TailConstants;
using serialization::format_double;

// Lifting draws use streams offset from the sampling streams of the same root.
constexpr std::uint64_t kLiftStreamOffset = std::uint64_t{1} << 32;

struct Options {
  std::string format = "csv";
  std::string output;
  int threads = 0;

  std::string kernel = "sine";
  std::string z, zp;
  std::string variant;
  double A = 0.0, B = 0.0;
  int N = 1;
  double mu = 0.0;

  std::string region;
  int order = 64;
  int max_order = 1024;
  double tol = 1e-10;
  double lambda = 1.0;

  std::size_t samples = 100;
  std::uint64_t seed = 0;
  std::uint64_t first_stream = 0;

  std::string xs, ys, points, taus, scales, window, input;
  double t = 1.0;
  int cutoff = 200;
  double residual_tol = 1e-12;
  double tail_tol = 1e-10;
  int max_truncation = 400;
  double T = 50.0;
  int jmax = 40;
  double ymax = 10.0;
  int ypoints = 41;
  double tau = 1.0;
  int grid = 20;
  double step = 1e-4;
  double band = 1e-2;
  double lo = NAN, hi = NAN;
  std::string perturb = "none";
  std::string mode = "counts";
  bool quadrature = false;
};

struct Output {
  json config = json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
  json results;  // replaces the row objects in JSON output when set
  json diagnostics = json::object();
};

// ---- parsing helpers

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const char* first = s.data() + (!s.empty() && s.front() == '+' ? 1 : 0);
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw DomainError("cannot parse " + what + " value '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    std::string trimmed;
    for (char c : cur)
      if (c != ' ') trimmed += c;
    out.push_back(trimmed);
  }
  return out;
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  if (s.empty()) throw DomainError("--" + what + " is required");
  std::vector<double> out;
  for (const auto& item : split(s, ',')) out.push_back(parse_double(item, what));
  return out;
}

operators::Region parse_region(const std::string& s) {
  if (s.empty()) throw DomainError("--region is required");
  std::vector<operators::Interval> intervals;
  for (const auto& part : split(s, ';')) {
    const auto v = parse_list(part, "region");
    if (v.size() != 2) throw DomainError("region intervals are written a,b");
    intervals.push_back({v[0], v[1]});
  }
  return operators::Region::from_intervals(std::move(intervals));
}

json region_json(const operators::Region& r) {
  std::string s;
  for (std::size_t i = 0; i < r.intervals.size(); ++i) {
    if (i) s += ';';
    s += format_double(r.intervals[i].a) + "," + format_double(r.intervals[i].b);
  }
  return s;
}

SpectralParams resolve_params(const Options& o, json& config) {
  if (o.z.empty() || o.zp.empty()) throw DomainError("--z and --zp are required");
  const auto p = kernels::classify_series(parse_complex(o.z), parse_complex(o.zp));
  config["z"] = format_complex(p.z);
  config["zp"] = format_complex(p.z_prime);
  config["series"] = kernels::to_string(p.series);
  return p;
}

kernels::StationaryVariant parse_variant(const std::string& s) {
  using kernels::StationaryVariant;
  for (auto v : {StationaryVariant::SinSh, StationaryVariant::ShSh, StationaryVariant::ShLimit, StationaryVariant::RatioLimit})
    if (kernels::to_string(v) == s) return v;
  throw DomainError("unknown variant '" + s + "' (sinsh, shsh, shlimit, ratiolimit)");
}

TailConstants resolve_constants(const Options& o, json& config) {
  TailConstants c;
  if (!o.z.empty() || !o.zp.empty()) {
    c = kernels::tail_constants(resolve_params(o, config));
  } else if (!o.variant.empty()) {
    if (!(o.A >= 0.0) || !(o.B >= 0.0)) throw DomainError("--A and --B must be nonnegative");
    c = kernels::make_tail_constants(parse_variant(o.variant), o.A, o.B);
  } else {
    throw DomainError("either --z/--zp or --variant is required");
  }
  config["variant"] = kernels::to_string(c.variant);
  config["A"] = c.A;
  config["B"] = c.B;
  config["C"] = c.C;
  return c;
}

KernelSpec resolve_kernel(const Options& o, json& config) {
  config["kernel"] = o.kernel;
  if (o.kernel == "sine") return KernelSpec::sine();
  if (o.kernel == "whittaker") return KernelSpec::whittaker(resolve_params(o, config));
  if (o.kernel == "stationary") return KernelSpec::stationary(resolve_constants(o, config));
  if (o.kernel == "laguerre") {
    config["N"] = o.N;
    config["mu"] = o.mu;
    return KernelSpec::laguerre_cd(o.N, o.mu);
  }
  throw DomainError("unknown kernel '" + o.kernel + "' (sine, whittaker, stationary, laguerre)");
}

void require_positive(double v, const std::string& what) {
  if (!(v > 0.0)) throw DomainError("--" + what + " must be positive");
}

void require_samples(const Options& o) {
  if (o.samples == 0) throw DomainError("--samples must be positive");
}

void set_configurations(Output& out, const std::vector<sampler::PointConfiguration>& configs) {
  out.columns = {"value", "config_id"};
  for (std::size_t i = 0; i < configs.size(); ++i)
    for (double x : configs[i].points) out.rows.push_back({x, i});
  out.results = serialization::configurations_to_json(configs);
}

// ---- subcommands

Output cmd_kernel_eval(const Options& o) {
  Output out;
  const auto spec = resolve_kernel(o, out.config);
  const auto xs = parse_list(o.xs, "x");
  const auto ys = o.ys.empty() ? xs : parse_list(o.ys, "y");
  out.config["x"] = o.xs;
  out.config["y"] = o.ys.empty() ? o.xs : o.ys;
  const kernels::KernelEvaluator K(spec);
  const auto m = K.matrix(xs, ys);
  out.columns = {"x", "y", "K"};
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j) out.rows.push_back({xs[i], ys[j], m[i][j]});
  return out;
}

Output cmd_fredholm(const Options& o) {
  Output out;
  const auto spec = resolve_kernel(o, out.config);
  const auto region = parse_region(o.region);
  out.config["region"] = region_json(region);
  out.config["order"] = o.order;
  out.config["lambda"] = o.lambda;
  const auto op = operators::nystrom(spec, region, o.order);
  out.columns = {"lambda", "det", "size", "trace"};
  out.rows.push_back({o.lambda, operators::fredholm_det(op, o.lambda), op.size(), op.trace()});
  out.diagnostics["warnings"] = op.warnings();
  return out;
}

Output cmd_gap(const Options& o) {
  Output out;
  const auto spec = resolve_kernel(o, out.config);
  const auto region = parse_region(o.region);
  out.config["region"] = region_json(region);
  out.config["order"] = o.order;
  out.config["tol"] = o.tol;
  out.config["max_order"] = o.max_order;
  const auto r = operators::gap_probability_adaptive(spec, region, o.order, o.tol, o.max_order);
  out.columns = {"gap_probability", "order", "change", "converged"};
  out.rows.push_back({r.value, r.order, r.change, r.converged});
  if (!r.converged) out.diagnostics["warnings"] = {"order doubling did not reach the tolerance"};
  return out;
}

Output cmd_correlations(const Options& o) {
  Output out;
  const auto spec = resolve_kernel(o, out.config);
  if (o.points.empty()) throw DomainError("--points is required");
  out.config["points"] = o.points;
  out.columns = {"points", "n", "rho"};
  for (const auto& set : split(o.points, ';')) {
    const auto pts = parse_list(set, "points");
    out.rows.push_back({set, pts.size(), operators::correlation(spec, pts)});
  }
  return out;
}

Output cmd_alpha1_cdf(const Options& o) {
  Output out;
  const auto p = resolve_params(o, out.config);
  const auto taus = parse_list(o.taus, "tau");
  operators::Alpha1Options opts;
  opts.order = o.order;
  opts.tail_tol = o.tail_tol;
  opts.max_truncation = o.max_truncation;
  out.config["tau"] = o.taus;
  out.config["order"] = opts.order;
  out.config["tail_tol"] = opts.tail_tol;
  out.config["max_truncation"] = opts.max_truncation;
  out.columns = {"tau", "cdf", "truncation", "tail_bound"};
  json warnings = json::array();
  for (double tau : taus) {
    const auto r = operators::alpha1_cdf(p, tau, opts);
    out.rows.push_back({tau, r.value, r.truncation, r.tail_bound});
    for (const auto& w : r.warnings) warnings.push_back(w);
  }
  out.diagnostics["warnings"] = warnings;
  return out;
}

Output cmd_sample(const Options& o) {
  Output out;
  const auto spec = resolve_kernel(o, out.config);
  const auto region = parse_region(o.region);
  require_samples(o);
  out.config["region"] = region_json(region);
  out.config["order"] = o.order;
  out.config["samples"] = o.samples;
  out.config["seed"] = o.seed;
  out.config["first_stream"] = o.first_stream;
  const auto op = operators::nystrom(spec, region, o.order);
  set_configurations(out, sampler::sample_dpp_many(op, o.seed, o.samples, o.threads, o.first_stream));
  out.diagnostics["trace"] = op.trace();
  out.diagnostics["warnings"] = op.warnings();
  return out;
}

sampler::PoissonDirichletOptions pd_options(const Options& o, json& config) {
  require_positive(o.t, "t");
  config["t"] = o.t;
  config["cutoff"] = o.cutoff;
  config["residual_tol"] = o.residual_tol;
  return {o.cutoff, o.residual_tol};
}

Output cmd_pd_sample(const Options& o) {
  Output out;
  const auto opts = pd_options(o, out.config);
  require_samples(o);
  out.config["samples"] = o.samples;
  out.config["seed"] = o.seed;
  const auto pd = sampler::sample_poisson_dirichlet_many(o.t, o.seed, o.samples, opts, o.threads);
  std::vector<sampler::PointConfiguration> configs;
  double worst = 0.0;
  for (const auto& s : pd) {
    configs.push_back(s.alpha_configuration());
    worst = std::max(worst, s.residual);
  }
  set_configurations(out, configs);
  out.diagnostics["max_residual"] = worst;
  return out;
}

std::vector<sampler::PointConfiguration> read_configurations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("'" + path + "' is not valid JSON: " + e.what());
  }
  if (j.is_object() && j.contains("results")) j = j["results"];
  if (!j.is_array()) throw DomainError("'" + path + "' holds no configuration array");
  return serialization::configurations_from_json(j);
}

Output cmd_lift(const Options& o) {
  Output out;
  require_positive(o.t, "t");
  std::vector<sampler::PointConfiguration> source;
  if (!o.input.empty()) {
    out.config["t"] = o.t;
    out.config["input"] = o.input;
    source = read_configurations(o.input);
  } else {
    const auto opts = pd_options(o, out.config);
    require_samples(o);
    out.config["samples"] = o.samples;
    for (const auto& s : sampler::sample_poisson_dirichlet_many(o.t, o.seed, o.samples, opts, o.threads))
      source.push_back(s.alpha_configuration());
  }
  out.config["seed"] = o.seed;
  out.config["lift_stream_offset"] = kLiftStreamOffset;
  std::vector<sampler::PointConfiguration> lifted(source.size());
  random::parallel_for(source.size(), o.threads, [&](std::size_t i) {
    random::RandomStream rng(o.seed, kLiftStreamOffset + i);
    lifted[i] = sampler::lift(source[i], o.t, rng);
  });
  set_configurations(out, lifted);
  if (!o.window.empty()) {
    const auto w = parse_list(o.window, "window");
    if (w.size() != 2) throw DomainError("--window is written a,b");
    out.config["window"] = o.window;
    const auto d = sampler::dispersion_index(lifted, w[0], w[1]);
    out.diagnostics["dispersion_index"] = d.index;
    out.diagnostics["dispersion_index_se"] = d.index_se;
    out.diagnostics["count_mean"] = d.mean;
  }
  return out;
}

Output cmd_tail(const Options& o) {
  Output out;
  const auto p = resolve_params(o, out.config);
  const std::string scales = o.scales.empty() ? "0.1,0.01,0.001" : o.scales;
  out.config["scales"] = scales;
  const auto rows = asymptotics::tail_convergence_check(p, parse_list(scales, "scales"));
  out.columns = {"scale", "deviation"};
  bool decreasing = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.rows.push_back({rows[i].scale, rows[i].deviation});
    if (i && !(rows[i].deviation < rows[i - 1].deviation)) decreasing = false;
  }
  out.diagnostics["strictly_decreasing"] = decreasing;
  return out;
}

Output cmd_lln(const Options& o) {
  Output out;
  out.config["mode"] = o.mode;
  if (o.mode == "k2") {
    const auto c = asymptotics::lln_kernel(resolve_params(o, out.config));
    const std::string taus = o.taus.empty() ? "50,100" : o.taus;
    out.config["taus"] = taus;
    out.columns = {"tau", "integral", "ratio"};
    for (double tau : parse_list(taus, "taus")) {
      const double v = asymptotics::k_squared_integral(c, tau);
      out.rows.push_back({tau, v, v / tau});
    }
    return out;
  }
  if (o.mode != "counts") throw DomainError("--mode is counts or k2");
  const auto c = resolve_constants(o, out.config);
  require_positive(o.T, "T");
  require_samples(o);
  const int order = std::max(o.order, static_cast<int>(std::ceil(4.0 * o.T)));
  const std::string taus = o.taus.empty() ? format_double(o.T) : o.taus;
  out.config["T"] = o.T;
  out.config["order"] = order;
  out.config["samples"] = o.samples;
  out.config["seed"] = o.seed;
  out.config["taus"] = taus;
  const auto op = operators::nystrom(KernelSpec::stationary(c), operators::Region::interval(0.0, o.T), order);
  const auto configs = sampler::sample_dpp_many(op, o.seed, o.samples, o.threads);
  out.columns = {"tau", "mean", "variance", "stderr"};
  for (const auto& r : asymptotics::counting_lln(configs, parse_list(taus, "taus")))
    out.rows.push_back({r.tau, r.mean, r.variance, r.stderr_});
  out.diagnostics["warnings"] = op.warnings();
  return out;
}

Output cmd_decay(const Options& o) {
  Output out;
  const auto opts = pd_options(o, out.config);
  require_samples(o);
  out.config["samples"] = o.samples;
  out.config["seed"] = o.seed;
  out.config["jmax"] = o.jmax;
  std::vector<sampler::PointConfiguration> configs;
  for (const auto& s : sampler::sample_poisson_dirichlet_many(o.t, o.seed, o.samples, opts, o.threads))
    configs.push_back(s.alpha_configuration());
  out.columns = {"j", "mean", "stderr", "log_rate"};
  for (const auto& r : asymptotics::decay_rate_estimate(configs, o.jmax)) out.rows.push_back({r.j, r.mean, r.stderr_, r.log_rate});
  out.diagnostics["limit"] = std::exp(-o.t);
  return out;
}

Output cmd_expect(const Options& o) {
  Output out;
  const auto p = resolve_params(o, out.config);
  out.config["quadrature"] = o.quadrature;
  out.columns = {"quantity", "value"};
  out.rows.push_back({"alpha_sum", asymptotics::expected_alpha_sum(p)});
  out.rows.push_back({"beta_sum", asymptotics::expected_beta_sum(p)});
  if (o.quadrature) out.rows.push_back({"alpha_sum_quadrature", asymptotics::alpha_sum_from_kernel(p)});
  return out;
}

// 2 int_0^L k(zeta) cos(y zeta) d zeta, L set by the exponential decay of k.
double numerical_khat(const TailConstants& c, double y) {
  using kernels::StationaryVariant;
  double rate = c.B;
  if (c.variant == StationaryVariant::ShSh) rate = c.B - c.A;
  if (c.variant == StationaryVariant::ShLimit || !(rate > 0.0))
    throw DomainError("fourier-check: the kernel is not absolutely integrable, no numerical transform");
  const double L = 40.0 / rate + 10.0;
  const double width = std::min(0.25, 1.0 / (c.A + std::abs(y) + 1.0));
  static const auto rule = specfun::gauss_legendre(16);
  const auto f = [&](double zeta) { return kernels::stationary_kernel_of_difference(c, zeta) * std::cos(y * zeta); };
  return 2.0 * specfun::integrate_composite(f, 0.0, L, static_cast<int>(std::ceil(L / width)), rule);
}

Output cmd_fourier_check(const Options& o) {
  Output out;
  const auto c = resolve_constants(o, out.config);
  if (o.ypoints < 2) throw DomainError("--points must be at least 2");
  out.config["ymax"] = o.ymax;
  out.config["points"] = o.ypoints;
  out.columns = {"y", "closed_form", "numerical", "abs_diff"};
  double worst = 0.0;
  for (int i = 0; i < o.ypoints; ++i) {
    const double y = -o.ymax + 2.0 * o.ymax * i / (o.ypoints - 1);
    const double closed = kernels::fourier_khat(c, y), numeric = numerical_khat(c, y);
    worst = std::max(worst, std::abs(closed - numeric));
    out.rows.push_back({y, closed, numeric, std::abs(closed - numeric)});
  }
  out.diagnostics["max_abs_diff"] = worst;
  return out;
}

Output cmd_admissible(const Options& o) {
  Output out;
  const auto c = resolve_constants(o, out.config);
  const auto a = kernels::admissible(c);
  out.columns = {"admissible", "reason"};
  out.rows.push_back({a.ok, a.reason});
  return out;
}

Output cmd_sturm_check(const Options& o) {
  Output out;
  require_positive(o.tau, "tau");
  KernelSpec spec = KernelSpec::sine();
  sturm::SLCoefficients sl;
  double lo = -o.tau + 0.05 * o.tau, hi = o.tau - 0.05 * o.tau;
  out.config["kernel"] = o.kernel;
  if (o.kernel == "sine") {
    sl = sturm::sl_params_sine(o.tau);
  } else if (o.kernel == "stationary") {
    const auto c = resolve_constants(o, out.config);
    spec = KernelSpec::stationary(c);
    sl = sturm::sl_params_stationary(c, o.tau);
  } else if (o.kernel == "whittaker") {
    const auto p = resolve_params(o, out.config);
    spec = KernelSpec::whittaker(p);
    sl = sturm::sl_params_whittaker(p, o.tau);
    lo = o.tau + 0.1;
    hi = o.tau + 4.0;
  } else {
    throw DomainError("sturm-check supports sine, stationary and whittaker kernels");
  }
  if (!std::isnan(o.lo)) lo = o.lo;
  if (!std::isnan(o.hi)) hi = o.hi;
  if (o.perturb == "x") {
    sl = sturm::perturb_q(sl, [](double x) { return x; }, "+x");
  } else if (o.perturb == "const") {
    sl = sturm::perturb_q(sl, [](double) { return 1.0; }, "+1");
  } else if (o.perturb != "none") {
    throw DomainError("--perturb is none, x or const");
  }
  sturm::FdOptions fd;
  fd.step_factor = o.step;
  fd.diagonal_band = o.band;
  out.config["tau"] = o.tau;
  out.config["coefficients"] = sl.tag;
  out.config["grid"] = o.grid;
  out.config["lo"] = lo;
  out.config["hi"] = hi;
  out.config["step"] = o.step;
  out.config["band"] = o.band;
  const auto grid = sturm::interior_grid(lo, hi, o.grid, 0.0);
  const auto r = sturm::commutation_residual(spec, sl, grid, grid, fd);
  out.columns = {"residual", "at_x", "at_y", "evaluated"};
  out.rows.push_back({r.residual, r.at_x, r.at_y, r.evaluated});
  return out;
}

// ---- rendering

std::string cell(const json& v) {
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return v.dump();
}

std::string render_csv(const Output& out) {
  std::ostringstream s;
  for (const auto& [k, v] : out.config.items()) s << "# " << k << "=" << (v.is_string() ? v.get<std::string>() : cell(v)) << "\n";
  for (const auto& [k, v] : out.diagnostics.items()) {
    if (v.is_array()) {
      for (const auto& w : v) s << "# diagnostics." << k << "=" << (w.is_string() ? w.get<std::string>() : cell(w)) << "\n";
    } else {
      s << "# diagnostics." << k << "=" << (v.is_string() ? v.get<std::string>() : cell(v)) << "\n";
    }
  }
  for (std::size_t i = 0; i < out.columns.size(); ++i) s << (i ? "," : "") << out.columns[i];
  s << "\n";
  for (const auto& row : out.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s << (i ? "," : "") << cell(row[i]);
    s << "\n";
  }
  return s.str();
}

std::string render_json(const Output& out) {
  json results = out.results;
  if (results.is_null()) {
    results = json::array();
    for (const auto& row : out.rows) {
      json obj = json::object();
      for (std::size_t i = 0; i < row.size(); ++i) obj[out.columns[i]] = row[i];
      results.push_back(obj);
    }
  }
  json doc = json::object();
  doc["config"] = out.config;
  doc["results"] = results;
  doc["diagnostics"] = out.diagnostics;
  return doc.dump(2) + "\n";
}

struct Command {
  std::string name;
  std::string help;
  std::function<Output(const Options&)> handler;
  std::function<void(CLI::App&, Options&)> bind;
  std::function<void(Options&)> defaults;
};

void bind_kernel(CLI::App& app, Options& o) {
  app.add_option("--kernel", o.kernel, "sine | whittaker | stationary | laguerre")->capture_default_str();
  app.add_option("--z", o.z, "z as re+imi");
  app.add_option("--zp", o.zp, "z' as re+imi");
  app.add_option("--variant", o.variant, "sinsh | shsh | shlimit | ratiolimit");
  app.add_option("--A", o.A, "stationary constant A");
  app.add_option("--B", o.B, "stationary constant B");
  app.add_option("--N", o.N, "Laguerre ensemble size")->capture_default_str();
  app.add_option("--mu", o.mu, "Laguerre parameter mu")->capture_default_str();
}

void bind_params(CLI::App& app, Options& o) {
  app.add_option("--z", o.z, "z as re+imi")->required();
  app.add_option("--zp", o.zp, "z' as re+imi")->required();
}

void bind_constants(CLI::App& app, Options& o) {
  app.add_option("--z", o.z, "z as re+imi (derives the tail constants)");
  app.add_option("--zp", o.zp, "z' as re+imi");
  app.add_option("--variant", o.variant, "sinsh | shsh | shlimit | ratiolimit");
  app.add_option("--A", o.A, "constant A");
  app.add_option("--B", o.B, "constant B");
}

void bind_sampling(CLI::App& app, Options& o) {
  app.add_option("--samples", o.samples, "number of configurations")->capture_default_str();
  app.add_option("--seed", o.seed, "root seed")->capture_default_str();
}

void bind_pd(CLI::App& app, Options& o) {
  app.add_option("--t", o.t, "Poisson-Dirichlet parameter")->capture_default_str();
  app.add_option("--cutoff", o.cutoff, "maximum number of sticks")->capture_default_str();
  app.add_option("--residual-tol", o.residual_tol, "stop once the remaining mass is below this")->capture_default_str();
}

std::vector<Command> commands() {
  std::vector<Command> cs;
  cs.push_back({"kernel-eval", "evaluate a kernel on a grid", cmd_kernel_eval,
                [](CLI::App& a, Options& o) {
                  bind_kernel(a, o);
                  a.add_option("--x", o.xs, "comma-separated x values")->required();
                  a.add_option("--y", o.ys, "comma-separated y values (default: x)");
                },
                {}});
  cs.push_back({"fredholm", "Fredholm determinant det(1 - lambda K) on a region", cmd_fredholm,
                [](CLI::App& a, Options& o) {
                  bind_kernel(a, o);
                  a.add_option("--region", o.region, "a,b[;c,d...]")->required();
                  a.add_option("--order", o.order, "Gauss-Legendre nodes per interval")->capture_default_str();
                  a.add_option("--lambda", o.lambda, "spectral parameter")->capture_default_str();
                },
                {}});
  cs.push_back({"gap", "gap probability with order doubling", cmd_gap,
                [](CLI::App& a, Options& o) {
                  bind_kernel(a, o);
                  a.add_option("--region", o.region, "a,b[;c,d...]")->required();
                  a.add_option("--order", o.order, "starting nodes per interval")->capture_default_str();
                  a.add_option("--tol", o.tol, "stop when successive orders agree to this")->capture_default_str();
                  a.add_option("--max-order", o.max_order, "largest order tried")->capture_default_str();
                },
                [](Options& o) { o.order = 16; }});
  cs.push_back({"correlations", "correlation functions det[K(x_i, x_j)]", cmd_correlations,
                [](CLI::App& a, Options& o) {
                  bind_kernel(a, o);
                  a.add_option("--points", o.points, "x1,x2[;y1,y2,y3...]")->required();
                },
                {}});
  cs.push_back({"alpha1-cdf", "distribution function of the largest point", cmd_alpha1_cdf,
                [](CLI::App& a, Options& o) {
                  bind_params(a, o);
                  a.add_option("--tau", o.taus, "comma-separated levels")->required();
                  a.add_option("--order", o.order, "nodes per panel")->capture_default_str();
                  a.add_option("--tail-tol", o.tail_tol, "bound on the neglected trace")->capture_default_str();
                  a.add_option("--max-truncation", o.max_truncation, "largest truncation point")->capture_default_str();
                },
                [](Options& o) { o.order = 16; }});
  cs.push_back({"sample", "exact samples of the discretized process", cmd_sample,
                [](CLI::App& a, Options& o) {
                  bind_kernel(a, o);
                  bind_sampling(a, o);
                  a.add_option("--region", o.region, "a,b[;c,d...]")->required();
                  a.add_option("--order", o.order, "nodes per interval")->capture_default_str();
                  a.add_option("--first-stream", o.first_stream, "stream of the first configuration")->capture_default_str();
                },
                {}});
  cs.push_back({"lift", "multiply configurations by Gamma(t) scales", cmd_lift,
                [](CLI::App& a, Options& o) {
                  bind_sampling(a, o);
                  bind_pd(a, o);
                  a.add_option("--input", o.input, "JSON configurations (default: Poisson-Dirichlet samples)");
                  a.add_option("--window", o.window, "a,b for the dispersion index of counts in [a,b)");
                },
                {}});
  cs.push_back({"pd-sample", "Poisson-Dirichlet samples by stick breaking", cmd_pd_sample,
                [](CLI::App& a, Options& o) {
                  bind_sampling(a, o);
                  bind_pd(a, o);
                },
                {}});
  cs.push_back({"tail", "rescaled two-point correlations against the tail kernel", cmd_tail,
                [](CLI::App& a, Options& o) {
                  bind_params(a, o);
                  a.add_option("--scales", o.scales, "comma-separated scales (default 0.1,0.01,0.001)");
                },
                {}});
  cs.push_back({"lln", "counting statistics N_tau/tau or the k^2 integral", cmd_lln,
                [](CLI::App& a, Options& o) {
                  bind_constants(a, o);
                  bind_sampling(a, o);
                  a.add_option("--mode", o.mode, "counts | k2")->capture_default_str();
                  a.add_option("--T", o.T, "sampling window [0, T]")->capture_default_str();
                  a.add_option("--order", o.order, "minimum nodes on [0, T] (at least 4T are used)")->capture_default_str();
                  a.add_option("--taus", o.taus, "comma-separated tau values");
                },
                [](Options& o) { o.samples = 1000; }});
  cs.push_back({"decay", "mean x_j^{1/j} for Poisson-Dirichlet samples", cmd_decay,
                [](CLI::App& a, Options& o) {
                  bind_sampling(a, o);
                  bind_pd(a, o);
                  a.add_option("--jmax", o.jmax, "largest index j")->capture_default_str();
                },
                [](Options& o) {
                  o.samples = 1000;
                  o.cutoff = 400;
                  o.residual_tol = 1e-60;
                }});
  cs.push_back({"expect", "expected sums of alpha and beta", cmd_expect,
                [](CLI::App& a, Options& o) {
                  bind_params(a, o);
                  a.add_flag("--quadrature", o.quadrature, "also integrate the kernel diagonal");
                },
                {}});
  cs.push_back({"fourier-check", "closed-form Fourier transform against quadrature", cmd_fourier_check,
                [](CLI::App& a, Options& o) {
                  bind_constants(a, o);
                  a.add_option("--ymax", o.ymax, "grid on [-ymax, ymax]")->capture_default_str();
                  a.add_option("--points", o.ypoints, "grid size")->capture_default_str();
                },
                {}});
  cs.push_back({"admissible", "admissibility of tail constants", cmd_admissible,
                [](CLI::App& a, Options& o) { bind_constants(a, o); }, {}});
  cs.push_back({"sturm-check", "commutation residual with the Sturm-Liouville operator", cmd_sturm_check,
                [](CLI::App& a, Options& o) {
                  bind_kernel(a, o);
                  a.add_option("--tau", o.tau, "interval parameter")->capture_default_str();
                  a.add_option("--grid", o.grid, "points per axis")->capture_default_str();
                  a.add_option("--lo", o.lo, "grid start");
                  a.add_option("--hi", o.hi, "grid end");
                  a.add_option("--step", o.step, "relative finite-difference step")->capture_default_str();
                  a.add_option("--band", o.band, "excluded band around the diagonal")->capture_default_str();
                  a.add_option("--perturb", o.perturb, "none | x | const")->capture_default_str();
                },
                {}});
  return cs;
}

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical toolkit for determinantal point processes with Whittaker kernels", "fermion"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for all subcommands");

  const auto cs = commands();
  std::deque<Options> options(cs.size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (cs[i].defaults) cs[i].defaults(options[i]);
    auto* sub = app.add_subcommand(cs[i].name, cs[i].help);
    cs[i].bind(*sub, options[i]);
    sub->add_option("--format", options[i].format, "csv | json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_option("--output", options[i].output, "output file (default: stdout)");
    sub->add_option("--threads", options[i].threads, "worker threads (default: FERMION_THREADS or all cores)");
    subs.push_back(sub);
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << "\n";
    return kUsage;
  }

  try {
    for (std::size_t i = 0; i < cs.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      const Options& o = options[i];
      Output result = cs[i].handler(o);
      json config = json::object();
      config["subcommand"] = cs[i].name;
      for (const auto& [k, v] : result.config.items()) config[k] = v;
      result.config = std::move(config);
      const std::string text = o.format == "json" ? render_json(result) : render_csv(result);
      if (o.output.empty() || o.output == "-") {
        out << text;
      } else {
        std::ofstream file(o.output, std::ios::binary);
        if (!file) throw DomainError("cannot open output file '" + o.output + "'");
        file << text;
        if (!file) throw NumericalError("failed writing '" + o.output + "'");
      }
      return kOk;
    }
  } catch (const TruncationError& e) {
    err << "error: truncation: " << one_line(e.what()) << "\n";
    return kTruncation;
  } catch (const NumericalError& e) {
    err << "error: numerical: " << one_line(e.what()) << "\n";
    return kNumerical;
  } catch (const DomainError& e) {
    err << "error: usage: " << one_line(e.what()) << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: numerical: " << one_line(e.what()) << "\n";
    return kNumerical;
  }
  err << "error: usage: no subcommand\n";
  return kUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace fermion::cli

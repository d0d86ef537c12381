#include "geoconc/harness.hpp"

#include "geoconc/geo_graph.hpp"
#include "geoconc/quadrature.hpp"
#include "geoconc/sampler.hpp"
#include "geoconc/ustat.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace geoconc {

using nlohmann::json;

double clopper_pearson_upper(long successes, long n, double confidence) {
  if (n <= 0 || successes < 0 || successes > n)
    throw std::invalid_argument("clopper_pearson_upper: invalid counts");
  if (successes == n) return 1.0;
  const double alpha = 1.0 - confidence;

  // Binomial CDF at k, computed with incremental log-coefficients.
  const long k = successes;
  auto cdf = [&](double p) {
    const double lp = std::log(p), lq = std::log1p(-p);
    double log_coef = 0.0;  // log C(n, 0)
    double max_term = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(static_cast<std::size_t>(k) + 1);
    for (long i = 0; i <= k; ++i) {
      terms[static_cast<std::size_t>(i)] = log_coef + i * lp + (n - i) * lq;
      max_term = std::max(max_term, terms[static_cast<std::size_t>(i)]);
      log_coef += std::log(static_cast<double>(n - i)) -
                  std::log(static_cast<double>(i + 1));
    }
    double s = 0;
    for (double t : terms) s += std::exp(t - max_term);
    return std::exp(max_term) * s;
  };

  // CDF(k; p) decreases in p; the upper bound solves CDF = alpha.
  double lo = static_cast<double>(k) / n, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) > alpha)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

double FunctionalSpec::operator()(const PointConfiguration& config,
                                  const Metric& metric) const {
  switch (kind) {
    case FunctionalKind::EdgeCount:
      return static_cast<double>(edge_count(build_graph(config, GraphRule::disk(rho), metric)));
    case FunctionalKind::LengthPower:
      return length_power(build_graph(config, GraphRule::disk(rho), metric), alpha);
    case FunctionalKind::VariableRadiusLength:
      return total_edge_length(build_graph(config, GraphRule::intersection(gamma)));
    case FunctionalKind::SupCellCount:
      return static_cast<double>(sup_cell_count(config, rho));
  }
  return 0;
}

namespace {

FunctionalKind functional_kind_from(const std::string& s) {
  if (s == "edge_count") return FunctionalKind::EdgeCount;
  if (s == "length_power") return FunctionalKind::LengthPower;
  if (s == "variable_radius_length") return FunctionalKind::VariableRadiusLength;
  if (s == "sup_cell_count") return FunctionalKind::SupCellCount;
  throw std::invalid_argument("experiment spec: unknown functional " + s);
}

std::string functional_kind_name(FunctionalKind k) {
  switch (k) {
    case FunctionalKind::EdgeCount:
      return "edge_count";
    case FunctionalKind::LengthPower:
      return "length_power";
    case FunctionalKind::VariableRadiusLength:
      return "variable_radius_length";
    case FunctionalKind::SupCellCount:
      return "sup_cell_count";
  }
  return "";
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Closed-form / quadrature mean of the functional when the model admits one;
// NaN signals "estimate instead".
double functional_mean_analytic(const ExperimentSpec& spec) {
  const auto& f = spec.functional;
  switch (f.kind) {
    case FunctionalKind::EdgeCount:
      return edge_count_mean(spec.model, f.rho);
    case FunctionalKind::LengthPower:
      return ustat_mean(KernelSpec::length_power(f.rho, f.alpha, spec.model.metric()),
                        spec.model);
    case FunctionalKind::VariableRadiusLength:
      return ustat_mean(KernelSpec::variable_radius_length(f.gamma), spec.model);
    case FunctionalKind::SupCellCount:
      return std::numeric_limits<double>::quiet_NaN();
  }
  return std::numeric_limits<double>::quiet_NaN();
}

struct Estimated {
  double mean = 0;
  double se = 0;
};

Estimated estimate_mean(const ExperimentSpec& spec,
                        const std::function<double(const PointConfiguration&)>& g,
                        std::uint64_t salt) {
  const long reps = spec.estimation_replications;
  if (reps <= 0)
    throw std::invalid_argument("experiment: estimation_replications must be positive");
  double sum = 0, sq = 0;
  for (long i = 0; i < reps; ++i) {
    const double v =
        g(sample(spec.model, SeedSpec{spec.seed ^ salt, static_cast<std::uint64_t>(i)}));
    sum += v;
    sq += v * v;
  }
  Estimated e;
  e.mean = sum / reps;
  e.se = std::sqrt(std::max(0.0, sq / reps - e.mean * e.mean) / reps);
  return e;
}

// The G statistic matching the functional's upper-tail bound.
double g_statistic(const ExperimentSpec& spec, const PointConfiguration& config) {
  if (spec.functional.kind == FunctionalKind::VariableRadiusLength)
    return sup_weighted_ball_count(config, spec.functional.gamma).upper;
  return static_cast<double>(sup_cell_count(config, spec.functional.rho));
}

void resolve_parameters(ExperimentSpec& spec, TailReport& report) {
  auto& params = spec.bound_params;
  for (const std::string& key : spec.resolve) {
    double value = 0;
    if (key == "ef" || key == "en") {
      value = functional_mean_analytic(spec);
      if (!std::isfinite(value)) {
        value = estimate_mean(spec,
                              [&](const PointConfiguration& c) {
                                return spec.functional(c, spec.model.metric());
                              },
                              0xef11ULL)
                    .mean;
      }
      params["ef"] = value;
      params["en"] = value;
      report.resolved_params["ef"] = value;
      continue;
    }
    if (key == "v_frak") {
      const double en = edge_count_mean(spec.model, spec.functional.rho);
      double k_sup;
      if (spec.model.variant() == IntensityModel::Variant::HomogeneousTorus) {
        k_sup = spec.model.ball_mass(spec.model.window().lower, spec.functional.rho);
      } else {
        // sup_x mu(B(x, rho)) <= rate * kappa_d * rho^d; a valid (weaker) v_frak
        k_sup = spec.model.density_sup() * unit_ball_volume(spec.model.dim()) *
                std::pow(spec.functional.rho, spec.model.dim());
      }
      value = 2.0 * (k_sup + 1.0) * en;
    } else if (key == "c_geom") {
      value = degree_square_selfbound_constant(
          half_ball_partition(spec.model.dim(), std::max(spec.functional.rho, 1e-6)).count);
    } else if (key == "c") {
      if (spec.functional.kind == FunctionalKind::VariableRadiusLength)
        value = (std::pow(3.0, spec.functional.gamma) + 1.0) / 2.0;
      else
        value = std::pow(2.0, spec.model.dim() - 1) *
                std::pow(spec.functional.rho, spec.functional.alpha);
    } else if (key == "eg") {
      // Conservative side: the u-stat bound grows with EG, so add 3 SE.
      const Estimated e = estimate_mean(
          spec, [&](const PointConfiguration& c) { return g_statistic(spec, c); },
          0xe6ULL);
      value = e.mean + 3.0 * e.se;
    } else {
      throw std::invalid_argument("experiment: configuration-error, unknown resolve key " +
                                  key);
    }
    params[key] = value;
    report.resolved_params[key] = value;
  }
}

}  // namespace

TailReport run_tail_experiment(const ExperimentSpec& spec_in) {
  ExperimentSpec spec = spec_in;
  if (spec.replications <= 0)
    throw std::invalid_argument("experiment: replications must be positive");
  if (spec.r_grid.empty())
    throw std::invalid_argument("experiment: configuration-error, empty r grid");
  for (std::size_t i = 0; i < spec.r_grid.size(); ++i) {
    if (spec.r_grid[i] < 0 || (i > 0 && spec.r_grid[i] <= spec.r_grid[i - 1]))
      throw std::invalid_argument(
          "experiment: configuration-error, r grid must be strictly increasing and >= 0");
  }

  TailReport report;
  resolve_parameters(spec, report);
  const BoundCurve curve = make_bound_curve(spec.bound_name, spec.bound_params);

  double ef;
  if (auto it = spec.bound_params.find("ef"); it != spec.bound_params.end()) {
    ef = it->second;
  } else {
    ef = functional_mean_analytic(spec);
    if (!std::isfinite(ef))
      ef = estimate_mean(spec,
                         [&](const PointConfiguration& c) {
                           return spec.functional(c, spec.model.metric());
                         },
                         0xef11ULL)
               .mean;
  }
  report.ef_used = ef;

  const Metric metric = spec.model.metric();
  std::vector<double> values(static_cast<std::size_t>(spec.replications));
  for (long i = 0; i < spec.replications; ++i)
    values[static_cast<std::size_t>(i)] = spec.functional(
        sample(spec.model, SeedSpec{spec.seed, static_cast<std::uint64_t>(i)}), metric);

  report.min_slack = std::numeric_limits<double>::infinity();
  for (double r : spec.r_grid) {
    TailRow row;
    row.r = r;
    row.n_total = spec.replications;
    for (double v : values) {
      const bool exceed = spec.lower_tail ? v <= ef - r : v >= ef + r;
      if (exceed) ++row.n_exceed;
    }
    row.empirical = static_cast<double>(row.n_exceed) / row.n_total;
    row.cp_upper_99 = clopper_pearson_upper(row.n_exceed, row.n_total, 0.99);
    row.bound = curve.evaluate(r);
    row.pass = row.cp_upper_99 <= row.bound || row.n_exceed == 0;
    row.resolved = row.cp_upper_99 <= row.bound || row.n_exceed > 0;
    if (!row.pass) ++report.violations;
    report.min_slack = std::min(report.min_slack, row.bound - row.cp_upper_99);
    report.rows.push_back(row);
  }
  report.all_pass = report.violations == 0;
  return report;
}

void write_tail_csv(const TailReport& report, std::ostream& os) {
  os << "r,n_exceed,n_total,empirical,cp_upper_99,bound,pass\n";
  for (const TailRow& row : report.rows) {
    os << format_double(row.r) << ',' << row.n_exceed << ',' << row.n_total << ','
       << format_double(row.empirical) << ',' << format_double(row.cp_upper_99) << ','
       << format_double(row.bound) << ',' << (row.pass ? 1 : 0) << '\n';
  }
}

std::string tail_summary_text(const ExperimentSpec& spec, const TailReport& report) {
  std::ostringstream os;
  os << "experiment " << spec.name << ": bound " << spec.bound_name << ", "
     << spec.replications << " replications, EF = " << format_double(report.ef_used)
     << "\n";
  for (const auto& [k, v] : report.resolved_params)
    os << "  resolved " << k << " = " << format_double(v) << "\n";
  for (const TailRow& row : report.rows) {
    os << "  r = " << format_double(row.r) << ": empirical "
       << format_double(row.empirical) << ", cp99 " << format_double(row.cp_upper_99)
       << ", bound " << format_double(row.bound) << ", "
       << (row.pass ? (row.resolved ? "pass" : "unresolved") : "FAIL") << "\n";
  }
  os << (report.all_pass ? "all rows pass" : "violations present") << ", min slack "
     << format_double(report.min_slack) << "\n";
  return os.str();
}

std::string run_manifest_json(const ExperimentSpec& spec, const std::string& spec_text) {
  json j;
  j["schema_version"] = spec.schema_version;
  j["name"] = spec.name;
  j["seed"] = spec.seed;
  char hash[32];
  std::snprintf(hash, sizeof(hash), "fnv1a64-%016llx",
                static_cast<unsigned long long>(fnv1a64(spec_text)));
  j["spec_hash"] = hash;
  j["tool_version"] = "geoconc 0.1.0";
  return j.dump(2);
}

ExperimentSpec ExperimentSpec::from_json(const std::string& text) {
  json j = json::parse(text);
  const int version = j.value("schema_version", 1);
  if (version != 1)
    throw std::invalid_argument("experiment spec: unsupported schema_version");
  ExperimentSpec spec(IntensityModel::from_config(j.at("model").dump()));
  spec.schema_version = version;
  spec.name = j.value("name", "experiment");
  const json& f = j.at("functional");
  spec.functional.kind = functional_kind_from(f.at("kind").get<std::string>());
  spec.functional.rho = f.value("rho", 0.0);
  spec.functional.alpha = f.value("alpha", 0.0);
  spec.functional.gamma = f.value("gamma", 0.0);
  const json& b = j.at("bound");
  spec.bound_name = b.at("name").get<std::string>();
  if (b.contains("params"))
    for (auto it = b["params"].begin(); it != b["params"].end(); ++it)
      spec.bound_params[it.key()] = it.value().get<double>();
  if (b.contains("resolve"))
    spec.resolve = b["resolve"].get<std::vector<std::string>>();
  spec.lower_tail = j.value("tail", std::string("upper")) == "lower";
  spec.replications = j.at("replications").get<long>();
  spec.estimation_replications = j.value("estimation_replications", spec.replications);
  spec.r_grid = j.at("r_grid").get<std::vector<double>>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  return spec;
}

ExperimentSpec ExperimentSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("experiment spec: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string ExperimentSpec::to_json() const {
  json j;
  j["schema_version"] = schema_version;
  j["name"] = name;
  j["model"] = json::parse(model.to_config());
  j["functional"]["kind"] = functional_kind_name(functional.kind);
  if (functional.rho > 0) j["functional"]["rho"] = functional.rho;
  if (functional.alpha > 0) j["functional"]["alpha"] = functional.alpha;
  if (functional.gamma > 0) j["functional"]["gamma"] = functional.gamma;
  j["bound"]["name"] = bound_name;
  for (const auto& [k, v] : bound_params) j["bound"]["params"][k] = v;
  if (!resolve.empty()) j["bound"]["resolve"] = resolve;
  j["tail"] = lower_tail ? "lower" : "upper";
  j["replications"] = replications;
  j["estimation_replications"] = estimation_replications;
  j["r_grid"] = r_grid;
  j["seed"] = seed;
  return j.dump(2);
}

CltReport run_clt_consistency(const IntensityModel& base_model, double rho,
                              const std::vector<double>& n_list, double c_fraction) {
  if (n_list.size() < 2)
    throw std::invalid_argument("clt consistency: need at least two n values");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1])
      throw std::invalid_argument("clt consistency: n list must be increasing");
  if (base_model.variant() == IntensityModel::Variant::RadialDensity)
    throw std::invalid_argument("clt consistency: base model must be homogeneous");
  if (!(c_fraction > 0) || !(c_fraction < 1))
    throw std::invalid_argument("clt consistency: c_fraction must lie in (0, 1)");

  CltReport rep;
  const KernelSpec kernel = KernelSpec::edge_indicator(rho, base_model.metric());
  const std::vector<double> norms = marginal_norms(kernel, base_model);
  const double en1 = edge_count_mean(base_model, rho);

  // Under mu_n = n mu_1: |f1|^2 scales as n^3, |f2|^2 as n^2, E N as n^2.
  rep.alpha_const = norms[0];
  rep.beta_const = en1;
  rep.c_geom = degree_square_selfbound_constant(
      half_ball_partition(base_model.dim(), rho).count);

  const double a_limit =
      std::sqrt(rep.alpha_const) / (4.0 * std::pow(rep.beta_const, 0.75));
  const double c_max = a_limit * a_limit / (2.0 * rep.c_geom);
  rep.c_used = c_fraction * c_max;
  const double A = std::sqrt(2.0 * rep.c_used * rep.c_geom);

  rep.found_positive_c = true;
  for (double n : n_list) {
    CltRow row;
    row.n = n;
    row.mean_edges = n * n * en1;
    row.var_edges = n * n * n * norms[0] + 2.0 * n * n * norms[1];
    const double e34 = std::pow(row.mean_edges, 0.75);
    const double lhs = std::sqrt(row.var_edges) / e34 - 4.0 * A;
    if (lhs <= 0) {
      row.x_n = 0;
      rep.found_positive_c = false;
    } else {
      // increasing cubic: A^4 x^3 E^{-3/4} + 4 A^3 x^2 E^{-1/2} + 6 A^2 x E^{-1/4}
      auto g = [&](double x) {
        return std::pow(A, 4) * x * x * x / e34 +
               4.0 * std::pow(A, 3) * x * x / std::sqrt(row.mean_edges) +
               6.0 * A * A * x / std::pow(row.mean_edges, 0.25);
      };
      double hi = 1.0;
      while (g(hi) < lhs) hi *= 2;
      double lo = 0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < lhs ? lo : hi) = mid;
      }
      row.x_n = 0.5 * (lo + hi);
    }
    rep.rows.push_back(row);
  }
  rep.x_increasing = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    if (rep.rows[i].x_n <= rep.rows[i - 1].x_n) rep.x_increasing = false;
  return rep;
}

InfiniteEdgesReport run_infinite_edges_experiment(double gamma, int d, double rate,
                                                  const std::vector<double>& r_list,
                                                  long replications,
                                                  double length_tolerance,
                                                  SeedSpec seed) {
  if (!(gamma * d <= d) || !(gamma * (d + 1) > d)) {
    std::ostringstream os;
    os << "infinite edges: invalid-argument, regime requires gamma*d <= d < gamma*(d+1); "
       << "got gamma*d = " << gamma * d << ", gamma*(d+1) = " << gamma * (d + 1)
       << ", d = " << d;
    throw std::invalid_argument(os.str());
  }
  if (r_list.size() < 2)
    throw std::invalid_argument("infinite edges: need at least two window sizes");

  InfiniteEdgesReport rep;
  std::uint64_t salt = 0;
  for (double R : r_list) {
    const IntensityModel model =
        IntensityModel::homogeneous_box(rate, Window::centered_cube(d, R));
    double sum_edges = 0, sum_length = 0;
    for (long i = 0; i < replications; ++i) {
      const PointConfiguration config =
          sample(model, SeedSpec{seed.master_seed + (++salt),
                                 seed.replication_index + static_cast<std::uint64_t>(i)});
      const GeometricGraph g = build_graph(config, GraphRule::intersection(gamma));
      sum_edges += static_cast<double>(edge_count(g));
      sum_length += total_edge_length(g);
    }
    InfiniteEdgesRow row;
    row.window_half_side = R;
    row.mean_edges = sum_edges / replications;
    row.mean_length = sum_length / replications;
    rep.rows.push_back(row);
  }

  rep.edges_strictly_increasing = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    if (rep.rows[i].mean_edges <= rep.rows[i - 1].mean_edges)
      rep.edges_strictly_increasing = false;
  const auto& last = rep.rows.back();
  const auto& prev = rep.rows[rep.rows.size() - 2];
  rep.last_edge_increment_fraction =
      (last.mean_edges - prev.mean_edges) / last.mean_edges;
  rep.last_length_increment_fraction =
      (last.mean_length - prev.mean_length) / last.mean_length;
  rep.length_converged = rep.last_length_increment_fraction < length_tolerance;

  // Radial reductions Int rho^p dx = d kappa_d Int r^(d-1) (r+1)^(-gamma p) dr,
  // on truncation radii growing by decades; vanishing relative increments
  // certify convergence, persistent ones divergence.
  const double surface = d * unit_ball_volume(d);
  auto truncated = [&](double p, double R) {
    auto r = integrate_1d(
        [&](double t) { return std::pow(t, d - 1) * std::pow(t + 1.0, -gamma * p); },
        0.0, R, 1e-9);
    return surface * r.value;
  };
  {
    const double p = d;
    double prev_val = truncated(p, 1e2);
    double inc = 0, val = prev_val;
    for (double R = 1e3; R <= 1e6 + 1; R *= 10) {
      val = truncated(p, R);
      inc = val - prev_val;
      prev_val = val;
    }
    rep.int_rho_d_growth_ratio = inc / val;
    rep.int_rho_d_divergent = inc > 0.01 * val;
  }
  {
    const double p = d + 1;
    const double big = 1e6;
    const double val = truncated(p, big);
    const double tail = gamma * p > d
                            ? surface * std::pow(big + 1.0, d - gamma * p) / (gamma * p - d)
                            : std::numeric_limits<double>::infinity();
    rep.int_rho_d1_value = val + tail;
    const double inc = val - truncated(p, big / 10);
    rep.int_rho_d1_convergent = std::isfinite(tail) && inc + tail < 0.01 * val;
  }
  return rep;
}

WuReport wu_entropy_diagnostic(const IntensityModel& model, WuFunctional functional,
                               double lambda, long replications, SeedSpec seed,
                               double sub_box_fraction, double rho) {
  if (!(lambda > 0) || lambda > 0.5)
    throw std::invalid_argument("wu diagnostic: lambda must lie in (0, 0.5]");
  WuReport rep;
  rep.replications = replications;

  Window sub = model.window();
  double sub_mass = 0;
  if (functional == WuFunctional::SubBoxCount) {
    sub.upper = sub.lower + sub_box_fraction * (sub.upper - sub.lower);
    sub.periodic = false;
    auto r = integrate_box([&](const Vector& x) { return model.density(x); },
                           sub.lower, sub.upper, 1e-9);
    sub_mass = r.value;
  }
  const Metric metric = model.metric();

  auto f_value = [&](const PointConfiguration& c) {
    if (functional == WuFunctional::SubBoxCount) {
      long count = 0;
      for (int i = 0; i < c.atom_count(); ++i)
        if (sub.contains(c.points().col(i))) count += c.multiplicities()[i];
      return static_cast<double>(count);
    }
    return static_cast<double>(edge_count(build_graph(c, GraphRule::disk(rho), metric)));
  };

  std::vector<double> z(static_cast<std::size_t>(replications));
  std::vector<double> rhs(static_cast<std::size_t>(replications));
  double mean_z = 0, mean_zlogz = 0, mean_rhs = 0;
  for (long i = 0; i < replications; ++i) {
    const PointConfiguration c =
        sample(model, SeedSpec{seed.master_seed, seed.replication_index + i});
    const double f = f_value(c);
    if (lambda * f > 700)
      throw std::runtime_error("wu diagnostic: exp overflow; use a smaller lambda");
    const double zi = std::exp(lambda * f);

    double inner;  // Int psi(lambda D_x F) dmu(x)
    if (functional == WuFunctional::SubBoxCount) {
      inner = psi(lambda) * sub_mass;  // D_x F = 1{x in sub-box}
    } else {
      const double rho2 = rho * rho;
      auto r = integrate_box(
          [&](const Vector& x) {
            long deg = 0;
            for (int j = 0; j < c.atom_count(); ++j) {
              const double d2 = metric.squared_distance(x, c.points().col(j));
              if (d2 > 0 && d2 <= rho2) ++deg;
            }
            return psi(lambda * deg) * model.density(x);
          },
          model.window().lower, model.window().upper, 5e-3, 120000,
          std::clamp(static_cast<int>(model.window().min_side() / (rho / 2)), 1, 32),
          /*indicator_aware=*/true);
      inner = r.value;
    }
    z[static_cast<std::size_t>(i)] = zi;
    rhs[static_cast<std::size_t>(i)] = zi * inner;
    mean_z += zi;
    mean_zlogz += zi * lambda * f;
    mean_rhs += zi * inner;
  }
  mean_z /= replications;
  mean_zlogz /= replications;
  mean_rhs /= replications;

  rep.entropy_estimate = mean_zlogz - mean_z * std::log(mean_z);
  rep.rhs_estimate = mean_rhs;
  rep.gap = rep.rhs_estimate - rep.entropy_estimate;

  // Delta-method influence values for the gap estimator.
  double var = 0;
  const double dlog = std::log(mean_z) + 1.0;
  for (long i = 0; i < replications; ++i) {
    const double zi = z[static_cast<std::size_t>(i)];
    const double infl = rhs[static_cast<std::size_t>(i)] -
                        (zi == 0 ? 0.0 : zi * std::log(zi)) + dlog * zi;
    var += infl * infl;
  }
  double mean_infl = mean_rhs - mean_zlogz + dlog * mean_z;
  var = var / replications - mean_infl * mean_infl;
  rep.gap_standard_error = std::sqrt(std::max(0.0, var) / replications);
  rep.note = "plug-in estimates; entropy estimator biased at finite samples";
  return rep;
}

}  // namespace geoconc

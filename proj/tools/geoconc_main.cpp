// Command-line front end: sampling, graph statistics, U-statistics, bound
// curves, convex distance and tail experiments.

#include "geoconc/bounds.hpp"
#include "geoconc/convex_distance.hpp"
#include "geoconc/geo_graph.hpp"
#include "geoconc/harness.hpp"
#include "geoconc/intensity.hpp"
#include "geoconc/sampler.hpp"
#include "geoconc/ustat.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace geoconc;
using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

Matrix read_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open points file " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<double> row;
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (...) {
        numeric = false;
        break;
      }
    }
    if (!numeric) continue;  // header line
    if (!rows.empty() && rows.front().size() != row.size())
      throw std::runtime_error("points file: inconsistent column count");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("points file: no data rows");
  Matrix pts(static_cast<Eigen::Index>(rows.front().size()),
             static_cast<Eigen::Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j)
    for (std::size_t i = 0; i < rows[j].size(); ++i)
      pts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[j][i];
  return pts;
}

std::map<std::string, double> parse_params(const std::vector<std::string>& kvs) {
  std::map<std::string, double> out;
  for (const std::string& kv : kvs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("parameter must look like name=value: " + kv);
    out[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
  }
  return out;
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot write " + path);
  return file;
}

int cmd_sample(const std::string& model_path, std::uint64_t seed, long replications,
               const std::string& out_path) {
  const IntensityModel model = IntensityModel::load(model_path);
  std::ofstream file;
  std::ostream& os = open_out(file, out_path);
  os << "replication,point_index";
  for (int i = 0; i < model.dim(); ++i) os << ",x_" << (i + 1);
  os << "\n";
  for (long rep = 0; rep < replications; ++rep) {
    const PointConfiguration c =
        sample(model, SeedSpec{seed, static_cast<std::uint64_t>(rep)});
    for (int j = 0; j < c.atom_count(); ++j) {
      os << rep << ',' << j;
      for (int i = 0; i < model.dim(); ++i) os << ',' << fmt(c.points()(i, j));
      os << "\n";
    }
  }
  return 0;
}

int cmd_graph_stats(const std::string& points_path, const std::string& rule_name,
                    double rho, double gamma, const std::string& metric_name,
                    const std::vector<double>& window_lower,
                    const std::vector<double>& window_upper,
                    const std::vector<double>& alphas, const std::string& out_path) {
  const PointConfiguration config(read_points_csv(points_path));
  Metric metric = Metric::euclidean();
  if (metric_name == "torus") {
    if (window_lower.size() != static_cast<std::size_t>(config.dim()) ||
        window_upper.size() != static_cast<std::size_t>(config.dim()))
      throw std::runtime_error("torus metric needs --window-lower/--window-upper");
    metric = Metric::torus(
        Window(Eigen::Map<const Vector>(window_lower.data(),
                                        static_cast<Eigen::Index>(window_lower.size())),
               Eigen::Map<const Vector>(window_upper.data(),
                                        static_cast<Eigen::Index>(window_upper.size())),
               true));
  }
  const GraphRule rule =
      rule_name == "intersection" ? GraphRule::intersection(gamma) : GraphRule::disk(rho);
  const GeometricGraph g = build_graph(config, rule, metric);

  std::ofstream file;
  std::ostream& os = open_out(file, out_path);
  os << "n_vertices,n_edges,n_triangles,sum_deg_sq";
  for (double a : alphas) os << ",length_power_" << fmt(a);
  os << ",sup_cell_count";
  if (rule.kind == GraphRule::Kind::Intersection)
    os << ",sup_weighted_lower,sup_weighted_upper";
  os << "\n";
  os << config.atom_count() << ',' << edge_count(g) << ',' << triangle_count(g) << ','
     << degree_square_sum(g);
  for (double a : alphas) os << ',' << fmt(length_power(g, a));
  os << ',' << sup_cell_count(config, rule.kind == GraphRule::Kind::Disk ? rho : 1.0);
  if (rule.kind == GraphRule::Kind::Intersection) {
    const SupBracket b = sup_weighted_ball_count(config, gamma);
    os << ',' << fmt(b.lower) << ',' << fmt(b.upper);
  }
  os << "\n";
  return 0;
}

int cmd_ustat(const std::string& kernel_name, double rho, double alpha, double gamma,
              const std::string& model_path, const std::string& points_path,
              const std::vector<std::string>& emits, const std::string& out_path) {
  const IntensityModel model = IntensityModel::load(model_path);
  KernelSpec kernel = [&] {
    if (kernel_name == "edge_indicator")
      return KernelSpec::edge_indicator(rho, model.metric());
    if (kernel_name == "length_power")
      return KernelSpec::length_power(rho, alpha, model.metric());
    if (kernel_name == "variable_radius_length")
      return KernelSpec::variable_radius_length(gamma);
    throw std::runtime_error("unknown kernel " + kernel_name);
  }();

  std::ofstream file;
  std::ostream& os = open_out(file, out_path);
  os << "quantity,value\n";
  const bool want = !points_path.empty();
  PointConfiguration config = PointConfiguration::empty(model.dim());
  if (want) config = PointConfiguration(read_points_csv(points_path));

  for (const std::string& emit : emits) {
    if (emit == "evaluate") {
      os << "evaluate," << fmt(evaluate(kernel, config)) << "\n";
    } else if (emit == "local") {
      for (int i = 0; i < config.atom_count(); ++i)
        os << "local_" << i << ',' << fmt(local_version(kernel, config, i)) << "\n";
    } else if (emit == "vstats") {
      const VStatistics v = v_statistics(kernel, config, model);
      os << "v_plus," << fmt(v.v_plus) << "\n";
      os << "v_minus," << fmt(v.v_minus) << "\n";
    } else if (emit == "vardecomp") {
      const VarianceDecomposition vd = variance_decomposition(kernel, model);
      os << "variance," << fmt(vd.variance) << "\n";
      os << "v," << fmt(vd.v) << "\n";
      for (std::size_t i = 0; i < vd.marginal_sq_norms.size(); ++i)
        os << "marginal_sq_norm_" << (i + 1) << ',' << fmt(vd.marginal_sq_norms[i])
           << "\n";
    } else if (emit == "mean") {
      os << "mean," << fmt(ustat_mean(kernel, model)) << "\n";
    } else {
      throw std::runtime_error("unknown emit " + emit);
    }
  }
  return 0;
}

int cmd_bound(const std::string& name, const std::vector<std::string>& param_kvs,
              double r_min, double r_max, int r_count, bool log_grid,
              const std::string& out_path) {
  const BoundCurve curve = make_bound_curve(name, parse_params(param_kvs));
  std::ofstream file;
  std::ostream& os = open_out(file, out_path);
  os << "r,exponent,bound\n";
  for (int i = 0; i < r_count; ++i) {
    const double t = r_count == 1 ? 0.0 : static_cast<double>(i) / (r_count - 1);
    const double r = log_grid ? r_min * std::pow(r_max / r_min, t)
                              : r_min + t * (r_max - r_min);
    os << fmt(r) << ',' << fmt(curve.exponent(r)) << ',' << fmt(curve.evaluate(r))
       << "\n";
  }
  return 0;
}

int cmd_convex_distance(const std::string& instance_path, double tolerance,
                        int probes, const std::string& out_path) {
  std::ifstream in(instance_path);
  if (!in) throw std::runtime_error("cannot open instance " + instance_path);
  json j = json::parse(in);

  const auto pts_rows = j.at("points").get<std::vector<std::vector<double>>>();
  if (pts_rows.empty()) throw std::runtime_error("instance: empty point list");
  const int d = static_cast<int>(pts_rows.front().size());
  Matrix pts(d, static_cast<Eigen::Index>(pts_rows.size()));
  for (std::size_t c = 0; c < pts_rows.size(); ++c)
    for (int r = 0; r < d; ++r) pts(r, static_cast<Eigen::Index>(c)) = pts_rows[c][r];
  Eigen::VectorXi mult = Eigen::VectorXi::Ones(static_cast<Eigen::Index>(pts_rows.size()));
  if (j.contains("multiplicities")) {
    const auto m = j["multiplicities"].get<std::vector<int>>();
    mult = Eigen::Map<const Eigen::VectorXi>(m.data(), static_cast<Eigen::Index>(m.size()));
  }
  PointConfiguration xi(pts, mult);

  ConvexDistanceProblem problem{xi, ThresholdEvent{}};
  const json& ev = j.at("event");
  if (ev.at("type") == "threshold") {
    problem.event = ThresholdEvent{ev.at("max_count").get<long>()};
  } else if (ev.at("type") == "finite") {
    std::vector<PointConfiguration> members;
    for (const auto& member : ev.at("configurations")) {
      const auto rows = member.get<std::vector<std::vector<double>>>();
      Matrix mp(d, static_cast<Eigen::Index>(rows.size()));
      for (std::size_t c = 0; c < rows.size(); ++c)
        for (int r = 0; r < d; ++r) mp(r, static_cast<Eigen::Index>(c)) = rows[c][r];
      members.emplace_back(std::move(mp));
    }
    problem.event = std::move(members);
  } else {
    throw std::runtime_error("instance: event type must be threshold or finite");
  }

  const ConvexDistanceResult res = convex_distance(problem, tolerance);
  std::ofstream file;
  std::ostream& os = open_out(file, out_path);
  os << "value," << fmt(res.value) << "\n";
  os << "gap," << fmt(res.gap) << "\n";
  os << "iterations," << res.iterations << "\n";
  for (std::size_t s = 0; s < res.support.size(); ++s) {
    os << "mixture_" << s << ',' << fmt(res.mixture[s]) << ",profile";
    for (int i = 0; i < res.support[s].q.size(); ++i) os << ';' << res.support[s].q[i];
    os << "\n";
  }
  for (int i = 0; i < res.optimal_u.size(); ++i)
    os << "u_" << i << ',' << fmt(res.optimal_u[i]) << "\n";

  if (probes > 0 && std::holds_alternative<ThresholdEvent>(problem.event)) {
    SubstreamRng rng(SeedSpec{0xd15ULL, 1});
    std::vector<Vector> probe_points;
    const Vector lo = pts.rowwise().minCoeff();
    const Vector hi = pts.rowwise().maxCoeff();
    for (int k = 0; k < probes; ++k) {
      Vector z(d);
      for (int i = 0; i < d; ++i) z[i] = rng.uniform(lo[i] - 0.5, hi[i] + 0.5);
      probe_points.push_back(std::move(z));
    }
    const DtInstanceReport rep = check_dt_instance(
        xi, std::get<ThresholdEvent>(problem.event), probe_points, tolerance);
    os << "vplus_dt," << fmt(rep.vplus_dt) << "\n";
    os << "min_d_dt2," << fmt(rep.min_d_dt2) << "\n";
    os << "max_d_dt2," << fmt(rep.max_d_dt2) << "\n";
    os << "vplus_dt2," << fmt(rep.vplus_dt2) << "\n";
    os << "property_pass," << (rep.pass ? 1 : 0) << "\n";
  }
  return 0;
}

int cmd_experiment(const std::string& spec_path, std::uint64_t seed_override,
                   bool has_seed, long reps_override, const std::string& out_prefix) {
  std::ifstream in(spec_path);
  if (!in) throw std::runtime_error("cannot open spec " + spec_path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string spec_text = ss.str();
  ExperimentSpec spec = ExperimentSpec::from_json(spec_text);
  if (has_seed) spec.seed = seed_override;
  if (reps_override > 0) spec.replications = reps_override;

  const TailReport report = run_tail_experiment(spec);
  const std::string prefix = out_prefix.empty() ? spec.name : out_prefix;
  {
    std::ofstream csv(prefix + ".csv");
    if (!csv) throw std::runtime_error("cannot write " + prefix + ".csv");
    write_tail_csv(report, csv);
  }
  {
    std::ofstream summary(prefix + "_summary.txt");
    summary << tail_summary_text(spec, report);
  }
  {
    std::ofstream manifest(prefix + "_manifest.json");
    manifest << run_manifest_json(spec, spec_text) << "\n";
  }
  std::cout << tail_summary_text(spec, report);
  return report.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson functional concentration workbench"};
  app.require_subcommand(1);

  // sample
  std::string model_path, out_path;
  std::uint64_t seed = 1;
  long replications = 1;
  auto* sample_cmd = app.add_subcommand("sample", "draw Poisson process realizations");
  sample_cmd->add_option("--model", model_path, "intensity model config (json)")
      ->required();
  sample_cmd->add_option("--seed", seed, "master seed");
  sample_cmd->add_option("--replications", replications, "number of realizations");
  sample_cmd->add_option("--out", out_path, "output CSV path (default stdout)");

  // graph-stats
  std::string points_path, rule_name = "disk", metric_name = "euclidean";
  double rho = 0.1, gamma = 1.0, alpha = 0.0;
  std::vector<double> window_lower, window_upper, alphas;
  auto* graph_cmd = app.add_subcommand("graph-stats", "graph statistics of a point set");
  graph_cmd->add_option("--points", points_path, "points CSV")->required();
  graph_cmd->add_option("--rule", rule_name, "disk | intersection");
  graph_cmd->add_option("--rho", rho, "disk radius");
  graph_cmd->add_option("--gamma", gamma, "intersection decay exponent");
  graph_cmd->add_option("--metric", metric_name, "euclidean | torus");
  graph_cmd->add_option("--window-lower", window_lower, "torus window lower corner");
  graph_cmd->add_option("--window-upper", window_upper, "torus window upper corner");
  graph_cmd->add_option("--alpha", alphas, "length-power exponents");
  graph_cmd->add_option("--out", out_path, "output CSV path (default stdout)");

  // ustat
  std::string kernel_name = "edge_indicator";
  std::vector<std::string> emits{"evaluate"};
  auto* ustat_cmd = app.add_subcommand("ustat", "U-statistic quantities");
  ustat_cmd->add_option("--kernel", kernel_name,
                        "edge_indicator | length_power | variable_radius_length");
  ustat_cmd->add_option("--rho", rho, "kernel radius");
  ustat_cmd->add_option("--alpha", alpha, "length-power exponent");
  ustat_cmd->add_option("--gamma", gamma, "decaying-radius exponent");
  ustat_cmd->add_option("--model", model_path, "intensity model config")->required();
  ustat_cmd->add_option("--points", points_path, "points CSV (for evaluate/local/vstats)");
  ustat_cmd->add_option("--emit", emits,
                        "any of: evaluate local vstats vardecomp mean");
  ustat_cmd->add_option("--out", out_path, "output CSV path (default stdout)");

  // bound
  std::string bound_name;
  std::vector<std::string> param_kvs;
  double r_min = 0, r_max = 100;
  int r_count = 11;
  bool log_grid = false;
  auto* bound_cmd = app.add_subcommand("bound", "evaluate a tail bound curve");
  bound_cmd->add_option("--name", bound_name, "curve name")->required();
  bound_cmd->add_option("--param", param_kvs, "curve parameters name=value");
  bound_cmd->add_option("--r-min", r_min, "grid start");
  bound_cmd->add_option("--r-max", r_max, "grid end");
  bound_cmd->add_option("--r-count", r_count, "grid size");
  bound_cmd->add_flag("--log-grid", log_grid, "geometric grid (needs r-min > 0)");
  bound_cmd->add_option("--out", out_path, "output CSV path (default stdout)");

  // convex-distance
  std::string instance_path;
  double tolerance = 1e-9;
  int probes = 0;
  auto* cd_cmd = app.add_subcommand("convex-distance", "solve d_T(xi, A)");
  cd_cmd->add_option("--instance", instance_path, "instance json")->required();
  cd_cmd->add_option("--tolerance", tolerance, "duality-gap tolerance");
  cd_cmd->add_option("--check-probes", probes,
                     "run the structural property checks with this many probes");
  cd_cmd->add_option("--out", out_path, "output path (default stdout)");

  // experiment
  std::string spec_path, out_prefix;
  std::uint64_t seed_override = 0;
  long reps_override = 0;
  auto* exp_cmd = app.add_subcommand("experiment", "run a tail-certification experiment");
  exp_cmd->add_option("--spec", spec_path, "experiment spec json")->required();
  auto* seed_opt = exp_cmd->add_option("--seed", seed_override, "override spec seed");
  exp_cmd->add_option("--replications", reps_override, "override replication count");
  exp_cmd->add_option("--out", out_prefix, "output file prefix");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sample_cmd->parsed())
      return cmd_sample(model_path, seed, replications, out_path);
    if (graph_cmd->parsed())
      return cmd_graph_stats(points_path, rule_name, rho, gamma, metric_name,
                             window_lower, window_upper, alphas, out_path);
    if (ustat_cmd->parsed())
      return cmd_ustat(kernel_name, rho, alpha, gamma, model_path, points_path, emits,
                       out_path);
    if (bound_cmd->parsed())
      return cmd_bound(bound_name, param_kvs, r_min, r_max, r_count, log_grid, out_path);
    if (cd_cmd->parsed())
      return cmd_convex_distance(instance_path, tolerance, probes, out_path);
    if (exp_cmd->parsed())
      return cmd_experiment(spec_path, seed_override, seed_opt->count() > 0,
                            reps_override, out_prefix);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

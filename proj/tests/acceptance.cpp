// Acceptance suite: every criterion prints one PASS/FAIL line; the exit code
// is the number of failures.

#include "geoconc/bounds.hpp"
#include "geoconc/convex_distance.hpp"
#include "geoconc/geo_graph.hpp"
#include "geoconc/harness.hpp"
#include "geoconc/intensity.hpp"
#include "geoconc/rng.hpp"
#include "geoconc/sampler.hpp"
#include "geoconc/ustat.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace geoconc;

namespace {

constexpr double kPi = 3.14159265358979323846;

Vector v2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

PointConfiguration random_config(int n, SubstreamRng& rng) {
  Matrix pts(2, n);
  for (int j = 0; j < n; ++j) pts.col(j) = v2(rng.next_double(), rng.next_double());
  return PointConfiguration(std::move(pts));
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// 1. zero violations of the four deterministic inequalities on >= 1000
//    random configurations (d = 2, n <= 300, rho in [0.05, 0.3]); < 30 s
Outcome criterion1() {
  SubstreamRng rng(SeedSpec{101, 0});
  const double d_const = degree_square_constant_D(3);
  if (std::abs(d_const - 12.21429) > 1e-4)
    return {false, "unexpected D constant"};
  long violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 300);
    const double rho = 0.05 + 0.25 * rng.next_double();
    const auto g = build_graph(random_config(n, rng), GraphRule::disk(rho));
    const auto rep = check_edge_inequalities(g, 3, 100);
    if (!rep.all_ok()) ++violations;
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "1000 configurations, %ld violations, D = %.5f",
                violations, d_const);
  return {violations == 0, buf};
}

// 2. grid-built graphs equal brute-force edge/triangle counts on 200
//    instances; solver equals the simplex-grid oracle within 1e-6 on >= 100
//    small instances; < 60 s
Outcome criterion2() {
  SubstreamRng rng(SeedSpec{102, 0});
  long mismatches = 0;
  for (int i = 0; i < 200; ++i) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 120);
    const double rho = 0.05 + 0.25 * rng.next_double();
    const auto config = random_config(n, rng);
    const auto g = build_graph(config, GraphRule::disk(rho));
    long brute_edges = 0, brute_tris = 0;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        const double dab = (config.points().col(a) - config.points().col(b)).norm();
        if (!(dab > 0 && dab <= rho)) continue;
        ++brute_edges;
        for (int c = b + 1; c < n; ++c) {
          const double dac = (config.points().col(a) - config.points().col(c)).norm();
          const double dbc = (config.points().col(b) - config.points().col(c)).norm();
          if (dac > 0 && dac <= rho && dbc > 0 && dbc <= rho) ++brute_tris;
        }
      }
    if (edge_count(g) != brute_edges || triangle_count(g) != brute_tris) ++mismatches;
  }

  // convex distance vs the simplex-grid oracle
  long solver_fails = 0, tested = 0;
  while (tested < 100) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 4);
    Matrix pts(2, n);
    for (int j = 0; j < n; ++j) pts.col(j) = v2(rng.next_double(), rng.next_double());
    Eigen::VectorXi mult(n);
    for (int j = 0; j < n; ++j) mult[j] = 1 + static_cast<int>(rng.next_u64() % 2);
    const PointConfiguration xi(pts, mult);
    std::vector<PointConfiguration> members;
    const int m = 1 + static_cast<int>(rng.next_u64() % 3);
    for (int k = 0; k < m; ++k) {
      PointConfiguration nu = xi;
      const int removals = 1 + static_cast<int>(rng.next_u64() % (n + 1));
      for (int r = 0; r < removals && nu.atom_count() > 0; ++r)
        nu = nu.without_atom(static_cast<Eigen::Index>(
            rng.next_u64() % static_cast<std::uint64_t>(nu.atom_count())));
      members.push_back(std::move(nu));
    }
    ConvexDistanceProblem problem{xi, members};
    const auto q = deficiency_set(problem);
    if (q.size() > 3) continue;
    ++tested;
    const double solver = convex_distance(problem, 1e-10).value;

    const Eigen::VectorXi& mm = xi.multiplicities();
    auto value = [&](const Vector& p) {
      double f = 0;
      for (int i = 0; i < p.size(); ++i) f += p[i] * p[i] / mm[i];
      return std::sqrt(f);
    };
    double oracle = std::numeric_limits<double>::infinity();
    const int steps = 1000;
    if (q.size() == 1) {
      oracle = value(q[0].q.cast<double>());
    } else if (q.size() == 2) {
      for (int a = 0; a <= steps; ++a) {
        const double w = static_cast<double>(a) / steps;
        oracle = std::min(oracle, value(w * q[0].q.cast<double>() +
                                        (1 - w) * q[1].q.cast<double>()));
      }
    } else {
      for (int a = 0; a <= steps; ++a)
        for (int b = 0; b <= steps - a; ++b) {
          const double wa = static_cast<double>(a) / steps;
          const double wb = static_cast<double>(b) / steps;
          oracle = std::min(oracle, value(wa * q[0].q.cast<double>() +
                                          wb * q[1].q.cast<double>() +
                                          (1 - wa - wb) * q[2].q.cast<double>()));
        }
    }
    if (std::abs(solver - oracle) > 1e-6) ++solver_fails;
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "graph mismatches %ld/200, solver-oracle failures %ld/%ld", mismatches,
                solver_fails, tested);
  return {mismatches == 0 && solver_fails == 0, buf};
}

// 3. torus t = 100, rho = 0.1, 1e5 replications: E N within 3 SE of 157.0796,
//    Var N within 3 SE of 1144.04, V = 325.28 <= Var/k; < 5 min
Outcome criterion3() {
  const auto model = IntensityModel::homogeneous_torus(100.0, Window::unit_cube(2));
  const Metric metric = model.metric();
  const long reps = 100000;
  double s1 = 0, s2 = 0;
  std::vector<double> values(static_cast<std::size_t>(reps));
  for (long i = 0; i < reps; ++i) {
    const auto c = sample(model, SeedSpec{103, static_cast<std::uint64_t>(i)});
    const double n =
        static_cast<double>(edge_count(build_graph(c, GraphRule::disk(0.1), metric)));
    values[static_cast<std::size_t>(i)] = n;
    s1 += n;
    s2 += n * n;
  }
  const double mean = s1 / reps;
  const double var = s2 / reps - mean * mean;
  double m4 = 0;
  for (double v : values) m4 += std::pow(v - mean, 4);
  m4 /= reps;

  const double en_expected = 50 * kPi;          // 157.0796
  const double var_expected = 100 * kPi * kPi + 50 * kPi;  // 1144.0401
  const double se_mean = std::sqrt(var / reps);
  const double se_var = std::sqrt(std::max(0.0, m4 - var * var) / reps);

  const auto vd = variance_decomposition(
      KernelSpec::edge_indicator(0.1, metric), model);
  const double v_expected = 25 * kPi * kPi + 25 * kPi;  // 325.2792

  const bool mean_ok = std::abs(mean - en_expected) <= 3 * se_mean;
  const bool var_ok = std::abs(var - var_expected) <= 3 * se_var;
  const bool v_ok = std::abs(vd.v - v_expected) < 1e-3 &&
                    vd.v <= vd.variance / 2 + 1e-9 &&
                    std::abs(vd.variance - var_expected) < 1e-3;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "EN %.4f (target 157.0796 +- %.4f), VarN %.2f (target 1144.04 +- %.2f), "
                "V %.4f <= Var/k %.4f",
                mean, 3 * se_mean, var, 3 * se_var, vd.v, vd.variance / 2);
  return {mean_ok && var_ok && v_ok, buf};
}

// 4. tail certification with c_geom = 12.29620 and v_frak = 1301.12 at
//    r in {25, 50, 100, 200}, 1e5 replications, zero failures; < 10 min
Outcome criterion4() {
  ExperimentSpec upper(IntensityModel::homogeneous_torus(100.0, Window::unit_cube(2)));
  upper.name = "edge-upper";
  upper.functional.kind = FunctionalKind::EdgeCount;
  upper.functional.rho = 0.1;
  upper.bound_name = "edge_upper";
  upper.resolve = {"en", "c_geom"};
  upper.replications = 100000;
  upper.r_grid = {25, 50, 100, 200};
  upper.seed = 104;
  const TailReport up = run_tail_experiment(upper);

  ExperimentSpec lower(upper.model);
  lower.name = "edge-lower";
  lower.functional = upper.functional;
  lower.bound_name = "edge_lower";
  lower.resolve = {"ef", "v_frak"};
  lower.lower_tail = true;
  lower.replications = 100000;
  lower.r_grid = {25, 50, 100, 200};
  lower.seed = 105;
  const TailReport low = run_tail_experiment(lower);

  const bool consts_ok =
      std::abs(up.resolved_params.at("c_geom") - 12.29620) < 1e-4 &&
      std::abs(low.resolved_params.at("v_frak") - 1301.12) < 1e-2;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "upper violations %ld (min slack %.4g), lower violations %ld (min "
                "slack %.4g), c_geom %.5f, v_frak %.2f",
                up.violations, up.min_slack, low.violations, low.min_slack,
                up.resolved_params.at("c_geom"), low.resolved_params.at("v_frak"));
  return {up.all_pass && low.all_pass && consts_ok, buf};
}

// 5. chi(z) <= sup oracle on 1e3 log-spaced z in (1e-3, 1e3); < 5 s
Outcome criterion5() {
  double min_slack = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 1000; ++i) {
    const double z = 1e-3 * std::pow(1e6, i / 999.0);
    min_slack = std::min(min_slack, chi_sup_oracle(z) - chi(z));
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "min slack %.6g over 1000 grid points", min_slack);
  return {min_slack >= 0.0, buf};
}

// 6. convex distance structure on 200 sampled instances plus the
//    isoperimetric product at three thresholds; < 10 min
Outcome criterion6() {
  const auto model = IntensityModel::homogeneous_torus(10.0, Window::unit_cube(2));
  const auto props =
      check_dt_properties(model, ThresholdEvent{10}, 200, 3, SeedSpec{106, 0}, 1e-9);

  bool iso_ok = true;
  double worst_product_ci = 0;
  for (long m : {8, 10, 12}) {
    const auto iso = isoperimetric_check(model, ThresholdEvent{m}, 10000,
                                         SeedSpec{107, static_cast<std::uint64_t>(m)});
    worst_product_ci = std::max(worst_product_ci, iso.product_upper_ci99);
    if (!iso.pass) iso_ok = false;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "structure violations %ld/200 (worst V+ %.6f), worst product CI %.4f",
                props.violations, props.worst_vplus_dt, worst_product_ci);
  return {props.pass && iso_ok, buf};
}

// 7. add-one cost equals direct re-evaluation to 1e-12 on 500 triples;
//    second differences >= 0 throughout
Outcome criterion7() {
  SubstreamRng rng(SeedSpec{108, 0});
  const std::vector<KernelSpec> kernels = {KernelSpec::edge_indicator(0.2),
                                           KernelSpec::length_power(0.25, 0.5),
                                           KernelSpec::variable_radius_length(0.9)};
  long add_one_fails = 0, second_diff_fails = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto& kernel = kernels[static_cast<std::size_t>(trial % 3)];
    const auto config = random_config(2 + static_cast<int>(rng.next_u64() % 40), rng);
    const Vector x = v2(rng.next_double(), rng.next_double());
    const Vector z = v2(rng.next_double(), rng.next_double());

    const double cost = add_one_cost(kernel, config, x);
    const double direct =
        evaluate(kernel, config.with_point(x)) - evaluate(kernel, config);
    if (std::abs(cost - direct) > 1e-12 * std::max(1.0, std::abs(direct)))
      ++add_one_fails;

    const double f = evaluate(kernel, config);
    const double fx = evaluate(kernel, config.with_point(x));
    const double fz = evaluate(kernel, config.with_point(z));
    const double fxz = evaluate(kernel, config.with_point(x).with_point(z));
    if (fxz - fx - fz + f < -1e-12) ++second_diff_fails;
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "add-one failures %ld/500, second-difference failures %ld/500",
                add_one_fails, second_diff_fails);
  return {add_one_fails == 0 && second_diff_fails == 0, buf};
}

// 8. the three Mecke examples pass within 3 SE at 1e4 replications
Outcome criterion8() {
  const auto model = IntensityModel::homogeneous_torus(100.0, Window::unit_cube(2));
  const long reps = 10000;
  const auto a = mecke_check(model, MeckeFunctional::one(model), reps, SeedSpec{109, 0});
  const auto b = mecke_check(model, MeckeFunctional::count_minus_one(model), reps,
                             SeedSpec{110, 0});
  const auto c = mecke_check(model, MeckeFunctional::neighbor_count(model, 0.1), reps,
                             SeedSpec{111, 0});
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "one: |%.3f - %.0f| <= %.3f; factorial: |%.1f - %.0f| <= %.1f; "
                "neighbors: |%.2f - %.2f| <= %.2f",
                a.lhs_estimate, a.rhs_value, 3 * a.standard_error, b.lhs_estimate,
                b.rhs_value, 3 * b.standard_error, c.lhs_estimate, c.rhs_value,
                3 * c.standard_error);
  return {a.pass && b.pass && c.pass, buf};
}

// 9. optimal-rate consistency for the geometric upper-tail curves and
//    strictly increasing x_n in the CLT comparison
Outcome criterion9() {
  const double cap = 1.0 / std::sqrt(2.0) + 0.01;
  bool rates_ok = true;
  double worst = 0;
  const std::vector<BoundCurve> curves = {
      make_bound_curve("edge_upper", {{"c_geom", 12.29620}, {"en", 50 * kPi}}),
      make_bound_curve("selfbound_upper", {{"c", 12.29620}, {"alpha", 1.5}, {"ef", 50 * kPi}}),
      make_bound_curve("ustat_upper", {{"eg", 1.3}, {"ef", 50 * kPi}, {"c", 2.0}}),
      make_bound_curve("ustat_upper", {{"eg", 1.1}, {"ef", 20.0}, {"c", 2.5}})};
  for (const auto& curve : curves) {
    const auto rep = rate_asymptotics(curve);
    worst = std::max(worst, rep.ratio_at_top);
    if (!rep.applicable || !rep.within_optimal_rate) rates_ok = false;
  }

  const auto base = IntensityModel::homogeneous_torus(1.0, Window::unit_cube(2));
  const auto clt = run_clt_consistency(base, 0.1, {100, 1000, 10000});
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "worst ratio %.4f (cap %.4f); x_n = %.3f, %.3f, %.3f %s", worst, cap,
                clt.rows[0].x_n, clt.rows[1].x_n, clt.rows[2].x_n,
                clt.x_increasing ? "increasing" : "NOT increasing");
  return {rates_ok && clt.found_positive_c && clt.x_increasing, buf};
}

// 10. infinite-edges regime (d = 2, gamma = 0.9, t = 5, 1e3 replications per
//     R in {2, 4, 8, 16}): growing edge count without plateau, converging
//     mean length (increment below 1% of the final total); < 10 min
Outcome criterion10() {
  const auto rep = run_infinite_edges_experiment(0.9, 2, 5.0, {2, 4, 8, 16}, 1000,
                                                 0.01, SeedSpec{112, 0});
  const bool edges_ok =
      rep.edges_strictly_increasing && rep.last_edge_increment_fraction > 0.10;
  const bool length_ok = rep.length_converged;
  const bool integrals_ok = rep.int_rho_d_divergent && rep.int_rho_d1_convergent;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "edge increment %.1f%% of total (needs > 10%%), length increment "
                "%.2f%% of total (needs < 1%%), int rho^d divergent %d, int rho^(d+1) "
                "convergent %d",
                100 * rep.last_edge_increment_fraction,
                100 * rep.last_length_increment_fraction, rep.int_rho_d_divergent,
                rep.int_rho_d1_convergent);
  return {edges_ok && length_ok && integrals_ok, buf};
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    std::function<Outcome()> run;
    double limit_seconds;
  };
  const std::vector<Entry> entries = {
      {"1 deterministic geometric inequalities", criterion1, 30},
      {"2 oracle equivalence (graphs, convex distance)", criterion2, 60},
      {"3 moment reproduction (torus closed forms)", criterion3, 300},
      {"4 tail certification (upper and lower edge bounds)", criterion4, 600},
      {"5 chi lower-bounds the analytic supremum", criterion5, 5},
      {"6 convex distance structure and isoperimetry", criterion6, 600},
      {"7 difference-operator identities", criterion7, 120},
      {"8 Mecke validation", criterion8, 120},
      {"9 asymptotic rates and CLT consistency", criterion9, 120},
      {"10 infinite-edges regime", criterion10, 600},
  };

  int failures = 0;
  for (const auto& entry : entries) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = entry.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= entry.limit_seconds;
    const bool pass = out.pass && in_time;
    if (!pass) ++failures;
    std::printf("[%s] criterion %s (%.1fs%s): %s\n", pass ? "PASS" : "FAIL", entry.name,
                seconds, in_time ? "" : ", over the time limit", out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, entries.size());
  return failures;
}

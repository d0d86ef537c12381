#pragma once

#include "geoconc/bounds.hpp"
#include "geoconc/intensity.hpp"
#include "geoconc/rng.hpp"
#include "geoconc/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

// Experiment orchestration: Monte Carlo tail certification against the
// closed-form bounds, the CLT-consistency and infinite-edges experiments,
// the entropy diagnostic, and the reporting plumbing.

namespace geoconc {

// Exact one-sided binomial (Clopper-Pearson) upper confidence bound for the
// success probability given `successes` out of `n`.
double clopper_pearson_upper(long successes, long n, double confidence = 0.99);

enum class FunctionalKind { EdgeCount, LengthPower, VariableRadiusLength, SupCellCount };

struct FunctionalSpec {
  FunctionalKind kind = FunctionalKind::EdgeCount;
  double rho = 0;
  double alpha = 0;
  double gamma = 0;

  double operator()(const PointConfiguration& config, const Metric& metric) const;
};

struct ExperimentSpec {
  explicit ExperimentSpec(IntensityModel m) : model(std::move(m)) {}

  int schema_version = 1;
  std::string name = "experiment";
  IntensityModel model;
  FunctionalSpec functional;
  std::string bound_name = "one";
  std::map<std::string, double> bound_params;
  // Parameter names resolved before sampling: "ef" (functional mean, also
  // aliased to "en"), "v_frak", "c", "c_geom", "eg".  Analytic closed forms
  // are used when the model admits them; otherwise estimation runs on an
  // independent seed partition.
  std::vector<std::string> resolve;
  bool lower_tail = false;
  long replications = 10000;
  long estimation_replications = 10000;
  std::vector<double> r_grid;
  std::uint64_t seed = 1;

  static ExperimentSpec from_json(const std::string& text);
  static ExperimentSpec load(const std::string& path);
  std::string to_json() const;
};

struct TailRow {
  double r = 0;
  long n_exceed = 0;
  long n_total = 0;
  double empirical = 0;
  double cp_upper_99 = 0;
  double bound = 0;
  bool pass = false;      // cp_upper <= bound, or no exceedances observed
  bool resolved = false;  // Monte Carlo could decide this row
};

struct TailReport {
  std::vector<TailRow> rows;
  long violations = 0;
  double min_slack = 0;  // min over resolved rows of bound - cp_upper
  double ef_used = 0;
  std::map<std::string, double> resolved_params;
  bool all_pass = false;
};

TailReport run_tail_experiment(const ExperimentSpec& spec);

void write_tail_csv(const TailReport& report, std::ostream& os);
std::string tail_summary_text(const ExperimentSpec& spec, const TailReport& report);
// Machine-readable run manifest: seed, FNV-1a hash of the spec document,
// schema and tool versions.
std::string run_manifest_json(const ExperimentSpec& spec, const std::string& spec_text);

// --- CLT consistency ---

struct CltRow {
  double n = 0;
  double mean_edges = 0;
  double var_edges = 0;
  double x_n = 0;
};

struct CltReport {
  double c_geom = 0;
  double c_used = 0;           // Gaussian-comparison constant C
  double alpha_const = 0;      // var_edges / n^3 limit
  double beta_const = 0;       // mean_edges / n^2 limit
  std::vector<CltRow> rows;
  bool x_increasing = false;
  bool found_positive_c = false;
};

// Scales the base intensity by each n, computes the exact mean/variance of
// the edge count, and finds the largest x_n with
// edge-upper-bound(r sqrt(Var)) <= exp(-C r^2) on [0, x_n].
CltReport run_clt_consistency(const IntensityModel& base_model, double rho,
                              const std::vector<double>& n_list,
                              double c_fraction = 0.5);

// --- infinite edges / finite length regime ---

struct InfiniteEdgesRow {
  double window_half_side = 0;
  double mean_edges = 0;
  double mean_length = 0;
};

struct InfiniteEdgesReport {
  std::vector<InfiniteEdgesRow> rows;
  bool edges_strictly_increasing = false;
  double last_edge_increment_fraction = 0;
  double last_length_increment_fraction = 0;
  bool length_converged = false;  // last increment below the tolerance
  bool int_rho_d_divergent = false;
  double int_rho_d_growth_ratio = 0;  // truncated-integral growth at the top
  bool int_rho_d1_convergent = false;
  double int_rho_d1_value = 0;
};

// Decaying-radius intersection graph on growing windows [-R, R]^d: mean edge
// count must keep growing while the mean total length converges; the two
// radial integral conditions are confirmed by quadrature with divergence
// detection.  Requires gamma*d <= d < gamma*(d+1).
InfiniteEdgesReport run_infinite_edges_experiment(double gamma, int d, double rate,
                                                  const std::vector<double>& r_list,
                                                  long replications,
                                                  double length_tolerance,
                                                  SeedSpec seed);

// --- entropy diagnostic ---

enum class WuFunctional { SubBoxCount, EdgeCount };

struct WuReport {
  double entropy_estimate = 0;
  double rhs_estimate = 0;
  double gap = 0;  // rhs - entropy; the inequality predicts gap >= 0
  double gap_standard_error = 0;
  long replications = 0;
  std::string note;
};

// Plug-in Monte Carlo estimate of the log-Sobolev inequality
// Ent(e^{lambda F}) <= E[e^{lambda F} Int psi(lambda D_x F) dmu].  Diagnostic
// only: the entropy plug-in is biased at finite samples and never gates
// acceptance.
WuReport wu_entropy_diagnostic(const IntensityModel& model, WuFunctional functional,
                               double lambda, long replications, SeedSpec seed,
                               double sub_box_fraction = 0.5, double rho = 0.1);

}  // namespace geoconc

#pragma once

#include "geoconc/intensity.hpp"
#include "geoconc/rng.hpp"
#include "geoconc/types.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

// Convex distance d_T(xi, A) for finite point measures: exact minimax
// characterization over deficiency profiles, solved as a simplex-constrained
// convex quadratic by Frank-Wolfe with away steps, plus the structural
// property checks and the isoperimetric Monte Carlo experiment.

namespace geoconc {

// Event {nu : nu(window) <= max_count}.  Threshold events never enumerate A;
// the solver works off the reduced deficiency set.
struct ThresholdEvent {
  long max_count = 0;
};

using EventDescriptor = std::variant<std::vector<PointConfiguration>, ThresholdEvent>;

struct ConvexDistanceProblem {
  PointConfiguration xi;
  EventDescriptor event;
};

// q(x) = (xi(x) - nu(x))_+ for some nu in A, aligned with the atoms of xi.
struct DeficiencyProfile {
  Eigen::VectorXi q;
};

// Reduced, deduplicated profile set Q with dominated profiles pruned
// (pointwise-larger profiles never help the minimization).  Threshold events
// yield the minimal profiles {q : sum q = (xi(window) - m)_+, q <= mult}.
std::vector<DeficiencyProfile> deficiency_set(const ConvexDistanceProblem& problem,
                                              std::size_t enumeration_cap = 2000000);

struct ConvexDistanceResult {
  double value = 0;
  std::vector<DeficiencyProfile> support;  // active profiles
  std::vector<double> mixture;             // weights over `support`
  Vector optimal_u;                        // weight map on the atoms of xi
  double gap = 0;                          // final Frank-Wolfe duality gap
  long iterations = 0;
};

// Solves d_T = min over mixtures zeta on Q of sqrt(sum_x (E_zeta q(x))^2 /
// xi(x)); the certificate u is h / |h|_xi.  Stops at the requested duality
// gap; throws on non-convergence within the iteration cap.
ConvexDistanceResult convex_distance(const ConvexDistanceProblem& problem,
                                     double tolerance = 1e-9,
                                     long max_iterations = 1000000);

struct DtInstanceReport {
  double dt = 0;
  double vplus_dt = 0;        // sum_x (d_T(xi) - d_T(xi - delta_x))^2
  double min_d_dt2 = 0;       // min over probes of D_z(d_T^2)
  double max_d_dt2 = 0;
  double vplus_dt2 = 0;       // sum_x (d_T(xi)^2 - d_T(xi-delta_x)^2)^2
  double four_dt2 = 0;
  bool monotone_ok = true;    // d_T(xi + delta_z) >= d_T(xi) on all probes
  bool pass = false;
};

// Evaluates V+(d_T) <= 1, 0 <= D(d_T^2) <= 2, V+(d_T^2) <= 4 d_T^2 and
// monotonicity on one instance; probe points provide the insertion checks.
DtInstanceReport check_dt_instance(const PointConfiguration& xi,
                                   const ThresholdEvent& event,
                                   const std::vector<Vector>& probes,
                                   double tolerance = 1e-9);

struct DtPropertiesReport {
  long instances = 0;
  long violations = 0;
  double worst_vplus_dt = 0;
  double worst_d_dt2 = 0;
  double worst_vplus_dt2_slack = 0;  // max of vplus_dt2 - 4 dt^2
  bool pass = false;
  std::string witness;  // serialized first violating instance, if any
};

// Samples `replications` configurations from the model and runs
// check_dt_instance with `probes_per_instance` fresh probe points each.
DtPropertiesReport check_dt_properties(const IntensityModel& model,
                                       const ThresholdEvent& event,
                                       long replications, int probes_per_instance,
                                       SeedSpec seed, double tolerance = 1e-9);

struct IsoperimetricRow {
  double r = 0;
  double empirical_survival = 0;  // P(d_T >= r)
  double bound = 0;               // exp(-r^2/10) / P(A)
  bool pass = false;
};

struct IsoperimetricReport {
  double p_event = 0;
  double exp_moment = 0;  // E exp(d_T^2 / 10)
  double product = 0;
  double product_upper_ci99 = 0;
  bool pass = false;  // product upper confidence bound <= 1.02
  std::vector<IsoperimetricRow> tail_rows;
  long replications = 0;
};

// Monte Carlo check of P(A) E exp(d_T(eta, A)^2 / 10) <= 1 on shared
// replications, with a delta-method 99% upper confidence bound on the
// product, plus the derived tail rows.
IsoperimetricReport isoperimetric_check(const IntensityModel& model,
                                        const ThresholdEvent& event,
                                        long replications, SeedSpec seed,
                                        const std::vector<double>& r_grid = {0.5, 1.0,
                                                                             1.5, 2.0});

}  // namespace geoconc

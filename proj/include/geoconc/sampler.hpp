#pragma once

#include "geoconc/intensity.hpp"
#include "geoconc/rng.hpp"
#include "geoconc/types.hpp"

#include <functional>
#include <limits>
#include <string>

// Poisson point process sampling and Mecke-formula validation oracles.

namespace geoconc {

// Draws one realization: count ~ Poisson(total mass), points i.i.d. from the
// normalized density (rejection sampling against a uniform box envelope for
// the radial variant).  Deterministic in the seed.
PointConfiguration sample(const IntensityModel& model, SeedSpec seed);

// Named test functionals h(x, xi) for the Mecke identity
//   E Int h(x, eta) deta(x) = Int E h(x, eta + delta_x) dmu(x).
struct MeckeFunctional {
  std::string name;
  // h(x, xi); x need not be an atom of xi.
  std::function<double(const Vector&, const PointConfiguration&)> h;
  // Closed-form right-hand side when one exists (NaN = not available).
  double analytic_rhs = std::numeric_limits<double>::quiet_NaN();

  static MeckeFunctional one(const IntensityModel& model);
  static MeckeFunctional count_minus_one(const IntensityModel& model);
  static MeckeFunctional neighbor_count(const IntensityModel& model, double rho);
};

struct MeckeReport {
  double lhs_estimate = 0;
  double rhs_value = 0;
  bool rhs_is_estimate = false;
  double standard_error = 0;  // combined when both sides are estimated
  long replications = 0;
  bool pass = false;
};

// Monte Carlo check of the Mecke formula for a given functional.  The RHS is
// taken from the functional's closed form when available, otherwise estimated
// by nested Monte Carlo (outer points from normalized mu, fresh inner process
// per point).
MeckeReport mecke_check(const IntensityModel& model, const MeckeFunctional& h,
                        long replications, SeedSpec seed);

// Order-2 Slivnyak-Mecke check: E sum over ordered distinct pairs of the
// rho-neighbor indicator equals 2 * edge_count_mean.
MeckeReport slivnyak_mecke_pair_check(const IntensityModel& model, double rho,
                                      long replications, SeedSpec seed);

}  // namespace geoconc

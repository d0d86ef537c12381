#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

// Closed-form tail bounds and their helper functions.  Every bound is carried
// as the exponent I(r) with P(deviation >= r) <= exp(-I(r)); working in
// log-space keeps deep-tail evaluation exact where exp(-I) would underflow.

namespace geoconc {

// psi(z) = z e^z - e^z + 1,  phi(z) = e^z - z - 1.
double psi(double z);
double phi(double z);

// Piecewise slope functions of the deviation machinery; z > 0 required, the
// beta -> 0 limit is z/2 on both.
double Phi_beta(double beta, double z);
double Psi_beta(double beta, double z);

// chi(z) = sqrt(log(z+1)) z^(3/2) / (4 sqrt(z) + 8), chi(0) = 0.
double chi(double z);

// Numeric oracle sup_{lambda>0} [lambda z - exp(lambda^2) + 1], used to
// certify chi from below (golden-section search; the objective is strictly
// concave in lambda).
double chi_sup_oracle(double z);

// --- exponents I(r); each has the matching probability form exp(-I) ---

// V_beta^+ <= c: sharp and weakened log forms (upper tail); identical
// formulas bound the lower tail under V_beta^- <= c.
double upper_tail_vbeta_exponent(double c, double beta, double r);
double upper_tail_vbeta_weak_exponent(double c, double beta, double r);
double upper_tail_vbeta(double c, double beta, double r);
double upper_tail_vbeta_weak(double c, double beta, double r);
double lower_tail_vbeta(double c, double beta, double r);
double lower_tail_vbeta_weak(double c, double beta, double r);

// V+ <= c F^alpha, alpha in [0,2): ((r+EF)^(1-a/2) - EF^(1-a/2))^2 / (2c).
double upper_tail_selfbound_exponent(double c, double alpha, double ef, double r);
double upper_tail_selfbound(double c, double alpha, double ef, double r);

// V+ <= a F + b: r^2 / (2 a EF + 2 b + a r / 3).
double upper_tail_linear_exponent(double a, double b, double ef, double r);
double upper_tail_linear(double a, double b, double ef, double r);

// Non-decreasing F with E V- < infinity: Gaussian lower tail r^2 / (2 E V-).
double lower_tail_gaussian_exponent(double ev_minus, double r);
double lower_tail_gaussian(double ev_minus, double r);

// 0 <= DF <= 1 and V+ <= a F: r^2 / (2 max(a,1) EF).  EF = 0 with r > 0
// degenerates to a zero bound (the event is impossible for F >= 0).
double lower_tail_selfbound_exponent(double a, double ef, double r);
double lower_tail_selfbound(double a, double ef, double r);

// Edge count: upper tail with the alpha = 3/2 geometric self-bound constant,
// lower tail Gaussian in v_frak = 2 (K+1) E N.
double edge_upper_tail_exponent(double c_geom, double en, double r);
double edge_upper_tail(double c_geom, double en, double r);
double edge_lower_tail_exponent(double v_frak, double r);
double edge_lower_tail(double v_frak, double r);

// Order-2 U-statistic upper tail: EG * chi((sqrt(EF+r) - sqrt(EF)) /
// (sqrt(4c) EG)).  The cell-lattice bound passes c = 2^(d-1) rho^alpha; the
// decaying-radius bound passes c = (3^gamma + 1) / 2.
double ustat_upper_tail_exponent(double eg, double ef, double c, double r);
double ustat_upper_tail(double eg, double ef, double c, double r);

// --- named curves ---

struct BoundCurve {
  std::string name;
  std::map<std::string, double> params;
  std::function<double(double)> exponent;  // I(r)
  bool upper_tail = true;
  // True when the curve targets geometric upper tails (edge count /
  // U-statistic bounds), where the optimal-rate cap of the theory applies.
  bool geometric_upper_tail = false;

  double evaluate(double r) const;  // exp(-I(r)) clamped to [0, 1]
};

// Factory for the CLI / experiment harness.  Known names: vbeta_upper,
// vbeta_upper_weak, vbeta_lower, vbeta_lower_weak, selfbound_upper,
// linear_upper, gaussian_lower, selfbound_lower, edge_upper, edge_lower,
// ustat_upper, one.
BoundCurve make_bound_curve(const std::string& name,
                            const std::map<std::string, double>& params);

struct RateReport {
  std::vector<double> r_grid;
  std::vector<double> ratio;  // I(r) / (sqrt(r) log r)
  double ratio_at_top = 0;
  bool applicable = true;     // false: not an upper-tail curve, check skipped
  bool within_optimal_rate = true;  // ratio_at_top <= 1/sqrt(2) + 0.01
  std::string note;
};

// Evaluates I(r)/(sqrt(r) log r) on a geometric grid up to r_max (default
// 1e12).  The optimal-rate cap is asserted only for geometric upper-tail
// curves; other curves get a report without the assertion.
RateReport rate_asymptotics(const BoundCurve& curve, double r_max = 1e12,
                            int grid_points = 120);

}  // namespace geoconc

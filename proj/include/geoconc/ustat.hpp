#pragma once

#include "geoconc/intensity.hpp"
#include "geoconc/types.hpp"

#include <functional>
#include <string>
#include <vector>

// U-statistics over simple configurations: kernel evaluation, local
// versions, add-one costs, the V+/V- statistics and the variance / V
// decomposition through the marginal kernels f_i.

namespace geoconc {

// Symmetric non-negative kernel of order k.  Named geometric variants carry
// their parameters (and metric) so evaluation can run through the grid;
// user-supplied kernels take the O(n^k) path.
class KernelSpec {
 public:
  enum class Named { EdgeIndicator, LengthPower, VariableRadiusLength, Custom };

  // f(x, y) = 1/2 * 1{0 < |x-y| <= rho}
  static KernelSpec edge_indicator(double rho, Metric metric = Metric::euclidean());
  // f(x, y) = 1/2 * 1{0 < |x-y| <= rho} |x-y|^alpha, alpha in [0, 1]
  static KernelSpec length_power(double rho, double alpha,
                                 Metric metric = Metric::euclidean());
  // f(x, y) = 1/2 * |x-y| * 1{0 < |x-y| <= rho(x)+rho(y)}, rho(x) = (|x|+1)^(-gamma)
  static KernelSpec variable_radius_length(double gamma);
  // args arrive as a d x k matrix of tuple points
  static KernelSpec custom(int order, std::function<double(const Matrix&)> f,
                           std::string name = "custom");

  Named named() const { return named_; }
  int order() const { return order_; }
  double rho() const { return rho_; }
  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }
  const Metric& metric() const { return metric_; }
  const std::string& name() const { return name_; }

  double operator()(const Matrix& args) const;

  // Spot-test of symmetry on random argument permutations.
  bool check_symmetry(int trials, double box_half_side = 1.0) const;

 private:
  Named named_ = Named::Custom;
  int order_ = 2;
  double rho_ = 0, alpha_ = 0, gamma_ = 0;
  Metric metric_ = Metric::euclidean();
  std::string name_;
  std::function<double(const Matrix&)> fn_;
};

// S_f(xi): sum of f over ordered k-tuples of distinct points.
double evaluate(const KernelSpec& kernel, const PointConfiguration& config);

// Local version F(x, xi): kernel sum with one argument frozen at atom x.
double local_version(const KernelSpec& kernel, const PointConfiguration& config,
                     Eigen::Index atom);
double local_version(const KernelSpec& kernel, const PointConfiguration& config,
                     const Vector& x);

// F(x, xi + delta_x) for arbitrary x (the local version after insertion).
double local_version_with(const KernelSpec& kernel, const PointConfiguration& config,
                          const Vector& x);

// D_x S_f(xi) = S_f(xi + delta_x) - S_f(xi), computed as k * F(x, xi+delta_x);
// zero when x already charges xi (canonical representative).  Asserted against
// the direct difference in debug builds.
double add_one_cost(const KernelSpec& kernel, const PointConfiguration& config,
                    const Vector& x);

struct VStatistics {
  double v_plus = 0;
  double v_minus = 0;
  double v_minus_error = 0;  // quadrature error estimate
  double beta = 0;
};

// V+ = k^2 sum_{x in xi} F(x, xi)^2 (exact); V- = k^2 Int F(x, xi+delta_x)^2
// dmu(x) by adaptive quadrature at rel_tol.
VStatistics v_statistics(const KernelSpec& kernel, const PointConfiguration& config,
                         const IntensityModel& model, double rel_tol = 1e-4);

// f_i(y_1..y_i) = binom(k, i) * Int f(y, z_1..z_{k-i}) dmu^{k-i}; args is d x i.
double marginal_kernel(const KernelSpec& kernel, const IntensityModel& model,
                       const Matrix& args, double rel_tol = 1e-6);

// Squared L^2(mu^i) norms of the marginal kernels, i = 1..k.
std::vector<double> marginal_norms(const KernelSpec& kernel,
                                   const IntensityModel& model,
                                   double rel_tol = 1e-6);

// E S_f(eta) = Int f dmu^k (orders 1 and 2).
double ustat_mean(const KernelSpec& kernel, const IntensityModel& model,
                  double rel_tol = 1e-6);

struct VarianceDecomposition {
  double variance = 0;                    // sum_i i! |f_i|^2
  double v = 0;                           // k^{-2} sum_i i*i! |f_i|^2
  std::vector<double> marginal_sq_norms;  // |f_i|^2, i = 1..k
};

// Variance and V of the U-statistic; enforces V <= variance / k.
VarianceDecomposition variance_decomposition(const KernelSpec& kernel,
                                             const IntensityModel& model,
                                             double rel_tol = 1e-6);

}  // namespace geoconc

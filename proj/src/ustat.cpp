#include "geoconc/ustat.hpp"

#include "geoconc/geo_graph.hpp"
#include "geoconc/quadrature.hpp"
#include "geoconc/rng.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace geoconc {

namespace {

double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

KernelSpec KernelSpec::edge_indicator(double rho, Metric metric) {
  if (!(rho > 0)) throw std::invalid_argument("edge_indicator: rho must be > 0");
  KernelSpec k;
  k.named_ = Named::EdgeIndicator;
  k.order_ = 2;
  k.rho_ = rho;
  k.metric_ = std::move(metric);
  k.name_ = "edge_indicator";
  return k;
}

KernelSpec KernelSpec::length_power(double rho, double alpha, Metric metric) {
  if (!(rho > 0)) throw std::invalid_argument("length_power: rho must be > 0");
  if (!(alpha >= 0) || alpha > 1)
    throw std::invalid_argument("length_power: alpha must lie in [0, 1]");
  KernelSpec k;
  k.named_ = Named::LengthPower;
  k.order_ = 2;
  k.rho_ = rho;
  k.alpha_ = alpha;
  k.metric_ = std::move(metric);
  k.name_ = "length_power";
  return k;
}

KernelSpec KernelSpec::variable_radius_length(double gamma) {
  if (!(gamma > 0))
    throw std::invalid_argument("variable_radius_length: gamma must be > 0");
  KernelSpec k;
  k.named_ = Named::VariableRadiusLength;
  k.order_ = 2;
  k.gamma_ = gamma;
  k.name_ = "variable_radius_length";
  return k;
}

KernelSpec KernelSpec::custom(int order, std::function<double(const Matrix&)> f,
                              std::string name) {
  if (order < 1) throw std::invalid_argument("custom kernel: order must be >= 1");
  KernelSpec k;
  k.named_ = Named::Custom;
  k.order_ = order;
  k.fn_ = std::move(f);
  k.name_ = std::move(name);
  return k;
}

double KernelSpec::operator()(const Matrix& args) const {
  if (args.cols() != order_)
    throw std::invalid_argument("kernel: argument count mismatch");
  switch (named_) {
    case Named::EdgeIndicator: {
      const double d2 = metric_.squared_distance(args.col(0), args.col(1));
      return (d2 > 0 && d2 <= rho_ * rho_) ? 0.5 : 0.0;
    }
    case Named::LengthPower: {
      const double d2 = metric_.squared_distance(args.col(0), args.col(1));
      if (!(d2 > 0 && d2 <= rho_ * rho_)) return 0.0;
      return alpha_ == 0 ? 0.5 : 0.5 * std::pow(std::sqrt(d2), alpha_);
    }
    case Named::VariableRadiusLength: {
      const double d = (args.col(0) - args.col(1)).norm();
      const double thr = GraphRule::decaying_radius(args.col(0), gamma_) +
                         GraphRule::decaying_radius(args.col(1), gamma_);
      return (d > 0 && d <= thr) ? 0.5 * d : 0.0;
    }
    case Named::Custom:
      return fn_(args);
  }
  return 0.0;
}

bool KernelSpec::check_symmetry(int trials, double box_half_side) const {
  SubstreamRng rng(SeedSpec{0xfeedfaceULL, 13});
  const int d = metric_.is_torus() ? static_cast<int>(metric_.torus_sides().size()) : 2;
  for (int t = 0; t < trials; ++t) {
    Matrix args(d, order_);
    for (int j = 0; j < order_; ++j)
      for (int i = 0; i < d; ++i)
        args(i, j) = metric_.is_torus() ? rng.uniform(0, metric_.torus_sides()[i])
                                        : rng.uniform(-box_half_side, box_half_side);
    const double base = (*this)(args);
    Matrix perm = args;
    for (int j = static_cast<int>(perm.cols()) - 1; j > 0; --j) {
      const int swap_with = static_cast<int>(rng.next_u64() % (j + 1));
      perm.col(j).swap(perm.col(swap_with));
    }
    if (std::abs((*this)(perm)-base) > 1e-12 * (1 + std::abs(base))) return false;
    if (base < 0) return false;
  }
  return true;
}

namespace {

// Sum of f over ordered k-tuples via combinations (f symmetric), with the
// n^k work guard from the custom-kernel contract.
double custom_sum_rec(const KernelSpec& kernel, const Matrix& pts,
                      std::vector<int>& pick, Matrix& args, int depth, int first) {
  const int k = kernel.order();
  if (depth == k) return kernel(args);
  double s = 0;
  for (int j = first; j < pts.cols(); ++j) {
    pick[depth] = j;
    args.col(depth) = pts.col(j);
    s += custom_sum_rec(kernel, pts, pick, args, depth + 1, j + 1);
  }
  return s;
}

double custom_evaluate(const KernelSpec& kernel, const PointConfiguration& config) {
  const int k = kernel.order();
  const int n = config.atom_count();
  if (n < k) return 0.0;
  if (std::pow(static_cast<double>(n), k) > 1e8)
    throw std::invalid_argument("evaluate: custom kernel work guard n^k <= 1e8 exceeded");
  std::vector<int> pick(static_cast<std::size_t>(k));
  Matrix args(config.dim(), k);
  return factorial(k) * custom_sum_rec(kernel, config.points(), pick, args, 0, 0);
}

GraphRule rule_for(const KernelSpec& kernel) {
  switch (kernel.named()) {
    case KernelSpec::Named::EdgeIndicator:
    case KernelSpec::Named::LengthPower:
      return GraphRule::disk(kernel.rho());
    case KernelSpec::Named::VariableRadiusLength:
      return GraphRule::intersection(kernel.gamma());
    default:
      throw std::logic_error("rule_for: custom kernel has no graph rule");
  }
}

}  // namespace

double evaluate(const KernelSpec& kernel, const PointConfiguration& config) {
  if (!config.is_simple())
    throw std::invalid_argument("evaluate: configuration must be simple");
  if (config.atom_count() < kernel.order()) return 0.0;

  if (kernel.named() == KernelSpec::Named::Custom)
    return custom_evaluate(kernel, config);

  // Named order-2 kernels ride on the grid-built graph: the ordered-pair sum
  // is twice the per-edge sum.
  const GeometricGraph g = build_graph(config, rule_for(kernel), kernel.metric());
  const Matrix& p = config.points();
  double per_edge = 0;
  Matrix args(config.dim(), 2);
  for (int u = 0; u < g.vertex_count(); ++u)
    for (int v : g.adjacency()[u]) {
      if (v <= u) continue;
      args.col(0) = p.col(u);
      args.col(1) = p.col(v);
      per_edge += kernel(args);
    }
  return 2.0 * per_edge;
}

double local_version(const KernelSpec& kernel, const PointConfiguration& config,
                     Eigen::Index atom) {
  if (atom < 0 || atom >= config.atom_count())
    throw std::invalid_argument("local_version: atom index out of range");
  if (config.multiplicities()[atom] != 1)
    throw std::invalid_argument("local_version: atom must have multiplicity 1");
  const int k = kernel.order();
  const int n = config.atom_count();
  if (n < k) return 0.0;
  const Matrix& p = config.points();

  if (k == 2) {
    Matrix args(config.dim(), 2);
    args.col(0) = p.col(atom);
    double s = 0;
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      if (j == atom) continue;
      args.col(1) = p.col(j);
      s += kernel(args);
    }
    return s;
  }

  // order-(k-1) tuple sum over the remaining atoms, frozen first argument
  if (std::pow(static_cast<double>(n), k - 1) > 1e8)
    throw std::invalid_argument("local_version: work guard exceeded");
  Matrix rest(config.dim(), n - 1);
  Eigen::Index w = 0;
  for (Eigen::Index j = 0; j < p.cols(); ++j)
    if (j != atom) rest.col(w++) = p.col(j);
  std::vector<int> pick(static_cast<std::size_t>(k - 1));
  Matrix args(config.dim(), k);
  args.col(0) = p.col(atom);
  std::function<double(int, int)> rec = [&](int depth, int first) -> double {
    if (depth == k) return kernel(args);
    double s = 0;
    for (int j = first; j < rest.cols(); ++j) {
      args.col(depth) = rest.col(j);
      s += rec(depth + 1, j + 1);
    }
    return s;
  };
  return factorial(k - 1) * rec(1, 0);
}

double local_version(const KernelSpec& kernel, const PointConfiguration& config,
                     const Vector& x) {
  const Eigen::Index atom = config.find_atom(x);
  if (atom < 0) throw std::invalid_argument("local_version: x is not an atom");
  return local_version(kernel, config, atom);
}

double local_version_with(const KernelSpec& kernel, const PointConfiguration& config,
                          const Vector& x) {
  if (config.find_atom(x) >= 0) return local_version(kernel, config, x);
  const PointConfiguration plus = config.with_point(x);
  return local_version(kernel, plus, plus.atom_count() - 1);
}

double add_one_cost(const KernelSpec& kernel, const PointConfiguration& config,
                    const Vector& x) {
  if (!config.is_simple())
    throw std::invalid_argument("add_one_cost: configuration must be simple");
  if (config.find_atom(x) >= 0) return 0.0;  // F(xi) = F([xi]) convention
  const double cost = kernel.order() * local_version_with(kernel, config, x);
#ifndef NDEBUG
  const double direct = evaluate(kernel, config.with_point(x)) - evaluate(kernel, config);
  assert(std::abs(cost - direct) <= 1e-9 * (1 + std::abs(direct)));
#endif
  return cost;
}

VStatistics v_statistics(const KernelSpec& kernel, const PointConfiguration& config,
                         const IntensityModel& model, double rel_tol) {
  if (!config.is_simple())
    throw std::invalid_argument("v_statistics: configuration must be simple");
  VStatistics out;
  const double k = kernel.order();

  for (Eigen::Index a = 0; a < config.atom_count(); ++a) {
    const double f = local_version(kernel, config, a);
    out.v_plus += k * k * f * f;
  }

  // Quadrature resolution tracks the kernel's interaction range.
  double range = kernel.rho();
  if (kernel.named() == KernelSpec::Named::VariableRadiusLength)
    range = std::pow(3.0, kernel.gamma()) + 1.0;
  if (kernel.named() == KernelSpec::Named::Custom || !(range > 0))
    range = model.window().min_side();
  const int cells = std::clamp(
      static_cast<int>(std::ceil(model.window().min_side() / (range / 4))), 1, 64);

  auto integrand = [&](const Vector& x) {
    const double dens = model.density(x);
    if (dens == 0) return 0.0;
    const double f = local_version_with(kernel, config, x);
    return k * k * f * f * dens;
  };
  auto r = integrate_box(integrand, model.window().lower, model.window().upper,
                         rel_tol, 8000000, cells, /*indicator_aware=*/true);
  if (!std::isfinite(r.value) || r.value > 1e15)
    throw std::runtime_error("v_statistics: divergent-integral");
  out.v_minus = r.value;
  out.v_minus_error = r.error;
  return out;
}

namespace {

// Int f(x, y)^p dmu(y) for order-2 kernels, p in {1, 2}.
double pair_partial_integral(const KernelSpec& kernel, const IntensityModel& model,
                             const Vector& x, int p, double rel_tol) {
  switch (kernel.named()) {
    case KernelSpec::Named::EdgeIndicator:
      return std::pow(0.5, p) * model.ball_mass(x, kernel.rho(), rel_tol);
    case KernelSpec::Named::LengthPower: {
      const double a = p * kernel.alpha();
      if (model.variant() == IntensityModel::Variant::HomogeneousTorus) {
        const int d = model.dim();
        if (2 * kernel.rho() > model.window().min_side())
          throw std::invalid_argument("marginal: unsupported-geometry on torus");
        return std::pow(0.5, p) * model.rate() * d * unit_ball_volume(d) *
               std::pow(kernel.rho(), d + a) / (d + a);
      }
      auto r = integrate_ball_box(
          [&](const Vector& y) {
            const double d2 = (y - x).squaredNorm();
            if (!(d2 > 0)) return 0.0;
            return model.density(y) * std::pow(0.5, p) * std::pow(d2, 0.5 * a);
          },
          x, kernel.rho(), model.window().lower, model.window().upper, rel_tol);
      return r.value;
    }
    case KernelSpec::Named::VariableRadiusLength: {
      const double reach = (std::pow(3.0, kernel.gamma()) + 1.0) *
                           GraphRule::decaying_radius(x, kernel.gamma());
      auto r = integrate_ball_box(
          [&](const Vector& y) {
            Matrix args(x.size(), 2);
            args.col(0) = x;
            args.col(1) = y;
            const double f = kernel(args);
            return model.density(y) * (p == 1 ? f : f * f);
          },
          x, reach, model.window().lower, model.window().upper, rel_tol);
      return r.value;
    }
    case KernelSpec::Named::Custom: {
      auto r = integrate_box(
          [&](const Vector& y) {
            Matrix args(x.size(), 2);
            args.col(0) = x;
            args.col(1) = y;
            const double f = kernel(args);
            return model.density(y) * (p == 1 ? f : f * f);
          },
          model.window().lower, model.window().upper, rel_tol, 400000);
      return r.value;
    }
  }
  return 0.0;
}

}  // namespace

double marginal_kernel(const KernelSpec& kernel, const IntensityModel& model,
                       const Matrix& args, double rel_tol) {
  const int k = kernel.order();
  const int i = static_cast<int>(args.cols());
  if (i < 1 || i > k) throw std::invalid_argument("marginal_kernel: 1 <= i <= k required");
  if (i == k) return kernel(args);
  if (k != 2)
    throw std::invalid_argument(
        "marginal_kernel: numeric marginals implemented for order <= 2");
  // k = 2, i = 1: binom(2,1) * Int f(x, z) dmu(z)
  return 2.0 * pair_partial_integral(kernel, model, args.col(0), 1, rel_tol);
}

std::vector<double> marginal_norms(const KernelSpec& kernel,
                                   const IntensityModel& model, double rel_tol) {
  const int k = kernel.order();
  std::vector<double> norms(static_cast<std::size_t>(k), 0.0);
  const Vector& lo = model.window().lower;
  const Vector& hi = model.window().upper;

  if (k == 1) {
    Matrix args(model.dim(), 1);
    auto r = integrate_box(
        [&](const Vector& x) {
          args.col(0) = x;
          const double f = kernel(args);
          return f * f * model.density(x);
        },
        lo, hi, rel_tol, 400000);
    norms[0] = r.value;
    return norms;
  }
  if (k != 2)
    throw std::invalid_argument("marginal_norms: numeric path implemented for order <= 2");

  auto r1 = integrate_box(
      [&](const Vector& x) {
        const double f1 = 2.0 * pair_partial_integral(kernel, model, x, 1, rel_tol);
        return f1 * f1 * model.density(x);
      },
      lo, hi, rel_tol, 200000);
  auto r2 = integrate_box(
      [&](const Vector& x) {
        return pair_partial_integral(kernel, model, x, 2, rel_tol) * model.density(x);
      },
      lo, hi, rel_tol, 200000);
  norms[0] = r1.value;
  norms[1] = r2.value;
  for (double v : norms)
    if (!std::isfinite(v) || v > 1e15)
      throw std::runtime_error("marginal_norms: divergent-integral");
  return norms;
}

double ustat_mean(const KernelSpec& kernel, const IntensityModel& model,
                  double rel_tol) {
  const Vector& lo = model.window().lower;
  const Vector& hi = model.window().upper;
  if (kernel.order() == 1) {
    Matrix args(model.dim(), 1);
    auto r = integrate_box(
        [&](const Vector& x) {
          args.col(0) = x;
          return kernel(args) * model.density(x);
        },
        lo, hi, rel_tol, 400000);
    return r.value;
  }
  if (kernel.order() != 2)
    throw std::invalid_argument("ustat_mean: implemented for orders 1 and 2");
  if (kernel.named() == KernelSpec::Named::EdgeIndicator)
    return edge_count_mean(model, kernel.rho(), rel_tol);
  // Int f dmu^2 = Int (Int f(x, y) dmu(y)) dmu(x)
  auto r = integrate_box(
      [&](const Vector& x) {
        return pair_partial_integral(kernel, model, x, 1, rel_tol) * model.density(x);
      },
      lo, hi, rel_tol, 200000);
  if (!std::isfinite(r.value) || r.value > 1e15)
    throw std::runtime_error("ustat_mean: divergent-mean");
  return r.value;
}

VarianceDecomposition variance_decomposition(const KernelSpec& kernel,
                                             const IntensityModel& model,
                                             double rel_tol) {
  VarianceDecomposition out;
  out.marginal_sq_norms = marginal_norms(kernel, model, rel_tol);
  const int k = kernel.order();
  for (int i = 1; i <= k; ++i) {
    const double term = factorial(i) * out.marginal_sq_norms[static_cast<std::size_t>(i - 1)];
    out.variance += term;
    out.v += i * term;
  }
  out.v /= static_cast<double>(k) * k;
  if (out.v > out.variance / k * (1 + 1e-9) + 1e-12)
    throw std::runtime_error("variance_decomposition: V <= Var/k violated");
  return out;
}

}  // namespace geoconc

#include "geoconc/sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace geoconc {

namespace {

Vector sample_uniform_in_window(const Window& w, SubstreamRng& rng) {
  Vector x(w.dim());
  for (int i = 0; i < w.dim(); ++i) x[i] = rng.uniform(w.lower[i], w.upper[i]);
  return x;
}

Vector sample_point(const IntensityModel& model, SubstreamRng& rng) {
  const Window& w = model.window();
  if (model.variant() != IntensityModel::Variant::RadialDensity)
    return sample_uniform_in_window(w, rng);

  // Rejection against the uniform envelope density_sup * Leb(window).
  const double sup = model.density_sup();
  const double acceptance = model.total_mass() / (sup * w.volume());
  if (acceptance < 1e-4)
    throw std::runtime_error("sample: envelope-too-loose (acceptance rate " +
                             std::to_string(acceptance) + ")");
  for (;;) {
    Vector x = sample_uniform_in_window(w, rng);
    if (rng.next_double() * sup <= model.density(x)) return x;
  }
}

}  // namespace

PointConfiguration sample(const IntensityModel& model, SeedSpec seed) {
  if (!std::isfinite(model.total_mass()))
    throw std::invalid_argument("sample: total mass must be finite");
  SubstreamRng rng(seed);
  const auto n = rng.poisson(model.total_mass());
  Matrix pts(model.dim(), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < pts.cols(); ++i)
    pts.col(i) = sample_point(model, rng);
  return PointConfiguration(std::move(pts));
}

MeckeFunctional MeckeFunctional::one(const IntensityModel& model) {
  MeckeFunctional f;
  f.name = "one";
  f.h = [](const Vector&, const PointConfiguration&) { return 1.0; };
  f.analytic_rhs = model.total_mass();
  return f;
}

MeckeFunctional MeckeFunctional::count_minus_one(const IntensityModel& model) {
  MeckeFunctional f;
  f.name = "count_minus_one";
  f.h = [](const Vector&, const PointConfiguration& xi) {
    return static_cast<double>(xi.total_count()) - 1.0;
  };
  // Int E[(eta + delta_x)(X) - 1] dmu = total_mass^2 by E eta(X) = mu(X).
  f.analytic_rhs = model.total_mass() * model.total_mass();
  return f;
}

MeckeFunctional MeckeFunctional::neighbor_count(const IntensityModel& model,
                                                double rho) {
  MeckeFunctional f;
  f.name = "neighbor_count";
  const Metric metric = model.metric();
  const double rho2 = rho * rho;
  f.h = [metric, rho2](const Vector& x, const PointConfiguration& xi) {
    double count = 0;
    for (Eigen::Index j = 0; j < xi.points().cols(); ++j) {
      const double d2 = metric.squared_distance(x, xi.points().col(j));
      if (d2 > 0 && d2 <= rho2) count += xi.multiplicities()[j];
    }
    return count;
  };
  f.analytic_rhs = 2.0 * edge_count_mean(model, rho);
  return f;
}

MeckeReport mecke_check(const IntensityModel& model, const MeckeFunctional& fn,
                        long replications, SeedSpec seed) {
  if (replications <= 0)
    throw std::invalid_argument("mecke_check: replications must be positive");

  MeckeReport report;
  report.replications = replications;

  double lhs_sum = 0, lhs_sq = 0;
  for (long rep = 0; rep < replications; ++rep) {
    const PointConfiguration xi =
        sample(model, SeedSpec{seed.master_seed, seed.replication_index + 2 * rep});
    double v = 0;
    for (Eigen::Index j = 0; j < xi.points().cols(); ++j)
      v += xi.multiplicities()[j] * fn.h(xi.points().col(j), xi);
    lhs_sum += v;
    lhs_sq += v * v;
  }
  report.lhs_estimate = lhs_sum / replications;
  const double lhs_var =
      std::max(0.0, lhs_sq / replications - report.lhs_estimate * report.lhs_estimate);
  double se2 = lhs_var / replications;

  if (std::isfinite(fn.analytic_rhs)) {
    report.rhs_value = fn.analytic_rhs;
  } else {
    // Nested Monte Carlo: outer x ~ mu / mu(X), fresh process per point.
    report.rhs_is_estimate = true;
    double rhs_sum = 0, rhs_sq = 0;
    const double mass = model.total_mass();
    for (long rep = 0; rep < replications; ++rep) {
      SubstreamRng rng(SeedSpec{seed.master_seed ^ 0xa5a5a5a5a5a5a5a5ULL,
                                seed.replication_index + 2 * rep});
      Vector x(model.dim());
      {
        // One draw from the normalized density.
        SeedSpec s{seed.master_seed ^ 0x5a5a5a5a5a5a5a5aULL,
                   seed.replication_index + 2 * rep};
        SubstreamRng point_rng(s);
        const Window& w = model.window();
        const double sup = model.density_sup();
        for (;;) {
          Vector cand(w.dim());
          for (int i = 0; i < w.dim(); ++i)
            cand[i] = point_rng.uniform(w.lower[i], w.upper[i]);
          if (point_rng.next_double() * sup <= model.density(cand)) {
            x = cand;
            break;
          }
        }
      }
      const PointConfiguration eta =
          sample(model, SeedSpec{seed.master_seed ^ 0xc3c3c3c3c3c3c3c3ULL,
                                 seed.replication_index + 2 * rep + 1});
      const double v = mass * fn.h(x, eta.with_point(x));
      rhs_sum += v;
      rhs_sq += v * v;
    }
    report.rhs_value = rhs_sum / replications;
    const double rhs_var =
        std::max(0.0, rhs_sq / replications - report.rhs_value * report.rhs_value);
    se2 += rhs_var / replications;
  }

  report.standard_error = std::sqrt(se2);
  report.pass = std::abs(report.lhs_estimate - report.rhs_value) <=
                3.0 * std::max(report.standard_error, 1e-12);
  return report;
}

MeckeReport slivnyak_mecke_pair_check(const IntensityModel& model, double rho,
                                      long replications, SeedSpec seed) {
  MeckeReport report;
  report.replications = replications;
  const Metric metric = model.metric();
  const double rho2 = rho * rho;

  double sum = 0, sq = 0;
  for (long rep = 0; rep < replications; ++rep) {
    const PointConfiguration xi =
        sample(model, SeedSpec{seed.master_seed, seed.replication_index + rep});
    const Matrix& p = xi.points();
    double pairs = 0;
    for (Eigen::Index i = 0; i < p.cols(); ++i)
      for (Eigen::Index j = i + 1; j < p.cols(); ++j) {
        const double d2 = metric.squared_distance(p.col(i), p.col(j));
        if (d2 > 0 && d2 <= rho2) pairs += 2;  // ordered pairs
      }
    sum += pairs;
    sq += pairs * pairs;
  }
  report.lhs_estimate = sum / replications;
  const double var = std::max(0.0, sq / replications - report.lhs_estimate * report.lhs_estimate);
  report.standard_error = std::sqrt(var / replications);
  report.rhs_value = 2.0 * edge_count_mean(model, rho);
  report.pass = std::abs(report.lhs_estimate - report.rhs_value) <=
                3.0 * std::max(report.standard_error, 1e-12);
  return report;
}

}  // namespace geoconc

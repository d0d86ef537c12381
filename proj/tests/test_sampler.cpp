#include "geoconc/sampler.hpp"

#include <doctest.h>

#include <cmath>

using namespace geoconc;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("sampling is deterministic in the seed") {
  const auto model = IntensityModel::homogeneous_torus(30.0, Window::unit_cube(2));
  const auto a = sample(model, SeedSpec{123, 7});
  const auto b = sample(model, SeedSpec{123, 7});
  REQUIRE(a.atom_count() == b.atom_count());
  CHECK(a.points() == b.points());
  const auto c = sample(model, SeedSpec{123, 8});
  CHECK((c.atom_count() != a.atom_count() || c.points() != a.points()));
}

TEST_CASE("zero rate gives the empty configuration") {
  const auto model = IntensityModel::homogeneous_box(0.0, Window::unit_cube(2));
  CHECK(sample(model, SeedSpec{1, 0}).atom_count() == 0);
}

TEST_CASE("count moments match the Poisson law") {
  const long reps = 10000;
  const auto torus = IntensityModel::homogeneous_torus(50.0, Window::unit_cube(2));
  double sum = 0, sq = 0;
  for (long i = 0; i < reps; ++i) {
    const double n = sample(torus, SeedSpec{2024, static_cast<std::uint64_t>(i)})
                         .total_count();
    sum += n;
    sq += n * n;
  }
  const double mean = sum / reps;
  CHECK(std::abs(mean - 50.0) <= 3.0 * std::sqrt(50.0 / reps));

  const double var = sq / reps - mean * mean;
  // Var(s^2) ~ (m4 - sigma^4)/n with Poisson m4 = lambda + 3 lambda^2
  const double se_var = std::sqrt((50.0 + 3 * 2500.0 - 2500.0) / reps);
  CHECK(std::abs(var - 50.0) <= 3.0 * se_var);
}

TEST_CASE("counts in disjoint regions are uncorrelated") {
  const long reps = 10000;
  const auto model = IntensityModel::homogeneous_torus(40.0, Window::unit_cube(2));
  double sa = 0, sb = 0, sab = 0;
  for (long i = 0; i < reps; ++i) {
    const auto c = sample(model, SeedSpec{77, static_cast<std::uint64_t>(i)});
    double na = 0, nb = 0;
    for (int j = 0; j < c.atom_count(); ++j) {
      const auto p = c.points().col(j);
      if (p[0] < 0.3 && p[1] < 0.3) ++na;
      if (p[0] > 0.6 && p[0] < 0.9 && p[1] > 0.6 && p[1] < 0.9) ++nb;
    }
    sa += na;
    sb += nb;
    sab += na * nb;
  }
  const double ma = sa / reps, mb = sb / reps;
  const double cov = sab / reps - ma * mb;
  const double se = std::sqrt(ma * mb / reps);
  CHECK(std::abs(cov) <= 3.0 * se);
}

TEST_CASE("radial rejection sampling reproduces the mass") {
  const auto model =
      IntensityModel::radial_density(5.0, 2.0, Window::centered_cube(2, 2.0));
  const long reps = 4000;
  double sum = 0;
  for (long i = 0; i < reps; ++i)
    sum += sample(model, SeedSpec{5, static_cast<std::uint64_t>(i)}).total_count();
  const double mean = sum / reps;
  const double se = std::sqrt(model.total_mass() / reps);
  CHECK(std::abs(mean - model.total_mass()) <= 3.0 * se);
}

TEST_CASE("mecke identity: the three reference functionals") {
  const auto model = IntensityModel::homogeneous_torus(100.0, Window::unit_cube(2));
  const long reps = 10000;

  const auto one = mecke_check(model, MeckeFunctional::one(model), reps, SeedSpec{11, 0});
  CHECK(one.pass);
  CHECK(one.rhs_value == doctest::Approx(100.0));

  const auto fact =
      mecke_check(model, MeckeFunctional::count_minus_one(model), reps, SeedSpec{12, 0});
  CHECK(fact.pass);
  CHECK(fact.rhs_value == doctest::Approx(10000.0));

  const auto nbr = mecke_check(model, MeckeFunctional::neighbor_count(model, 0.1),
                               reps, SeedSpec{13, 0});
  CHECK(nbr.pass);
  CHECK(nbr.rhs_value == doctest::Approx(100 * kPi).epsilon(1e-9));
}

TEST_CASE("mecke identity via the nested Monte Carlo right-hand side") {
  const auto model = IntensityModel::homogeneous_torus(20.0, Window::unit_cube(2));
  MeckeFunctional fn = MeckeFunctional::count_minus_one(model);
  const double truth = fn.analytic_rhs;
  fn.analytic_rhs = std::numeric_limits<double>::quiet_NaN();  // force nesting
  const auto rep = mecke_check(model, fn, 20000, SeedSpec{14, 0});
  CHECK(rep.rhs_is_estimate);
  CHECK(rep.pass);
  CHECK(std::abs(rep.rhs_value - truth) <= 5.0 * rep.standard_error);
}

TEST_CASE("edge count mean ties the quadrature to the sampled graphs") {
  // box model, so the boundary loss must match too
  const auto model = IntensityModel::homogeneous_box(60.0, Window::unit_cube(2));
  const double analytic = edge_count_mean(model, 0.12);
  const long reps = 3000;
  double sum = 0, sq = 0;
  const MeckeFunctional h = MeckeFunctional::neighbor_count(model, 0.12);
  for (long i = 0; i < reps; ++i) {
    const auto c = sample(model, SeedSpec{16, static_cast<std::uint64_t>(i)});
    double pairs = 0;
    for (int j = 0; j < c.atom_count(); ++j) pairs += h.h(c.points().col(j), c);
    sum += pairs / 2;
    sq += pairs * pairs / 4;
  }
  const double mean = sum / reps;
  const double se = std::sqrt(std::max(0.0, sq / reps - mean * mean) / reps);
  CHECK(std::abs(mean - analytic) <= 3 * se);
}

TEST_CASE("slivnyak-mecke order-2 pair identity") {
  const auto model = IntensityModel::homogeneous_torus(60.0, Window::unit_cube(2));
  const auto rep = slivnyak_mecke_pair_check(model, 0.1, 8000, SeedSpec{15, 0});
  CHECK(rep.pass);
  CHECK(rep.rhs_value == doctest::Approx(2 * edge_count_mean(model, 0.1)));
}

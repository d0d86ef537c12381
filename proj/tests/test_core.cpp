#include "geoconc/intensity.hpp"
#include "geoconc/quadrature.hpp"
#include "geoconc/rng.hpp"
#include "geoconc/types.hpp"

#include <doctest.h>

#include <cmath>

using namespace geoconc;

namespace {
constexpr double kPi = 3.14159265358979323846;

Vector v2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}
}  // namespace

TEST_CASE("window invariants") {
  CHECK_THROWS_AS(Window(v2(0, 0), v2(1, 0)), std::invalid_argument);
  CHECK_THROWS_AS(Window(v2(1, 1), v2(0, 0)), std::invalid_argument);
  const Window w = Window::unit_cube(2);
  CHECK(w.volume() == doctest::Approx(1.0));
  CHECK(w.contains(v2(0.5, 0.5)));
  CHECK(!w.contains(v2(1.5, 0.5)));
}

TEST_CASE("torus metric uses minimal images") {
  const Window w = Window::unit_cube(2, true);
  const Metric m = Metric::torus(w);
  CHECK(m.distance(v2(0.05, 0.5), v2(0.95, 0.5)) == doctest::Approx(0.1));
  CHECK(m.distance(v2(0.0, 0.0), v2(0.5, 0.5)) == doctest::Approx(std::sqrt(0.5)));
  const Vector d = m.displacement(v2(0.05, 0.5), v2(0.95, 0.5));
  CHECK(d[0] == doctest::Approx(-0.1));
}

TEST_CASE("configuration rejects duplicate atoms and bad multiplicities") {
  Matrix pts(2, 2);
  pts.col(0) = v2(0.25, 0.25);
  pts.col(1) = v2(0.25, 0.25);
  CHECK_THROWS_AS(PointConfiguration{pts}, std::invalid_argument);

  Matrix ok(2, 2);
  ok.col(0) = v2(0.25, 0.25);
  ok.col(1) = v2(0.75, 0.75);
  Eigen::VectorXi mult(2);
  mult << 1, 0;
  CHECK_THROWS_AS(PointConfiguration(ok, mult), std::invalid_argument);

  mult << 1, 3;
  const PointConfiguration c(ok, mult);
  CHECK(c.total_count() == 4);
  CHECK(!c.is_simple());
  const PointConfiguration plus = c.with_point(v2(0.1, 0.1));
  CHECK(plus.atom_count() == 3);
  CHECK(plus.total_count() == 5);
  const PointConfiguration less = plus.without_atom(1);
  CHECK(less.total_count() == 4);
  CHECK(less.multiplicities()[1] == 2);
}

TEST_CASE("1d quadrature reproduces closed forms") {
  auto r = integrate_1d([](double x) { return std::sin(x); }, 0.0, kPi, 1e-10);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-9));
  auto poly = integrate_1d([](double x) { return 3 * x * x; }, 0.0, 2.0, 1e-12);
  CHECK(poly.value == doctest::Approx(8.0).epsilon(1e-10));
}

TEST_CASE("box quadrature handles smooth and indicator integrands") {
  const Vector lo = Vector::Zero(2), hi = Vector::Ones(2);
  auto smooth = integrate_box(
      [](const Vector& x) { return x[0] * x[0] + std::sin(x[1]); }, lo, hi, 1e-8);
  CHECK(smooth.value == doctest::Approx(1.0 / 3 + 1 - std::cos(1.0)).epsilon(1e-7));

  // quarter-disk indicator: radius 1/2, area pi/16
  auto disk = integrate_box(
      [](const Vector& x) { return x.squaredNorm() <= 0.25 ? 1.0 : 0.0; }, lo, hi,
      1e-4, 4000000, 4, /*indicator_aware=*/true);
  CHECK(disk.value == doctest::Approx(kPi * 0.25 / 4).epsilon(5e-4));
}

TEST_CASE("ball-box slice integration matches closed forms") {
  const Vector lo = Vector::Zero(2), hi = Vector::Ones(2);
  auto full = integrate_ball_box([](const Vector&) { return 1.0; }, v2(0.5, 0.5),
                                 0.2, lo, hi, 1e-10);
  CHECK(full.value == doctest::Approx(kPi * 0.04).epsilon(1e-8));
  auto quarter = integrate_ball_box([](const Vector&) { return 1.0; }, v2(0.0, 0.0),
                                    0.1, lo, hi, 1e-10);
  CHECK(quarter.value == doctest::Approx(kPi * 0.01 / 4).epsilon(1e-8));
}

TEST_CASE("torus ball mass closed form") {
  const auto model = IntensityModel::homogeneous_torus(100.0, Window::unit_cube(2));
  CHECK(model.ball_mass(v2(0.3, 0.7), 0.1) == doctest::Approx(kPi).epsilon(1e-12));

  // constant in the center, exactly
  SubstreamRng rng(SeedSpec{42, 0});
  for (int i = 0; i < 20; ++i) {
    const Vector c = v2(rng.next_double(), rng.next_double());
    CHECK(model.ball_mass(c, 0.1) == doctest::Approx(kPi).epsilon(1e-12));
  }

  CHECK_THROWS_AS(model.ball_mass(v2(0.5, 0.5), 0.6), std::invalid_argument);
  CHECK_THROWS_AS(model.ball_mass(v2(0.5, 0.5), -1.0), std::invalid_argument);
  CHECK(model.ball_mass(v2(0.5, 0.5), 1e-6) < 1e-8);  // vanishes with the radius
}

TEST_CASE("box ball mass: corner quarter disk and monotonicity") {
  const auto model = IntensityModel::homogeneous_box(1.0, Window::unit_cube(2));
  const double quarter = model.ball_mass(v2(0.0, 0.0), 0.1);
  CHECK(quarter == doctest::Approx(kPi * 0.01 / 4).epsilon(1e-7));

  // independent oracle: indicator integration on the adaptive cell grid
  auto oracle = integrate_box(
      [](const Vector& x) { return x.squaredNorm() <= 0.01 ? 1.0 : 0.0; },
      Vector::Zero(2), Vector::Ones(2), 1e-4, 4000000, 8, /*indicator_aware=*/true);
  CHECK(quarter == doctest::Approx(oracle.value).epsilon(2e-3));

  double prev = 0;
  for (double rho = 0.02; rho <= 0.4; rho += 0.02) {
    const double m = model.ball_mass(v2(0.3, 0.4), rho);
    CHECK(m >= prev);
    prev = m;
  }
}

TEST_CASE("edge count mean: torus closed form, box boundary loss") {
  const auto torus = IntensityModel::homogeneous_torus(100.0, Window::unit_cube(2));
  CHECK(edge_count_mean(torus, 0.1) == doctest::Approx(50 * kPi).epsilon(1e-10));

  const auto zero = IntensityModel::homogeneous_torus(0.0, Window::unit_cube(2));
  CHECK(edge_count_mean(zero, 0.1) == 0.0);

  const auto box = IntensityModel::homogeneous_box(100.0, Window::unit_cube(2));
  const double en_box = edge_count_mean(box, 0.1);
  CHECK(en_box < 50 * kPi);
  CHECK(en_box > 0.8 * 50 * kPi);
}

TEST_CASE("radial density model") {
  const auto model =
      IntensityModel::radial_density(5.0, 2.0, Window::centered_cube(2, 5.0));
  // sandwich between inscribed and circumscribed discs; the disc mass has the
  // closed form 2 pi t (log(R+1) + 1/(R+1) - 1)
  auto disc_mass = [](double t, double R) {
    return 2 * kPi * t * (std::log(R + 1.0) + 1.0 / (R + 1.0) - 1.0);
  };
  CHECK(model.total_mass() > disc_mass(5.0, 5.0));
  CHECK(model.total_mass() < disc_mass(5.0, 5.0 * std::sqrt(2.0)));

  CHECK(model.density(v2(0, 0)) == doctest::Approx(5.0));
  CHECK(model.density(v2(3, 0)) == doctest::Approx(5.0 / 16.0));
  CHECK(model.density_sup() == doctest::Approx(5.0));

  // truncation tail: q = 2 <= d = 2 diverges; q = 3 is finite
  CHECK(std::isinf(model.neglected_mass_bound()));
  const auto m3 =
      IntensityModel::radial_density(1.0, 3.0, Window::centered_cube(2, 5.0));
  CHECK(m3.neglected_mass_bound() == doctest::Approx(2 * kPi / 6.0).epsilon(1e-9));

  const double bm = model.ball_mass(v2(0, 0), 0.5, 1e-7);
  CHECK(bm == doctest::Approx(disc_mass(5.0, 0.5)).epsilon(1e-6));
}

TEST_CASE("intensity config round trip") {
  const auto torus = IntensityModel::homogeneous_torus(100.0, Window::unit_cube(2));
  const auto back = IntensityModel::from_config(torus.to_config());
  CHECK(back.variant() == IntensityModel::Variant::HomogeneousTorus);
  CHECK(back.rate() == doctest::Approx(100.0));
  CHECK(back.total_mass() == doctest::Approx(torus.total_mass()));

  const auto radial =
      IntensityModel::radial_density(5.0, 2.0, Window::centered_cube(2, 2.0));
  const auto back2 = IntensityModel::from_config(radial.to_config());
  CHECK(back2.exponent() == doctest::Approx(2.0));
  CHECK(back2.total_mass() == doctest::Approx(radial.total_mass()).epsilon(1e-9));
}

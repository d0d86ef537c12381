#include "geoconc/convex_distance.hpp"

#include "geoconc/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace geoconc;

namespace {

Vector v2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

PointConfiguration simple_points(std::initializer_list<std::pair<double, double>> pts) {
  Matrix m(2, static_cast<Eigen::Index>(pts.size()));
  Eigen::Index j = 0;
  for (const auto& [x, y] : pts) m.col(j++) = v2(x, y);
  return PointConfiguration(std::move(m));
}

// exhaustive simplex-grid minimizer of sum_i (E_zeta q_i)^2 / m_i for |Q| <= 3
double grid_oracle(const PointConfiguration& xi,
                   const std::vector<DeficiencyProfile>& q, int steps = 1000) {
  const Eigen::VectorXi& mult = xi.multiplicities();
  auto value = [&](const Vector& p) {
    double f = 0;
    for (int i = 0; i < p.size(); ++i) f += p[i] * p[i] / mult[i];
    return std::sqrt(f);
  };
  double best = std::numeric_limits<double>::infinity();
  if (q.size() == 1) return value(q[0].q.cast<double>());
  if (q.size() == 2) {
    for (int a = 0; a <= steps; ++a) {
      const double w = static_cast<double>(a) / steps;
      best = std::min(best,
                      value(w * q[0].q.cast<double>() + (1 - w) * q[1].q.cast<double>()));
    }
    return best;
  }
  for (int a = 0; a <= steps; ++a)
    for (int b = 0; b <= steps - a; ++b) {
      const double wa = static_cast<double>(a) / steps;
      const double wb = static_cast<double>(b) / steps;
      best = std::min(best, value(wa * q[0].q.cast<double>() +
                                  wb * q[1].q.cast<double>() +
                                  (1 - wa - wb) * q[2].q.cast<double>()));
    }
  return best;
}

}  // namespace

TEST_CASE("deficiency sets") {
  const auto xi = simple_points({{0.1, 0.1}, {0.9, 0.9}});

  // xi in A: zero profile present
  ConvexDistanceProblem in_a{xi, std::vector<PointConfiguration>{xi}};
  const auto q0 = deficiency_set(in_a);
  REQUIRE(q0.size() == 1);
  CHECK(q0[0].q == Eigen::VectorXi::Zero(2));

  // A = {delta_x1, delta_x2}: profiles (1,0) and (0,1)
  std::vector<PointConfiguration> singles = {xi.without_atom(1), xi.without_atom(0)};
  ConvexDistanceProblem two{xi, singles};
  const auto q2 = deficiency_set(two);
  CHECK(q2.size() == 2);

  // threshold: 4 points, m = 2 -> all 0/1 vectors with exactly two ones
  const auto xi4 = simple_points({{0.1, 0.1}, {0.9, 0.9}, {0.1, 0.9}, {0.9, 0.1}});
  ConvexDistanceProblem thresh{xi4, ThresholdEvent{2}};
  CHECK(deficiency_set(thresh).size() == 6);

  CHECK_THROWS_AS(deficiency_set(ConvexDistanceProblem{xi, std::vector<PointConfiguration>{}}),
                  std::invalid_argument);
}

TEST_CASE("dominated profiles are pruned and do not change the value") {
  const auto xi = simple_points({{0.1, 0.1}, {0.9, 0.9}});
  // nu = empty gives q = (1,1), dominated by both singleton profiles
  std::vector<PointConfiguration> a = {xi.without_atom(1), xi.without_atom(0),
                                       PointConfiguration::empty(2)};
  ConvexDistanceProblem with_dominated{xi, a};
  const auto q = deficiency_set(with_dominated);
  CHECK(q.size() == 2);  // (1,1) pruned

  std::vector<PointConfiguration> b = {xi.without_atom(1), xi.without_atom(0)};
  ConvexDistanceProblem without{xi, b};
  CHECK(convex_distance(with_dominated).value ==
        doctest::Approx(convex_distance(without).value).epsilon(1e-9));
}

TEST_CASE("hand-solvable instances") {
  const auto xi = simple_points({{0.1, 0.1}, {0.9, 0.9}});

  // A = {empty}: d_T = sup u1 + u2 with |u| <= 1 = sqrt(2)
  ConvexDistanceProblem empty_event{xi, std::vector<PointConfiguration>{PointConfiguration::empty(2)}};
  CHECK(convex_distance(empty_event).value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));

  // A = {delta_x1, delta_x2}: min over p of sqrt((1-p)^2 + p^2) = 1/sqrt(2)
  std::vector<PointConfiguration> singles = {xi.without_atom(1), xi.without_atom(0)};
  ConvexDistanceProblem two{xi, singles};
  const auto res = convex_distance(two);
  CHECK(res.value == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));

  // xi in A -> 0
  ConvexDistanceProblem in_a{xi, std::vector<PointConfiguration>{xi}};
  CHECK(convex_distance(in_a).value == doctest::Approx(0.0));

  // multiplicity: xi = 2 delta_x, A = {delta_x}: sqrt(1/2)
  Matrix one(2, 1);
  one.col(0) = v2(0.5, 0.5);
  Eigen::VectorXi mult(1);
  mult << 2;
  const PointConfiguration heavy(one, mult);
  Matrix single(2, 1);
  single.col(0) = v2(0.5, 0.5);
  ConvexDistanceProblem heavy_problem{
      heavy, std::vector<PointConfiguration>{PointConfiguration(single)}};
  CHECK(convex_distance(heavy_problem).value ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("threshold events have the closed form (n - m)+ / sqrt(n)") {
  SubstreamRng rng(SeedSpec{501, 0});
  for (int n = 1; n <= 14; ++n) {
    Matrix pts(2, n);
    for (int j = 0; j < n; ++j) pts.col(j) = v2(rng.next_double(), rng.next_double());
    const PointConfiguration xi(std::move(pts));
    for (long m = 0; m <= n + 1; ++m) {
      ConvexDistanceProblem problem{xi, ThresholdEvent{m}};
      const double expected = std::max<long>(0, n - m) / std::sqrt(double(n));
      CHECK(convex_distance(problem, 1e-11).value ==
            doctest::Approx(expected).epsilon(1e-8));
    }
  }
}

TEST_CASE("solver agrees with the simplex-grid oracle on small instances") {
  SubstreamRng rng(SeedSpec{502, 0});
  int tested = 0;
  while (tested < 100) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 4);
    Matrix pts(2, n);
    for (int j = 0; j < n; ++j) pts.col(j) = v2(rng.next_double(), rng.next_double());
    Eigen::VectorXi mult(n);
    for (int j = 0; j < n; ++j) mult[j] = 1 + static_cast<int>(rng.next_u64() % 2);
    const PointConfiguration xi(pts, mult);

    // random finite event built from sub-configurations of xi
    const int members = 1 + static_cast<int>(rng.next_u64() % 3);
    std::vector<PointConfiguration> a;
    for (int k = 0; k < members; ++k) {
      PointConfiguration nu = xi;
      const int removals = 1 + static_cast<int>(rng.next_u64() % (n + 1));
      for (int rr = 0; rr < removals && nu.atom_count() > 0; ++rr)
        nu = nu.without_atom(static_cast<Eigen::Index>(rng.next_u64() %
                                                       static_cast<std::uint64_t>(nu.atom_count())));
      a.push_back(std::move(nu));
    }
    ConvexDistanceProblem problem{xi, a};
    const auto q = deficiency_set(problem);
    if (q.size() > 3) continue;
    ++tested;
    const double solver = convex_distance(problem, 1e-10).value;
    const double oracle = grid_oracle(xi, q);
    CHECK(solver == doctest::Approx(oracle).epsilon(2e-6));
    CHECK(solver <= oracle + 1e-9);  // the grid never beats the true minimum
  }
}

TEST_CASE("certificates satisfy the minimax sandwich") {
  SubstreamRng rng(SeedSpec{503, 0});
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 8);
    Matrix pts(2, n);
    for (int j = 0; j < n; ++j) pts.col(j) = v2(rng.next_double(), rng.next_double());
    const PointConfiguration xi(std::move(pts));
    const long m = static_cast<long>(rng.next_u64() % static_cast<std::uint64_t>(n));
    ConvexDistanceProblem problem{xi, ThresholdEvent{m}};
    const double tol = 1e-10;
    const auto res = convex_distance(problem, tol);

    // |u|_xi <= 1
    double norm2 = 0;
    for (int i = 0; i < n; ++i) norm2 += res.optimal_u[i] * res.optimal_u[i];
    CHECK(norm2 <= 1.0 + 1e-9);

    // sup-form at the returned u: min over profiles of <u, q> >= value - slack.
    // For the threshold polytope the greedy filling minimizes <u, q>.
    std::vector<double> coords(res.optimal_u.begin(), res.optimal_u.end());
    std::sort(coords.begin(), coords.end());
    const long deficit = std::max<long>(0, n - m);
    double min_inner = 0;
    for (long i = 0; i < deficit; ++i) min_inner += coords[static_cast<std::size_t>(i)];
    CHECK(min_inner >= res.value - 1e-6);

    // min-form at the mixture: value of the mixture is >= value
    Vector p = Vector::Zero(n);
    for (std::size_t s = 0; s < res.support.size(); ++s)
      p += res.mixture[s] * res.support[s].q.cast<double>();
    CHECK(std::sqrt(p.squaredNorm()) >= res.value - 1e-9);
  }
}

TEST_CASE("zero distance iff the zero profile is feasible") {
  const auto xi = simple_points({{0.2, 0.2}, {0.8, 0.8}, {0.2, 0.8}});
  for (long m = 0; m <= 4; ++m) {
    ConvexDistanceProblem problem{xi, ThresholdEvent{m}};
    const double v = convex_distance(problem).value;
    if (m >= 3)
      CHECK(v == 0.0);
    else
      CHECK(v > 0.0);
  }
}

TEST_CASE("structural properties on one instance") {
  const auto xi = simple_points({{0.2, 0.2}, {0.8, 0.8}, {0.2, 0.8}, {0.8, 0.2}});
  std::vector<Vector> probes = {v2(0.5, 0.5), v2(0.1, 0.6), v2(0.7, 0.3)};
  const auto rep = check_dt_instance(xi, ThresholdEvent{2}, probes, 1e-10);
  CHECK(rep.pass);
  CHECK(rep.dt == doctest::Approx(2.0 / 2.0).epsilon(1e-8));  // (4-2)/sqrt(4)
  CHECK(rep.vplus_dt <= 1.0 + 1e-8);
  CHECK(rep.min_d_dt2 >= -1e-8);
  CHECK(rep.max_d_dt2 <= 2.0 + 1e-8);
  CHECK(rep.vplus_dt2 <= rep.four_dt2 + 1e-8);
}

TEST_CASE("sampled structural checks and the isoperimetric product") {
  const auto model = IntensityModel::homogeneous_torus(8.0, Window::unit_cube(2));
  const auto rep = check_dt_properties(model, ThresholdEvent{8}, 25, 3, SeedSpec{504, 0});
  CHECK(rep.pass);
  CHECK(rep.violations == 0);
  CHECK(rep.worst_vplus_dt <= 1.0 + 1e-8);

  const auto iso = isoperimetric_check(model, ThresholdEvent{8}, 2000, SeedSpec{505, 0});
  CHECK(iso.p_event > 0.3);
  CHECK(iso.p_event < 0.8);
  CHECK(iso.product <= 1.0 + 1e-6);
  CHECK(iso.pass);
  for (const auto& row : iso.tail_rows) CHECK(row.pass);
}

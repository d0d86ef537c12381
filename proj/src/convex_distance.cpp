#include "geoconc/convex_distance.hpp"

#include "geoconc/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace geoconc {

namespace {

long threshold_deficit(const PointConfiguration& xi, const ThresholdEvent& ev) {
  return std::max<long>(0, xi.total_count() - ev.max_count);
}

void enumerate_threshold_profiles(const Eigen::VectorXi& mult, long deficit,
                                  Eigen::VectorXi& work, int pos,
                                  std::vector<DeficiencyProfile>& out,
                                  std::size_t cap) {
  if (out.size() > cap)
    throw std::runtime_error("deficiency_set: threshold profile enumeration cap exceeded");
  if (pos == mult.size()) {
    if (deficit == 0) out.push_back(DeficiencyProfile{work});
    return;
  }
  const long take_max = std::min<long>(mult[pos], deficit);
  // remaining capacity prunes dead branches
  long rest = 0;
  for (int i = pos + 1; i < mult.size(); ++i) rest += mult[i];
  for (long take = std::max<long>(0, deficit - rest); take <= take_max; ++take) {
    work[pos] = static_cast<int>(take);
    enumerate_threshold_profiles(mult, deficit - take, work, pos + 1, out, cap);
  }
  work[pos] = 0;
}

}  // namespace

std::vector<DeficiencyProfile> deficiency_set(const ConvexDistanceProblem& problem,
                                              std::size_t enumeration_cap) {
  const PointConfiguration& xi = problem.xi;
  std::vector<DeficiencyProfile> out;

  if (const auto* finite = std::get_if<std::vector<PointConfiguration>>(&problem.event)) {
    if (finite->empty())
      throw std::invalid_argument("deficiency_set: event must be non-empty");
    for (const PointConfiguration& nu : *finite) {
      if (nu.dim() != xi.dim() && nu.atom_count() > 0)
        throw std::invalid_argument("deficiency_set: dimension mismatch in event");
      Eigen::VectorXi q(xi.atom_count());
      for (Eigen::Index i = 0; i < xi.atom_count(); ++i) {
        const Eigen::Index at = nu.find_atom(xi.points().col(i));
        const int nu_mult = at >= 0 ? nu.multiplicities()[at] : 0;
        q[i] = std::max(0, xi.multiplicities()[i] - nu_mult);
      }
      out.push_back(DeficiencyProfile{std::move(q)});
    }
  } else {
    const auto& ev = std::get<ThresholdEvent>(problem.event);
    const long deficit = threshold_deficit(xi, ev);
    Eigen::VectorXi work = Eigen::VectorXi::Zero(xi.atom_count());
    if (deficit == 0) {
      out.push_back(DeficiencyProfile{work});
    } else {
      enumerate_threshold_profiles(xi.multiplicities(), deficit, work, 0, out,
                                   enumeration_cap);
    }
  }

  // Deduplicate, then drop dominated profiles: any q' >= q pointwise is
  // redundant for the minimization.
  std::sort(out.begin(), out.end(), [](const DeficiencyProfile& a, const DeficiencyProfile& b) {
    return std::lexicographical_compare(a.q.begin(), a.q.end(), b.q.begin(), b.q.end());
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const DeficiencyProfile& a, const DeficiencyProfile& b) {
                          return a.q == b.q;
                        }),
            out.end());
  std::vector<DeficiencyProfile> kept;
  for (const auto& cand : out) {
    bool dominated = false;
    for (const auto& other : out) {
      if (&other == &cand || other.q == cand.q) continue;
      if ((cand.q.array() >= other.q.array()).all()) {
        dominated = true;
        break;
      }
    }
    if (!dominated) kept.push_back(cand);
  }
  return kept;
}

namespace {

// Linear minimization oracle over the profile polytope.
struct ProfileOracle {
  const PointConfiguration* xi = nullptr;
  const std::vector<DeficiencyProfile>* explicit_q = nullptr;  // finite events
  long deficit = 0;                                            // threshold events

  Eigen::VectorXi minimize(const Vector& grad) const {
    if (explicit_q) {
      std::size_t best = 0;
      double best_v = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < explicit_q->size(); ++j) {
        const double v = (*explicit_q)[j].q.cast<double>().dot(grad);
        if (v < best_v) {
          best_v = v;
          best = j;
        }
      }
      return (*explicit_q)[best].q;
    }
    // Threshold: fill `deficit` units over the atoms in ascending gradient
    // order, respecting multiplicities; never enumerates A.
    const Eigen::VectorXi& mult = xi->multiplicities();
    Eigen::VectorXi q = Eigen::VectorXi::Zero(mult.size());
    std::vector<int> order(static_cast<std::size_t>(mult.size()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return grad[a] < grad[b]; });
    long left = deficit;
    for (int i : order) {
      if (left == 0) break;
      const long take = std::min<long>(mult[i], left);
      q[i] = static_cast<int>(take);
      left -= take;
    }
    return q;
  }
};

}  // namespace

ConvexDistanceResult convex_distance(const ConvexDistanceProblem& problem,
                                     double tolerance, long max_iterations) {
  const PointConfiguration& xi = problem.xi;
  const int n = xi.atom_count();
  Vector inv_mult(n);
  for (int i = 0; i < n; ++i) inv_mult[i] = 1.0 / xi.multiplicities()[i];

  ProfileOracle oracle;
  oracle.xi = &xi;
  std::vector<DeficiencyProfile> explicit_q;
  if (const auto* finite = std::get_if<std::vector<PointConfiguration>>(&problem.event)) {
    ConvexDistanceProblem reduced{xi, *finite};
    explicit_q = deficiency_set(reduced);
    oracle.explicit_q = &explicit_q;
  } else {
    oracle.deficit = threshold_deficit(xi, std::get<ThresholdEvent>(problem.event));
  }

  ConvexDistanceResult res;
  if (n == 0 || (oracle.explicit_q == nullptr && oracle.deficit == 0)) {
    res.optimal_u = Vector::Zero(n);
    res.support.push_back(DeficiencyProfile{Eigen::VectorXi::Zero(n)});
    res.mixture.push_back(1.0);
    return res;
  }

  // Objective f(p) = sum_i p_i^2 / m_i over p in conv(Q); grad = 2 p / m.
  auto objective = [&](const Vector& p) {
    return (p.array().square() * inv_mult.array()).sum();
  };

  // Active set keyed by the profile itself.
  std::map<std::vector<int>, double> weights;
  auto key_of = [](const Eigen::VectorXi& q) {
    return std::vector<int>(q.begin(), q.end());
  };

  Eigen::VectorXi v0 = oracle.minimize(Vector::Zero(n));
  weights[key_of(v0)] = 1.0;
  Vector p = v0.cast<double>();

  double gap = std::numeric_limits<double>::infinity();
  long it = 0;
  for (; it < max_iterations; ++it) {
    const Vector grad = 2.0 * (p.array() * inv_mult.array()).matrix();
    const Eigen::VectorXi s = oracle.minimize(grad);
    const Vector sd = s.cast<double>();
    gap = grad.dot(p - sd);
    if (gap <= tolerance) break;

    // Away vertex among the active set.
    const std::vector<int>* away_key = nullptr;
    double away_val = -std::numeric_limits<double>::infinity();
    double away_weight = 0;
    for (const auto& [k, w] : weights) {
      double v = 0;
      for (int i = 0; i < n; ++i) v += grad[i] * k[static_cast<std::size_t>(i)];
      if (v > away_val) {
        away_val = v;
        away_key = &k;
        away_weight = w;
      }
    }

    const double fw_decrease = grad.dot(p) - grad.dot(sd);
    const double away_decrease = away_val - grad.dot(p);

    Vector dir;
    double gamma_max;
    bool away_step = away_key && away_decrease > fw_decrease && weights.size() > 1;
    if (away_step) {
      Vector av(n);
      for (int i = 0; i < n; ++i) av[i] = (*away_key)[static_cast<std::size_t>(i)];
      dir = p - av;
      gamma_max = away_weight / (1.0 - away_weight);
      if (!(gamma_max > 0) || !std::isfinite(gamma_max)) {
        away_step = false;
      }
    }
    if (!away_step) {
      dir = sd - p;
      gamma_max = 1.0;
    }

    const double curv = (dir.array().square() * inv_mult.array()).sum();
    const double slope = grad.dot(dir);
    if (slope >= 0) break;  // no descent left in exact arithmetic
    double gamma = curv > 0 ? std::min(gamma_max, -slope / (2 * curv)) : gamma_max;
    if (!(gamma > 0)) break;

    if (away_step) {
      // zeta <- (1+gamma) zeta, then the away vertex gives back gamma
      const double scale = 1.0 + gamma;
      for (auto& [k, w] : weights) w *= scale;
      auto itw = weights.find(*away_key);
      itw->second = scale * away_weight - gamma;
      if (itw->second <= 1e-15) weights.erase(itw);
    } else {
      for (auto& [k, w] : weights) w *= (1.0 - gamma);
      weights[key_of(s)] += gamma;
    }
    p += gamma * dir;

    if ((it & 127) == 0) {
      // Refresh p from the weights to cancel drift.
      p.setZero();
      for (const auto& [k, w] : weights)
        for (int i = 0; i < n; ++i) p[i] += w * k[static_cast<std::size_t>(i)];
    }
  }
  if (it >= max_iterations)
    throw std::runtime_error("convex_distance: convergence-failure (gap " +
                             std::to_string(gap) + ")");

  const double f = objective(p);
  res.value = std::sqrt(std::max(0.0, f));
  res.gap = gap;
  res.iterations = it;
  for (const auto& [k, w] : weights) {
    if (w <= 0) continue;
    Eigen::VectorXi q(n);
    for (int i = 0; i < n; ++i) q[i] = k[static_cast<std::size_t>(i)];
    res.support.push_back(DeficiencyProfile{std::move(q)});
    res.mixture.push_back(w);
  }
  // u = h / |h|_xi with h_i = p_i / m_i.
  res.optimal_u = Vector::Zero(n);
  if (res.value > 0) {
    Vector h = (p.array() * inv_mult.array()).matrix();
    res.optimal_u = h / res.value;  // |h|_xi = sqrt(f) = value
  }
  return res;
}

namespace {

std::string serialize_instance(const PointConfiguration& xi, const ThresholdEvent& ev) {
  std::ostringstream os;
  os << "threshold m=" << ev.max_count << "; atoms:";
  for (int i = 0; i < xi.atom_count(); ++i) {
    os << " [";
    for (int r = 0; r < xi.dim(); ++r)
      os << (r ? "," : "") << xi.points()(r, i);
    os << "]x" << xi.multiplicities()[i];
  }
  return os.str();
}

}  // namespace

DtInstanceReport check_dt_instance(const PointConfiguration& xi,
                                   const ThresholdEvent& event,
                                   const std::vector<Vector>& probes,
                                   double tolerance) {
  const double slack = 10 * tolerance;
  DtInstanceReport rep;
  ConvexDistanceProblem base{xi, event};
  const double dt = convex_distance(base, tolerance).value;
  rep.dt = dt;
  rep.four_dt2 = 4 * dt * dt;

  for (int i = 0; i < xi.atom_count(); ++i) {
    ConvexDistanceProblem reduced{xi.without_atom(i), event};
    const double dt_minus = convex_distance(reduced, tolerance).value;
    const double diff = dt - dt_minus;
    const double diff2 = dt * dt - dt_minus * dt_minus;
    rep.vplus_dt += xi.multiplicities()[i] * diff * diff;
    rep.vplus_dt2 += xi.multiplicities()[i] * diff2 * diff2;
  }

  rep.min_d_dt2 = probes.empty() ? 0 : std::numeric_limits<double>::infinity();
  rep.max_d_dt2 = 0;
  for (const Vector& z : probes) {
    ConvexDistanceProblem extended{xi.with_point(z), event};
    const double dt_plus = convex_distance(extended, tolerance).value;
    const double d2 = dt_plus * dt_plus - dt * dt;
    rep.min_d_dt2 = std::min(rep.min_d_dt2, d2);
    rep.max_d_dt2 = std::max(rep.max_d_dt2, d2);
    if (dt_plus < dt - slack) rep.monotone_ok = false;
  }
  if (probes.empty()) rep.min_d_dt2 = 0;

  rep.pass = rep.vplus_dt <= 1.0 + slack && rep.min_d_dt2 >= -slack &&
             rep.max_d_dt2 <= 2.0 + slack &&
             rep.vplus_dt2 <= rep.four_dt2 + slack && rep.monotone_ok;
  return rep;
}

DtPropertiesReport check_dt_properties(const IntensityModel& model,
                                       const ThresholdEvent& event,
                                       long replications, int probes_per_instance,
                                       SeedSpec seed, double tolerance) {
  DtPropertiesReport rep;
  rep.instances = replications;
  double worst_vplus2_slack = -std::numeric_limits<double>::infinity();
  for (long repi = 0; repi < replications; ++repi) {
    const PointConfiguration xi =
        sample(model, SeedSpec{seed.master_seed, seed.replication_index + 2 * repi});
    SubstreamRng probe_rng(SeedSpec{seed.master_seed ^ 0x70726f6265ULL,
                                    seed.replication_index + 2 * repi + 1});
    std::vector<Vector> probes;
    for (int k = 0; k < probes_per_instance; ++k) {
      Vector z(model.dim());
      for (int i = 0; i < model.dim(); ++i)
        z[i] = probe_rng.uniform(model.window().lower[i], model.window().upper[i]);
      probes.push_back(std::move(z));
    }
    const DtInstanceReport inst = check_dt_instance(xi, event, probes, tolerance);
    rep.worst_vplus_dt = std::max(rep.worst_vplus_dt, inst.vplus_dt);
    rep.worst_d_dt2 = std::max(rep.worst_d_dt2, inst.max_d_dt2);
    worst_vplus2_slack = std::max(worst_vplus2_slack, inst.vplus_dt2 - inst.four_dt2);
    if (!inst.pass) {
      ++rep.violations;
      if (rep.witness.empty()) rep.witness = serialize_instance(xi, event);
    }
  }
  rep.worst_vplus_dt2_slack = worst_vplus2_slack;
  rep.pass = rep.violations == 0;
  return rep;
}

IsoperimetricReport isoperimetric_check(const IntensityModel& model,
                                        const ThresholdEvent& event,
                                        long replications, SeedSpec seed,
                                        const std::vector<double>& r_grid) {
  IsoperimetricReport rep;
  rep.replications = replications;
  std::vector<double> dts(static_cast<std::size_t>(replications));
  double sum_a = 0, sum_b = 0, sum_aa = 0, sum_bb = 0, sum_ab = 0;
  for (long repi = 0; repi < replications; ++repi) {
    const PointConfiguration xi =
        sample(model, SeedSpec{seed.master_seed, seed.replication_index + repi});
    ConvexDistanceProblem problem{xi, event};
    const double dt = convex_distance(problem, 1e-10).value;
    dts[static_cast<std::size_t>(repi)] = dt;
    const double a = dt == 0 ? 1.0 : 0.0;  // dt = 0 iff xi in A (threshold event)
    const double b = std::exp(dt * dt / 10.0);
    sum_a += a;
    sum_b += b;
    sum_aa += a * a;
    sum_bb += b * b;
    sum_ab += a * b;
  }
  const double n = static_cast<double>(replications);
  rep.p_event = sum_a / n;
  rep.exp_moment = sum_b / n;
  if (rep.p_event <= 0 || rep.p_event >= 1)
    throw std::runtime_error("isoperimetric_check: degenerate-event (P(A) estimate " +
                             std::to_string(rep.p_event) + ")");
  rep.product = rep.p_event * rep.exp_moment;
  const double var_a = std::max(0.0, sum_aa / n - rep.p_event * rep.p_event);
  const double var_b = std::max(0.0, sum_bb / n - rep.exp_moment * rep.exp_moment);
  const double cov_ab = sum_ab / n - rep.p_event * rep.exp_moment;
  const double var_prod = rep.exp_moment * rep.exp_moment * var_a +
                          rep.p_event * rep.p_event * var_b +
                          2 * rep.p_event * rep.exp_moment * cov_ab;
  const double se = std::sqrt(std::max(0.0, var_prod) / n);
  rep.product_upper_ci99 = rep.product + 2.326347874040841 * se;
  rep.pass = rep.product_upper_ci99 <= 1.02;

  for (double r : r_grid) {
    IsoperimetricRow row;
    row.r = r;
    long exceed = 0;
    for (double dt : dts)
      if (dt >= r) ++exceed;
    row.empirical_survival = exceed / n;
    row.bound = std::exp(-r * r / 10.0) / rep.p_event;
    row.pass = row.empirical_survival <= row.bound;
    rep.tail_rows.push_back(row);
  }
  return rep;
}

}  // namespace geoconc

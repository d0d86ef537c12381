#include "geoconc/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace geoconc {

namespace {

// phi(w)/w^2 and psi(w)/w^2 with series fallbacks near zero; both ratios are
// non-decreasing and tend to 1/2.
double phi_over_sq(double w) {
  if (std::abs(w) < 1e-4) {
    // 1/2 + w/6 + w^2/24 + w^3/120
    return 0.5 + w * (1.0 / 6 + w * (1.0 / 24 + w / 120));
  }
  return (std::expm1(w) - w) / (w * w);
}

double psi_over_sq(double w) {
  if (std::abs(w) < 1e-4) {
    // sum_{m>=0} w^m (m+1)/(m+2)! = 1/2 + w/3 + w^2/8 + w^3/30
    return 0.5 + w * (1.0 / 3 + w * (1.0 / 8 + w / 30));
  }
  return ((w - 1) * std::expm1(w) + w) / (w * w);
}

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

double psi(double z) { return (z - 1) * std::expm1(z) + z; }
double phi(double z) { return std::expm1(z) - z; }

double Phi_beta(double beta, double z) {
  require(z > 0, "Phi_beta: z must be > 0");
  if (beta == 0) return z / 2;
  if (beta > 0) return z * psi_over_sq(z * beta);
  return z * phi_over_sq(-z * beta);
}

double Psi_beta(double beta, double z) {
  require(z > 0, "Psi_beta: z must be > 0");
  if (beta == 0) return z / 2;
  return z * phi_over_sq(z * std::abs(beta));
}

double chi(double z) {
  require(z >= 0, "chi: z must be >= 0");
  if (z == 0) return 0;
  const double sz = std::sqrt(z);
  return std::sqrt(std::log1p(z)) * z * sz / (4 * sz + 8);
}

double chi_sup_oracle(double z) {
  require(z > 0, "chi_sup_oracle: z must be > 0");
  // g(l) = l z - exp(l^2) + 1 is strictly concave with g'(0) = z > 0; the
  // maximizer satisfies 2 l exp(l^2) = z, so it sits below sqrt(log(z+1)) + 1.
  auto g = [z](double l) { return l * z - std::exp(l * l) + 1.0; };
  double lo = 0.0, hi = std::sqrt(std::log1p(z)) + 1.0;
  while (2 * hi * std::exp(hi * hi) < z) hi *= 2;
  const double gr = (std::sqrt(5.0) - 1) / 2;
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double g1 = g(x1), g2 = g(x2);
  for (int it = 0; it < 200 && b - a > 1e-13 * (1 + b); ++it) {
    if (g1 < g2) {
      a = x1;
      x1 = x2;
      g1 = g2;
      x2 = a + gr * (b - a);
      g2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      g2 = g1;
      x1 = b - gr * (b - a);
      g1 = g(x1);
    }
  }
  return std::max(g((a + b) / 2), std::max(g1, g2));
}

double upper_tail_vbeta_exponent(double c, double beta, double r) {
  require(c > 0, "vbeta bound: c must be > 0");
  require(r >= 0, "vbeta bound: r must be >= 0");
  if (beta == 0) return r * r / (2 * c);
  const double ab = std::abs(beta);
  return (c / (beta * beta) + r / ab) * std::log1p(ab * r / c) - r / ab;
}

double upper_tail_vbeta_weak_exponent(double c, double beta, double r) {
  require(c > 0, "vbeta bound: c must be > 0");
  require(r >= 0, "vbeta bound: r must be >= 0");
  if (beta == 0) return r * r / (2 * c);
  const double ab = std::abs(beta);
  return r / (2 * ab) * std::log1p(ab * r / c);
}

double upper_tail_vbeta(double c, double beta, double r) {
  return std::exp(-upper_tail_vbeta_exponent(c, beta, r));
}
double upper_tail_vbeta_weak(double c, double beta, double r) {
  return std::exp(-upper_tail_vbeta_weak_exponent(c, beta, r));
}
double lower_tail_vbeta(double c, double beta, double r) {
  return upper_tail_vbeta(c, beta, r);
}
double lower_tail_vbeta_weak(double c, double beta, double r) {
  return upper_tail_vbeta_weak(c, beta, r);
}

double upper_tail_selfbound_exponent(double c, double alpha, double ef, double r) {
  require(c > 0, "selfbound: c must be > 0");
  require(alpha >= 0 && alpha < 2, "selfbound: alpha must lie in [0, 2)");
  require(ef >= 0, "selfbound: EF must be >= 0");
  require(r >= 0, "selfbound: r must be >= 0");
  const double g = 1 - alpha / 2;
  const double diff = std::pow(r + ef, g) - std::pow(ef, g);
  return diff * diff / (2 * c);
}
double upper_tail_selfbound(double c, double alpha, double ef, double r) {
  return std::exp(-upper_tail_selfbound_exponent(c, alpha, ef, r));
}

double upper_tail_linear_exponent(double a, double b, double ef, double r) {
  require(a > 0, "linear bound: a must be > 0");
  require(b >= 0, "linear bound: b must be >= 0");
  require(r >= 0, "linear bound: r must be >= 0");
  return r * r / (2 * a * ef + 2 * b + a * r / 3);
}
double upper_tail_linear(double a, double b, double ef, double r) {
  return std::exp(-upper_tail_linear_exponent(a, b, ef, r));
}

double lower_tail_gaussian_exponent(double ev_minus, double r) {
  require(ev_minus > 0, "gaussian lower tail: E V- must be > 0");
  require(r >= 0, "gaussian lower tail: r must be >= 0");
  return r * r / (2 * ev_minus);
}
double lower_tail_gaussian(double ev_minus, double r) {
  return std::exp(-lower_tail_gaussian_exponent(ev_minus, r));
}

double lower_tail_selfbound_exponent(double a, double ef, double r) {
  require(a > 0, "lower selfbound: a must be > 0");
  require(ef >= 0, "lower selfbound: EF must be >= 0");
  require(r >= 0, "lower selfbound: r must be >= 0");
  if (ef == 0) return r > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  return r * r / (2 * std::max(a, 1.0) * ef);
}
double lower_tail_selfbound(double a, double ef, double r) {
  return std::exp(-lower_tail_selfbound_exponent(a, ef, r));
}

double edge_upper_tail_exponent(double c_geom, double en, double r) {
  return upper_tail_selfbound_exponent(c_geom, 1.5, en, r);
}
double edge_upper_tail(double c_geom, double en, double r) {
  return std::exp(-edge_upper_tail_exponent(c_geom, en, r));
}
double edge_lower_tail_exponent(double v_frak, double r) {
  return lower_tail_gaussian_exponent(v_frak, r);
}
double edge_lower_tail(double v_frak, double r) {
  return std::exp(-edge_lower_tail_exponent(v_frak, r));
}

double ustat_upper_tail_exponent(double eg, double ef, double c, double r) {
  require(eg > 0, "ustat bound: EG must be > 0");
  require(ef >= 0, "ustat bound: EF must be >= 0");
  require(c > 0, "ustat bound: c must be > 0");
  require(r >= 0, "ustat bound: r must be >= 0");
  const double z = (std::sqrt(ef + r) - std::sqrt(ef)) / (std::sqrt(4 * c) * eg);
  return eg * chi(z);
}
double ustat_upper_tail(double eg, double ef, double c, double r) {
  return std::exp(-ustat_upper_tail_exponent(eg, ef, c, r));
}

double BoundCurve::evaluate(double r) const {
  const double i = exponent(r);
  if (i <= 0) return 1.0;
  return std::exp(-i);
}

BoundCurve make_bound_curve(const std::string& name,
                            const std::map<std::string, double>& params) {
  auto at = [&params, &name](const std::string& key) {
    auto it = params.find(key);
    if (it == params.end())
      throw std::invalid_argument("bound curve " + name + ": missing parameter " + key);
    return it->second;
  };
  BoundCurve c;
  c.name = name;
  c.params = params;
  if (name == "vbeta_upper" || name == "vbeta_lower") {
    const double cc = at("c"), beta = at("beta");
    c.exponent = [cc, beta](double r) { return upper_tail_vbeta_exponent(cc, beta, r); };
    c.upper_tail = name == "vbeta_upper";
  } else if (name == "vbeta_upper_weak" || name == "vbeta_lower_weak") {
    const double cc = at("c"), beta = at("beta");
    c.exponent = [cc, beta](double r) {
      return upper_tail_vbeta_weak_exponent(cc, beta, r);
    };
    c.upper_tail = name == "vbeta_upper_weak";
  } else if (name == "selfbound_upper") {
    const double cc = at("c"), alpha = at("alpha"), ef = at("ef");
    c.exponent = [cc, alpha, ef](double r) {
      return upper_tail_selfbound_exponent(cc, alpha, ef, r);
    };
    c.geometric_upper_tail = alpha >= 1.0;
  } else if (name == "linear_upper") {
    const double a = at("a"), b = at("b"), ef = at("ef");
    c.exponent = [a, b, ef](double r) { return upper_tail_linear_exponent(a, b, ef, r); };
  } else if (name == "gaussian_lower") {
    const double ev = at("ev_minus");
    c.exponent = [ev](double r) { return lower_tail_gaussian_exponent(ev, r); };
    c.upper_tail = false;
  } else if (name == "selfbound_lower") {
    const double a = at("a"), ef = at("ef");
    c.exponent = [a, ef](double r) { return lower_tail_selfbound_exponent(a, ef, r); };
    c.upper_tail = false;
  } else if (name == "edge_upper") {
    const double cg = at("c_geom"), en = at("en");
    c.exponent = [cg, en](double r) { return edge_upper_tail_exponent(cg, en, r); };
    c.geometric_upper_tail = true;
  } else if (name == "edge_lower") {
    const double v = at("v_frak");
    c.exponent = [v](double r) { return edge_lower_tail_exponent(v, r); };
    c.upper_tail = false;
  } else if (name == "ustat_upper") {
    const double eg = at("eg"), ef = at("ef"), cc = at("c");
    c.exponent = [eg, ef, cc](double r) {
      return ustat_upper_tail_exponent(eg, ef, cc, r);
    };
    c.geometric_upper_tail = true;
  } else if (name == "one") {
    c.exponent = [](double) { return 0.0; };
  } else {
    throw std::invalid_argument("make_bound_curve: unknown curve " + name);
  }
  return c;
}

RateReport rate_asymptotics(const BoundCurve& curve, double r_max, int grid_points) {
  RateReport rep;
  if (!curve.upper_tail) {
    rep.applicable = false;
    rep.note = "not-an-upper-tail curve; check skipped";
    return rep;
  }
  const double r_min = 10.0;
  for (int i = 0; i < grid_points; ++i) {
    const double t = static_cast<double>(i) / (grid_points - 1);
    const double r = r_min * std::pow(r_max / r_min, t);
    rep.r_grid.push_back(r);
    rep.ratio.push_back(curve.exponent(r) / (std::sqrt(r) * std::log(r)));
  }
  rep.ratio_at_top = rep.ratio.back();
  if (curve.geometric_upper_tail) {
    rep.within_optimal_rate = rep.ratio_at_top <= 1.0 / std::sqrt(2.0) + 0.01;
  } else {
    rep.note = "optimal-rate cap applies to geometric upper-tail curves only";
    rep.within_optimal_rate = true;
  }
  return rep;
}

}  // namespace geoconc

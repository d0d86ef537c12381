#include "geoconc/intensity.hpp"

#include "geoconc/quadrature.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace geoconc {

using nlohmann::json;

namespace {

// Exact area of disk(center, rho) ∩ [x0,x1]x[y0,y1] by chord decomposition:
// between breakpoints of y the chord endpoints keep the same min/max branch,
// so each piece integrates in closed form via W(y) = (y w(y) + rho^2
// asin(y/rho)) / 2.
double disk_box_area(double cx, double cy, double rho, double x0, double x1,
                     double y0, double y1) {
  const double a0 = x0 - cx, a1 = x1 - cx;
  const double b0 = std::max(y0 - cy, -rho), b1 = std::min(y1 - cy, rho);
  if (!(b0 < b1) || !(a0 < a1)) return 0.0;

  std::vector<double> cuts = {b0, b1};
  for (double a : {a0, a1}) {
    const double aa = std::abs(a);
    if (aa < rho) {
      const double y = std::sqrt(rho * rho - a * a);
      for (double s : {-y, y})
        if (s > b0 && s < b1) cuts.push_back(s);
    }
  }
  std::sort(cuts.begin(), cuts.end());

  auto w_primitive = [rho](double y) {
    y = std::clamp(y, -rho, rho);
    return 0.5 * (y * std::sqrt(std::max(0.0, rho * rho - y * y)) +
                  rho * rho * std::asin(std::clamp(y / rho, -1.0, 1.0)));
  };
  auto w = [rho](double y) { return std::sqrt(std::max(0.0, rho * rho - y * y)); };

  // Branch decisions probe two interior Gauss points: a branch dominates on a
  // piece iff it is strictly larger at one of them (tangencies tie at a
  // single point only).
  double area = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    if (!(hi > lo)) continue;
    const double w1 = w(lo + 0.21132486540518713 * (hi - lo));
    const double w2 = w(lo + 0.78867513459481290 * (hi - lo));
    if (std::min(a1, w1) <= std::max(a0, -w1) &&
        std::min(a1, w2) <= std::max(a0, -w2))
      continue;  // empty chord on this piece
    const bool right_is_w = w1 < a1 || w2 < a1;
    const bool left_is_w = -w1 > a0 || -w2 > a0;
    const double dW = w_primitive(hi) - w_primitive(lo);
    double piece = right_is_w ? dW : a1 * (hi - lo);
    piece -= left_is_w ? -dW : a0 * (hi - lo);
    area += piece;
  }
  return area;
}

}  // namespace

IntensityModel::IntensityModel(Variant v, double rate, double exponent, Window w)
    : variant_(v), rate_(rate), exponent_(exponent), window_(std::move(w)) {
  if (!(rate >= 0)) throw std::invalid_argument("intensity: rate must be >= 0");
  switch (variant_) {
    case Variant::HomogeneousBox:
    case Variant::HomogeneousTorus:
      total_mass_ = rate_ * window_.volume();
      break;
    case Variant::RadialDensity: {
      if (!(exponent_ > 0))
        throw std::invalid_argument("intensity: radial exponent must be > 0");
      auto r = integrate_box([this](const Vector& x) { return density(x); },
                             window_.lower, window_.upper, 1e-9);
      total_mass_ = r.require(1e-6, "radial total mass");
      break;
    }
  }
  if (rate_ > 0 && !(total_mass_ > 0))
    throw std::invalid_argument("intensity: total mass must be positive");
}

IntensityModel IntensityModel::homogeneous_box(double rate, Window window) {
  if (window.periodic)
    throw std::invalid_argument("intensity: homogeneous_box needs a non-periodic window");
  return IntensityModel(Variant::HomogeneousBox, rate, 0.0, std::move(window));
}

IntensityModel IntensityModel::homogeneous_torus(double rate, Window window) {
  window.periodic = true;
  return IntensityModel(Variant::HomogeneousTorus, rate, 0.0, std::move(window));
}

IntensityModel IntensityModel::radial_density(double rate, double exponent, Window window) {
  if (window.periodic)
    throw std::invalid_argument("intensity: radial_density needs a non-periodic window");
  return IntensityModel(Variant::RadialDensity, rate, exponent, std::move(window));
}

double IntensityModel::density(const Vector& x) const {
  switch (variant_) {
    case Variant::HomogeneousBox:
      return window_.contains(x) ? rate_ : 0.0;
    case Variant::HomogeneousTorus:
      return rate_;  // evaluated in the fundamental domain
    case Variant::RadialDensity:
      return window_.contains(x) ? rate_ * std::pow(x.norm() + 1.0, -exponent_) : 0.0;
  }
  return 0.0;
}

double IntensityModel::density_sup() const {
  if (variant_ != Variant::RadialDensity) return rate_;
  // The density decreases in |x|; the sup sits at the window point nearest
  // the origin.
  Vector nearest = Vector::Zero(dim());
  for (int i = 0; i < dim(); ++i)
    nearest[i] = std::clamp(0.0, window_.lower[i], window_.upper[i]);
  return rate_ * std::pow(nearest.norm() + 1.0, -exponent_);
}

double IntensityModel::ball_mass(const Vector& center, double radius,
                                 double rel_tol) const {
  if (!(radius > 0)) throw std::invalid_argument("ball_mass: radius must be > 0");
  if (center.size() != dim())
    throw std::invalid_argument("ball_mass: center dimension mismatch");
  switch (variant_) {
    case Variant::HomogeneousTorus: {
      if (2 * radius > window_.min_side())
        throw std::invalid_argument(
            "ball_mass: unsupported-geometry (torus ball wraps onto itself)");
      return rate_ * unit_ball_volume(dim()) * std::pow(radius, dim());
    }
    case Variant::HomogeneousBox: {
      // d <= 2 has piecewise-closed forms; d = 3 runs the slice quadrature
      if (dim() == 1) {
        const double lo = std::max(window_.lower[0], center[0] - radius);
        const double hi = std::min(window_.upper[0], center[0] + radius);
        return rate_ * std::max(0.0, hi - lo);
      }
      if (dim() == 2)
        return rate_ * disk_box_area(center[0], center[1], radius, window_.lower[0],
                                     window_.upper[0], window_.lower[1],
                                     window_.upper[1]);
      auto r = integrate_ball_box([](const Vector&) { return 1.0; }, center, radius,
                                  window_.lower, window_.upper, rel_tol);
      return rate_ * r.value;
    }
    case Variant::RadialDensity: {
      auto r = integrate_ball_box([this](const Vector& y) { return density(y); },
                                  center, radius, window_.lower, window_.upper,
                                  rel_tol);
      return r.value;
    }
  }
  return 0.0;
}

double IntensityModel::neglected_mass_bound() const {
  if (variant_ != Variant::RadialDensity) return 0.0;
  const int d = dim();
  if (!(exponent_ > d)) return std::numeric_limits<double>::infinity();
  // Largest origin-centered ball inside the window; the tail outside radius R
  // is bounded by d*kappa_d Int_R^inf (r+1)^(d-1-q) dr.
  double inradius = std::numeric_limits<double>::infinity();
  for (int i = 0; i < d; ++i) {
    if (window_.lower[i] > 0 || window_.upper[i] < 0)
      return std::numeric_limits<double>::infinity();
    inradius = std::min({inradius, -window_.lower[i], window_.upper[i]});
  }
  const double q = exponent_;
  return rate_ * d * unit_ball_volume(d) * std::pow(inradius + 1.0, d - q) / (q - d);
}

double edge_count_mean(const IntensityModel& model, double radius, double rel_tol) {
  if (!(radius > 0))
    throw std::invalid_argument("edge_count_mean: radius must be > 0");
  if (model.rate() == 0) return 0.0;
  if (model.variant() == IntensityModel::Variant::HomogeneousTorus)
    return 0.5 * model.ball_mass(model.window().lower, radius) * model.total_mass();

  auto r = integrate_box(
      [&](const Vector& x) {
        return model.ball_mass(x, radius, rel_tol * 1e-2) * model.density(x);
      },
      model.window().lower, model.window().upper, rel_tol, 400000);
  const double value = 0.5 * r.value;
  if (!std::isfinite(value) || value > 1e15)
    throw std::runtime_error("edge_count_mean: divergent-mean");
  return value;
}

std::string IntensityModel::to_config() const {
  json j;
  switch (variant_) {
    case Variant::HomogeneousBox:
      j["variant"] = "homogeneous_box";
      break;
    case Variant::HomogeneousTorus:
      j["variant"] = "homogeneous_torus";
      break;
    case Variant::RadialDensity:
      j["variant"] = "radial_density";
      j["exponent"] = exponent_;
      break;
  }
  j["rate"] = rate_;
  j["window"]["lower"] = std::vector<double>(window_.lower.begin(), window_.lower.end());
  j["window"]["upper"] = std::vector<double>(window_.upper.begin(), window_.upper.end());
  j["window"]["periodic"] = window_.periodic;
  return j.dump(2);
}

IntensityModel IntensityModel::from_config(const std::string& text) {
  json j = json::parse(text);
  const auto lo = j.at("window").at("lower").get<std::vector<double>>();
  const auto hi = j.at("window").at("upper").get<std::vector<double>>();
  Window w(Eigen::Map<const Vector>(lo.data(), static_cast<Eigen::Index>(lo.size())),
           Eigen::Map<const Vector>(hi.data(), static_cast<Eigen::Index>(hi.size())));
  const double rate = j.at("rate").get<double>();
  const std::string variant = j.at("variant").get<std::string>();
  if (variant == "homogeneous_box") return homogeneous_box(rate, std::move(w));
  if (variant == "homogeneous_torus") return homogeneous_torus(rate, std::move(w));
  if (variant == "radial_density")
    return radial_density(rate, j.at("exponent").get<double>(), std::move(w));
  throw std::invalid_argument("intensity config: unknown variant " + variant);
}

IntensityModel IntensityModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("intensity config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_config(ss.str());
}

void IntensityModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("intensity config: cannot write " + path);
  out << to_config() << "\n";
}

}  // namespace geoconc

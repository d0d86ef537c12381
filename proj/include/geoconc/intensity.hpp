#pragma once

#include "geoconc/types.hpp"

#include <iosfwd>
#include <string>

// Intensity measures mu on R^d with density, truncated to a finite window.
// Three variants: homogeneous rate on a box, homogeneous rate on a torus
// (periodic window; gives boundary-free closed forms), and the radial
// density rate * (|x|+1)^(-q) truncated to a box.

namespace geoconc {

class IntensityModel {
 public:
  enum class Variant { HomogeneousBox, HomogeneousTorus, RadialDensity };

  static IntensityModel homogeneous_box(double rate, Window window);
  static IntensityModel homogeneous_torus(double rate, Window window);
  static IntensityModel radial_density(double rate, double exponent, Window window);

  Variant variant() const { return variant_; }
  int dim() const { return window_.dim(); }
  const Window& window() const { return window_; }
  double rate() const { return rate_; }
  double exponent() const { return exponent_; }
  Metric metric() const {
    return variant_ == Variant::HomogeneousTorus ? Metric::torus(window_)
                                                 : Metric::euclidean();
  }

  double total_mass() const { return total_mass_; }
  double density(const Vector& x) const;
  double density_sup() const;

  // mu(B(center, radius)).  Homogeneous torus: closed form (requires
  // 2*radius <= shortest side).  Others: numeric, to rel_tol.
  double ball_mass(const Vector& center, double radius, double rel_tol = 1e-8) const;

  // Mass of R^d \ window discarded by truncation (RadialDensity only;
  // zero for the window-supported variants, +inf when the tail integral
  // diverges or the window does not contain the origin).
  double neglected_mass_bound() const;

  std::string to_config() const;
  static IntensityModel from_config(const std::string& text);
  static IntensityModel load(const std::string& path);
  void save(const std::string& path) const;

 private:
  IntensityModel(Variant v, double rate, double exponent, Window w);

  Variant variant_;
  double rate_;
  double exponent_;  // radial q; unused otherwise
  Window window_;
  double total_mass_;
};

// (1/2) * Int mu(B(x, radius)) dmu(x): the mean edge count of the disk graph
// with this intensity.  Closed form on the torus, numeric otherwise.
double edge_count_mean(const IntensityModel& model, double radius,
                       double rel_tol = 1e-6);

}  // namespace geoconc

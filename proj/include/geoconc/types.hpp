#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <vector>

// Shared domain types: points, windows, configurations and metrics.
// Points live in R^d and are stored as columns of a dense matrix.

namespace geoconc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Axis-aligned observation window [lower, upper].  A periodic window
// identifies opposite faces (torus topology for distance computations).
struct Window {
  Vector lower;
  Vector upper;
  bool periodic = false;

  Window() = default;
  Window(Vector lo, Vector hi, bool per = false)
      : lower(std::move(lo)), upper(std::move(hi)), periodic(per) {
    if (lower.size() != upper.size() || lower.size() == 0)
      throw std::invalid_argument("window: dimension mismatch");
    for (int i = 0; i < lower.size(); ++i)
      if (!(lower[i] < upper[i]))
        throw std::invalid_argument("window: lower must be < upper componentwise");
  }

  static Window unit_cube(int d, bool periodic = false) {
    return Window(Vector::Zero(d), Vector::Ones(d), periodic);
  }
  static Window centered_cube(int d, double half_side, bool periodic = false) {
    return Window(Vector::Constant(d, -half_side), Vector::Constant(d, half_side), periodic);
  }

  int dim() const { return static_cast<int>(lower.size()); }
  Vector sides() const { return upper - lower; }
  double side(int i) const { return upper[i] - lower[i]; }
  double min_side() const { return (upper - lower).minCoeff(); }
  double volume() const { return (upper - lower).prod(); }

  bool contains(const Vector& x) const {
    for (int i = 0; i < dim(); ++i)
      if (x[i] < lower[i] || x[i] > upper[i]) return false;
    return true;
  }

  // Maps a point into the fundamental domain of a periodic window.
  Vector wrap(Vector x) const {
    if (!periodic) return x;
    for (int i = 0; i < dim(); ++i) {
      const double len = side(i);
      double t = std::fmod(x[i] - lower[i], len);
      if (t < 0) t += len;
      x[i] = lower[i] + t;
    }
    return x;
  }
};

// Distance rule: plain Euclidean, or minimal-image distance on a torus.
class Metric {
 public:
  static Metric euclidean() { return Metric(); }
  static Metric torus(const Window& w) {
    Metric m;
    m.periodic_ = true;
    m.sides_ = w.sides();
    return m;
  }

  bool is_torus() const { return periodic_; }
  const Vector& torus_sides() const { return sides_; }

  // Minimal-image displacement b - a.
  Vector displacement(const Vector& a, const Vector& b) const {
    Vector d = b - a;
    if (periodic_)
      for (int i = 0; i < d.size(); ++i) {
        const double len = sides_[i];
        d[i] -= len * std::round(d[i] / len);
      }
    return d;
  }

  double squared_distance(const Vector& a, const Vector& b) const {
    if (!periodic_) return (b - a).squaredNorm();
    double s = 0;
    for (int i = 0; i < a.size(); ++i) {
      double d = b[i] - a[i];
      const double len = sides_[i];
      d -= len * std::round(d / len);
      s += d * d;
    }
    return s;
  }
  double distance(const Vector& a, const Vector& b) const {
    return std::sqrt(squared_distance(a, b));
  }

 private:
  bool periodic_ = false;
  Vector sides_;
};

// A finite multiset of points: pairwise-distinct atoms with positive
// integer multiplicities.  Simple configurations have every multiplicity 1.
class PointConfiguration {
 public:
  PointConfiguration() = default;

  explicit PointConfiguration(Matrix points)
      : points_(std::move(points)),
        multiplicities_(Eigen::VectorXi::Ones(points_.cols())) {
    check_atoms();
  }

  PointConfiguration(Matrix points, Eigen::VectorXi multiplicities)
      : points_(std::move(points)), multiplicities_(std::move(multiplicities)) {
    if (multiplicities_.size() != points_.cols())
      throw std::invalid_argument("configuration: multiplicity/atom count mismatch");
    for (int i = 0; i < multiplicities_.size(); ++i)
      if (multiplicities_[i] <= 0)
        throw std::invalid_argument("configuration: multiplicities must be positive");
    check_atoms();
  }

  static PointConfiguration empty(int dim) { return PointConfiguration(Matrix(dim, 0)); }

  int dim() const { return static_cast<int>(points_.rows()); }
  int atom_count() const { return static_cast<int>(points_.cols()); }
  int total_count() const { return atom_count() == 0 ? 0 : multiplicities_.sum(); }
  bool is_simple() const {
    return atom_count() == 0 || (multiplicities_.array() == 1).all();
  }

  const Matrix& points() const { return points_; }
  const Eigen::VectorXi& multiplicities() const { return multiplicities_; }
  Eigen::Index find_atom(const Vector& x) const {
    for (Eigen::Index i = 0; i < points_.cols(); ++i)
      if (points_.col(i) == x) return i;
    return -1;
  }

  // xi + delta_x.  Increments the multiplicity when x is already an atom.
  PointConfiguration with_point(const Vector& x) const {
    const Eigen::Index at = find_atom(x);
    if (at >= 0) {
      Eigen::VectorXi m = multiplicities_;
      m[at] += 1;
      return PointConfiguration(points_, std::move(m));
    }
    Matrix p(points_.rows() == 0 ? x.size() : points_.rows(), points_.cols() + 1);
    if (points_.cols() > 0) p.leftCols(points_.cols()) = points_;
    p.col(p.cols() - 1) = x;
    Eigen::VectorXi m(multiplicities_.size() + 1);
    m.head(multiplicities_.size()) = multiplicities_;
    m[m.size() - 1] = 1;
    return PointConfiguration(std::move(p), std::move(m));
  }

  // xi - delta_{atom i}.
  PointConfiguration without_atom(Eigen::Index i) const {
    if (i < 0 || i >= points_.cols())
      throw std::invalid_argument("configuration: atom index out of range");
    if (multiplicities_[i] > 1) {
      Eigen::VectorXi m = multiplicities_;
      m[i] -= 1;
      return PointConfiguration(points_, std::move(m));
    }
    Matrix p(points_.rows(), points_.cols() - 1);
    Eigen::VectorXi m(multiplicities_.size() - 1);
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < points_.cols(); ++j) {
      if (j == i) continue;
      p.col(k) = points_.col(j);
      m[k] = multiplicities_[j];
      ++k;
    }
    return PointConfiguration(std::move(p), std::move(m));
  }

 private:
  // Atoms must be pairwise distinct.  Hash the raw coordinate bytes so the
  // check stays linear for large sampled configurations.
  void check_atoms() const {
    const Eigen::Index n = points_.cols();
    if (n < 2) return;
    std::vector<std::uint64_t> keys(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      std::uint64_t h = 0xcbf29ce484222325ULL;
      for (Eigen::Index r = 0; r < points_.rows(); ++r) {
        std::uint64_t bits;
        const double v = points_(r, i);
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, sizeof(bits));
        h = (h ^ bits) * 0x100000001b3ULL;
      }
      keys[static_cast<std::size_t>(i)] = h;
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return keys[a] < keys[b]; });
    for (std::size_t s = 0; s + 1 < order.size(); ++s)
      if (keys[order[s]] == keys[order[s + 1]] &&
          points_.col(order[s]) == points_.col(order[s + 1]))
        throw std::invalid_argument("configuration: atoms must be pairwise distinct");
  }

  Matrix points_;
  Eigen::VectorXi multiplicities_;
};

}  // namespace geoconc

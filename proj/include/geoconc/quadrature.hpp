#pragma once

#include "geoconc/types.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

// Adaptive numeric integration.  All routines use midpoint refinement with
// Richardson extrapolation: an interval (cell) estimate is compared against
// the sum over its bisected children; the discrepancy drives both the error
// estimate and the extrapolated value.  Indicator-type discontinuities are
// handled acceptably because interior cells report zero discrepancy, so
// refinement concentrates on the boundary.

namespace geoconc {

struct IntegrationResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  long evaluations = 0;
  bool converged = false;

  double require(double rel_tol, const char* what) const {
    if (!converged && error > rel_tol * std::max(1.0, std::abs(value)))
      throw std::runtime_error(std::string(what) + ": integration tolerance not reached");
    return value;
  }
};

namespace detail {

template <class F>
void integrate_1d_rec(const F& f, double a, double b, double fm, double tol,
                      int depth, int max_depth, IntegrationResult& out) {
  const double h = b - a;
  const double m1 = f(a + 0.25 * h);
  const double m2 = f(a + 0.75 * h);
  out.evaluations += 2;
  const double coarse = fm * h;
  const double fine = 0.5 * h * (m1 + m2);
  const double disc = fine - coarse;
  if (std::abs(disc) <= 3.0 * tol || depth >= max_depth) {
    out.value += fine + disc / 3.0;  // midpoint error ~ h^2
    out.error += std::abs(disc) / 3.0;
    return;
  }
  const double mid = 0.5 * (a + b);
  integrate_1d_rec(f, a, mid, m1, 0.5 * tol, depth + 1, max_depth, out);
  integrate_1d_rec(f, mid, b, m2, 0.5 * tol, depth + 1, max_depth, out);
}

}  // namespace detail

// Adaptive 1-D integral of f over [a, b].
template <class F>
IntegrationResult integrate_1d(const F& f, double a, double b, double rel_tol,
                               double abs_floor = 0.0, int max_depth = 44) {
  IntegrationResult out;
  if (!(b > a)) {
    out.converged = true;
    return out;
  }
  constexpr int n0 = 16;  // coarse pass fixes the absolute budget
  double scale = 0.0;
  const double h0 = (b - a) / n0;
  double fms[n0];
  for (int i = 0; i < n0; ++i) {
    fms[i] = f(a + (i + 0.5) * h0);
    scale += std::abs(fms[i]) * h0;
  }
  out.evaluations += n0;
  const double budget = std::max(abs_floor, rel_tol * std::max(scale, 1e-300));
  for (int i = 0; i < n0; ++i)
    detail::integrate_1d_rec(f, a + i * h0, a + (i + 1) * h0, fms[i], budget / n0,
                             0, max_depth, out);
  out.converged =
      out.error <= 1.5 * std::max(budget, rel_tol * std::abs(out.value));
  return out;
}

// Adaptive integral of f : R^d -> R over the box [lo, hi].  Cells carry a
// 3^d midpoint subgrid; the composite estimate on the subgrid against the
// single-midpoint estimate drives Richardson extrapolation and the error
// ranking, and the subgrid values become the children's centers when a cell
// is trisected.  `initial_cells` subdivides each axis before adaptation
// starts.  With `indicator_aware` set, cells whose subgrid values disagree
// are treated as boundary cells and charged a spread-proportional error, so
// refinement keeps tracking indicator discontinuities; the residual error of
// boundary slivers that evade all 3^d probes is not visible to the estimate,
// which is the usual limit of sampled quadrature on discontinuous
// integrands.
template <class F>
IntegrationResult integrate_box(const F& f, const Vector& lo, const Vector& hi,
                                double rel_tol, long max_evals = 4000000,
                                int initial_cells = 4, bool indicator_aware = false) {
  const int d = static_cast<int>(lo.size());
  IntegrationResult out;
  if (d == 0) throw std::invalid_argument("integrate_box: empty domain");

  int nsub = 1;  // 3^d
  for (int i = 0; i < d; ++i) nsub *= 3;
  const int center_index = (nsub - 1) / 2;

  struct Cell {
    Vector lo, hi;
    double estimate = 0;
    double err = 0;
    std::vector<double> sub;  // 3^d subgrid values, children centers
  };
  struct CellLess {
    bool operator()(const Cell& a, const Cell& b) const { return a.err < b.err; }
  };

  auto make_cell = [&](Vector clo, Vector chi, double center_value) {
    Cell c;
    c.lo = std::move(clo);
    c.hi = std::move(chi);
    const double vol = (c.hi - c.lo).prod();
    c.sub.resize(static_cast<std::size_t>(nsub));
    Vector q(d);
    double fsum = 0, fmin = std::numeric_limits<double>::infinity(), fmax = -fmin;
    for (int k = 0; k < nsub; ++k) {
      if (k == center_index && !std::isnan(center_value)) {
        c.sub[static_cast<std::size_t>(k)] = center_value;
      } else {
        int digits = k;
        for (int i = 0; i < d; ++i) {
          const double h = (c.hi[i] - c.lo[i]) / 3.0;
          q[i] = c.lo[i] + (digits % 3 + 0.5) * h;
          digits /= 3;
        }
        c.sub[static_cast<std::size_t>(k)] = f(q);
        ++out.evaluations;
      }
      const double v = c.sub[static_cast<std::size_t>(k)];
      fsum += v;
      fmin = std::min(fmin, v);
      fmax = std::max(fmax, v);
    }
    if (indicator_aware) {
      // Probe the closed vertex lattice as well: level sets of convex
      // distance-type functions cannot cross a cell without separating one
      // of its vertices, so straddling cells are reliably flagged.
      for (int k = 0; k < nsub; ++k) {
        if (k == center_index) continue;
        int digits = k;
        for (int i = 0; i < d; ++i) {
          q[i] = c.lo[i] + (digits % 3) * 0.5 * (c.hi[i] - c.lo[i]);
          digits /= 3;
        }
        const double v = f(q);
        ++out.evaluations;
        fmin = std::min(fmin, v);
        fmax = std::max(fmax, v);
      }
    }
    const double coarse = c.sub[static_cast<std::size_t>(center_index)] * vol;
    const double fine = fsum * vol / nsub;
    const double disc = fine - coarse;
    c.estimate = fine + disc / 8.0;  // midpoint error falls by 9 under trisection
    c.err = std::abs(disc) / 8.0;
    if (indicator_aware && fmax > fmin)
      c.err = std::max(c.err, 0.25 * vol * (fmax - fmin));
    return c;
  };

  std::priority_queue<Cell, std::vector<Cell>, CellLess> heap;
  double total = 0.0, total_err = 0.0;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  const int per_axis = std::max(1, initial_cells);
  std::vector<int> idx(d, 0);
  for (;;) {
    Vector clo(d), chi(d);
    for (int i = 0; i < d; ++i) {
      const double w = (hi[i] - lo[i]) / per_axis;
      clo[i] = lo[i] + idx[i] * w;
      chi[i] = idx[i] + 1 == per_axis ? hi[i] : clo[i] + w;
    }
    Cell c = make_cell(std::move(clo), std::move(chi), nan);
    total += c.estimate;
    total_err += c.err;
    heap.push(std::move(c));
    int ax = 0;
    while (ax < d && ++idx[ax] == per_axis) idx[ax++] = 0;
    if (ax == d) break;
  }

  auto tolerance = [&]() { return rel_tol * std::max(std::abs(total), 1e-300); };
  while (total_err > tolerance() &&
         out.evaluations + static_cast<long>(nsub) * nsub <= max_evals) {
    Cell top = heap.top();
    heap.pop();
    total -= top.estimate;
    total_err -= top.err;
    for (int k = 0; k < nsub; ++k) {
      Vector clo(d), chi(d);
      int digits = k;
      for (int i = 0; i < d; ++i) {
        const double h = (top.hi[i] - top.lo[i]) / 3.0;
        clo[i] = top.lo[i] + (digits % 3) * h;
        chi[i] = digits % 3 == 2 ? top.hi[i] : clo[i] + h;
        digits /= 3;
      }
      Cell c = make_cell(std::move(clo), std::move(chi),
                         top.sub[static_cast<std::size_t>(k)]);
      total += c.estimate;
      total_err += c.err;
      heap.push(std::move(c));
    }
  }

  out.value = total;
  out.error = total_err;
  out.converged = total_err <= 1.5 * tolerance();
  return out;
}

namespace detail {

// Slice recursion for integrate_ball_box below.  At depth `axis` all lower
// coordinates of `point` are fixed and `rho2_left` is the squared radius of
// the remaining slice.  The innermost level is a plain 1-D integral along a
// segment, so the spherical boundary never shows up as a discontinuity.
template <class G>
double ball_box_slice(const G& g, Vector& point, const Vector& center,
                      double rho2_left, const Vector& lo, const Vector& hi,
                      int axis, double rel_tol, IntegrationResult& stats) {
  const int d = static_cast<int>(lo.size());
  if (rho2_left <= 0) return 0.0;
  const double s = std::sqrt(rho2_left);
  const double a = std::max(lo[axis], center[axis] - s);
  const double b = std::min(hi[axis], center[axis] + s);
  if (!(a < b)) return 0.0;

  IntegrationResult r;
  if (axis == d - 1) {
    r = integrate_1d(
        [&](double t) {
          point[axis] = t;
          return g(static_cast<const Vector&>(point));
        },
        a, b, rel_tol);
  } else {
    r = integrate_1d(
        [&](double t) {
          point[axis] = t;
          const double dt = t - center[axis];
          return ball_box_slice(g, point, center, rho2_left - dt * dt, lo, hi,
                                axis + 1, rel_tol, stats);
        },
        a, b, rel_tol);
  }
  stats.evaluations += r.evaluations;
  return r.value;
}

}  // namespace detail

// Integral of g over B(center, rho) ∩ [lo, hi] via nested coordinate slices.
template <class G>
IntegrationResult integrate_ball_box(const G& g, const Vector& center, double rho,
                                     const Vector& lo, const Vector& hi,
                                     double rel_tol) {
  IntegrationResult out;
  Vector point = center;
  out.value = detail::ball_box_slice(g, point, center, rho * rho, lo, hi, 0,
                                     rel_tol, out);
  out.error = rel_tol * std::abs(out.value);
  out.converged = true;
  return out;
}

// Volume of the unit ball in R^d.
inline double unit_ball_volume(int d) {
  return std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

}  // namespace geoconc

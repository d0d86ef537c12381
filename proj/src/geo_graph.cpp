#include "geoconc/geo_graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace geoconc {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Uniform grid over the configuration.  Cell widths are per-axis and at
// least `min_cell`, so a 1-ring scan covers every candidate pair.
struct Grid {
  Vector origin;
  Vector cell;
  std::vector<int> ncells;
  bool wrap = false;
  int dim = 0;
  std::vector<std::vector<int>> buckets;

  Grid(const Matrix& pts, double min_cell, const Metric& metric) {
    dim = static_cast<int>(pts.rows());
    wrap = metric.is_torus();
    Vector extent;
    if (wrap) {
      origin = Vector::Zero(dim);  // fundamental domain is handled by caller
      extent = metric.torus_sides();
    } else {
      origin = pts.cols() > 0 ? Vector(pts.rowwise().minCoeff()) : Vector::Zero(dim);
      extent = pts.cols() > 0 ? Vector(pts.rowwise().maxCoeff() - origin)
                              : Vector::Zero(dim);
    }
    ncells.resize(dim);
    cell.resize(dim);
    long total = 1;
    for (int i = 0; i < dim; ++i) {
      const double e = std::max(extent[i], min_cell);
      ncells[i] = std::max(1, static_cast<int>(std::floor(e / min_cell)));
      // keep the table bounded for sparse configurations
      while (total * ncells[i] > 4000000 && ncells[i] > 1) ncells[i] /= 2;
      cell[i] = e / ncells[i] * (wrap ? 1.0 : 1.0 + 1e-12);
      total *= ncells[i];
    }
    buckets.resize(static_cast<std::size_t>(total));
  }

  int coord(const Vector& x, int axis) const {
    int c = static_cast<int>(std::floor((x[axis] - origin[axis]) / cell[axis]));
    if (wrap) {
      c %= ncells[axis];
      if (c < 0) c += ncells[axis];
    } else {
      c = std::clamp(c, 0, ncells[axis] - 1);
    }
    return c;
  }

  std::size_t linear(const std::vector<int>& c) const {
    std::size_t id = 0;
    for (int i = dim - 1; i >= 0; --i) id = id * ncells[i] + c[i];
    return id;
  }

  void insert(const Matrix& pts) {
    std::vector<int> c(dim);
    for (Eigen::Index j = 0; j < pts.cols(); ++j) {
      for (int i = 0; i < dim; ++i) c[i] = coord(pts.col(j), i);
      buckets[linear(c)].push_back(static_cast<int>(j));
    }
  }

  // Linear ids of the 1-ring around x (deduplicated, so small or wrapped
  // grids degrade gracefully to a full scan).
  void ring_cells(const Vector& x, std::vector<std::size_t>& out) const {
    out.clear();
    std::vector<int> base(dim), c(dim), off(dim, -1);
    for (int i = 0; i < dim; ++i) base[i] = coord(x, i);
    for (;;) {
      bool valid = true;
      for (int i = 0; i < dim; ++i) {
        int v = base[i] + off[i];
        if (wrap) {
          v %= ncells[i];
          if (v < 0) v += ncells[i];
        } else if (v < 0 || v >= ncells[i]) {
          valid = false;
          break;
        }
        c[i] = v;
      }
      if (valid) out.push_back(linear(c));
      int ax = 0;
      while (ax < dim && ++off[ax] == 2) off[ax++] = -1;
      if (ax == dim) break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
};

bool edge_predicate(const GraphRule& rule, const Metric& metric, const Vector& x,
                    const Vector& y, double rx, double ry) {
  const double d2 = metric.squared_distance(x, y);
  if (d2 <= 0) return false;
  const double thr = rule.kind == GraphRule::Kind::Disk ? rule.rho : rx + ry;
  return d2 <= thr * thr;
}

}  // namespace

bool GeometricGraph::verify() const {
  const Matrix& p = config_.points();
  std::vector<double> radii;
  if (rule_.kind == GraphRule::Kind::Intersection) {
    radii.resize(static_cast<std::size_t>(p.cols()));
    for (Eigen::Index j = 0; j < p.cols(); ++j)
      radii[static_cast<std::size_t>(j)] = GraphRule::decaying_radius(p.col(j), rule_.gamma);
  }
  for (int u = 0; u < vertex_count(); ++u) {
    for (int v : adjacency_[u]) {
      if (v == u) return false;
      if (!std::binary_search(adjacency_[v].begin(), adjacency_[v].end(), u))
        return false;
      const double ru = radii.empty() ? 0 : radii[static_cast<std::size_t>(u)];
      const double rv = radii.empty() ? 0 : radii[static_cast<std::size_t>(v)];
      if (!edge_predicate(rule_, metric_, p.col(u), p.col(v), ru, rv)) return false;
    }
  }
  return true;
}

GeometricGraph build_graph(const PointConfiguration& config, const GraphRule& rule,
                           const Metric& metric) {
  if (!config.is_simple())
    throw std::invalid_argument("build_graph: configuration must be simple");
  if (rule.kind == GraphRule::Kind::Intersection && metric.is_torus())
    throw std::invalid_argument("build_graph: intersection rule needs the Euclidean metric");

  const Matrix& p = config.points();
  const int n = config.atom_count();

  std::vector<double> radii;
  double min_cell = rule.rho;
  if (rule.kind == GraphRule::Kind::Intersection) {
    radii.resize(static_cast<std::size_t>(n));
    double max_r = 0;
    for (int j = 0; j < n; ++j) {
      radii[static_cast<std::size_t>(j)] = GraphRule::decaying_radius(p.col(j), rule.gamma);
      max_r = std::max(max_r, radii[static_cast<std::size_t>(j)]);
    }
    min_cell = 2 * std::max(max_r, 1e-12);
  }

  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  if (n > 1) {
    Grid grid(p, min_cell, metric);
    grid.insert(p);
    std::vector<std::size_t> ring;
    for (int i = 0; i < n; ++i) {
      grid.ring_cells(p.col(i), ring);
      const double ri = radii.empty() ? 0 : radii[static_cast<std::size_t>(i)];
      for (std::size_t cid : ring)
        for (int j : grid.buckets[cid]) {
          if (j == i) continue;
          const double rj = radii.empty() ? 0 : radii[static_cast<std::size_t>(j)];
          if (edge_predicate(rule, metric, p.col(i), p.col(j), ri, rj))
            adj[static_cast<std::size_t>(i)].push_back(j);
        }
      std::sort(adj[static_cast<std::size_t>(i)].begin(), adj[static_cast<std::size_t>(i)].end());
    }
  }
  return GeometricGraph(config, rule, metric, std::move(adj), min_cell);
}

long edge_count(const GeometricGraph& g) {
  long total = 0;
  for (int v = 0; v < g.vertex_count(); ++v) total += g.degree(v);
  return total / 2;
}

long triangle_count(const GeometricGraph& g) {
  const auto& adj = g.adjacency();
  long t = 0;
  for (int u = 0; u < g.vertex_count(); ++u)
    for (int v : adj[u]) {
      if (v <= u) continue;
      // common neighbors w > v close each triangle exactly once
      auto iu = std::lower_bound(adj[u].begin(), adj[u].end(), v + 1);
      auto iv = std::lower_bound(adj[v].begin(), adj[v].end(), v + 1);
      while (iu != adj[u].end() && iv != adj[v].end()) {
        if (*iu < *iv)
          ++iu;
        else if (*iv < *iu)
          ++iv;
        else {
          ++t;
          ++iu;
          ++iv;
        }
      }
    }
  return t;
}

long degree_square_sum(const GeometricGraph& g) {
  long s = 0;
  for (int v = 0; v < g.vertex_count(); ++v)
    s += static_cast<long>(g.degree(v)) * g.degree(v);
  return s;
}

namespace {

// Neighbor displacements flattened per vertex, so each direction costs one
// matrix-vector product instead of re-deriving minimal images.
struct DisplacementCache {
  Matrix disp;                   // d x (sum of degrees)
  std::vector<int> offsets;      // per-vertex ranges into disp columns

  explicit DisplacementCache(const GeometricGraph& g) {
    const Matrix& p = g.config().points();
    const auto& adj = g.adjacency();
    long total = 0;
    for (int u = 0; u < g.vertex_count(); ++u) total += g.degree(u);
    disp.resize(g.config().dim(), total);
    offsets.assign(static_cast<std::size_t>(g.vertex_count()) + 1, 0);
    Eigen::Index k = 0;
    for (int u = 0; u < g.vertex_count(); ++u) {
      for (int v : adj[u]) disp.col(k++) = g.metric().displacement(p.col(u), p.col(v));
      offsets[static_cast<std::size_t>(u) + 1] = static_cast<int>(k);
    }
  }

  // Sum of squared right-degrees, perturbing the direction deterministically
  // until no displacement is exactly orthogonal to it.
  long evaluate(Vector direction) const {
    if (direction.size() != disp.rows())
      throw std::invalid_argument("right_degree_square_sum: direction dimension mismatch");
    if (direction.norm() == 0)
      throw std::invalid_argument("right_degree_square_sum: zero direction");
    direction.normalize();
    Vector dots;
    for (int attempt = 0; attempt < 64; ++attempt) {
      dots = disp.transpose() * direction;
      bool degenerate = false;
      long s = 0;
      for (std::size_t u = 0; u + 1 < offsets.size() && !degenerate; ++u) {
        long deg_r = 0;
        for (int k = offsets[u]; k < offsets[u + 1]; ++k) {
          if (dots[k] == 0.0) {
            degenerate = true;
            break;
          }
          if (dots[k] > 0) ++deg_r;
        }
        s += deg_r * deg_r;
      }
      if (!degenerate) return s;
      Vector shift = Vector::Zero(direction.size());
      shift[(attempt + 1) % direction.size()] = 1.0;
      direction = (direction + 1e-7 * (attempt + 1) * shift).normalized();
    }
    throw std::runtime_error("right_degree_square_sum: could not resolve orthogonal ties");
  }
};

}  // namespace

long right_degree_square_sum(const GeometricGraph& g, Vector direction) {
  return DisplacementCache(g).evaluate(std::move(direction));
}

double length_power(const GeometricGraph& g, double alpha) {
  if (g.rule().kind != GraphRule::Kind::Disk)
    throw std::invalid_argument("length_power: defined for disk graphs");
  if (!(alpha >= 0.0) || alpha > 1.0)
    throw std::invalid_argument("length_power: alpha must lie in [0, 1]");
  const Matrix& p = g.config().points();
  double s = 0;
  for (int u = 0; u < g.vertex_count(); ++u)
    for (int v : g.adjacency()[u]) {
      if (v <= u) continue;
      s += alpha == 0.0 ? 1.0
                        : std::pow(g.metric().distance(p.col(u), p.col(v)), alpha);
    }
  return s;
}

double total_edge_length(const GeometricGraph& g) {
  const Matrix& p = g.config().points();
  double s = 0;
  for (int u = 0; u < g.vertex_count(); ++u)
    for (int v : g.adjacency()[u]) {
      if (v <= u) continue;
      s += g.metric().distance(p.col(u), p.col(v));
    }
  return s;
}

HalfBallPartition half_ball_partition(int d, double rho) {
  if (!(rho > 0)) throw std::invalid_argument("half_ball_partition: rho must be > 0");
  if (d < 1 || d > 3)
    throw std::invalid_argument(
        "half_ball_partition: unsupported-dimension (built-in constructions cover d <= 3)");

  HalfBallPartition part;
  part.dimension = d;
  part.rho = rho;

  if (d == 1) {
    part.count = 1;
    part.classify = [rho](const Vector& z) {
      return (z[0] > 0 && z[0] <= rho) ? 0 : -1;
    };
    return part;
  }

  if (d == 2) {
    // Three 60-degree sectors; a sector of radius rho and opening angle
    // <= 60 degrees has diameter exactly rho.
    part.count = 3;
    part.classify = [rho](const Vector& z) {
      if (!(z[0] > 0) || z.squaredNorm() > rho * rho) return -1;
      const double theta = std::atan2(z[1], z[0]);  // in (-pi/2, pi/2)
      return std::min(2, static_cast<int>((theta + kPi / 2) / (kPi / 3)));
    };
    return part;
  }

  // d == 3: polar cap of half-angle 30 degrees, a [30,60) band in 6
  // longitude sectors and a [60,90) band in 7.  Every piece has angular
  // diameter <= 60 degrees, hence Euclidean diameter <= rho.
  part.count = 14;
  part.classify = [rho](const Vector& z) {
    if (!(z[0] > 0) || z.squaredNorm() > rho * rho) return -1;
    const double lat = std::atan2(std::hypot(z[1], z[2]), z[0]);  // [0, pi/2)
    double lon = std::atan2(z[2], z[1]);
    if (lon < 0) lon += 2 * kPi;
    if (lat < kPi / 6) return 0;
    if (lat < kPi / 3) return 1 + std::min(5, static_cast<int>(lon / (kPi / 3)));
    return 7 + std::min(6, static_cast<int>(lon / (2 * kPi / 7)));
  };
  return part;
}

PartitionCheck verify_partition(const HalfBallPartition& partition,
                                long cover_samples, long diameter_pairs_per_piece,
                                SeedSpec seed) {
  const int d = partition.dimension;
  const double rho = partition.rho;
  SubstreamRng rng(seed);

  auto draw_half_ball = [&]() {
    Vector z(d);
    for (;;) {
      double norm2 = 0;
      for (int i = 0; i < d; ++i) {
        z[i] = rng.normal();
        norm2 += z[i] * z[i];
      }
      if (norm2 == 0) continue;
      if (z[0] < 0) z = -z;
      if (z[0] == 0) continue;
      const double r = rho * std::pow(rng.next_positive_double(), 1.0 / d);
      z *= r / std::sqrt(norm2);
      return z;
    }
  };

  PartitionCheck check;
  check.cover_samples = cover_samples;
  check.diameter_pairs_per_piece = diameter_pairs_per_piece;

  for (long s = 0; s < cover_samples; ++s) {
    const int piece = partition.classify(draw_half_ball());
    if (piece < 0 || piece >= partition.count) {
      check.covers = false;
      break;
    }
  }

  // Pairwise diameters over per-piece samples (sample count chosen so the
  // full pair scan matches the requested pair budget).
  const long per_piece =
      std::max<long>(2, static_cast<long>(std::sqrt(2.0 * diameter_pairs_per_piece)) + 1);
  std::vector<std::vector<Vector>> pools(static_cast<std::size_t>(partition.count));
  long guard = 0;
  while (guard++ < cover_samples + 1000000) {
    bool all_full = true;
    for (const auto& pool : pools)
      if (static_cast<long>(pool.size()) < per_piece) {
        all_full = false;
        break;
      }
    if (all_full) break;
    Vector z = draw_half_ball();
    const int piece = partition.classify(z);
    if (piece >= 0 && piece < partition.count &&
        static_cast<long>(pools[static_cast<std::size_t>(piece)].size()) < per_piece)
      pools[static_cast<std::size_t>(piece)].push_back(std::move(z));
  }
  for (const auto& pool : pools)
    for (std::size_t i = 0; i < pool.size(); ++i)
      for (std::size_t j = i + 1; j < pool.size(); ++j)
        check.max_diameter = std::max(check.max_diameter, (pool[i] - pool[j]).norm());
  check.diameters_ok = check.max_diameter <= rho * (1 + 1e-12);
  return check;
}

double degree_square_constant_D(int p) {
  if (p < 1) throw std::invalid_argument("degree_square_constant_D: p must be >= 1");
  const double pf = p;
  return 4.0 * std::sqrt(2.0) / 3.0 * pf +
         std::sqrt(32.0 / 9.0 * pf * pf + 4.0 * pf - 1.0);
}

double degree_square_selfbound_constant(int p) {
  return (8.0 * std::sqrt(2.0) / 3.0 + 4.0 / degree_square_constant_D(p)) * p;
}

EdgeInequalityReport check_edge_inequalities(const GeometricGraph& g,
                                             int partition_count, int directions) {
  if (partition_count < 1)
    throw std::invalid_argument("check_edge_inequalities: invalid partition count");
  EdgeInequalityReport rep;
  rep.directions_checked = directions;

  const double p = partition_count;
  const long N = edge_count(g);
  const long T = triangle_count(g);
  const long deg2 = degree_square_sum(g);
  const double n32 = std::pow(static_cast<double>(N), 1.5);
  const int d = g.config().dim();

  rep.triangle_slack = std::sqrt(2.0) * n32 - 3.0 * T;
  rep.triangle_ok = rep.triangle_slack >= 0;
  rep.cor_slack = 8.0 * std::sqrt(2.0) / 3.0 * p * n32 + 4.0 * p * N - deg2;
  rep.cor_ok = rep.cor_slack >= 0;
  rep.thm_D_slack = degree_square_selfbound_constant(partition_count) * n32 - deg2;
  rep.thm_D_ok = rep.thm_D_slack >= 0;

  const double lemma_rhs = 2.0 * p * T + p * N;
  rep.lemma_slack_min = std::numeric_limits<double>::infinity();
  const DisplacementCache cache(g);
  SubstreamRng dir_rng(SeedSpec{0x9d2c5680u, 97});
  for (int k = 0; k < directions; ++k) {
    Vector a(d);
    if (d == 2) {
      const double theta = 2 * kPi * k / std::max(1, directions) + 0.1234567;
      a << std::cos(theta), std::sin(theta);
    } else {
      do
        for (int i = 0; i < d; ++i) a[i] = dir_rng.normal();
      while (a.norm() == 0);
    }
    const long s = cache.evaluate(std::move(a));
    rep.max_right_degree_square_sum = std::max(rep.max_right_degree_square_sum, s);
    rep.lemma_slack_min = std::min(rep.lemma_slack_min, lemma_rhs - s);
    if (s > lemma_rhs) rep.lemma_ok = false;
  }
  if (directions == 0) rep.lemma_slack_min = lemma_rhs;
  return rep;
}

long sup_cell_count(const PointConfiguration& config, double rho) {
  if (!(rho > 0)) throw std::invalid_argument("sup_cell_count: rho must be > 0");
  const Matrix& p = config.points();
  if (p.cols() == 0) return 0;
  std::map<std::vector<long>, long> counts;
  std::vector<long> key(static_cast<std::size_t>(p.rows()));
  long best = 0;
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    for (Eigen::Index i = 0; i < p.rows(); ++i)
      key[static_cast<std::size_t>(i)] =
          static_cast<long>(std::floor(p(i, j) / (2 * rho)));
    best = std::max(best, counts[key] += config.multiplicities()[j]);
  }
  return best;
}

SupBracket sup_weighted_ball_count(const PointConfiguration& config, double gamma,
                                   int grid_per_unit) {
  SupBracket out;
  const Matrix& p = config.points();
  if (p.cols() == 0) return out;
  const int d = config.dim();
  const double c = std::pow(3.0, gamma) + 1.0;

  auto weighted_count = [&](const Vector& x, double radius) {
    long cnt = 0;
    for (Eigen::Index j = 0; j < p.cols(); ++j)
      if ((p.col(j) - x).norm() <= radius) cnt += config.multiplicities()[j];
    return cnt;
  };
  auto value_at = [&](const Vector& x) {
    const double r = GraphRule::decaying_radius(x, gamma);
    return r * weighted_count(x, c * r);
  };

  for (Eigen::Index j = 0; j < p.cols(); ++j)
    out.lower = std::max(out.lower, value_at(p.col(j)));

  // Candidate centers only matter within distance c of an atom (rho <= 1).
  Vector lo = p.rowwise().minCoeff().array() - c;
  Vector hi = p.rowwise().maxCoeff().array() + c;
  double h = 1.0 / std::max(1, grid_per_unit);
  auto cells_for = [&](double step) {
    double m = 1;
    for (int i = 0; i < d; ++i) m *= std::ceil((hi[i] - lo[i]) / step);
    return m;
  };
  while (cells_for(h) * static_cast<double>(p.cols()) > 5e7) h *= 2;  // keep the scan bounded

  std::vector<long> idx(static_cast<std::size_t>(d), 0);
  std::vector<long> ncells(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i)
    ncells[static_cast<std::size_t>(i)] =
        std::max<long>(1, static_cast<long>(std::ceil((hi[i] - lo[i]) / h)));
  const double half_diag = 0.5 * h * std::sqrt(static_cast<double>(d));
  for (;;) {
    Vector clo(d), center(d), nearest(d);
    for (int i = 0; i < d; ++i) {
      clo[i] = lo[i] + idx[static_cast<std::size_t>(i)] * h;
      center[i] = clo[i] + 0.5 * h;
      nearest[i] = std::clamp(0.0, clo[i], clo[i] + h);
    }
    out.lower = std::max(out.lower, value_at(center));
    const double rho_up = std::pow(nearest.norm() + 1.0, -gamma);
    const long cnt = weighted_count(center, c * rho_up + half_diag);
    out.upper = std::max(out.upper, rho_up * cnt);

    int ax = 0;
    while (ax < d && ++idx[static_cast<std::size_t>(ax)] == ncells[static_cast<std::size_t>(ax)])
      idx[static_cast<std::size_t>(ax++)] = 0;
    if (ax == d) break;
  }
  out.upper = std::max(out.upper, out.lower);
  return out;
}

}  // namespace geoconc

#pragma once

#include "geoconc/rng.hpp"
#include "geoconc/types.hpp"

#include <cstdint>
#include <functional>
#include <vector>

// Random geometric graphs (fixed-radius disk graph, decaying-radius
// intersection graph) over simple point configurations, with the grid index,
// the deterministic degree/triangle statistics and the half-ball partition
// machinery behind the degree-square inequalities.

namespace geoconc {

// Edge rules.  DiskGraph: 0 < |x-y| <= rho.  IntersectionGraph: balls of
// radius rho(x) = (|x|+1)^(-gamma) intersect, i.e. 0 < |x-y| <= rho(x)+rho(y).
struct GraphRule {
  enum class Kind { Disk, Intersection };
  Kind kind = Kind::Disk;
  double rho = 0;
  double gamma = 0;

  static GraphRule disk(double rho) {
    if (!(rho > 0)) throw std::invalid_argument("disk rule: rho must be > 0");
    return GraphRule{Kind::Disk, rho, 0};
  }
  static GraphRule intersection(double gamma) {
    if (!(gamma > 0)) throw std::invalid_argument("intersection rule: gamma must be > 0");
    return GraphRule{Kind::Intersection, 0, gamma};
  }

  static double decaying_radius(const Vector& x, double gamma) {
    return std::pow(x.norm() + 1.0, -gamma);
  }
};

class GeometricGraph {
 public:
  GeometricGraph() = default;
  GeometricGraph(PointConfiguration config, GraphRule rule, Metric metric,
                 std::vector<std::vector<int>> adjacency, double grid_cell_size)
      : config_(std::move(config)),
        rule_(rule),
        metric_(std::move(metric)),
        adjacency_(std::move(adjacency)),
        grid_cell_size_(grid_cell_size) {}

  const PointConfiguration& config() const { return config_; }
  const GraphRule& rule() const { return rule_; }
  const Metric& metric() const { return metric_; }
  const std::vector<std::vector<int>>& adjacency() const { return adjacency_; }
  double grid_cell_size() const { return grid_cell_size_; }
  int vertex_count() const { return config_.atom_count(); }
  int degree(int v) const { return static_cast<int>(adjacency_[v].size()); }

  // Re-checks the stored structure against the rule (symmetry, no loops,
  // distance predicate).
  bool verify() const;

 private:
  PointConfiguration config_;
  GraphRule rule_;
  Metric metric_;
  std::vector<std::vector<int>> adjacency_;  // per-vertex sorted neighbor ids
  double grid_cell_size_ = 0;
};

// Builds the graph through a uniform grid (cell size rho for the disk rule,
// 2 * max radius for the intersection rule).  The configuration must be
// simple; the intersection rule requires the Euclidean metric.
GeometricGraph build_graph(const PointConfiguration& config, const GraphRule& rule,
                           const Metric& metric = Metric::euclidean());

long edge_count(const GeometricGraph& g);
long triangle_count(const GeometricGraph& g);
long degree_square_sum(const GeometricGraph& g);

// Sum over vertices of the squared right-degree #((x + B) ∩ xi), where B is
// the half ball {|z| <= rho, <z, a> > 0}.  If some displacement is exactly
// orthogonal to `a`, the direction is perturbed by small deterministic
// rotations until the degeneracy disappears.
long right_degree_square_sum(const GeometricGraph& g, Vector direction);

// Sum over edges of |x - y|^alpha; alpha = 0 recovers the edge count.
double length_power(const GeometricGraph& g, double alpha);

// Total edge length (any rule).
double total_edge_length(const GeometricGraph& g);

// Partition of the half ball {|z| <= rho, z_1 > 0} into `count` pieces of
// diameter <= rho.  classify() maps a point of the half ball to its piece
// (and -1 outside).  Built-in constructions: d = 1 -> 1 piece, d = 2 -> 3,
// d = 3 -> 14 (cap plus two latitude bands; an upper bound for the optimal
// count, which is all the inequalities need).
struct HalfBallPartition {
  int dimension = 0;
  double rho = 0;
  int count = 0;
  std::function<int(const Vector&)> classify;
};

HalfBallPartition half_ball_partition(int d, double rho);

struct PartitionCheck {
  bool covers = true;          // every sampled half-ball point lands in a piece
  bool disjoint = true;        // classify is single-valued by construction
  bool diameters_ok = true;    // sampled per-piece diameters <= rho
  double max_diameter = 0;
  long cover_samples = 0;
  long diameter_pairs_per_piece = 0;
};

// Certification by rejection sampling: cover_samples uniform half-ball points
// must each land in exactly one piece, and per-piece sampled diameters must
// stay within rho (up to floating-point slack).
PartitionCheck verify_partition(const HalfBallPartition& partition,
                                long cover_samples, long diameter_pairs_per_piece,
                                SeedSpec seed);

// D = (4*sqrt(2)/3) p + sqrt(32 p^2 / 9 + 4 p - 1), and the degree-square
// self-bound constant (8*sqrt(2)/3 + 4/D) p.
double degree_square_constant_D(int partition_count);
double degree_square_selfbound_constant(int partition_count);

struct EdgeInequalityReport {
  bool lemma_ok = true;        // 2pT + pN >= sum deg_r^2, every direction tried
  bool cor_ok = true;          // sum deg^2 <= (8*sqrt(2)/3) p N^(3/2) + 4 p N
  bool thm_D_ok = true;        // sum deg^2 <= (8*sqrt(2)/3 + 4/D) p N^(3/2)
  bool triangle_ok = true;     // 3T <= sqrt(2) N^(3/2)
  double lemma_slack_min = 0;  // min over directions of lhs - rhs
  double cor_slack = 0;
  double thm_D_slack = 0;
  double triangle_slack = 0;
  long max_right_degree_square_sum = 0;
  int directions_checked = 0;

  bool all_ok() const { return lemma_ok && cor_ok && thm_D_ok && triangle_ok; }
};

// Evaluates the four deterministic inequalities exactly.  A violation is a
// software defect and is surfaced through the report flags.
EdgeInequalityReport check_edge_inequalities(const GeometricGraph& g,
                                             int partition_count,
                                             int directions = 100);

// G statistic of the cell lattice: max over j in Z^d of the point count of
// the cell [0, 2 rho)^d + 2 rho j.  (Indexing over all of Z^d, not just the
// positive orthant, so configurations may span any orthant.)
long sup_cell_count(const PointConfiguration& config, double rho);

// G statistic of the decaying-radius model: sup over centers x of
// rho(x) * #(B(x, c rho(x)) ∩ xi) with c = 3^gamma + 1.  The supremum over an
// uncountable center set is bracketed: `lower` maximizes over the atoms plus
// a refinement grid, `upper` comes from a covering-cell bound.
struct SupBracket {
  double lower = 0;
  double upper = 0;
};

SupBracket sup_weighted_ball_count(const PointConfiguration& config, double gamma,
                                   int grid_per_unit = 8);

}  // namespace geoconc

#ifndef PENAPARAB_MESH_HPP
#define PENAPARAB_MESH_HPP

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

#include "penaparab/geometry.hpp"

namespace penaparab {

enum class EdgeTag { Sigma0, Sigma1, Bottom, Top };
const char* to_string(EdgeTag tag);

struct BoundaryEdge {
  std::array<int, 2> nodes{};  ///< lateral: (lower, upper); bottom/top: (left, right)
  EdgeTag tag = EdgeTag::Bottom;
  /// Left or Right for lateral edges.
  Side side = Side::Left;
  bool lateral() const { return tag == EdgeTag::Sigma0 || tag == EdgeTag::Sigma1; }
};

/// Structured triangulation of Q: `levels.size()` time levels with nx + 1
/// uniformly spaced nodes each. Node (k, j) has index k * (nx + 1) + j.
struct SpaceTimeMesh {
  int nx = 0;
  std::vector<double> levels;
  std::vector<Point> nodes;
  std::vector<std::array<int, 3>> triangles;  ///< counterclockwise in (x, t)
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<bool> is_dirichlet;

  int nodes_per_level() const { return nx + 1; }
  int num_levels() const { return static_cast<int>(levels.size()); }
  int node(int level, int j) const { return level * (nx + 1) + j; }
  double signed_area(int tri) const;
};

/// Levels: uniform grid of nt intervals merged with the partition switch
/// times. Each trapezoid is split along its (k, j)-(k+1, j+1) diagonal.
SpaceTimeMesh build_mesh(const MovingDomain& d, const BoundaryPartition& p, int nx, int nt);

/// Degree 2 rule: the three edge midpoints with weight area / 3.
struct TriangleRule {
  std::array<Point, 3> points{};
  /// Barycentric coordinates of each point with respect to the triangle vertices.
  std::array<std::array<double, 3>, 3> lambda{};
  double weight = 0.0;
  double area = 0.0;
  /// Gradients (d/dx, d/dt) of the three vertex hat functions.
  std::array<std::array<double, 2>, 3> grad{};
};

TriangleRule triangle_rule(const SpaceTimeMesh& m, int tri);

/// Two point Gauss rule on a straight boundary edge. For lateral edges the
/// weights are dt-weights multiplied by w_sigma, so they integrate against d(sigma).
struct EdgeRule {
  std::array<Point, 2> points{};
  std::array<std::array<double, 2>, 2> lambda{};  ///< hat values of the two edge nodes
  std::array<double, 2> weights{};
  /// Lateral edges only: normal data from the discrete slope dx/dt.
  LateralPoint normal{};
};

EdgeRule edge_rule(const SpaceTimeMesh& m, const BoundaryEdge& e);

/// "v x t" per node, "f i j k" per triangle, "e i j TAG" per boundary edge.
void write_mesh(std::ostream& out, const SpaceTimeMesh& m);

}  // namespace penaparab

#endif  // PENAPARAB_MESH_HPP

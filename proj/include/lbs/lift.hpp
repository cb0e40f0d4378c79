#pragma once

#include "lbs/base_mesh.hpp"
#include "lbs/reference_fem.hpp"
#include "lbs/surface.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace lbs {

/// 3 x dim tangent matrix with fixed maximum size (no heap allocation).
using TangentMatrix = Eigen::Matrix<double, 3, Eigen::Dynamic, 0, 3, 2>;

/// Global numbering of the nodes of a Lagrange element over a base mesh.
/// Nodes on shared vertices and edges receive one global id.
struct NodeNumbering {
  int num_global = 0;
  std::vector<std::vector<int>> cell_nodes;  // per cell, in reference-node order
  /// For each global node: a cell containing it and its local index there.
  std::vector<std::pair<int, int>> owner;
};

NodeNumbering number_nodes(const BaseMesh& mesh, const ReferenceElement& element);

enum class PointKind { Equispaced, GaussLobatto, Perturbed };

std::string_view to_string(PointKind kind);
PointKind point_kind_from_string(std::string_view name);

/// Each node is displaced along the normal by h^{k+1} * U(center - width, center + width).
struct PerturbationSpec {
  double center = 0.0;
  double width = 1.0;
  std::uint64_t seed = 1;
};

struct InterpolationPointSet {
  PointKind kind = PointKind::GaussLobatto;
  /// Node family that perturbed sets displace; equal to kind otherwise.
  NodeFamily base_family = NodeFamily::GaussLobatto;
  int degree = 1;
  PerturbationSpec perturbation;

  static InterpolationPointSet equispaced(int k);
  static InterpolationPointSet gauss_lobatto(int k);
  static InterpolationPointSet perturbed(NodeFamily base, int k, PerturbationSpec spec);
};

/// Degree-k piecewise polynomial surface over a base mesh.
struct LiftedMesh {
  BaseMesh base;
  int degree = 1;
  InterpolationPointSet point_set;
  ReferenceElement element{CellKind::Segment, 1, NodeFamily::Equispaced};
  NodeNumbering nodes;
  /// Global control points L(x^j); cells share them through `nodes`.
  std::vector<Vec3> control_points;
  /// Order of the quadrature rule with nodes at the interpolation points
  /// (0 when the points carry no rule).
  int quadrature_order_ell = 0;
  /// Base-mesh h used to scale perturbations.
  double h = 0.0;

  std::size_t num_cells() const { return base.cells.size(); }
  CellKind cell_kind() const { return base.cell_kind; }
};

/// Affine (segment, triangle) or bilinear (quad) map of the flat base cell.
Vec3 base_map(const BaseMesh& mesh, int cell, const RefPoint& x);

LiftedMesh build_lift(const SurfaceDescription& surface, const BaseMesh& base, int k,
                      const InterpolationPointSet& points);

Vec3 map_point(const LiftedMesh& lifted, int cell, const RefPoint& x);

struct CellJacobian {
  TangentMatrix tangent;
  double area_factor = 0.0;  // sqrt(det(J^T J))
};

CellJacobian map_jacobian(const LiftedMesh& lifted, int cell, const RefPoint& x);

/// Positions, tangent matrices and area factors at every point of a rule.
struct CellGeometry {
  std::vector<Vec3> x;
  std::vector<TangentMatrix> jac;
  std::vector<double> area;
};

/// `lift_tab` must be the lift element tabulated on the rule in question.
void evaluate_cell_geometry(const LiftedMesh& lifted, int cell, const TabulatedBasis& lift_tab,
                            CellGeometry& out);

}  // namespace lbs

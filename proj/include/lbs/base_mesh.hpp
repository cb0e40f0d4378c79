#pragma once

#include "lbs/surface.hpp"

#include <array>
#include <iosfwd>
#include <map>
#include <string_view>
#include <utility>
#include <vector>

namespace lbs {

enum class CellKind { Segment, Triangle, Quad };

std::string_view to_string(CellKind kind);
int vertices_per_cell(CellKind kind);
/// Dimension of the reference cell (1 for segments, 2 otherwise).
int reference_dim(CellKind kind);

/// Flat base polytope. Cells are listed counter-clockwise seen from outside;
/// unused trailing entries of `cells[c]` are -1.
struct BaseMesh {
  CellKind cell_kind = CellKind::Triangle;
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> cells;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_cells() const { return cells.size(); }
  int vertices_in_cell() const { return vertices_per_cell(cell_kind); }
};

struct MeshMetrics {
  double h = 0.0;
  double h_min = 0.0;
  double rho = 0.0;
  double eta = 0.0;
};

struct BaseMeshOptions {
  CellKind cell_kind = CellKind::Triangle;
  int level = 0;
  /// Polygon edge count at level 0 (circle only).
  int circle_segments = 4;
  /// Torus grid at level 0: cells around the core circle and around the tube.
  int torus_major_cells = 8;
  int torus_minor_cells = 4;
};

/// Level-0 mesh refined `options.level` times with every vertex on the surface.
BaseMesh make_base(const SurfaceDescription& surface, const BaseMeshOptions& options);

/// Midpoint subdivision; new vertices are snapped with closest_point.
BaseMesh refine_uniform(const SurfaceDescription& surface, const BaseMesh& mesh);

MeshMetrics metrics(const BaseMesh& mesh);

/// Sorted global vertex ids of a facet (one vertex for segments, an edge
/// otherwise) mapped to the cells that contain it.
using FacetKey = std::pair<int, int>;
std::map<FacetKey, std::vector<int>> facet_incidence(const BaseMesh& mesh);

/// Local facets of a reference cell as pairs of local vertex indices.
std::vector<std::array<int, 2>> local_edges(CellKind kind);

/// Every facet shared by exactly two cells, traversed in opposite directions.
bool is_watertight_and_oriented(const BaseMesh& mesh);

/// V - E + F for surface meshes, V - E for polygons.
int euler_characteristic(const BaseMesh& mesh);

/// ASCII OFF export.
void write_off(std::ostream& os, const BaseMesh& mesh);

}  // namespace lbs

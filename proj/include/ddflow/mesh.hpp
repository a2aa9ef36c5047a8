#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "ddflow/types.hpp"

namespace ddflow {

enum class BoundarySide { Bottom = 1, Right = 2, Top = 3, Left = 4 };

struct BoundaryEdge {
  int edge;  ///< index into TriMesh::edges
  BoundarySide side;
};

/// Conforming triangulation of the unit square.
struct TriMesh {
  int subdivisions = 0;
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  ///< counter-clockwise vertex triples
  std::vector<std::array<int, 2>> edges;      ///< unique edges, lower vertex index first
  /// Local edge k of triangle c joins local vertices k and (k+1)%3.
  std::vector<std::array<int, 3>> triangle_edges;
  std::vector<BoundaryEdge> boundary_edges;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_cells() const { return static_cast<int>(triangles.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }

  double signed_area(int cell) const;
  Vector cell_areas() const;
  Vec2 centroid(int cell) const;
  Vec2 edge_midpoint(int edge) const;
};

/// n x n squares, each split along its SW-NE diagonal: 2n^2 triangles,
/// (n+1)^2 vertices, 4n boundary edges. Throws InvalidInput for n < 1.
TriMesh build_unit_square_mesh(int n);

/// Legacy VTK ASCII unstructured grid holding only the geometry.
void write_mesh_vtk(std::ostream& out, const TriMesh& mesh);

}  // namespace ddflow

#include "ddflow/mesh.hpp"

#include <map>
#include <ostream>
#include <utility>

#include "ddflow/errors.hpp"
#include "ddflow/vtk.hpp"

namespace ddflow {

double TriMesh::signed_area(int cell) const {
  const auto& t = triangles[cell];
  const Vec2 e1 = vertices[t[1]] - vertices[t[0]];
  const Vec2 e2 = vertices[t[2]] - vertices[t[0]];
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

Vector TriMesh::cell_areas() const {
  Vector a(num_cells());
  for (int c = 0; c < num_cells(); ++c) a[c] = signed_area(c);
  return a;
}

Vec2 TriMesh::centroid(int cell) const {
  const auto& t = triangles[cell];
  return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
}

Vec2 TriMesh::edge_midpoint(int edge) const {
  const auto& e = edges[edge];
  return 0.5 * (vertices[e[0]] + vertices[e[1]]);
}

TriMesh build_unit_square_mesh(int n) {
  if (n < 1) throw InvalidInput("build_unit_square_mesh: need at least one subdivision per side");
  TriMesh mesh;
  mesh.subdivisions = n;
  const double h = 1.0 / n;
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) mesh.vertices.emplace_back(i * h, j * h);
  // Exact end points so boundary tests can compare against 0 and 1.
  for (auto& v : mesh.vertices) {
    if (std::abs(v.x() - 1.0) < 0.5 * h / n) v.x() = 1.0;
    if (std::abs(v.y() - 1.0) < 0.5 * h / n) v.y() = 1.0;
  }

  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int sw = vid(i, j), se = vid(i + 1, j), nw = vid(i, j + 1), ne = vid(i + 1, j + 1);
      mesh.triangles.push_back({sw, se, ne});
      mesh.triangles.push_back({sw, ne, nw});
    }
  }

  std::map<std::pair<int, int>, int> edge_index;
  std::vector<int> edge_cell_count;
  mesh.triangle_edges.resize(mesh.triangles.size());
  for (std::size_t c = 0; c < mesh.triangles.size(); ++c) {
    const auto& t = mesh.triangles[c];
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[static_cast<std::size_t>((k + 1) % 3)];
      if (a > b) std::swap(a, b);
      auto [it, inserted] = edge_index.try_emplace({a, b}, mesh.num_edges());
      if (inserted) {
        mesh.edges.push_back({a, b});
        edge_cell_count.push_back(0);
      }
      ++edge_cell_count[it->second];
      mesh.triangle_edges[c][k] = it->second;
    }
  }

  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (edge_cell_count[e] != 1) continue;
    const Vec2 m = mesh.edge_midpoint(e);
    BoundarySide side;
    if (m.y() == 0.0)
      side = BoundarySide::Bottom;
    else if (m.x() == 1.0)
      side = BoundarySide::Right;
    else if (m.y() == 1.0)
      side = BoundarySide::Top;
    else
      side = BoundarySide::Left;
    mesh.boundary_edges.push_back({e, side});
  }
  return mesh;
}

void write_mesh_vtk(std::ostream& out, const TriMesh& mesh) {
  VtkWriter writer(mesh, "mesh");
  writer.write(out);
}

}  // namespace ddflow

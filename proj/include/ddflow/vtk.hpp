#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ddflow/mesh.hpp"

namespace ddflow {

/// Legacy VTK ASCII UNSTRUCTURED_GRID writer over the mesh vertices. Quadratic
/// fields are written through their vertex values.
class VtkWriter {
 public:
  VtkWriter(const TriMesh& mesh, std::string title);

  /// `values` has one entry per vertex (extra trailing entries, such as P2
  /// edge dofs, are ignored).
  void add_point_scalar(const std::string& name, const Vector& values);
  void add_point_vector(const std::string& name, const Vector& x, const Vector& y);
  void add_cell_scalar(const std::string& name, const Vector& values);

  void write(std::ostream& out) const;
  void write(const std::string& path) const;

 private:
  struct Array {
    std::string name;
    int width;
    std::vector<double> data;
  };
  const TriMesh* mesh_;
  std::string title_;
  std::vector<Array> point_arrays_;
  std::vector<Array> cell_arrays_;
};

}  // namespace ddflow

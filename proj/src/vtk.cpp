#include "ddflow/vtk.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

#include "ddflow/errors.hpp"

namespace ddflow {

VtkWriter::VtkWriter(const TriMesh& mesh, std::string title) : mesh_(&mesh), title_(std::move(title)) {}

void VtkWriter::add_point_scalar(const std::string& name, const Vector& values) {
  if (values.size() < mesh_->num_vertices()) throw InvalidInput("VtkWriter: too few point values for " + name);
  Array a{name, 1, {}};
  for (int i = 0; i < mesh_->num_vertices(); ++i) a.data.push_back(values[i]);
  point_arrays_.push_back(std::move(a));
}

void VtkWriter::add_point_vector(const std::string& name, const Vector& x, const Vector& y) {
  if (x.size() < mesh_->num_vertices() || y.size() < mesh_->num_vertices())
    throw InvalidInput("VtkWriter: too few point values for " + name);
  Array a{name, 3, {}};
  for (int i = 0; i < mesh_->num_vertices(); ++i) {
    a.data.push_back(x[i]);
    a.data.push_back(y[i]);
    a.data.push_back(0.0);
  }
  point_arrays_.push_back(std::move(a));
}

void VtkWriter::add_cell_scalar(const std::string& name, const Vector& values) {
  if (values.size() != mesh_->num_cells()) throw InvalidInput("VtkWriter: need one value per cell for " + name);
  Array a{name, 1, {}};
  for (int i = 0; i < mesh_->num_cells(); ++i) a.data.push_back(values[i]);
  cell_arrays_.push_back(std::move(a));
}

void VtkWriter::write(std::ostream& out) const {
  const int nv = mesh_->num_vertices();
  const int nc = mesh_->num_cells();
  out << "# vtk DataFile Version 3.0\n" << title_ << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << std::setprecision(17);
  out << "POINTS " << nv << " double\n";
  for (const auto& v : mesh_->vertices) out << v.x() << ' ' << v.y() << " 0\n";
  out << "CELLS " << nc << ' ' << 4 * nc << '\n';
  for (const auto& t : mesh_->triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << nc << '\n';
  for (int c = 0; c < nc; ++c) out << "5\n";

  auto emit = [&out](const Array& a) {
    if (a.width == 1)
      out << "SCALARS " << a.name << " double 1\nLOOKUP_TABLE default\n";
    else
      out << "VECTORS " << a.name << " double\n";
    for (std::size_t i = 0; i < a.data.size(); i += static_cast<std::size_t>(a.width)) {
      for (int k = 0; k < a.width; ++k) out << (k ? " " : "") << a.data[i + static_cast<std::size_t>(k)];
      out << '\n';
    }
  };
  if (!point_arrays_.empty()) {
    out << "POINT_DATA " << nv << '\n';
    for (const auto& a : point_arrays_) emit(a);
  }
  if (!cell_arrays_.empty()) {
    out << "CELL_DATA " << nc << '\n';
    for (const auto& a : cell_arrays_) emit(a);
  }
}

void VtkWriter::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open " + path + " for writing");
  write(out);
}

}  // namespace ddflow

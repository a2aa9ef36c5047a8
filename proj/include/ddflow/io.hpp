#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ddflow/sensitivity.hpp"
#include "ddflow/state.hpp"

namespace ddflow {

/// Shortest text that reads back to the same double ("%.17g").
std::string format_double(double v);

/// Comma-separated table with a fixed header; numbers via format_double.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(const std::vector<double>& values);
  void write(std::ostream& out) const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

/// Control CSV: cell,x,y,U_x,U_y (cell centroid coordinates).
void write_control_csv(std::ostream& out, const FlowProblem& problem, const Vector& control);
/// Reads a control CSV written by write_control_csv; values are restored
/// exactly. Throws InvalidInput on a malformed file or cell count mismatch.
Vector read_control_csv(std::istream& in, const FlowProblem& problem);

/// State CSV: dof,x,y,u_x,u_y,T,S over the P2 dofs.
void write_state_csv(std::ostream& out, const FlowProblem& problem, const StateFields& state);
/// Reads (u, y) back from a state CSV.
std::pair<Vector, Vector> read_state_csv(std::istream& in, const FlowProblem& problem);

void write_state_vtk(const std::filesystem::path& path, const FlowProblem& problem, const StateFields& state);
void write_adjoint_vtk(const std::filesystem::path& path, const FlowProblem& problem, const AdjointFields& adjoint);
/// Control components as cell data, plus any extra per-cell arrays.
void write_control_vtk(const std::filesystem::path& path, const FlowProblem& problem, const Vector& control,
                       const std::vector<std::pair<std::string, Vector>>& cell_fields = {});

}  // namespace ddflow

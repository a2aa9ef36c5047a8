#include "ddflow/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ddflow/vtk.hpp"

namespace ddflow {
namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

// Splits one CSV line; no quoting is used by the writers.
std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

double parse_number(const std::string& s, int line) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size()) {
    std::ostringstream msg;
    msg << "csv line " << line << ": '" << s << "' is not a number";
    throw InvalidInput(msg.str());
  }
  return v;
}

std::vector<std::vector<double>> read_table(std::istream& in, std::size_t columns, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput(std::string(what) + ": empty file");
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != columns) {
      std::ostringstream msg;
      msg << what << ": line " << lineno << " has " << cells.size() << " columns, expected " << columns;
      throw InvalidInput(msg.str());
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_number(c, lineno));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<double>& values) {
  if (values.size() != header_.size()) throw InvalidInput("CsvTable: row width does not match the header");
  rows_.push_back(values);
}

void CsvTable::write(std::ostream& out) const {
  for (std::size_t i = 0; i < header_.size(); ++i) out << (i ? "," : "") << header_[i];
  out << '\n';
  for (const auto& r : rows_) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_double(r[i]);
    out << '\n';
  }
}

void CsvTable::write(const std::filesystem::path& path) const {
  auto out = open_output(path);
  write(out);
}

void write_control_csv(std::ostream& out, const FlowProblem& problem, const Vector& control) {
  const int nc = problem.mesh().num_cells();
  if (control.size() != 2 * nc) throw InvalidInput("write_control_csv: control size mismatch");
  CsvTable t({"cell", "x", "y", "U_x", "U_y"});
  for (int c = 0; c < nc; ++c) {
    const Vec2 x = problem.mesh().centroid(c);
    t.add_row({double(c), x.x(), x.y(), control[c], control[nc + c]});
  }
  t.write(out);
}

Vector read_control_csv(std::istream& in, const FlowProblem& problem) {
  const int nc = problem.mesh().num_cells();
  const auto rows = read_table(in, 5, "read_control_csv");
  if (static_cast<int>(rows.size()) != nc) {
    std::ostringstream msg;
    msg << "read_control_csv: " << rows.size() << " cells, mesh has " << nc;
    throw InvalidInput(msg.str());
  }
  Vector U(2 * nc);
  for (int c = 0; c < nc; ++c) {
    if (rows[c][0] != c) throw InvalidInput("read_control_csv: cells out of order");
    U[c] = rows[c][3];
    U[nc + c] = rows[c][4];
  }
  return U;
}

void write_state_csv(std::ostream& out, const FlowProblem& problem, const StateFields& state) {
  const int n = problem.layout().n2;
  CsvTable t({"dof", "x", "y", "u_x", "u_y", "T", "S"});
  for (int i = 0; i < n; ++i) {
    const Vec2& x = problem.velocity().dof_coordinates[i];
    t.add_row({double(i), x.x(), x.y(), state.u[i], state.u[n + i], state.y[i], state.y[n + i]});
  }
  t.write(out);
}

std::pair<Vector, Vector> read_state_csv(std::istream& in, const FlowProblem& problem) {
  const int n = problem.layout().n2;
  const auto rows = read_table(in, 7, "read_state_csv");
  if (static_cast<int>(rows.size()) != n) {
    std::ostringstream msg;
    msg << "read_state_csv: " << rows.size() << " dofs, expected " << n;
    throw InvalidInput(msg.str());
  }
  Vector u(2 * n), y(2 * n);
  for (int i = 0; i < n; ++i) {
    if (rows[i][0] != i) throw InvalidInput("read_state_csv: dofs out of order");
    u[i] = rows[i][3];
    u[n + i] = rows[i][4];
    y[i] = rows[i][5];
    y[n + i] = rows[i][6];
  }
  return {u, y};
}

void write_state_vtk(const std::filesystem::path& path, const FlowProblem& problem, const StateFields& state) {
  const int n = problem.layout().n2;
  VtkWriter w(problem.mesh(), "state");
  w.add_point_vector("velocity", state.u.head(n), state.u.tail(n));
  w.add_point_scalar("pressure", state.p);
  w.add_point_scalar("T", state.y.head(n));
  w.add_point_scalar("S", state.y.tail(n));
  w.write(path.string());
}

void write_adjoint_vtk(const std::filesystem::path& path, const FlowProblem& problem, const AdjointFields& adjoint) {
  const int n = problem.layout().n2;
  VtkWriter w(problem.mesh(), "adjoint");
  w.add_point_vector("phi", adjoint.phi.head(n), adjoint.phi.tail(n));
  w.add_point_scalar("xi", adjoint.xi);
  w.add_point_scalar("eta_T", adjoint.eta.head(n));
  w.add_point_scalar("eta_S", adjoint.eta.tail(n));
  w.write(path.string());
}

void write_control_vtk(const std::filesystem::path& path, const FlowProblem& problem, const Vector& control,
                       const std::vector<std::pair<std::string, Vector>>& cell_fields) {
  const int nc = problem.mesh().num_cells();
  if (control.size() != 2 * nc) throw InvalidInput("write_control_vtk: control size mismatch");
  VtkWriter w(problem.mesh(), "control");
  w.add_cell_scalar("U_x", control.head(nc));
  w.add_cell_scalar("U_y", control.tail(nc));
  for (const auto& [name, values] : cell_fields) w.add_cell_scalar(name, values);
  w.write(path.string());
}

}  // namespace ddflow

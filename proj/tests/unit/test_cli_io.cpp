#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ddflow/config.hpp"
#include "ddflow/io.hpp"
#include "ddflow/run.hpp"
#include "ddflow/verification.hpp"

using namespace ddflow;
namespace fs = std::filesystem;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config_string(text, "test.ini");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ddflow_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, MinimalConfigGetsDefaults) {
  const RunConfig c = parse_config_string("[mesh]\nn = 4\n");
  EXPECT_EQ(c.n, 4);
  EXPECT_EQ(c.seed, 1u);
  EXPECT_DOUBLE_EQ(c.model.lambda, 1e-2);
  EXPECT_DOUBLE_EQ(c.lower, -10.0);
  EXPECT_DOUBLE_EQ(c.kkt_tol, 1e-6);
  EXPECT_EQ(c.mms_levels, (std::vector<int>{8, 16, 32}));
}

TEST(Config, ParsesVectorsAndMatrices) {
  const RunConfig c = parse_config_string(
      "[model]\ndiffusion = 1 0.1 0.2 1\nlambda = 0.5\n[data]\ny_d = constant\ny_d_value = 0.5 0.25\n"
      "[check]\nfd_steps = 1e-1 1e-2\n");
  EXPECT_DOUBLE_EQ(c.model.diffusion(0, 1), 0.1);
  EXPECT_DOUBLE_EQ(c.model.diffusion(1, 0), 0.2);
  EXPECT_DOUBLE_EQ(c.model.lambda, 0.5);
  EXPECT_EQ(c.y_desired, "constant");
  EXPECT_DOUBLE_EQ(c.y_desired_value.y(), 0.25);
  EXPECT_EQ(c.fd_steps, (std::vector<double>{1e-1, 1e-2}));
}

TEST(Config, NegativeLambdaNamesTheKey) {
  const std::string msg = config_error("[mesh]\nn = 4\n[model]\nlambda = -1\n");
  EXPECT_NE(msg.find("lambda"), std::string::npos);
  EXPECT_NE(msg.find("test.ini:4"), std::string::npos);
}

TEST(Config, MisspelledKeyGetsSuggestion) {
  const std::string msg = config_error("[model]\nlamda = 1\n");
  EXPECT_NE(msg.find("did you mean 'model.lambda'"), std::string::npos);
  EXPECT_NE(msg.find("test.ini:2"), std::string::npos);
}

TEST(Config, RejectsMalformedValues) {
  EXPECT_FALSE(config_error("[mesh]\nn = four\n").empty());
  EXPECT_FALSE(config_error("[mesh]\nn = 0\n").empty());
  EXPECT_FALSE(config_error("[bounds]\nlower = 2\nupper = 1\n").empty());
  EXPECT_FALSE(config_error("[nowhere]\nx = 1\n").empty());
  EXPECT_FALSE(config_error("[data]\nyD = spiral\n").empty());
  EXPECT_THROW(parse_config("/nonexistent/ddflow.ini"), ConfigError);
}

TEST(Io, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(Io, ControlCsvRoundTripIsExact) {
  const FlowProblem pb(4, default_boussinesq_model());
  const Vector U = 7.0 * random_directions(pb.num_controls(), 1, 13).front();
  std::stringstream ss;
  write_control_csv(ss, pb, U);
  const Vector back = read_control_csv(ss, pb);
  EXPECT_EQ(back, U);
}

TEST(Io, StateCsvRoundTripIsExact) {
  BoussinesqParams bp;
  PhysicalModel m = default_boussinesq_model(bp);
  m.y_boundary = [](const Vec2& x) { return Vec2(x.x(), x.y()); };
  const FlowProblem pb(3, m);
  const StateFields s = solve_state(pb, random_directions(pb.num_controls(), 1, 2).front()).state;
  std::stringstream ss;
  write_state_csv(ss, pb, s);
  const auto [u, y] = read_state_csv(ss, pb);
  EXPECT_EQ(u, s.u);
  EXPECT_EQ(y, s.y);
}

TEST(Io, CsvReaderRejectsBadInput) {
  const FlowProblem pb(2, default_boussinesq_model());
  std::stringstream wrong_width("cell,x,y,U_x,U_y\n0,0.1,0.1,1\n");
  EXPECT_THROW(read_control_csv(wrong_width, pb), InvalidInput);
  std::stringstream not_number("cell,x,y,U_x,U_y\n0,0.1,0.1,abc,1\n");
  EXPECT_THROW(read_control_csv(not_number, pb), InvalidInput);
  std::stringstream too_short("cell,x,y,U_x,U_y\n0,0.1,0.1,1,1\n");
  EXPECT_THROW(read_control_csv(too_short, pb), InvalidInput);
}

TEST(Io, CsvOutputIsDeterministic) {
  const FlowProblem pb(4, default_boussinesq_model());
  const Vector U = random_directions(pb.num_controls(), 1, 5).front();
  std::stringstream a, b;
  write_control_csv(a, pb, U);
  write_control_csv(b, pb, random_directions(pb.num_controls(), 1, 5).front());
  EXPECT_EQ(a.str(), b.str());
}

TEST(Run, SolveStateOnZeroDataWritesZeroFields) {
  RunConfig c = parse_config_string("[mesh]\nn = 4\n");
  const fs::path out = scratch_dir("zero");
  std::ostringstream log;
  EXPECT_EQ(run_command("solve-state", c, out, log), 0);
  for (const char* f : {"state.csv", "fields_state.vtk", "history.csv", "report.txt"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  std::ifstream in(out / "state.csv");
  const FlowProblem pb = build_problem(c);
  const auto [u, y] = read_state_csv(in, pb);
  EXPECT_EQ(u.lpNorm<Eigen::Infinity>(), 0.0);
  EXPECT_EQ(y.lpNorm<Eigen::Infinity>(), 0.0);
  fs::remove_all(out);
}

TEST(Run, RepeatedRunsProduceIdenticalFiles) {
  RunConfig c = parse_config_string("[mesh]\nn = 3\n[data]\nyD = linear-xy\n");
  const fs::path a = scratch_dir("rep_a"), b = scratch_dir("rep_b");
  std::ostringstream log;
  ASSERT_EQ(run_command("solve-state", c, a, log), 0);
  ASSERT_EQ(run_command("solve-state", c, b, log), 0);
  EXPECT_EQ(slurp(a / "state.csv"), slurp(b / "state.csv"));
  EXPECT_EQ(slurp(a / "history.csv"), slurp(b / "history.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Run, UnknownCommandThrows) {
  std::ostringstream log;
  EXPECT_THROW(run_command("fly", RunConfig{}, scratch_dir("unknown"), log), InvalidInput);
}

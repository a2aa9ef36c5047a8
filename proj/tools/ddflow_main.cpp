#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "ddflow/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Optimal control of doubly diffusive flow: state solves, optimization and verification"};
  std::string command, config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> n;
  std::optional<double> lambda;
  app.add_option("command", command, "Command to run")->required()->check(CLI::IsMember(ddflow::command_names()));
  app.add_option("--config", config_path, "INI configuration file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory")->required();
  app.add_option("--seed", seed, "Random seed (overrides [run] seed)");
  app.add_option("--n", n, "Mesh subdivisions (overrides [mesh] n)");
  app.add_option("--lambda", lambda, "Control cost (overrides [model] lambda)");
  CLI11_PARSE(app, argc, argv);

  try {
    ddflow::RunConfig config = ddflow::parse_config(config_path);
    if (seed) config.seed = *seed;
    if (n) config.n = *n;
    if (lambda) config.model.lambda = *lambda;
    config.validate();
    return ddflow::run_command(command, config, out_dir, std::cout);
  } catch (const ddflow::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ddflow::SolverFailure& e) {
    std::cerr << command << " failed: " << e.what() << " (achieved residual " << e.achieved_residual() << ")\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << command << " failed: " << e.what() << '\n';
    return 1;
  }
}

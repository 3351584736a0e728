// Command-line driver: convergence studies and single solves.
//
//   twofield study  [flags]            levels 1..--levels, prints the error table
//   twofield single --level N [flags]  one solve, prints a one-row table
//
// Exit codes: 0 success, 2 bad arguments, 3 solver failure.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "twofield/twofield.hpp"

namespace {

constexpr int kExitBadArgs = 2;
constexpr int kExitSolverFailure = 3;

struct FlagValues {
  std::string config;
  std::vector<std::pair<std::string, std::string>> given;
};

void add_run_flags(CLI::App& cmd, std::vector<std::pair<std::string, std::string*>>& bindings,
                   std::vector<std::string>& storage) {
  static const std::vector<std::pair<std::string, std::string>> flags{
      {"problem", "Manufactured problem (paper_gaussian, linear_patch, quadratic)"},
      {"levels", "Number of refinement levels (default 6)"},
      {"degree", "Polynomial degree k, 1 or 2 (default 1)"},
      {"sigma-space", "Gradient space: equal_order or dg (default equal_order)"},
      {"alpha", "Weight alpha > 0 (default 2)"},
      {"gamma", "Load scaling gamma (default -4)"},
      {"method", "two_field or galerkin (default two_field)"},
      {"tol", "CG relative residual tolerance (default 1e-12)"},
      {"format", "csv or markdown (default csv)"},
      {"vtk-dir", "Write legacy VTK files for every level into this directory"},
  };
  storage.resize(flags.size());
  for (std::size_t i = 0; i < flags.size(); ++i) {
    cmd.add_option("--" + flags[i].first, storage[i], flags[i].second);
    bindings.emplace_back(flags[i].first, &storage[i]);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-field (solution, gradient) finite element solver for the Poisson equation"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::pair<std::string, std::string*>> bindings;
  std::vector<std::string> storage;

  CLI::App* study = app.add_subcommand("study", "Run a convergence study over uniform refinements");
  CLI::App* single = app.add_subcommand("single", "Solve once at a given level");
  int level = 1;
  single->add_option("--level", level, "Refinement level (1 = 32-triangle mesh)")->required();

  // Both subcommands share one set of run flags.
  std::vector<std::pair<std::string, std::string*>> single_bindings;
  std::vector<std::string> single_storage;
  add_run_flags(*study, bindings, storage);
  add_run_flags(*single, single_bindings, single_storage);
  study->add_option("--config", config_path, "Flat key=value config file; flags override it");
  single->add_option("--config", config_path, "Flat key=value config file; flags override it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitBadArgs;
  }

  CLI::App* active = study->parsed() ? study : single;
  auto& active_bindings = study->parsed() ? bindings : single_bindings;

  twofield::RunConfig cfg;
  try {
    if (!config_path.empty()) twofield::apply_config_file(cfg, config_path);
    for (const auto& [name, value] : active_bindings) {
      if (active->count("--" + name) > 0) twofield::apply_setting(cfg, name, *value);
    }
    twofield::validate(cfg);
    if (active == single && level < 1) throw twofield::ConfigError("--level must be >= 1");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadArgs;
  }

  try {
    twofield::ConvergenceTable table;
    if (active == study) {
      table = twofield::run_convergence_study(cfg);
    } else {
      const twofield::LevelResult r = twofield::run_single(cfg, level);
      table = twofield::convergence_rates({r});
      table.complete = r.converged;
    }
    std::cout << twofield::emit_table(table, cfg.format);
    for (const auto& r : table.levels) {
      std::fprintf(stderr, "level %d: %zu unknowns, %d CG iterations, %.3f s\n", r.level,
                   r.n_dofs, r.solver_iterations, r.wall_seconds);
    }
    return table.complete ? 0 : kExitSolverFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolverFailure;
  }
}

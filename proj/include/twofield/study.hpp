/**
 * @file study.hpp
 * @brief Run configuration and drivers for single solves and convergence
 *        studies over uniformly refined meshes.
 */
#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "twofield/analysis.hpp"
#include "twofield/assembly.hpp"
#include "twofield/mesh.hpp"
#include "twofield/problems.hpp"
#include "twofield/space.hpp"
#include "twofield/vtk.hpp"

namespace twofield {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Method { TwoField, Galerkin };

struct RunConfig {
  std::string problem = "paper_gaussian";
  int levels = 6;
  int degree = 1;
  SigmaSpaceKind sigma_space = SigmaSpaceKind::EqualOrderContinuous;
  double alpha = 2.0;
  double gamma = -4.0;
  Method method = Method::TwoField;
  double tol = 1e-12;
  TableFormat format = TableFormat::Csv;
  std::optional<std::string> vtk_dir;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size() || !std::isfinite(v)) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
  return v;
}

inline int parse_int(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
  return v;
}

}  // namespace detail

/// Applies one setting. Keys are the long flag names without dashes;
/// underscores are accepted in place of hyphens.
inline void apply_setting(RunConfig& cfg, std::string key, const std::string& raw) {
  for (char& c : key) {
    if (c == '_') c = '-';
  }
  const std::string value = detail::trim(raw);
  if (key == "problem") {
    cfg.problem = value;
  } else if (key == "levels") {
    cfg.levels = detail::parse_int(key, value);
  } else if (key == "degree") {
    cfg.degree = detail::parse_int(key, value);
  } else if (key == "sigma-space") {
    if (value == "equal_order") {
      cfg.sigma_space = SigmaSpaceKind::EqualOrderContinuous;
    } else if (value == "dg") {
      cfg.sigma_space = SigmaSpaceKind::Discontinuous;
    } else {
      throw ConfigError("sigma-space: expected equal_order or dg, got '" + value + "'");
    }
  } else if (key == "alpha") {
    cfg.alpha = detail::parse_double(key, value);
  } else if (key == "gamma") {
    cfg.gamma = detail::parse_double(key, value);
  } else if (key == "method") {
    if (value == "two_field") {
      cfg.method = Method::TwoField;
    } else if (value == "galerkin") {
      cfg.method = Method::Galerkin;
    } else {
      throw ConfigError("method: expected two_field or galerkin, got '" + value + "'");
    }
  } else if (key == "tol") {
    cfg.tol = detail::parse_double(key, value);
  } else if (key == "format") {
    if (value == "csv") {
      cfg.format = TableFormat::Csv;
    } else if (value == "markdown") {
      cfg.format = TableFormat::Markdown;
    } else {
      throw ConfigError("format: expected csv or markdown, got '" + value + "'");
    }
  } else if (key == "vtk-dir") {
    if (value.empty()) {
      cfg.vtk_dir.reset();
    } else {
      cfg.vtk_dir = value;
    }
  } else {
    throw ConfigError("unknown setting '" + key + "'");
  }
}

/// Flat `key = value` text; blank lines and lines starting with '#' are skipped.
inline std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = detail::trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    entries.emplace_back(detail::trim(s.substr(0, eq)), detail::trim(s.substr(eq + 1)));
  }
  return entries;
}

inline void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  for (const auto& [k, v] : parse_config_text(buf.str())) apply_setting(cfg, k, v);
}

/// Rejects configurations that cannot run.
inline void validate(const RunConfig& cfg) {
  if (cfg.levels < 1) throw ConfigError("levels must be >= 1");
  if (cfg.degree != 1 && cfg.degree != 2) throw ConfigError("degree must be 1 or 2");
  if (!(cfg.alpha > 0.0)) throw ConfigError("alpha must be > 0");
  if (!(cfg.tol > 0.0)) throw ConfigError("tol must be > 0");
  try {
    (void)find_problem(cfg.problem);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

/// One solve with the u coefficients kept for comparisons.
struct SingleRun {
  LevelResult result;
  Vector u_coefficients;
};

/// ||d_c u_h - g_c||_{L2} for a continuous u_h.
inline double gradient_component_error_L2(const FeFunction& uh, const VectorField& exact_grad,
                                          int c) {
  const TriangleMesh& mesh = uh.space().mesh();
  const QuadRule& rule = get_rule(error_quadrature_degree(uh));
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const AffineMap map = mesh.affine_map(t);
    double local = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double e = uh.eval(t, rule.points[q], map).grad[c] -
                       exact_grad(map.map(rule.points[q]))[c];
      local += rule.weights[q] * e * e;
    }
    sum += local * map.det;
  }
  return std::sqrt(sum);
}

namespace detail {

inline std::vector<double> gradient_vertex_values(const FeFunction& uh, int c) {
  const TriangleMesh& mesh = uh.space().mesh();
  std::vector<double> sum(mesh.n_vertices(), 0.0);
  std::vector<int> count(mesh.n_vertices(), 0);
  constexpr Point corners[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const AffineMap map = mesh.affine_map(t);
    for (int i = 0; i < 3; ++i) {
      const int v = mesh.triangles()[t][i];
      sum[v] += uh.eval(t, corners[i], map).grad[c];
      ++count[v];
    }
  }
  for (std::size_t v = 0; v < sum.size(); ++v) sum[v] /= count[v];
  return sum;
}

inline std::string method_name(Method m) { return m == Method::TwoField ? "two_field" : "galerkin"; }

inline void write_level_vtk(const RunConfig& cfg, const TriangleMesh& mesh, int level,
                            const ManufacturedProblem& mp, const FeFunction& u,
                            std::vector<double> s1, std::vector<double> s2) {
  namespace fs = std::filesystem;
  fs::create_directories(*cfg.vtk_dir);
  std::vector<double> uv = vertex_values(u);
  std::vector<double> err(uv.size());
  for (std::size_t v = 0; v < uv.size(); ++v) err[v] = uv[v] - mp.exact_u(mesh.vertices()[v]);
  const fs::path path = fs::path(*cfg.vtk_dir) /
                        (mp.name + "_" + method_name(cfg.method) + "_level" +
                         std::to_string(level) + ".vtk");
  write_vtk(path.string(), mesh,
            {{"u_h", std::move(uv)}, {"sigma1_h", std::move(s1)}, {"sigma2_h", std::move(s2)},
             {"error", std::move(err)}});
}

}  // namespace detail

inline SingleRun run_level(const RunConfig& cfg, int level) {
  validate(cfg);
  if (level < 1) throw ConfigError("level must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  const ManufacturedProblem mp = find_problem(cfg.problem);
  const TriangleMesh mesh = build_level_mesh(mp.bbox, mp.initial_cells, level);
  const CgOptions opts{cfg.tol, 0};

  SingleRun run;
  LevelResult& r = run.result;
  r.level = level;
  r.h = mesh.mesh_size();
  if (cfg.method == Method::TwoField) {
    const TwoFieldProblem problem(mesh, cfg.degree, cfg.sigma_space, mp, cfg.alpha, cfg.gamma);
    const AssembledSystem sys = assemble_two_field(problem);
    auto [x, report] = cg_solve(sys.matrix, sys.rhs, opts);
    const TwoFieldSolution sol = unpack_two_field(problem, sys, x);
    r.n_dofs = sys.free_dofs.size();
    r.solver_iterations = report.iterations;
    r.converged = report.converged;
    r.err_u_H1 = error_H1(sol.u, mp.exact_u, mp.exact_grad);
    r.err_u_L2 = error_L2(sol.u, mp.exact_u);
    r.err_sigma1_L2 = error_L2(sol.sigma1, component(mp.exact_grad, 0));
    r.err_sigma2_L2 = error_L2(sol.sigma2, component(mp.exact_grad, 1));
    run.u_coefficients = sol.u.coefficients();
    if (cfg.vtk_dir) {
      detail::write_level_vtk(cfg, mesh, level, mp, sol.u, vertex_values(sol.sigma1),
                              vertex_values(sol.sigma2));
    }
  } else {
    const FunctionSpace space(mesh, cfg.degree, Continuity::Continuous);
    const AssembledSystem sys = assemble_galerkin(mp, space);
    auto [x, report] = cg_solve(sys.matrix, sys.rhs, opts);
    const FeFunction u(space, sys.expand(x));
    r.n_dofs = sys.free_dofs.size();
    r.solver_iterations = report.iterations;
    r.converged = report.converged;
    r.err_u_H1 = error_H1(u, mp.exact_u, mp.exact_grad);
    r.err_u_L2 = error_L2(u, mp.exact_u);
    r.err_sigma1_L2 = gradient_component_error_L2(u, mp.exact_grad, 0);
    r.err_sigma2_L2 = gradient_component_error_L2(u, mp.exact_grad, 1);
    run.u_coefficients = u.coefficients();
    if (cfg.vtk_dir) {
      detail::write_level_vtk(cfg, mesh, level, mp, u, detail::gradient_vertex_values(u, 0),
                              detail::gradient_vertex_values(u, 1));
    }
  }
  r.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

inline LevelResult run_single(const RunConfig& cfg, int level) {
  return run_level(cfg, level).result;
}

/// Levels 1..cfg.levels; stops after the first level whose solve fails and
/// marks the table incomplete.
inline ConvergenceTable run_convergence_study(const RunConfig& cfg) {
  validate(cfg);
  std::vector<LevelResult> results;
  bool complete = true;
  for (int level = 1; level <= cfg.levels; ++level) {
    results.push_back(run_single(cfg, level));
    if (!results.back().converged) {
      complete = false;
      break;
    }
  }
  ConvergenceTable table = convergence_rates(std::move(results));
  table.complete = complete;
  return table;
}

}  // namespace twofield

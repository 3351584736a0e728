/**
 * @file analysis.hpp
 * @brief Discretisation errors against exact solutions, observed
 *        convergence rates, and CSV / markdown tables.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "twofield/assembly.hpp"
#include "twofield/problems.hpp"
#include "twofield/quadrature.hpp"
#include "twofield/space.hpp"

namespace twofield {

inline int error_quadrature_degree(const FeFunction& f) {
  return data_quadrature_degree(f.space().degree());
}

/// ||u_h - u||_{L2}.
inline double error_L2(const FeFunction& uh, const ScalarField& exact) {
  const TriangleMesh& mesh = uh.space().mesh();
  const QuadRule& rule = get_rule(error_quadrature_degree(uh));
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const AffineMap map = mesh.affine_map(t);
    double local = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double e = uh.eval(t, rule.points[q], map).value - exact(map.map(rule.points[q]));
      local += rule.weights[q] * e * e;
    }
    sum += local * map.det;
  }
  return std::sqrt(sum);
}

/// |u_h - u|_{H1}, the gradient part only.
inline double error_H1_seminorm(const FeFunction& uh, const VectorField& exact_grad) {
  const TriangleMesh& mesh = uh.space().mesh();
  const QuadRule& rule = get_rule(error_quadrature_degree(uh));
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const AffineMap map = mesh.affine_map(t);
    double local = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto g = uh.eval(t, rule.points[q], map).grad;
      const auto ge = exact_grad(map.map(rule.points[q]));
      const double e0 = g[0] - ge[0];
      const double e1 = g[1] - ge[1];
      local += rule.weights[q] * (e0 * e0 + e1 * e1);
    }
    sum += local * map.det;
  }
  return std::sqrt(sum);
}

/// Full H1 norm of the error, sqrt(L2^2 + seminorm^2).
inline double error_H1(const FeFunction& uh, const ScalarField& exact,
                       const VectorField& exact_grad) {
  const double l2 = error_L2(uh, exact);
  const double semi = error_H1_seminorm(uh, exact_grad);
  return std::sqrt(l2 * l2 + semi * semi);
}

/// Gradient component `c` of a vector field as a scalar field.
inline ScalarField component(const VectorField& field, int c) {
  return [field, c](Point p) { return field(p)[c]; };
}

struct LevelResult {
  int level = 0;
  double h = 0.0;
  std::size_t n_dofs = 0;
  double err_u_H1 = 0.0;
  double err_u_L2 = 0.0;
  double err_sigma1_L2 = 0.0;
  double err_sigma2_L2 = 0.0;
  int solver_iterations = 0;
  bool converged = true;
  double wall_seconds = 0.0;
};

/// Observed order between consecutive levels; empty when undefined.
using Rate = std::optional<double>;

inline Rate observed_rate(double coarse, double fine) {
  if (!(coarse > 0.0) || !(fine > 0.0)) return std::nullopt;
  return std::log2(coarse / fine);
}

struct ConvergenceTable {
  std::vector<LevelResult> levels;
  // rates_*[i] compares levels[i-1] and levels[i]; rates_*[0] is always empty.
  std::vector<Rate> rate_u_H1;
  std::vector<Rate> rate_u_L2;
  std::vector<Rate> rate_sigma1_L2;
  std::vector<Rate> rate_sigma2_L2;
  bool complete = true;  // false when a solve failed and the study stopped
};

inline ConvergenceTable convergence_rates(std::vector<LevelResult> results) {
  ConvergenceTable table;
  table.levels = std::move(results);
  const std::size_t n = table.levels.size();
  for (auto* v : {&table.rate_u_H1, &table.rate_u_L2, &table.rate_sigma1_L2,
                  &table.rate_sigma2_L2}) {
    v->assign(n, std::nullopt);
  }
  for (std::size_t i = 1; i < n; ++i) {
    const auto& a = table.levels[i - 1];
    const auto& b = table.levels[i];
    table.rate_u_H1[i] = observed_rate(a.err_u_H1, b.err_u_H1);
    table.rate_u_L2[i] = observed_rate(a.err_u_L2, b.err_u_L2);
    table.rate_sigma1_L2[i] = observed_rate(a.err_sigma1_L2, b.err_sigma1_L2);
    table.rate_sigma2_L2[i] = observed_rate(a.err_sigma2_L2, b.err_sigma2_L2);
  }
  return table;
}

enum class TableFormat { Csv, Markdown };

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

inline std::string fixed2(const Rate& r) {
  if (!r) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *r);
  return buf;
}

}  // namespace detail

inline const std::vector<std::string>& table_columns() {
  static const std::vector<std::string> cols{
      "level", "h", "ndofs", "err_u_H1", "rate", "err_u_L2", "rate",
      "err_s1_L2", "rate", "err_s2_L2", "rate"};
  return cols;
}

/// Errors in %.5e (six significant digits), rates in %.2f, blank when undefined.
inline std::string emit_table(const ConvergenceTable& table, TableFormat format) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < table.levels.size(); ++i) {
    const auto& r = table.levels[i];
    rows.push_back({std::to_string(r.level), detail::sci(r.h), std::to_string(r.n_dofs),
                    detail::sci(r.err_u_H1), detail::fixed2(table.rate_u_H1[i]),
                    detail::sci(r.err_u_L2), detail::fixed2(table.rate_u_L2[i]),
                    detail::sci(r.err_sigma1_L2), detail::fixed2(table.rate_sigma1_L2[i]),
                    detail::sci(r.err_sigma2_L2), detail::fixed2(table.rate_sigma2_L2[i])});
  }
  std::ostringstream os;
  const auto& cols = table_columns();
  if (format == TableFormat::Csv) {
    for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
    os << '\n';
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
      os << '\n';
    }
  } else {
    os << '|';
    for (const auto& c : cols) os << ' ' << c << " |";
    os << "\n|";
    for (std::size_t c = 0; c < cols.size(); ++c) os << "---|";
    os << '\n';
    for (const auto& row : rows) {
      os << '|';
      for (const auto& cell : row) os << ' ' << cell << " |";
      os << '\n';
    }
  }
  if (!table.complete) {
    os << (format == TableFormat::Csv ? "# " : "\n") << "incomplete: solver did not converge at level "
       << (table.levels.empty() ? 0 : table.levels.back().level) << '\n';
  }
  return os.str();
}

}  // namespace twofield

/**
 * @file problems.hpp
 * @brief Manufactured solutions for -Laplace(u) = f with Dirichlet data u.
 */
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "twofield/mesh.hpp"

namespace twofield {

using ScalarField = std::function<double(Point)>;
using VectorField = std::function<std::array<double, 2>(Point)>;

struct ManufacturedProblem {
  std::string name;
  BBox bbox;
  ScalarField exact_u;
  VectorField exact_grad;
  ScalarField source;  // f = -Laplace(u)
  int initial_cells = 4;  // cells per side of the level-1 grid
};

/// u = (x - y) exp(-5 (x - 1/2)^2 - 5 (y - 1/2)^2) on [-1, 1]^2.
inline ManufacturedProblem paper_gaussian() {
  ManufacturedProblem p;
  p.name = "paper_gaussian";
  p.bbox = {-1.0, 1.0, -1.0, 1.0};
  p.exact_u = [](Point q) {
    const double dx = q.x - 0.5;
    const double dy = q.y - 0.5;
    return (q.x - q.y) * std::exp(-5.0 * dx * dx - 5.0 * dy * dy);
  };
  p.exact_grad = [](Point q) {
    const double dx = q.x - 0.5;
    const double dy = q.y - 0.5;
    const double e = std::exp(-5.0 * dx * dx - 5.0 * dy * dy);
    const double s = q.x - q.y;
    return std::array<double, 2>{e * (1.0 - 10.0 * dx * s), e * (-1.0 - 10.0 * dy * s)};
  };
  p.source = [](Point q) {
    const double dx = q.x - 0.5;
    const double dy = q.y - 0.5;
    const double e = std::exp(-5.0 * dx * dx - 5.0 * dy * dy);
    const double gx = -10.0 * dx;
    const double gy = -10.0 * dy;
    const double lap = e * (2.0 * (gx - gy) + (q.x - q.y) * (gx * gx + gy * gy - 20.0));
    return -lap;
  };
  return p;
}

/// u = x on the unit square; reproduced exactly by any P_k space.
inline ManufacturedProblem linear_patch() {
  ManufacturedProblem p;
  p.name = "linear_patch";
  p.bbox = {0.0, 1.0, 0.0, 1.0};
  p.exact_u = [](Point q) { return q.x; };
  p.exact_grad = [](Point) { return std::array<double, 2>{1.0, 0.0}; };
  p.source = [](Point) { return 0.0; };
  return p;
}

/// u = x^2 + y^2, f = -4, on the unit square.
inline ManufacturedProblem quadratic() {
  ManufacturedProblem p;
  p.name = "quadratic";
  p.bbox = {0.0, 1.0, 0.0, 1.0};
  p.exact_u = [](Point q) { return q.x * q.x + q.y * q.y; };
  p.exact_grad = [](Point q) { return std::array<double, 2>{2.0 * q.x, 2.0 * q.y}; };
  p.source = [](Point) { return -4.0; };
  return p;
}

inline std::vector<ManufacturedProblem> builtin_problems() {
  return {paper_gaussian(), linear_patch(), quadratic()};
}

inline std::vector<std::string> builtin_problem_names() {
  std::vector<std::string> names;
  for (const auto& p : builtin_problems()) names.push_back(p.name);
  return names;
}

/// Throws std::invalid_argument listing the builtin names if `name` is unknown.
inline ManufacturedProblem find_problem(const std::string& name) {
  for (auto& p : builtin_problems()) {
    if (p.name == name) return p;
  }
  std::string known;
  for (const auto& n : builtin_problem_names()) known += (known.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown problem '" + name + "' (builtin: " + known + ")");
}

}  // namespace twofield

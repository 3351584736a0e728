/**
 * @file assembly.hpp
 * @brief Linear systems for the two-field (solution, gradient) minimisation
 *        principle and for the standard Galerkin method, with symmetric
 *        elimination of Dirichlet data.
 *
 * The two-field bilinear form is
 *
 *   a((u, s), (v, t)) = (s, t) + (s - alpha grad u, t - alpha grad v)
 *                     = 2 (s, t) - alpha (s, grad v) - alpha (grad u, t)
 *                       + alpha^2 (grad u, grad v),
 *
 * the Euler-Lagrange operator of
 *
 *   J(v, t) = ||t||^2 + ||t - alpha grad v||^2 + gamma l(v),  l(v) = (f, v),
 *
 * so the discrete problem reads a((u, s), (v, t)) = -(gamma / 2) l(v).
 * With alpha = 2 and gamma = -4 the minimiser is (u, grad u) for the
 * Poisson solution u.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "twofield/linalg.hpp"
#include "twofield/mesh.hpp"
#include "twofield/problems.hpp"
#include "twofield/quadrature.hpp"
#include "twofield/space.hpp"

namespace twofield {

class DegenerateProblem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Space used for each gradient component.
enum class SigmaSpaceKind {
  EqualOrderContinuous,  // [V_h]^2 without boundary conditions
  Discontinuous,         // [L_h]^2, broken P_k
};

inline Continuity continuity_of(SigmaSpaceKind kind) {
  return kind == SigmaSpaceKind::Discontinuous ? Continuity::Discontinuous
                                               : Continuity::Continuous;
}

/// Quadrature degree for bilinear forms of degree-k Lagrange functions.
inline int matrix_quadrature_degree(int k) { return std::max(2 * k, 1); }
/// Quadrature degree for anything touching non-polynomial data.
inline int data_quadrature_degree(int k) { return std::max(2 * k + 2, 6); }

/// Spaces and parameters of one two-field discretisation. Holds the spaces
/// by value, so it is pinned in memory; the mesh must outlive it.
class TwoFieldProblem {
 public:
  TwoFieldProblem(const TriangleMesh& mesh, int degree, SigmaSpaceKind sigma_kind,
                  ManufacturedProblem manufactured, double alpha = 2.0, double gamma = -4.0)
      : alpha_(alpha),
        gamma_(gamma),
        sigma_kind_(sigma_kind),
        manufactured_(std::move(manufactured)),
        u_space_(mesh, degree, Continuity::Continuous),
        sigma_space_(mesh, degree, continuity_of(sigma_kind)) {
    if (!(alpha > 0.0)) {
      throw std::invalid_argument("TwoFieldProblem: alpha must be > 0, got " +
                                  std::to_string(alpha));
    }
  }

  TwoFieldProblem(const TwoFieldProblem&) = delete;
  TwoFieldProblem& operator=(const TwoFieldProblem&) = delete;

  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] double gamma() const { return gamma_; }
  [[nodiscard]] SigmaSpaceKind sigma_kind() const { return sigma_kind_; }
  [[nodiscard]] const ManufacturedProblem& manufactured() const { return manufactured_; }
  [[nodiscard]] const FunctionSpace& u_space() const { return u_space_; }
  [[nodiscard]] const FunctionSpace& sigma_space() const { return sigma_space_; }
  [[nodiscard]] const TriangleMesh& mesh() const { return u_space_.mesh(); }
  [[nodiscard]] int degree() const { return u_space_.degree(); }

 private:
  double alpha_;
  double gamma_;
  SigmaSpaceKind sigma_kind_;
  ManufacturedProblem manufactured_;
  FunctionSpace u_space_;
  FunctionSpace sigma_space_;
};

/// Reduced system over the free unknowns. Full unknown ordering is
/// [u (all DOFs) | sigma_1 | sigma_2]; for Galerkin systems only u.
struct AssembledSystem {
  CsrMatrix matrix;
  Vector rhs;
  std::size_t n_u = 0;        // u DOFs including Dirichlet ones
  std::size_t n_sigma = 0;    // DOFs per gradient component
  std::vector<int> free_dofs;         // reduced index -> full index
  std::vector<int> constrained_dofs;  // full indices with prescribed values
  Vector lift;                        // full-length; Dirichlet values, zero elsewhere

  [[nodiscard]] std::size_t n_full() const { return n_u + 2 * n_sigma; }
  [[nodiscard]] std::size_t n_free_u() const { return n_u - constrained_dofs.size(); }

  /// Full coefficient vector from a reduced solution.
  [[nodiscard]] Vector expand(std::span<const double> reduced) const {
    if (reduced.size() != free_dofs.size()) {
      throw DimensionMismatch("AssembledSystem::expand: size mismatch");
    }
    Vector full = lift;
    for (std::size_t i = 0; i < free_dofs.size(); ++i) full[free_dofs[i]] = reduced[i];
    return full;
  }
};

namespace detail {

/// Drops constrained rows and columns, moving known columns to the rhs.
inline AssembledSystem eliminate(std::size_t n_full, const std::vector<Triplet>& triplets,
                                 const Vector& full_rhs, const std::vector<int>& constrained,
                                 const Vector& lift) {
  AssembledSystem sys;
  sys.constrained_dofs = constrained;
  sys.lift = lift;
  std::vector<int> reduced_index(n_full, 0);
  for (int c : constrained) reduced_index[c] = -1;
  for (std::size_t i = 0; i < n_full; ++i) {
    if (reduced_index[i] >= 0) {
      reduced_index[i] = static_cast<int>(sys.free_dofs.size());
      sys.free_dofs.push_back(static_cast<int>(i));
    }
  }
  if (sys.free_dofs.empty()) {
    throw DegenerateProblem("no free degrees of freedom after applying boundary conditions");
  }
  sys.rhs.resize(sys.free_dofs.size());
  for (std::size_t i = 0; i < sys.free_dofs.size(); ++i) sys.rhs[i] = full_rhs[sys.free_dofs[i]];

  std::vector<Triplet> reduced;
  reduced.reserve(triplets.size());
  for (const auto& t : triplets) {
    const int r = reduced_index[t.row];
    if (r < 0) continue;
    const int c = reduced_index[t.col];
    if (c >= 0) {
      reduced.push_back({r, c, t.value});
    } else {
      sys.rhs[r] -= t.value * lift[t.col];
    }
  }
  sys.matrix = CsrMatrix::from_triplets(sys.free_dofs.size(), std::move(reduced));
  return sys;
}

struct QuadPointData {
  double weight = 0.0;  // w_q det(J)
  Point x;
  BasisEval basis;
  std::array<std::array<double, 2>, kMaxLocalDofs> grads{};  // physical
};

inline QuadPointData quad_point(const FunctionSpace& space, const AffineMap& map,
                                const QuadRule& rule, std::size_t q) {
  QuadPointData d;
  d.weight = rule.weights[q] * map.det;
  d.x = map.map(rule.points[q]);
  d.basis = space.eval_basis(rule.points[q]);
  for (int i = 0; i < d.basis.n; ++i) d.grads[i] = map.push_gradient(d.basis.ref_grads[i]);
  return d;
}

/// Load vector contribution (f, phi_i) over all triangles, in full u numbering.
inline Vector load_vector(const FunctionSpace& space, const ScalarField& f) {
  Vector load(space.n_dofs(), 0.0);
  const QuadRule& rule = get_rule(data_quadrature_degree(space.degree()));
  const TriangleMesh& mesh = space.mesh();
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const AffineMap map = mesh.affine_map(t);
    const auto dofs = space.element_dofs(t);
    std::array<double, kMaxLocalDofs> fe{};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const BasisEval b = space.eval_basis(rule.points[q]);
      const double wf = rule.weights[q] * map.det * f(map.map(rule.points[q]));
      for (int i = 0; i < b.n; ++i) fe[i] += wf * b.values[i];
    }
    for (int i = 0; i < space.n_local(); ++i) load[dofs[i]] += fe[i];
  }
  return load;
}

inline Vector dirichlet_lift(const FunctionSpace& u_space, const ScalarField& g,
                             std::size_t n_full) {
  Vector lift(n_full, 0.0);
  for (int d : u_space.boundary_dofs()) lift[d] = g(u_space.dof_coords()[d]);
  return lift;
}

}  // namespace detail

/// Block system [alpha^2 A, -alpha B^T; -alpha B, 2 M] [u; s] = [-(gamma/2) F; 0]
/// with the boundary u DOFs eliminated. SPD for alpha > 0.
inline AssembledSystem assemble_two_field(const TwoFieldProblem& problem) {
  const FunctionSpace& us = problem.u_space();
  const FunctionSpace& ss = problem.sigma_space();
  const TriangleMesh& mesh = problem.mesh();
  const double alpha = problem.alpha();
  const std::size_t n_u = us.n_dofs();
  const std::size_t n_s = ss.n_dofs();
  const std::size_t n_full = n_u + 2 * n_s;
  const int nl = us.n_local();
  const QuadRule& rule = get_rule(matrix_quadrature_degree(problem.degree()));

  std::vector<Triplet> triplets;
  triplets.reserve(mesh.n_triangles() * static_cast<std::size_t>(nl * nl) * 9);
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const AffineMap map = mesh.affine_map(t);
    double stiff[kMaxLocalDofs][kMaxLocalDofs] = {};
    double mass[kMaxLocalDofs][kMaxLocalDofs] = {};
    double mixed[2][kMaxLocalDofs][kMaxLocalDofs] = {};  // (psi_i, d_c phi_j)
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto d = detail::quad_point(us, map, rule, q);
      for (int i = 0; i < nl; ++i) {
        for (int j = 0; j < nl; ++j) {
          stiff[i][j] += d.weight * (d.grads[i][0] * d.grads[j][0] + d.grads[i][1] * d.grads[j][1]);
          mass[i][j] += d.weight * d.basis.values[i] * d.basis.values[j];
          for (int c = 0; c < 2; ++c) mixed[c][i][j] += d.weight * d.basis.values[i] * d.grads[j][c];
        }
      }
    }
    const auto udofs = us.element_dofs(t);
    const auto sdofs = ss.element_dofs(t);
    for (int i = 0; i < nl; ++i) {
      for (int j = 0; j < nl; ++j) {
        triplets.push_back({udofs[i], udofs[j], alpha * alpha * stiff[i][j]});
      }
    }
    for (int c = 0; c < 2; ++c) {
      const int off = static_cast<int>(n_u + c * n_s);
      for (int i = 0; i < nl; ++i) {
        for (int j = 0; j < nl; ++j) {
          const double b = -alpha * mixed[c][i][j];
          triplets.push_back({off + sdofs[i], udofs[j], b});
          triplets.push_back({udofs[j], off + sdofs[i], b});
          triplets.push_back({off + sdofs[i], off + sdofs[j], 2.0 * mass[i][j]});
        }
      }
    }
  }

  Vector rhs(n_full, 0.0);
  const Vector load = detail::load_vector(us, problem.manufactured().source);
  for (std::size_t i = 0; i < n_u; ++i) rhs[i] = -0.5 * problem.gamma() * load[i];

  AssembledSystem sys = detail::eliminate(
      n_full, triplets, rhs, us.boundary_dofs(),
      detail::dirichlet_lift(us, problem.manufactured().exact_u, n_full));
  sys.n_u = n_u;
  sys.n_sigma = n_s;
  return sys;
}

namespace detail {

inline std::vector<Triplet> stiffness_triplets(const FunctionSpace& space) {
  const TriangleMesh& mesh = space.mesh();
  const int nl = space.n_local();
  const QuadRule& rule = get_rule(matrix_quadrature_degree(space.degree()));
  std::vector<Triplet> triplets;
  triplets.reserve(mesh.n_triangles() * static_cast<std::size_t>(nl * nl));
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const AffineMap map = mesh.affine_map(t);
    double stiff[kMaxLocalDofs][kMaxLocalDofs] = {};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto d = quad_point(space, map, rule, q);
      for (int i = 0; i < nl; ++i) {
        for (int j = 0; j < nl; ++j) {
          stiff[i][j] += d.weight * (d.grads[i][0] * d.grads[j][0] + d.grads[i][1] * d.grads[j][1]);
        }
      }
    }
    const auto dofs = space.element_dofs(t);
    for (int i = 0; i < nl; ++i) {
      for (int j = 0; j < nl; ++j) triplets.push_back({dofs[i], dofs[j], stiff[i][j]});
    }
  }
  return triplets;
}

}  // namespace detail

/// Unconstrained stiffness matrix (grad phi_j, grad phi_i) over all DOFs.
inline CsrMatrix assemble_stiffness_matrix(const FunctionSpace& space) {
  return CsrMatrix::from_triplets(space.n_dofs(), detail::stiffness_triplets(space));
}

/// Stiffness system (grad u, grad v) = (f, v) with the boundary eliminated.
inline AssembledSystem assemble_galerkin(const ManufacturedProblem& manufactured,
                                         const FunctionSpace& u_space) {
  if (u_space.continuity() != Continuity::Continuous) {
    throw std::invalid_argument("assemble_galerkin: u space must be continuous");
  }
  const std::size_t n_u = u_space.n_dofs();
  AssembledSystem sys = detail::eliminate(
      n_u, detail::stiffness_triplets(u_space), detail::load_vector(u_space, manufactured.source),
      u_space.boundary_dofs(), detail::dirichlet_lift(u_space, manufactured.exact_u, n_u));
  sys.n_u = n_u;
  sys.n_sigma = 0;
  return sys;
}

/// u_h and the two gradient components of a solved two-field system.
struct TwoFieldSolution {
  FeFunction u;
  FeFunction sigma1;
  FeFunction sigma2;
  SolveReport report;
};

inline TwoFieldSolution unpack_two_field(const TwoFieldProblem& problem,
                                         const AssembledSystem& sys,
                                         std::span<const double> reduced) {
  const Vector full = sys.expand(reduced);
  const auto n_u = static_cast<std::ptrdiff_t>(sys.n_u);
  const auto n_s = static_cast<std::ptrdiff_t>(sys.n_sigma);
  return {FeFunction(problem.u_space(), Vector(full.begin(), full.begin() + n_u)),
          FeFunction(problem.sigma_space(), Vector(full.begin() + n_u, full.begin() + n_u + n_s)),
          FeFunction(problem.sigma_space(), Vector(full.begin() + n_u + n_s, full.end())),
          {}};
}

inline TwoFieldSolution solve_two_field(const TwoFieldProblem& problem,
                                        const CgOptions& opts = {}) {
  const AssembledSystem sys = assemble_two_field(problem);
  auto [x, report] = cg_solve(sys.matrix, sys.rhs, opts);
  TwoFieldSolution sol = unpack_two_field(problem, sys, x);
  sol.report = std::move(report);
  return sol;
}

inline std::pair<FeFunction, SolveReport> solve_galerkin(const ManufacturedProblem& manufactured,
                                                         const FunctionSpace& u_space,
                                                         const CgOptions& opts = {}) {
  const AssembledSystem sys = assemble_galerkin(manufactured, u_space);
  auto [x, report] = cg_solve(sys.matrix, sys.rhs, opts);
  return {FeFunction(u_space, sys.expand(x)), std::move(report)};
}

/// K(v) = 1/2 ||grad v||^2 - (f, v).
inline double evaluate_energy_K(const FeFunction& v, const ScalarField& f) {
  const FunctionSpace& space = v.space();
  const TriangleMesh& mesh = space.mesh();
  const QuadRule& rule = get_rule(data_quadrature_degree(space.degree()));
  double energy = 0.0;
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const AffineMap map = mesh.affine_map(t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const PointValue pv = v.eval(t, rule.points[q], map);
      const double g2 = pv.grad[0] * pv.grad[0] + pv.grad[1] * pv.grad[1];
      energy += rule.weights[q] * map.det * (0.5 * g2 - f(map.map(rule.points[q])) * pv.value);
    }
  }
  return energy;
}

/// J(v, t) = ||t||^2 + ||t - alpha grad v||^2 + gamma (f, v).
inline double evaluate_functional_J(const FeFunction& v, const FeFunction& t1,
                                    const FeFunction& t2, double alpha, double gamma,
                                    const ScalarField& f) {
  const TriangleMesh& mesh = v.space().mesh();
  if (&t1.space().mesh() != &mesh || &t2.space().mesh() != &mesh) {
    throw std::invalid_argument("evaluate_functional_J: functions live on different meshes");
  }
  const int deg = std::max({v.space().degree(), t1.space().degree(), t2.space().degree()});
  const QuadRule& rule = get_rule(data_quadrature_degree(deg));
  double value = 0.0;
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const AffineMap map = mesh.affine_map(t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point ref = rule.points[q];
      const PointValue pv = v.eval(t, ref, map);
      const double s1 = t1.eval(t, ref, map).value;
      const double s2 = t2.eval(t, ref, map).value;
      const double r1 = s1 - alpha * pv.grad[0];
      const double r2 = s2 - alpha * pv.grad[1];
      const double integrand = s1 * s1 + s2 * s2 + r1 * r1 + r2 * r2 +
                               gamma * f(map.map(ref)) * pv.value;
      value += rule.weights[q] * map.det * integrand;
    }
  }
  return value;
}

}  // namespace twofield

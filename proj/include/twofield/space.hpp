/**
 * @file space.hpp
 * @brief Scalar P1/P2 Lagrange spaces on triangle meshes, continuous or
 *        discontinuous, and finite element functions living on them.
 */
#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "twofield/mesh.hpp"

namespace twofield {

enum class Continuity { Continuous, Discontinuous };

inline constexpr int kMaxLocalDofs = 6;

inline int local_dof_count(int degree) { return (degree + 1) * (degree + 2) / 2; }

/// Values and reference gradients of the local Lagrange basis at one point.
struct BasisEval {
  int n = 0;
  std::array<double, kMaxLocalDofs> values{};
  std::array<std::array<double, 2>, kMaxLocalDofs> ref_grads{};
};

/// Lagrange basis of degree 1 or 2 on the reference triangle. Local ordering:
/// vertices (0,0), (1,0), (0,1), then midpoints of edges 01, 12, 20.
inline BasisEval reference_basis(int degree, Point ref) {
  const double l0 = 1.0 - ref.x - ref.y;
  const double l1 = ref.x;
  const double l2 = ref.y;
  // d(lambda_i)/d(x, y)
  constexpr std::array<double, 2> g0{-1.0, -1.0};
  constexpr std::array<double, 2> g1{1.0, 0.0};
  constexpr std::array<double, 2> g2{0.0, 1.0};
  BasisEval b;
  if (degree == 1) {
    b.n = 3;
    b.values = {l0, l1, l2};
    b.ref_grads[0] = g0;
    b.ref_grads[1] = g1;
    b.ref_grads[2] = g2;
    return b;
  }
  if (degree == 2) {
    b.n = 6;
    const std::array<double, 3> l{l0, l1, l2};
    const std::array<std::array<double, 2>, 3> g{g0, g1, g2};
    for (int i = 0; i < 3; ++i) {
      b.values[i] = l[i] * (2.0 * l[i] - 1.0);
      for (int d = 0; d < 2; ++d) b.ref_grads[i][d] = (4.0 * l[i] - 1.0) * g[i][d];
    }
    for (int i = 0; i < 3; ++i) {
      const int j = (i + 1) % 3;
      b.values[3 + i] = 4.0 * l[i] * l[j];
      for (int d = 0; d < 2; ++d) {
        b.ref_grads[3 + i][d] = 4.0 * (g[i][d] * l[j] + l[i] * g[j][d]);
      }
    }
    return b;
  }
  throw std::invalid_argument("reference_basis: unsupported degree " + std::to_string(degree));
}

/// Reference coordinates of the local nodes.
inline std::vector<Point> reference_nodes(int degree) {
  if (degree == 1) return {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  if (degree == 2) {
    return {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {0.5, 0.0}, {0.5, 0.5}, {0.0, 0.5}};
  }
  throw std::invalid_argument("reference_nodes: unsupported degree " + std::to_string(degree));
}

/// Degree-k Lagrange space. The mesh must outlive the space.
class FunctionSpace {
 public:
  FunctionSpace(const TriangleMesh& mesh, int degree, Continuity continuity)
      : mesh_(&mesh), degree_(degree), continuity_(continuity) {
    if (degree != 1 && degree != 2) {
      throw std::invalid_argument("FunctionSpace: degree must be 1 or 2, got " +
                                  std::to_string(degree));
    }
    n_local_ = local_dof_count(degree);
    const std::size_t nt = mesh.n_triangles();
    dof_map_.resize(nt * n_local_);
    const auto nodes = reference_nodes(degree);

    if (continuity == Continuity::Discontinuous) {
      n_dofs_ = nt * n_local_;
      dof_coords_.resize(n_dofs_);
      for (std::size_t t = 0; t < nt; ++t) {
        const AffineMap m = mesh.affine_map(t);
        for (int i = 0; i < n_local_; ++i) {
          const std::size_t dof = t * n_local_ + i;
          dof_map_[dof] = static_cast<int>(dof);
          dof_coords_[dof] = m.map(nodes[i]);
        }
      }
      return;
    }

    const std::size_t nv = mesh.n_vertices();
    n_dofs_ = nv + (degree == 2 ? mesh.n_edges() : 0);
    dof_coords_.assign(mesh.vertices().begin(), mesh.vertices().end());
    if (degree == 2) {
      for (const auto& [a, b] : mesh.edges()) {
        dof_coords_.push_back(0.5 * (mesh.vertices()[a] + mesh.vertices()[b]));
      }
    }
    for (std::size_t t = 0; t < nt; ++t) {
      int* dofs = &dof_map_[t * n_local_];
      for (int i = 0; i < 3; ++i) dofs[i] = mesh.triangles()[t][i];
      if (degree == 2) {
        for (int i = 0; i < 3; ++i) dofs[3 + i] = static_cast<int>(nv) + mesh.triangle_edge(t, i);
      }
    }
    is_boundary_.assign(n_dofs_, 0);
    for (std::size_t d = 0; d < n_dofs_; ++d) {
      if (mesh.on_boundary(dof_coords_[d])) {
        is_boundary_[d] = 1;
        boundary_dofs_.push_back(static_cast<int>(d));
      }
    }
  }

  [[nodiscard]] const TriangleMesh& mesh() const { return *mesh_; }
  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] Continuity continuity() const { return continuity_; }
  [[nodiscard]] std::size_t n_dofs() const { return n_dofs_; }
  [[nodiscard]] int n_local() const { return n_local_; }
  [[nodiscard]] const std::vector<Point>& dof_coords() const { return dof_coords_; }

  /// Sorted Dirichlet DOFs; empty for discontinuous spaces.
  [[nodiscard]] const std::vector<int>& boundary_dofs() const { return boundary_dofs_; }
  [[nodiscard]] bool is_boundary_dof(int dof) const {
    return !is_boundary_.empty() && is_boundary_[dof] != 0;
  }

  /// Global DOFs of triangle `t` in local basis order.
  [[nodiscard]] std::array<int, kMaxLocalDofs> element_dofs(std::size_t t) const {
    std::array<int, kMaxLocalDofs> out{};
    for (int i = 0; i < n_local_; ++i) out[i] = dof_map_[t * n_local_ + i];
    return out;
  }

  [[nodiscard]] BasisEval eval_basis(Point ref) const { return reference_basis(degree_, ref); }

 private:
  const TriangleMesh* mesh_;
  int degree_;
  Continuity continuity_;
  int n_local_ = 0;
  std::size_t n_dofs_ = 0;
  std::vector<int> dof_map_;
  std::vector<Point> dof_coords_;
  std::vector<int> boundary_dofs_;
  std::vector<char> is_boundary_;
};

struct PointValue {
  double value = 0.0;
  std::array<double, 2> grad{0.0, 0.0};
};

/// Coefficient vector bound to a FunctionSpace. The space must outlive it.
class FeFunction {
 public:
  explicit FeFunction(const FunctionSpace& space)
      : space_(&space), coeffs_(space.n_dofs(), 0.0) {}

  FeFunction(const FunctionSpace& space, std::vector<double> coeffs)
      : space_(&space), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != space.n_dofs()) {
      throw std::invalid_argument("FeFunction: expected " + std::to_string(space.n_dofs()) +
                                  " coefficients, got " + std::to_string(coeffs_.size()));
    }
  }

  [[nodiscard]] const FunctionSpace& space() const { return *space_; }
  [[nodiscard]] const std::vector<double>& coefficients() const { return coeffs_; }
  [[nodiscard]] std::vector<double>& coefficients() { return coeffs_; }

  /// Value and physical gradient at reference point `ref` of triangle `t`.
  [[nodiscard]] PointValue eval(std::size_t t, Point ref) const {
    return eval(t, ref, space_->mesh().affine_map(t));
  }

  [[nodiscard]] PointValue eval(std::size_t t, Point ref, const AffineMap& map) const {
    const BasisEval b = space_->eval_basis(ref);
    const auto dofs = space_->element_dofs(t);
    PointValue out;
    std::array<double, 2> ref_grad{0.0, 0.0};
    for (int i = 0; i < b.n; ++i) {
      const double c = coeffs_[dofs[i]];
      out.value += c * b.values[i];
      ref_grad[0] += c * b.ref_grads[i][0];
      ref_grad[1] += c * b.ref_grads[i][1];
    }
    out.grad = map.push_gradient(ref_grad);
    return out;
  }

 private:
  const FunctionSpace* space_;
  std::vector<double> coeffs_;
};

inline PointValue eval_function(const FeFunction& f, std::size_t t, Point ref) {
  return f.eval(t, ref);
}

/// Nodal interpolant: coefficients are the callable's values at the DOF nodes.
template <typename F>
FeFunction interpolate(const FunctionSpace& space, F&& fn) {
  std::vector<double> coeffs(space.n_dofs());
  for (std::size_t d = 0; d < space.n_dofs(); ++d) coeffs[d] = fn(space.dof_coords()[d]);
  return FeFunction(space, std::move(coeffs));
}

}  // namespace twofield

/**
 * @file mesh.hpp
 * @brief Structured triangulations of axis-aligned rectangles with uniform
 *        red refinement and affine reference maps.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace twofield {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }

/// Axis-aligned rectangle [xmin, xmax] x [ymin, ymax].
struct BBox {
  double xmin = 0.0;
  double xmax = 1.0;
  double ymin = 0.0;
  double ymax = 1.0;

  [[nodiscard]] double area() const { return (xmax - xmin) * (ymax - ymin); }
};

using Triangle = std::array<int, 3>;
/// Undirected edge stored with the smaller vertex index first.
using Edge = std::pair<int, int>;

inline Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

/// Affine map F_T(xi) = origin + J xi from the reference triangle
/// (0,0),(1,0),(0,1) onto a physical triangle.
struct AffineMap {
  Point origin;
  std::array<std::array<double, 2>, 2> jac{};     // jac[r][c]
  double det = 0.0;
  std::array<std::array<double, 2>, 2> inv_t{};   // (J^{-1})^T

  [[nodiscard]] Point map(Point ref) const {
    return {origin.x + jac[0][0] * ref.x + jac[0][1] * ref.y,
            origin.y + jac[1][0] * ref.x + jac[1][1] * ref.y};
  }

  /// Physical gradient from a reference gradient.
  [[nodiscard]] std::array<double, 2> push_gradient(
      const std::array<double, 2>& ref_grad) const {
    return {inv_t[0][0] * ref_grad[0] + inv_t[0][1] * ref_grad[1],
            inv_t[1][0] * ref_grad[0] + inv_t[1][1] * ref_grad[1]};
  }
};

inline double signed_area(Point a, Point b, Point c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

class TriangleMesh {
 public:
  static constexpr double kBoundaryTol = 1e-12;

  TriangleMesh() = default;

  /// Validating constructor: every triangle must reference existing vertices
  /// and be counter-clockwise with positive area.
  TriangleMesh(std::vector<Point> vertices, std::vector<Triangle> triangles,
               BBox bbox, int level = 1)
      : vertices_(std::move(vertices)),
        triangles_(std::move(triangles)),
        bbox_(bbox),
        level_(level) {
    if (!(bbox_.xmax > bbox_.xmin) || !(bbox_.ymax > bbox_.ymin)) {
      throw std::invalid_argument("TriangleMesh: degenerate bounding box");
    }
    if (level_ < 1) {
      throw std::invalid_argument("TriangleMesh: level must be >= 1");
    }
    const int nv = static_cast<int>(vertices_.size());
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
      for (int v : triangles_[t]) {
        if (v < 0 || v >= nv) {
          throw std::invalid_argument("TriangleMesh: triangle " + std::to_string(t) +
                                      " references missing vertex " + std::to_string(v));
        }
      }
      const auto& tri = triangles_[t];
      if (!(signed_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]) > 0.0)) {
        throw std::invalid_argument("TriangleMesh: triangle " + std::to_string(t) +
                                    " is not counter-clockwise");
      }
    }
    classify_boundary();
    build_edges();
  }

  [[nodiscard]] const std::vector<Point>& vertices() const { return vertices_; }
  [[nodiscard]] const std::vector<Triangle>& triangles() const { return triangles_; }
  [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
  [[nodiscard]] const BBox& bbox() const { return bbox_; }
  [[nodiscard]] int level() const { return level_; }
  [[nodiscard]] std::size_t n_vertices() const { return vertices_.size(); }
  [[nodiscard]] std::size_t n_triangles() const { return triangles_.size(); }
  [[nodiscard]] std::size_t n_edges() const { return edges_.size(); }

  /// Sorted indices of vertices on the rectangle boundary.
  [[nodiscard]] const std::vector<int>& boundary_vertices() const { return boundary_vertices_; }
  [[nodiscard]] bool is_boundary_vertex(int v) const { return on_boundary_[v] != 0; }

  [[nodiscard]] bool on_boundary(Point p) const {
    return std::abs(p.x - bbox_.xmin) <= kBoundaryTol ||
           std::abs(p.x - bbox_.xmax) <= kBoundaryTol ||
           std::abs(p.y - bbox_.ymin) <= kBoundaryTol ||
           std::abs(p.y - bbox_.ymax) <= kBoundaryTol;
  }

  /// Global edge index of the local edge `local` of triangle `t`; local edge i
  /// joins local vertices i and (i+1)%3.
  [[nodiscard]] int triangle_edge(std::size_t t, int local) const {
    return triangle_edges_[t][local];
  }

  [[nodiscard]] int edge_index(int a, int b) const {
    auto it = edge_lookup_.find(make_edge(a, b));
    return it == edge_lookup_.end() ? -1 : it->second;
  }

  /// Number of triangles adjacent to each edge (1 on the boundary, 2 inside).
  [[nodiscard]] std::vector<int> edge_valence() const {
    std::vector<int> count(edges_.size(), 0);
    for (const auto& te : triangle_edges_) {
      for (int e : te) ++count[e];
    }
    return count;
  }

  [[nodiscard]] double triangle_area(std::size_t t) const {
    const auto& tri = triangles_.at(t);
    return signed_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
  }

  [[nodiscard]] AffineMap affine_map(std::size_t t) const {
    if (t >= triangles_.size()) {
      throw std::invalid_argument("affine_map: triangle index " + std::to_string(t) +
                                  " out of range");
    }
    const auto& tri = triangles_[t];
    const Point p0 = vertices_[tri[0]];
    const Point e1 = vertices_[tri[1]] - p0;
    const Point e2 = vertices_[tri[2]] - p0;
    AffineMap m;
    m.origin = p0;
    m.jac = {{{e1.x, e2.x}, {e1.y, e2.y}}};
    m.det = e1.x * e2.y - e2.x * e1.y;
    const double inv = 1.0 / m.det;
    // J^{-1} = inv * [[e2.y, -e2.x], [-e1.y, e1.x]]; store its transpose.
    m.inv_t = {{{e2.y * inv, -e1.y * inv}, {-e2.x * inv, e1.x * inv}}};
    return m;
  }

  /// Mesh size h: the longest edge.
  [[nodiscard]] double mesh_size() const {
    double h = 0.0;
    for (const auto& [a, b] : edges_) {
      const Point d = vertices_[b] - vertices_[a];
      h = std::max(h, std::hypot(d.x, d.y));
    }
    return h;
  }

 private:
  void classify_boundary() {
    on_boundary_.assign(vertices_.size(), 0);
    boundary_vertices_.clear();
    for (std::size_t v = 0; v < vertices_.size(); ++v) {
      if (on_boundary(vertices_[v])) {
        on_boundary_[v] = 1;
        boundary_vertices_.push_back(static_cast<int>(v));
      }
    }
  }

  // Edges are numbered in order of first appearance while sweeping triangles.
  void build_edges() {
    edges_.clear();
    edge_lookup_.clear();
    triangle_edges_.assign(triangles_.size(), {-1, -1, -1});
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
      for (int i = 0; i < 3; ++i) {
        const Edge e = make_edge(triangles_[t][i], triangles_[t][(i + 1) % 3]);
        auto [it, inserted] = edge_lookup_.try_emplace(e, static_cast<int>(edges_.size()));
        if (inserted) edges_.push_back(e);
        triangle_edges_[t][i] = it->second;
      }
    }
  }

  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  BBox bbox_;
  int level_ = 1;
  std::vector<char> on_boundary_;
  std::vector<int> boundary_vertices_;
  std::vector<Edge> edges_;
  std::map<Edge, int> edge_lookup_;
  std::vector<std::array<int, 3>> triangle_edges_;
};

/// nx x nx grid of cells over `bbox`, each cell cut along its SW-NE diagonal.
inline TriangleMesh build_rect_mesh(const BBox& bbox, int nx) {
  if (nx < 1) throw std::invalid_argument("build_rect_mesh: nx must be >= 1");
  if (!(bbox.xmax > bbox.xmin) || !(bbox.ymax > bbox.ymin)) {
    throw std::invalid_argument("build_rect_mesh: degenerate bounding box");
  }
  const int n1 = nx + 1;
  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>(n1) * n1);
  for (int j = 0; j < n1; ++j) {
    // Endpoints are pinned so boundary coordinates are exact.
    const double y = j == nx ? bbox.ymax
                             : bbox.ymin + (bbox.ymax - bbox.ymin) * j / nx;
    for (int i = 0; i < n1; ++i) {
      const double x = i == nx ? bbox.xmax
                               : bbox.xmin + (bbox.xmax - bbox.xmin) * i / nx;
      vertices.push_back({x, y});
    }
  }
  std::vector<Triangle> triangles;
  triangles.reserve(2 * static_cast<std::size_t>(nx) * nx);
  for (int j = 0; j < nx; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int sw = j * n1 + i;
      const int se = sw + 1;
      const int nw = sw + n1;
      const int ne = nw + 1;
      triangles.push_back({sw, se, ne});
      triangles.push_back({sw, ne, nw});
    }
  }
  return TriangleMesh(std::move(vertices), std::move(triangles), bbox, 1);
}

/// Red refinement: every triangle is split into four congruent children
/// through its edge midpoints. Parent vertices keep their indices.
inline TriangleMesh refine_uniform(const TriangleMesh& mesh) {
  std::vector<Point> vertices = mesh.vertices();
  const int nv = static_cast<int>(vertices.size());
  vertices.reserve(vertices.size() + mesh.n_edges());
  for (const auto& [a, b] : mesh.edges()) {
    const Point pa = mesh.vertices()[a];
    const Point pb = mesh.vertices()[b];
    vertices.push_back({0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)});
  }
  std::vector<Triangle> triangles;
  triangles.reserve(4 * mesh.n_triangles());
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const auto& [a, b, c] = mesh.triangles()[t];
    const int mab = nv + mesh.triangle_edge(t, 0);
    const int mbc = nv + mesh.triangle_edge(t, 1);
    const int mca = nv + mesh.triangle_edge(t, 2);
    triangles.push_back({a, mab, mca});
    triangles.push_back({mab, b, mbc});
    triangles.push_back({mca, mbc, c});
    triangles.push_back({mab, mbc, mca});
  }
  return TriangleMesh(std::move(vertices), std::move(triangles), mesh.bbox(),
                      mesh.level() + 1);
}

/// Mesh at `level` obtained from the nx x nx initial grid (level 1).
inline TriangleMesh build_level_mesh(const BBox& bbox, int nx, int level) {
  if (level < 1) throw std::invalid_argument("build_level_mesh: level must be >= 1");
  TriangleMesh mesh = build_rect_mesh(bbox, nx);
  for (int l = 1; l < level; ++l) mesh = refine_uniform(mesh);
  return mesh;
}

}  // namespace twofield

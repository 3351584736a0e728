/**
 * @file vtk.hpp
 * @brief Legacy ASCII VTK output of triangle meshes with point data.
 */
#pragma once

#include <cstddef>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "twofield/mesh.hpp"
#include "twofield/space.hpp"

namespace twofield {

struct PointField {
  std::string name;
  std::vector<double> values;  // one per mesh vertex
};

/// Vertex values of `f`. Discontinuous functions are averaged over the
/// triangles sharing the vertex.
inline std::vector<double> vertex_values(const FeFunction& f) {
  const TriangleMesh& mesh = f.space().mesh();
  std::vector<double> sum(mesh.n_vertices(), 0.0);
  std::vector<int> count(mesh.n_vertices(), 0);
  constexpr Point corners[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const AffineMap map = mesh.affine_map(t);
    for (int i = 0; i < 3; ++i) {
      const int v = mesh.triangles()[t][i];
      sum[v] += f.eval(t, corners[i], map).value;
      ++count[v];
    }
  }
  for (std::size_t v = 0; v < sum.size(); ++v) {
    if (count[v] > 0) sum[v] /= count[v];
  }
  return sum;
}

/// UNSTRUCTURED_GRID with one VTK_TRIANGLE (type 5) per mesh triangle.
inline void write_vtk(std::ostream& os, const TriangleMesh& mesh,
                      const std::vector<PointField>& fields,
                      const std::string& title = "twofield output") {
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << std::setprecision(9);
  os << "POINTS " << mesh.n_vertices() << " float\n";
  for (const Point& p : mesh.vertices()) os << p.x << ' ' << p.y << " 0\n";
  const std::size_t nt = mesh.n_triangles();
  os << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (const auto& tri : mesh.triangles()) {
    os << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  }
  os << "CELL_TYPES " << nt << '\n';
  for (std::size_t t = 0; t < nt; ++t) os << "5\n";
  if (fields.empty()) return;
  os << "POINT_DATA " << mesh.n_vertices() << '\n';
  for (const auto& field : fields) {
    if (field.values.size() != mesh.n_vertices()) {
      throw std::invalid_argument("write_vtk: field '" + field.name +
                                  "' does not have one value per vertex");
    }
    os << "SCALARS " << field.name << " float 1\nLOOKUP_TABLE default\n";
    for (double v : field.values) os << v << '\n';
  }
}

inline void write_vtk(const std::string& path, const TriangleMesh& mesh,
                      const std::vector<PointField>& fields) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_vtk: cannot open " + path);
  write_vtk(out, mesh, fields);
}

}  // namespace twofield

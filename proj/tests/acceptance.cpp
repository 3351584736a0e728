// Acceptance suite. Runs every exit criterion at its pinned tolerance and
// prints one PASS/FAIL line per criterion; exits non-zero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "twofield/twofield.hpp"

namespace tf = twofield;

namespace {

class Criterion {
 public:
  explicit Criterion(std::string title) : title_(std::move(title)) {}

  void check(bool ok, const std::string& what) {
    if (!ok) {
      passed_ = false;
      failures_.push_back(what);
    }
    ++checks_;
  }

  void note(const std::string& s) { notes_.push_back(s); }

  bool report(int id) const {
    std::printf("[%s] AC%d %s (%d checks)\n", passed_ ? "PASS" : "FAIL", id, title_.c_str(), checks_);
    for (const auto& n : notes_) std::printf("       %s\n", n.c_str());
    for (const auto& f : failures_) std::printf("       failed: %s\n", f.c_str());
    return passed_;
  }

 private:
  std::string title_;
  bool passed_ = true;
  int checks_ = 0;
  std::vector<std::string> notes_;
  std::vector<std::string> failures_;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

bool in_range(const tf::Rate& r, double lo, double hi) { return r && *r >= lo && *r <= hi; }

double rate_or_nan(const tf::Rate& r) { return r ? *r : std::nan(""); }

// Largest |sigma_h - scale grad u_h| over quadrature points of all triangles.
double gradient_mismatch(const tf::TwoFieldSolution& s, double scale) {
  const tf::TriangleMesh& mesh = s.u.space().mesh();
  const tf::QuadRule& rule = tf::get_rule(4);
  double worst = 0.0;
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const tf::AffineMap map = mesh.affine_map(t);
    for (const tf::Point& ref : rule.points) {
      const auto g = s.u.eval(t, ref, map).grad;
      worst = std::max(worst, std::abs(s.sigma1.eval(t, ref, map).value - scale * g[0]));
      worst = std::max(worst, std::abs(s.sigma2.eval(t, ref, map).value - scale * g[1]));
    }
  }
  return worst;
}

tf::TriangleMesh gaussian_mesh(int level) {
  const tf::ManufacturedProblem p = tf::paper_gaussian();
  return tf::build_level_mesh(p.bbox, p.initial_cells, level);
}

bool ac1_table_rates() {
  Criterion c("default study reproduces the reference convergence rates");
  const auto start = std::chrono::steady_clock::now();
  const tf::ConvergenceTable t = tf::run_convergence_study(tf::RunConfig{});
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.check(t.complete && t.levels.size() == 6, "all six levels solved");
  if (t.levels.size() != 6) return c.report(1);
  const std::size_t last = 5;
  c.check(in_range(t.rate_u_H1[last], 0.90, 1.10),
          fmt("H1(u) rate %.3f in [0.90, 1.10]", rate_or_nan(t.rate_u_H1[last])));
  c.check(in_range(t.rate_u_L2[last], 1.90, 2.10),
          fmt("L2(u) rate %.3f in [1.90, 2.10]", rate_or_nan(t.rate_u_L2[last])));
  for (std::size_t i : {std::size_t{4}, std::size_t{5}}) {
    c.check(in_range(t.rate_sigma1_L2[i], 1.80, 2.10),
            fmt("L2(sigma1) rate %.3f at level %.0f in [1.80, 2.10]",
                rate_or_nan(t.rate_sigma1_L2[i]), static_cast<double>(i + 1)));
    c.check(in_range(t.rate_sigma2_L2[i], 1.80, 2.10),
            fmt("L2(sigma2) rate %.3f at level %.0f in [1.80, 2.10]",
                rate_or_nan(t.rate_sigma2_L2[i]), static_cast<double>(i + 1)));
  }
  const double e6 = t.levels[last].err_u_L2;
  c.check(e6 >= 1e-5 && e6 <= 2e-4, fmt("level-6 L2(u) error %.5e in [1e-5, 2e-4]", e6));
  c.check(seconds < 60.0, fmt("runtime %.2f s < 60 s", seconds));
  c.note(fmt("final rates: H1 %.2f, L2 %.2f, sigma %.2f", rate_or_nan(t.rate_u_H1[last]),
             rate_or_nan(t.rate_u_L2[last]), rate_or_nan(t.rate_sigma1_L2[last])));
  c.note(fmt("level-6 L2(u) error %.5e, study time %.2f s", e6, seconds));
  return c.report(1);
}

bool ac2_discrete_equivalence() {
  Criterion c("discontinuous sigma space: two-field u_h = Galerkin u_h, sigma_h = grad u_h");
  const tf::ManufacturedProblem p = tf::paper_gaussian();
  double worst_u = 0.0;
  double worst_s = 0.0;
  for (int k : {1, 2}) {
    for (int level = 1; level <= 3; ++level) {
      const tf::TriangleMesh mesh = gaussian_mesh(level);
      const tf::TwoFieldProblem problem(mesh, k, tf::SigmaSpaceKind::Discontinuous, p, 2.0, -4.0);
      const tf::TwoFieldSolution s = tf::solve_two_field(problem);
      const tf::FunctionSpace space(mesh, k, tf::Continuity::Continuous);
      const auto [ug, rep] = tf::solve_galerkin(p, space);
      const double du = tf::max_abs_diff(s.u.coefficients(), ug.coefficients());
      const double ds = gradient_mismatch(s, 1.0);
      c.check(s.report.converged && rep.converged, "solves converged");
      c.check(du <= 1e-9, fmt("k=%.0f level %.0f: |u_2f - u_gal|_max = %.2e <= 1e-9", k, level, du));
      c.check(ds <= 1e-10, fmt("k=%.0f level %.0f: |sigma_h - grad u_h| = %.2e <= 1e-10", k, level, ds));
      worst_u = std::max(worst_u, du);
      worst_s = std::max(worst_s, ds);
    }
  }
  c.note(fmt("max |u diff| %.2e, max |sigma - grad u| %.2e", worst_u, worst_s));
  return c.report(2);
}

bool ac3_scaling_law() {
  Criterion c("scaling law u_h = (-gamma/alpha^2) u_h^Galerkin for general (alpha, gamma)");
  const tf::ManufacturedProblem p = tf::paper_gaussian();
  double worst = 0.0;
  for (int level = 1; level <= 3; ++level) {
    const tf::TriangleMesh mesh = gaussian_mesh(level);
    const tf::FunctionSpace space(mesh, 1, tf::Continuity::Continuous);
    const auto [ug, rep] = tf::solve_galerkin(p, space);
    for (auto [alpha, gamma] : {std::pair{1.0, -1.0}, std::pair{3.0, -9.0}}) {
      const tf::TwoFieldProblem problem(mesh, 1, tf::SigmaSpaceKind::Discontinuous, p, alpha, gamma);
      const tf::TwoFieldSolution s = tf::solve_two_field(problem);
      tf::Vector scaled = ug.coefficients();
      for (double& v : scaled) v *= -gamma / (alpha * alpha);
      const double d = tf::max_abs_diff(s.u.coefficients(), scaled);
      c.check(d <= 1e-9, fmt("alpha=%.0f gamma=%.0f: diff %.2e <= 1e-9", alpha, gamma, d));
      worst = std::max(worst, d);
    }
  }
  c.note(fmt("max diff %.2e over levels 1-3", worst));
  return c.report(3);
}

bool ac4_coercivity() {
  Criterion c("two-field matrices are SPD (dense Cholesky, smallest eigenvalue > 0)");
  for (int level : {1, 2}) {
    const tf::TriangleMesh mesh = gaussian_mesh(level);
    const tf::TwoFieldProblem problem(mesh, 1, tf::SigmaSpaceKind::EqualOrderContinuous,
                                      tf::paper_gaussian());
    const tf::AssembledSystem sys = tf::assemble_two_field(problem);
    const tf::DenseMatrix dense = sys.matrix.to_dense();
    bool factored = true;
    double lambda = 0.0;
    try {
      lambda = tf::Cholesky(dense).smallest_eigenvalue();
    } catch (const tf::NotPositiveDefinite&) {
      factored = false;
    }
    c.check(factored, fmt("level %.0f Cholesky succeeds", level));
    c.check(lambda > 0.0, fmt("level %.0f lambda_min = %.3e > 0", level, lambda));
    c.check(sys.matrix.symmetry_defect() <= 1e-12, "symmetric to 1e-12");
    c.note(fmt("level %.0f: n = %.0f, lambda_min = %.4e", level,
               static_cast<double>(sys.matrix.n_rows()), lambda));
  }
  return c.report(4);
}

bool ac5_minimisation() {
  Criterion c("K and J are minimised by the discrete solutions (20 random perturbations each)");
  const tf::ManufacturedProblem p = tf::paper_gaussian();
  const tf::TriangleMesh mesh = gaussian_mesh(2);
  std::mt19937 rng(2024);
  std::normal_distribution<double> n(0.0, 1.0);

  const tf::FunctionSpace space(mesh, 1, tf::Continuity::Continuous);
  const auto [ug, rep] = tf::solve_galerkin(p, space);
  const double k0 = tf::evaluate_energy_K(ug, p.source);
  for (int trial = 0; trial < 20; ++trial) {
    tf::FeFunction v = ug;
    for (std::size_t d = 0; d < space.n_dofs(); ++d) {
      if (!space.is_boundary_dof(static_cast<int>(d))) v.coefficients()[d] += 0.01 * n(rng);
    }
    const double k1 = tf::evaluate_energy_K(v, p.source);
    c.check(k0 <= k1, fmt("K trial %.0f: %.10f <= %.10f", trial, k0, k1));
  }

  const tf::TwoFieldProblem problem(mesh, 1, tf::SigmaSpaceKind::EqualOrderContinuous, p);
  const tf::TwoFieldSolution s = tf::solve_two_field(problem);
  const double j0 = tf::evaluate_functional_J(s.u, s.sigma1, s.sigma2, 2.0, -4.0, p.source);
  for (int trial = 0; trial < 20; ++trial) {
    tf::FeFunction u = s.u;
    tf::FeFunction s1 = s.sigma1;
    tf::FeFunction s2 = s.sigma2;
    for (std::size_t d = 0; d < u.coefficients().size(); ++d) {
      if (!problem.u_space().is_boundary_dof(static_cast<int>(d))) u.coefficients()[d] += 0.01 * n(rng);
    }
    for (double& v : s1.coefficients()) v += 0.01 * n(rng);
    for (double& v : s2.coefficients()) v += 0.01 * n(rng);
    const double j1 = tf::evaluate_functional_J(u, s1, s2, 2.0, -4.0, p.source);
    c.check(j0 <= j1, fmt("J trial %.0f: %.10f <= %.10f", trial, j0, j1));
  }
  c.note(fmt("K(u_h) = %.8f, J(u_h, sigma_h) = %.8f", k0, j0));
  return c.report(5);
}

bool ac6_patch_test() {
  Criterion c("linear patch reproduced exactly at every level for k = 1, 2");
  tf::RunConfig cfg;
  cfg.problem = "linear_patch";
  double worst = 0.0;
  for (int k : {1, 2}) {
    cfg.degree = k;
    const tf::ConvergenceTable t = tf::run_convergence_study(cfg);
    c.check(t.complete && t.levels.size() == 6, fmt("k=%.0f: six levels solved", k));
    for (const auto& r : t.levels) {
      const double e = std::max({r.err_u_H1, r.err_u_L2, r.err_sigma1_L2, r.err_sigma2_L2});
      c.check(e <= 1e-9, fmt("k=%.0f level %.0f: max error %.2e <= 1e-9", k, r.level, e));
      worst = std::max(worst, e);
    }
  }
  c.note(fmt("largest error %.2e", worst));
  return c.report(6);
}

bool ac7_quadratic_elements() {
  Criterion c("k = 2: quadratic solution exact, Gaussian rates 2 (H1) and 3 (L2)");
  tf::RunConfig cfg;
  cfg.degree = 2;
  cfg.levels = 4;
  cfg.problem = "quadratic";
  const tf::ConvergenceTable q = tf::run_convergence_study(cfg);
  double worst = 0.0;
  for (const auto& r : q.levels) {
    const double e = std::max({r.err_u_H1, r.err_u_L2, r.err_sigma1_L2, r.err_sigma2_L2});
    c.check(e <= 1e-9, fmt("quadratic level %.0f: max error %.2e <= 1e-9", r.level, e));
    worst = std::max(worst, e);
  }
  cfg.problem = "paper_gaussian";
  const tf::ConvergenceTable g = tf::run_convergence_study(cfg);
  c.check(g.complete && g.levels.size() == 4, "gaussian levels 1-4 solved");
  if (g.levels.size() == 4) {
    c.check(in_range(g.rate_u_H1[3], 1.85, 2.15),
            fmt("H1 rate %.3f in [1.85, 2.15]", rate_or_nan(g.rate_u_H1[3])));
    c.check(in_range(g.rate_u_L2[3], 2.8, 3.2),
            fmt("L2 rate %.3f in [2.80, 3.20]", rate_or_nan(g.rate_u_L2[3])));
    c.note(fmt("quadratic max error %.2e; gaussian rates H1 %.2f, L2 %.2f", worst,
               rate_or_nan(g.rate_u_H1[3]), rate_or_nan(g.rate_u_L2[3])));
  }
  return c.report(7);
}

bool ac8_infrastructure() {
  Criterion c("infrastructure: quadrature, basis, mesh, CG, determinism");
  // Quadrature exactness against a!b!/(a+b+2)!.
  for (int deg = 1; deg <= tf::kMaxQuadratureDegree; ++deg) {
    const tf::QuadRule& r = tf::get_rule(deg);
    double worst = 0.0;
    for (int a = 0; a <= deg; ++a) {
      for (int b = 0; a + b <= deg; ++b) {
        double s = 0.0;
        for (std::size_t q = 0; q < r.size(); ++q) {
          s += r.weights[q] * std::pow(r.points[q].x, a) * std::pow(r.points[q].y, b);
        }
        const double exact = std::tgamma(a + 1.0) * std::tgamma(b + 1.0) / std::tgamma(a + b + 3.0);
        worst = std::max(worst, std::abs(s - exact) / exact);
      }
    }
    c.check(worst <= 1e-13, fmt("quadrature degree %.0f: relative error %.2e <= 1e-13", deg, worst));
  }

  // Partition of unity.
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k : {1, 2}) {
    for (int i = 0; i < 20; ++i) {
      double x = u(rng), y = u(rng);
      if (x + y > 1.0) {
        x = 1.0 - x;
        y = 1.0 - y;
      }
      const tf::BasisEval b = tf::reference_basis(k, {x, y});
      double sum = 0.0;
      for (int j = 0; j < b.n; ++j) sum += b.values[j];
      c.check(std::abs(sum - 1.0) <= 1e-14, "partition of unity");
    }
  }

  // Mesh invariants.
  tf::TriangleMesh mesh = gaussian_mesh(1);
  for (int level = 1; level <= 6; ++level) {
    const long euler = static_cast<long>(mesh.n_vertices()) - static_cast<long>(mesh.n_edges()) +
                       static_cast<long>(mesh.n_triangles());
    double area = 0.0;
    bool ccw = true;
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
      area += mesh.triangle_area(t);
      ccw = ccw && mesh.triangle_area(t) > 0.0;
    }
    c.check(euler == 1, fmt("level %.0f: Euler V-E+T = %.0f", level, static_cast<double>(euler)));
    c.check(std::abs(area - 4.0) <= 1e-12, fmt("level %.0f: area %.15f", level, area));
    c.check(ccw, "all triangles counter-clockwise");
    c.check(mesh.n_triangles() == 32u * (1u << (2 * (level - 1))), "triangle count 2 n^2 4^(l-1)");
    if (level < 6) mesh = tf::refine_uniform(mesh);
  }

  // CG against dense Cholesky on the level-2 two-field system.
  {
    const tf::TriangleMesh m2 = gaussian_mesh(2);
    const tf::TwoFieldProblem problem(m2, 1, tf::SigmaSpaceKind::EqualOrderContinuous,
                                      tf::paper_gaussian());
    const tf::AssembledSystem sys = tf::assemble_two_field(problem);
    auto [x, rep] = tf::cg_solve(sys.matrix, sys.rhs);
    const double d = tf::max_abs_diff(x, tf::dense_solve(sys.matrix.to_dense(), sys.rhs));
    c.check(rep.converged && d <= 1e-9, fmt("CG vs dense: %.2e <= 1e-9", d));
  }

  // Deterministic CSV.
  tf::RunConfig cfg;
  cfg.levels = 4;
  const std::string a = tf::emit_table(tf::run_convergence_study(cfg), tf::TableFormat::Csv);
  const std::string b = tf::emit_table(tf::run_convergence_study(cfg), tf::TableFormat::Csv);
  c.check(a == b, "CSV identical across repeated runs");
  return c.report(8);
}

}  // namespace

int main() {
  const std::vector<std::function<bool()>> criteria{
      ac1_table_rates, ac2_discrete_equivalence, ac3_scaling_law, ac4_coercivity,
      ac5_minimisation, ac6_patch_test, ac7_quadratic_elements, ac8_infrastructure};
  int failed = 0;
  for (const auto& run : criteria) failed += run() ? 0 : 1;
  std::printf("%d of %zu acceptance criteria passed\n",
              static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

/**
 * @file quadrature.hpp
 * @brief Symmetric Gauss quadrature on the reference triangle
 *        {x > 0, y > 0, x + y < 1}.
 *
 * Point sets are the Dunavant rules of degree 1-10. The coefficients were
 * re-solved against the moment equations in extended precision, so every
 * rule integrates its monomials to round-off.
 */
#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "twofield/mesh.hpp"

namespace twofield {

struct QuadRule {
  std::vector<Point> points;    // reference coordinates
  std::vector<double> weights;  // sum to 1/2, the reference area
  int exactness_degree = 0;

  [[nodiscard]] std::size_t size() const { return points.size(); }
};

class UnsupportedDegree : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kMaxQuadratureDegree = 10;

namespace detail {

// Orbit weights below are normalised to a unit-area triangle.
inline void add_centroid(QuadRule& r, double w) {
  r.points.push_back({1.0 / 3.0, 1.0 / 3.0});
  r.weights.push_back(0.5 * w);
}

// Barycentric orbit (a, a, 1-2a).
inline void add_orbit3(QuadRule& r, double a, double w) {
  const double c = 1.0 - 2.0 * a;
  for (Point p : {Point{a, a}, Point{a, c}, Point{c, a}}) {
    r.points.push_back(p);
    r.weights.push_back(0.5 * w);
  }
}

// Barycentric orbit of all permutations of (a, b, 1-a-b).
inline void add_orbit6(QuadRule& r, double a, double b, double w) {
  const double c = 1.0 - a - b;
  for (Point p : {Point{a, b}, Point{b, a}, Point{a, c}, Point{c, a}, Point{b, c},
                  Point{c, b}}) {
    r.points.push_back(p);
    r.weights.push_back(0.5 * w);
  }
}

inline QuadRule make_dunavant(int degree) {
  QuadRule r;
  r.exactness_degree = degree;
  switch (degree) {
    case 1:
      add_centroid(r, 1.000000000000000000000000);
      break;
    case 2:
      add_orbit3(r, 0.1666666666666666666666667,
                 0.3333333333333333333333333);
      break;
    case 3:
      add_centroid(r, -0.5625000000000000000000000);
      add_orbit3(r, 0.2000000000000000000000000,
                 0.5208333333333333333333333);
      break;
    case 4:
      add_orbit3(r, 0.4459484909159648863183293,
                 0.2233815896780114656950070);
      add_orbit3(r, 0.09157621350977074345957146,
                 0.1099517436553218676383263);
      break;
    case 5:
      add_centroid(r, 0.2250000000000000000000000);
      add_orbit3(r, 0.4701420641051150897704412,
                 0.1323941527885061807376494);
      add_orbit3(r, 0.1012865073234563388009874,
                 0.1259391805448271525956839);
      break;
    case 6:
      add_orbit3(r, 0.2492867451709104212916386,
                 0.1167862757263793660252896);
      add_orbit3(r, 0.06308901449150222834033160,
                 0.05084490637020681692093681);
      add_orbit6(r, 0.3103524510337844054166077, 0.6365024991213986472301426,
                 0.08285107561837357519355346);
      break;
    case 7:
      add_centroid(r, -0.1495700444676817506297113);
      add_orbit3(r, 0.2603459660790398269262425,
                 0.1756152574332078117535194);
      add_orbit3(r, 0.06513010290221581153802591,
                 0.05334723560883849126998729);
      add_orbit6(r, 0.3128654960048738614066445, 0.6384441885698097268003340,
                 0.07711376089025714025986519);
      break;
    case 8:
      add_centroid(r, 0.1443156076777871682510911);
      add_orbit3(r, 0.1705693077517602066222935,
                 0.1032173705347182502817916);
      add_orbit3(r, 0.05054722831703097545842355,
                 0.03245849762319808031092593);
      add_orbit3(r, 0.4592925882927231560288155,
                 0.09509163426728462479389610);
      add_orbit6(r, 0.2631128296346381134217858, 0.7284923929554042812410004,
                 0.02723031417443499426484469);
      break;
    case 9:
      add_centroid(r, 0.09713579628279883381924198);
      add_orbit3(r, 0.4896825191987376277837069,
                 0.03133470022713907053685483);
      add_orbit3(r, 0.4370895914929366372699304,
                 0.07782754100477427931673936);
      add_orbit3(r, 0.1882035356190327302409613,
                 0.07964773892721025303289177);
      add_orbit3(r, 0.04472951339445270986510659,
                 0.02557767565869803126167880);
      add_orbit6(r, 0.2219629891607656956751025, 0.7411985987844980206900799,
                 0.04328353937728937728937729);
      break;
    case 10:
      add_centroid(r, 0.09081799038275358009528660);
      add_orbit3(r, 0.4855776333836573773675075,
                 0.03672595775646670471700607);
      add_orbit3(r, 0.1094815754850370547954586,
                 0.04532105943552793478260564);
      add_orbit6(r, 0.1417072194148799547566833, 0.3079398387641209501651550,
                 0.07275791684542010860431518);
      add_orbit6(r, 0.02500353476268638607398848, 0.2466725606399026939172765,
                 0.02832724253105748483673706);
      add_orbit6(r, 0.009540815400299457580152810, 0.06680325101220026577354021,
                 0.009421666963732823459927471);
      break;
    default:
      throw UnsupportedDegree("no stored rule of degree " + std::to_string(degree));
  }
  return r;
}

}  // namespace detail

/// Smallest stored rule exact for polynomials of total degree <= `degree`.
inline const QuadRule& get_rule(int degree) {
  if (degree > kMaxQuadratureDegree) {
    throw UnsupportedDegree("get_rule: degree " + std::to_string(degree) +
                            " exceeds " + std::to_string(kMaxQuadratureDegree));
  }
  if (degree < 1) degree = 1;
  static const std::array<QuadRule, kMaxQuadratureDegree> rules = [] {
    std::array<QuadRule, kMaxQuadratureDegree> rs;
    for (int d = 1; d <= kMaxQuadratureDegree; ++d) rs[d - 1] = detail::make_dunavant(d);
    return rs;
  }();
  return rules[degree - 1];
}

/// Sum of w_q det(J) f(F_T(xi_q)).
template <typename F>
double integrate_on_triangle(const QuadRule& rule, const AffineMap& map, F&& integrand) {
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    sum += rule.weights[q] * integrand(map.map(rule.points[q]));
  }
  return sum * map.det;
}

/// Integral over the whole mesh, accumulated in element order.
template <typename F>
double integrate_on_mesh(const QuadRule& rule, const TriangleMesh& mesh, F&& integrand) {
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    sum += integrate_on_triangle(rule, mesh.affine_map(t), integrand);
  }
  return sum;
}

}  // namespace twofield

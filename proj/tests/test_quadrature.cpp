#include <cmath>

#include "doctest.h"
#include "tcmom/quadrature.hpp"

using namespace tcmom;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Exact integral of x^p y^q over the unit right triangle (0,0),(1,0),(0,1):
// p! q! / (p+q+2)!.
double unit_tri_monomial(int p, int q) {
  return factorial(p) * factorial(q) / factorial(p + q + 2);
}

double quad_sum(const std::vector<QuadPoint>& qp, double (*f)(double, double)) {
  double s = 0.0;
  for (const auto& pt : qp) s += pt.w * f(pt.r.x, pt.r.y);
  return s;
}

}  // namespace

TEST_CASE("7-point rule weights sum to the triangle area") {
  const Vec3 a{1.0, -2.0, 0.5}, b{4.0, 0.0, -1.0}, c{2.0, 3.0, 2.0};
  const double area = 0.5 * cross(b - a, c - a).norm();
  for (int subdiv : {1, 2, 3, 5}) {
    const auto qp = triangle_quadrature(a, b, c, subdiv);
    CHECK(qp.size() == static_cast<size_t>(7 * subdiv * subdiv));
    double s = 0.0;
    for (const auto& pt : qp) s += pt.w;
    CHECK(s == doctest::Approx(area).epsilon(1e-13));
  }
}

TEST_CASE("7-point rule is exact through degree 5") {
  const Vec3 a{0, 0, 0}, b{1, 0, 0}, c{0, 1, 0};
  const auto qp = triangle_quadrature(a, b, c, 1);
  for (int p = 0; p <= 5; ++p)
    for (int q = 0; p + q <= 5; ++q) {
      double s = 0.0;
      for (const auto& pt : qp)
        s += pt.w * std::pow(pt.r.x, p) * std::pow(pt.r.y, q);
      CHECK(s == doctest::Approx(unit_tri_monomial(p, q)).epsilon(1e-12));
    }
}

TEST_CASE("subdivision refines a smooth non-polynomial integrand") {
  const Vec3 a{0, 0, 0}, b{1, 0, 0}, c{0, 1, 0};
  const double exact = std::exp(1.0) - 2.0;  // integral of e^x over the triangle
  auto f = [](double x, double) { return std::exp(x); };
  const double e1 = std::abs(quad_sum(triangle_quadrature(a, b, c, 1), f) - exact);
  const double e4 = std::abs(quad_sum(triangle_quadrature(a, b, c, 4), f) - exact);
  CHECK(e4 < e1);
  CHECK(e4 < 1e-10);
}

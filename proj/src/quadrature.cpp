#include "tcmom/quadrature.hpp"

namespace tcmom {

const std::array<TriQuadPoint, 7>& tri_quad_7() {
  static const std::array<TriQuadPoint, 7> pts = [] {
    const double a1 = 0.0597158717897698, b1 = 0.4701420641051151;
    const double w1 = 0.1323941527885062;
    const double a2 = 0.7974269853530873, b2 = 0.1012865073234563;
    const double w2 = 0.1259391805448271;
    std::array<TriQuadPoint, 7> p{};
    p[0] = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225};
    p[1] = {a1, b1, b1, w1};
    p[2] = {b1, a1, b1, w1};
    p[3] = {b1, b1, a1, w1};
    p[4] = {a2, b2, b2, w2};
    p[5] = {b2, a2, b2, w2};
    p[6] = {b2, b2, a2, w2};
    return p;
  }();
  return pts;
}

std::vector<QuadPoint> triangle_quadrature(const Vec3& a, const Vec3& b,
                                           const Vec3& c, int subdiv) {
  const double area = 0.5 * (b - a).cross(c - a).norm();
  std::vector<QuadPoint> out;
  const auto& rule = tri_quad_7();
  if (subdiv <= 1) {
    out.reserve(rule.size());
    for (const auto& q : rule)
      out.push_back({a * q.b0 + b * q.b1 + c * q.b2, q.w * area});
    return out;
  }
  // Uniform refinement into subdiv^2 congruent subtriangles.
  const int n = subdiv;
  const double sub_area = area / (n * n);
  out.reserve(rule.size() * n * n);
  const auto bary = [&](double u, double v) {
    return a * (1.0 - u - v) + b * u + c * v;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n - i; ++j) {
      const double u0 = double(i) / n, v0 = double(j) / n, s = 1.0 / n;
      // upright subtriangle
      const Vec3 p0 = bary(u0, v0), p1 = bary(u0 + s, v0), p2 = bary(u0, v0 + s);
      for (const auto& q : rule)
        out.push_back({p0 * q.b0 + p1 * q.b1 + p2 * q.b2, q.w * sub_area});
      // inverted companion
      if (j < n - i - 1) {
        const Vec3 r0 = bary(u0 + s, v0), r1 = bary(u0 + s, v0 + s),
                   r2 = bary(u0, v0 + s);
        for (const auto& q : rule)
          out.push_back({r0 * q.b0 + r1 * q.b1 + r2 * q.b2, q.w * sub_area});
      }
    }
  }
  return out;
}

}  // namespace tcmom
